"""
Escrita dos artefatos: CSV e JSON determinísticos, e as exportações
derivadas em Excel e PDF (sem garantia de bytes idênticos).
"""
import csv
import json
import logging
import math
from pathlib import Path

logger = logging.getLogger(__name__)


def fmt(valor):
    """Formato estável das células do CSV"""
    if isinstance(valor, bool):
        return 'true' if valor else 'false'
    if isinstance(valor, float):
        if math.isnan(valor):
            return 'nan'
        if math.isinf(valor):
            return 'inf' if valor > 0 else '-inf'
        return '%.12g' % valor
    if valor is None:
        return ''
    if isinstance(valor, (list, tuple)):
        return ' '.join(fmt(v) for v in valor)
    return str(valor)


def preparar_caminho(caminho):
    caminho = Path(caminho)
    caminho.parent.mkdir(parents=True, exist_ok=True)
    return caminho


def write_csv(caminho, metadados, colunas, linhas):
    """Cabeçalho `# chave: valor` com a configuração resolvida, depois a tabela"""
    caminho = preparar_caminho(caminho)
    with caminho.open('w', encoding='utf-8', newline='') as f:
        for chave, valor in metadados.items():
            f.write(f'# {chave}: {fmt(valor)}\n')
        escritor = csv.writer(f, delimiter=',', lineterminator='\n', quoting=csv.QUOTE_MINIMAL)
        escritor.writerow(colunas)
        for linha in linhas:
            escritor.writerow([fmt(v) for v in linha])
    logger.info('CSV gravado em %s (%d linhas)', caminho, len(linhas))
    return caminho


def limpar_json(valor):
    if isinstance(valor, float) and not math.isfinite(valor):
        return None
    if isinstance(valor, dict):
        return {str(k): limpar_json(v) for k, v in valor.items()}
    if isinstance(valor, (list, tuple)):
        return [limpar_json(v) for v in valor]
    return valor


def summary_payload(cfg, resultados):
    """{artifact_version, config, seed, resultados}"""
    eco = cfg.echo()
    return {
        'artifact_version': eco['artifact_version'],
        'config': eco,
        'seed': str(cfg.seed),
        'resultados': resultados,
    }


def dumps(payload):
    return json.dumps(limpar_json(payload), sort_keys=True, indent=2, ensure_ascii=False) + '\n'


def write_json(caminho, payload):
    caminho = preparar_caminho(caminho)
    caminho.write_text(dumps(payload), encoding='utf-8')
    logger.info('JSON gravado em %s', caminho)
    return caminho


def write_text(caminho, texto):
    caminho = preparar_caminho(caminho)
    caminho.write_text(texto, encoding='utf-8')
    return caminho


# ==================== EXPORTAÇÕES DERIVADAS ====================

def write_xlsx(caminho, titulo, colunas, linhas):
    """Planilha com cabeçalho estilizado"""
    from openpyxl import Workbook
    from openpyxl.styles import Alignment, Border, Font, PatternFill, Side

    wb = Workbook()
    ws = wb.active
    ws.title = titulo[:31]

    # Estilos
    header_fill = PatternFill(start_color='4472C4', end_color='4472C4', fill_type='solid')
    header_font = Font(bold=True, color='FFFFFF', size=12)
    border = Border(
        left=Side(style='thin'),
        right=Side(style='thin'),
        top=Side(style='thin'),
        bottom=Side(style='thin')
    )

    for col, nome in enumerate(colunas, 1):
        cell = ws.cell(row=1, column=col, value=nome)
        cell.fill = header_fill
        cell.font = header_font
        cell.alignment = Alignment(horizontal='center', vertical='center')
        cell.border = border
        ws.column_dimensions[cell.column_letter].width = max(12, len(nome) + 4)

    for row, linha in enumerate(linhas, 2):
        for col, valor in enumerate(linha, 1):
            if isinstance(valor, float) and not math.isfinite(valor):
                valor = fmt(valor)
            cell = ws.cell(row=row, column=col, value=valor)
            cell.border = border
            if isinstance(valor, float):
                cell.number_format = '0.000000'

    caminho = preparar_caminho(caminho)
    wb.save(caminho)
    logger.info('planilha gravada em %s', caminho)
    return caminho


def write_table_pdf(caminho, titulo, colunas, linhas, linhas_por_pag=30):
    """Tabela em PDF paisagem, paginada, com cabeçalho repetido"""
    from reportlab.lib import colors
    from reportlab.lib.pagesizes import A4, landscape
    from reportlab.lib.units import cm
    from reportlab.pdfgen import canvas
    from reportlab.platypus import Table, TableStyle

    caminho = preparar_caminho(caminho)
    pagesize = landscape(A4)
    p = canvas.Canvas(str(caminho), pagesize=pagesize)
    width, height = pagesize
    MARGEM = 1.5 * cm
    cor_cinza = colors.Color(0.3, 0.3, 0.3)

    estilo = TableStyle([
        ('BACKGROUND', (0, 0), (-1, 0), cor_cinza),
        ('TEXTCOLOR', (0, 0), (-1, 0), colors.white),
        ('FONTNAME', (0, 0), (-1, 0), 'Helvetica-Bold'),
        ('FONTSIZE', (0, 0), (-1, 0), 7),
        ('FONTNAME', (0, 1), (-1, -1), 'Helvetica'),
        ('FONTSIZE', (0, 1), (-1, -1), 6),
        ('ALIGN', (0, 0), (-1, -1), 'RIGHT'),
        ('GRID', (0, 0), (-1, -1), 0.5, colors.grey),
        ('ROWBACKGROUNDS', (0, 1), (-1, -1), [colors.white, colors.Color(0.95, 0.95, 0.95)])
    ])

    dados = [[fmt(v) for v in linha] for linha in linhas]
    pagina = 1
    inicio = 0
    while True:
        y = height - 1 * cm
        p.setFont('Helvetica-Bold', 10)
        p.drawString(MARGEM, y, titulo)
        p.drawRightString(width - MARGEM, y, f'Pág. {pagina}')
        tab = Table([list(colunas)] + dados[inicio:inicio + linhas_por_pag])
        tab.setStyle(estilo)
        tab.wrapOn(p, width - 2 * MARGEM, height)
        tab.drawOn(p, MARGEM, y - 0.5 * cm - tab._height)
        inicio += linhas_por_pag
        if inicio >= len(dados):
            break
        p.showPage()
        pagina += 1
    p.save()
    logger.info('PDF gravado em %s (%d páginas)', caminho, pagina)
    return caminho
