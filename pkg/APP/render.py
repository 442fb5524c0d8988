"""
Figuras SVG das tesselações no disco de Poincaré: lados como arcos de
círculos ortogonais ao círculo unitário, células opcionalmente pintadas.
"""
import io
import logging
import math
from dataclasses import dataclass

import numpy as np

from . import hypmath
from .voronoi import RimArc, Side

logger = logging.getLogger(__name__)

LARGURA_MINIMA = 64
LARGURA_MAXIMA = 8192
MARGEM = 0.02
_COLINEAR = 1e-12


@dataclass(frozen=True)
class RenderSpec:
    width_px: int = 800
    height_px: int = 800
    stroke_width: float = 1.0
    palette: tuple = ('#000000', '#ffffff')
    show_nuclei: bool = False

    def __post_init__(self):
        for valor in (self.width_px, self.height_px):
            if not LARGURA_MINIMA <= int(valor) <= LARGURA_MAXIMA:
                raise ValueError(f'dimensão {valor} fora de [{LARGURA_MINIMA}, {LARGURA_MAXIMA}]')
        if self.stroke_width <= 0:
            raise ValueError('espessura do traço precisa ser positiva')
        if len(self.palette) != 2:
            raise ValueError('a paleta tem exatamente duas cores')

    @property
    def scale(self):
        return (1 - MARGEM) * min(self.width_px, self.height_px) / 2

    def pixel(self, z):
        """Disco → pixel (eixo y para baixo)"""
        return self.width_px / 2 + self.scale * z[0], self.height_px / 2 - self.scale * z[1]


def _num(x):
    # sem '-0.000000'
    return f'{round(float(x), 6) + 0.0:.6f}'


def geodesic_arc(a, b):
    """(centro, raio) do círculo ortogonal ao unitário por a e b; None quando é um diâmetro"""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    det = a[0] * b[1] - a[1] * b[0]
    if abs(det) <= _COLINEAR:
        return None
    # c·a = (|a|²+1)/2 e c·b = (|b|²+1)/2
    lado = np.array([(a @ a + 1) / 2, (b @ b + 1) / 2])
    centro = np.linalg.solve(np.array([a, b]), lado)
    return centro, math.sqrt(max(0.0, centro @ centro - 1))


def _segmento(a, b, spec):
    """Comando de caminho do ponto a ao ponto b (coordenadas do disco)"""
    x, y = spec.pixel(b)
    arco = geodesic_arc(a, b)
    if arco is None or arco[1] * spec.scale > 1e7:
        return f'L {_num(x)} {_num(y)}'
    centro, raio = arco
    giro = (a[0] - centro[0]) * (b[1] - centro[1]) - (a[1] - centro[1]) * (b[0] - centro[0])
    varredura = 0 if giro > 0 else 1
    r = _num(raio * spec.scale)
    return f'A {r} {r} 0 0 {varredura} {_num(x)} {_num(y)}'


def _arco_do_aro(arco, spec):
    """Arco do aro (anti-horário), quebrado em metades para varreduras de até 2π"""
    rd = math.tanh(arco.radius / 2) * spec.scale
    partes = max(1, math.ceil(arco.sweep / math.pi))
    comandos = []
    for k in range(1, partes + 1):
        theta = arco.theta0 + arco.sweep * k / partes
        x, y = spec.pixel((math.tanh(arco.radius / 2) * math.cos(theta), math.tanh(arco.radius / 2) * math.sin(theta)))
        comandos.append(f'A {_num(rd)} {_num(rd)} 0 0 0 {_num(x)} {_num(y)}')
    return comandos


def _disco(p):
    return hypmath.to_disk(p)


def cell_path(piece, spec):
    """Dado 'd' do contorno de uma célula recortada"""
    if not piece.boundary:
        return ''
    inicio = spec.pixel(_disco(piece.boundary[0].start))
    comandos = [f'M {_num(inicio[0])} {_num(inicio[1])}']
    for elemento in piece.boundary:
        if isinstance(elemento, Side):
            comandos.append(_segmento(_disco(elemento.start), _disco(elemento.end), spec))
        elif isinstance(elemento, RimArc):
            comandos.extend(_arco_do_aro(elemento, spec))
    comandos.append('Z')
    return ' '.join(comandos)


def render_svg(t, colors=None, spec=None, rim=None):
    """SVG 1.1 da tesselação; mesma entrada, mesmos bytes"""
    spec = spec or RenderSpec()
    preto, branco = spec.palette
    cx, cy = spec.width_px / 2, spec.height_px / 2
    linhas = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{spec.width_px}" height="{spec.height_px}" '
        f'viewBox="0 0 {spec.width_px} {spec.height_px}">',
        f'<circle cx="{_num(cx)}" cy="{_num(cy)}" r="{_num(spec.scale)}" fill="{branco}" stroke="{preto}" '
        f'stroke-width="{_num(spec.stroke_width)}"/>',
        f'<g stroke="{preto}" stroke-width="{_num(spec.stroke_width)}" stroke-linejoin="round">',
    ]
    for piece in t.cells:
        d = cell_path(piece, spec)
        if not d:
            continue
        if colors is None:
            preenchimento = 'none'
        else:
            preenchimento = preto if colors[piece.index] else branco
        linhas.append(f'<path d="{d}" fill="{preenchimento}"/>')
    linhas.append('</g>')
    if rim is not None:
        linhas.append(f'<circle cx="{_num(cx)}" cy="{_num(cy)}" r="{_num(math.tanh(rim / 2) * spec.scale)}" '
                      f'fill="none" stroke="{preto}" stroke-width="{_num(spec.stroke_width)}"/>')
    if spec.show_nuclei:
        raio = _num(1.5 * spec.stroke_width)
        linhas.append(f'<g fill="{preto}">')
        for p in np.asarray(t.nuclei).reshape(-1, 3):
            x, y = spec.pixel(p[1:] / (1 + p[0]))
            linhas.append(f'<circle cx="{_num(x)}" cy="{_num(y)}" r="{raio}"/>')
        linhas.append('</g>')
    linhas.append('</svg>')
    logger.debug('SVG com %d células', len(t.cells))
    return '\n'.join(linhas) + '\n'


def svg_to_pdf(svg_text, path):
    """Converte o SVG em PDF (svglib + reportlab); sem garantia de bytes idênticos"""
    from reportlab.graphics import renderPDF
    from svglib.svglib import svg2rlg

    desenho = svg2rlg(io.BytesIO(svg_text.encode('utf-8')))
    if desenho is None:
        raise ValueError('SVG inválido para conversão')
    renderPDF.drawToFile(desenho, str(path))
    return path
