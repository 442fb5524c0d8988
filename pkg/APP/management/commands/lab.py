"""
Comando `lab`: um subcomando por experimento.

    python manage.py lab typical-cell --lambda 0.5 --replicas 10000 --seed 42 --out tc.csv
    python manage.py lab tessellate --lambda 1 --radius 8 --seed 7 --svg fig.svg --color

Saída 0 em sucesso, 1 em erro de uso/configuração/cálculo, 2 quando o modo
--check encontra uma faixa de aceitação violada.
"""
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml
from django.core.management import call_command
from django.core.management.base import BaseCommand, CommandError
from django.db import DatabaseError
from django.template.loader import render_to_string
from rest_framework import serializers

from APP import exporters, hypmath
from APP.config import lab_settings, output_path, resolve_config
from APP.exceptions import LabError
from APP.graphs import (NAMED_GRAPHS, cheeger_ratio, exact_cheeger, half_coloring_estimate,
                        inter_region_edges, random_regular, region_coloring_estimate,
                        region_variance_bound, spanning_tree_regions)
from APP.isokawa import (DENSITY_LIMIT, RATIO_LIMIT, MCEstimate, density_experiment,
                         isokawa_perimeter_bound, planar_boundary_density, typical_cell_experiment)
from APP.lemmacheck import run_lemmas
from APP.models import ExperimentRun
from APP.render import RenderSpec, render_svg, svg_to_pdf
from APP.sampler import poisson_disk
from APP.serializers import (ColoringOutcomeSerializer, ColoringSummarySerializer,
                             ExperimentRunSerializer, GraphColoringReportSerializer,
                             LemmaReportSerializer, MCEstimateSerializer, RatioRowSerializer,
                             VarianceCheckSerializer)
from APP.surface import (bolza, coloring_experiment, coloring_variance, locality_experiment,
                         summarize_coloring, surface_voronoi)
from APP.voronoi import RimArc, boundary_length_in, tessellate_window

logger = logging.getLogger(__name__)


# Chaves das flags que entram na configuração
CHAVES_CONFIG = ('seed', 'workers', 'out', 'check', 'xlsx', 'pdf', 'lambdas', 'replicas', 'radius',
                 'subwindow', 'svg', 'color', 'draws', 'trials', 'colorings', 'n', 'd', 's', 'graph',
                 'which', 'samples', 'width', 'height', 'stroke', 'nuclei')

FAIXA_RELATIVA = 0.05
SIGMAS_CHECK = 4.0
TOL_SOMA_AREAS = 1e-6


@dataclass
class Resultado:
    """O que cada subcomando devolve ao handle"""
    saidas: list = field(default_factory=list)
    destaques: list = field(default_factory=list)
    falhas: list = field(default_factory=list)


def _linha_unica(erro):
    if isinstance(erro, serializers.ValidationError):
        texto = json.dumps(erro.detail, ensure_ascii=False, sort_keys=True)
    else:
        texto = str(erro)
    return ' '.join(texto.split())


def run(argv, stdout=None, stderr=None):
    """Executa `lab` com argv e devolve o código de saída, sem levantar"""
    stderr = stderr or sys.stderr
    try:
        call_command('lab', *[str(a) for a in argv], stdout=stdout or sys.stdout, stderr=stderr)
    except CommandError as e:
        stderr.write(f'erro: {e}\n')
        return e.returncode
    return 0


class Command(BaseCommand):
    help = 'Experimentos do laboratório Voronoi hiperbólico (CSV, JSON e SVG determinísticos)'

    # ==================== ARGUMENTOS ====================

    def add_arguments(self, parser):
        sub = parser.add_subparsers(dest='subcomando', required=True)

        def novo(nome, ajuda):
            p = sub.add_parser(nome, help=ajuda)
            p.add_argument('--seed', help="semente 'M' ou 'M:S'")
            p.add_argument('--workers', type=int)
            p.add_argument('--config', dest='config_file', help='arquivo YAML de configuração')
            p.add_argument('--out', help='CSV de saída (o JSON vai ao lado, com extensão .json)')
            p.add_argument('--check', action='store_true', default=None,
                           help='confere as faixas de aceitação (saída 2 em violação)')
            p.add_argument('--xlsx', help='planilha derivada')
            p.add_argument('--pdf', help='PDF derivado')
            return p

        def lambdas(p):
            p.add_argument('--lambda', dest='lambdas', type=float, nargs='+')

        p = novo('typical-cell', 'médias de área e perímetro da célula típica')
        lambdas(p)
        p.add_argument('--replicas', type=int)

        p = novo('isokawa-ref', 'quadratura do perímetro esperado')
        lambdas(p)

        p = novo('density', 'razão perímetro/área e densidade de fronteira para λ decrescente')
        lambdas(p)
        p.add_argument('--replicas', type=int)

        p = novo('tessellate', 'tesselação recortada a um disco')
        lambdas(p)
        p.add_argument('--radius', type=float)
        p.add_argument('--subwindow', type=float)
        p.add_argument('--svg')
        p.add_argument('--color', action='store_true', default=None)

        p = novo('surface', 'densidade de fronteira na superfície de Bolza')
        lambdas(p)
        p.add_argument('--draws', type=int)

        p = novo('color', 'coloração aleatória das células na superfície de Bolza')
        lambdas(p)
        p.add_argument('--trials', type=int)
        p.add_argument('--colorings', type=int)

        p = novo('graph', 'aquecimento em grafos d-regulares aleatórios')
        p.add_argument('--n', type=int)
        p.add_argument('--d', type=int)
        p.add_argument('--s', type=int)
        p.add_argument('--trials', type=int)

        p = novo('exact-cheeger', 'constante de Cheeger exata de grafos pequenos')
        p.add_argument('--graph')
        p.add_argument('--n', type=int)
        p.add_argument('--d', type=int)
        p.add_argument('--trials', type=int)

        p = novo('lemma', 'verificadores numéricos dos lemas')
        p.add_argument('--which')
        p.add_argument('--samples', type=int)

        p = novo('render', 'figura SVG de uma tesselação')
        lambdas(p)
        p.add_argument('--radius', type=float)
        p.add_argument('--width', type=int)
        p.add_argument('--height', type=int)
        p.add_argument('--stroke', type=float)
        p.add_argument('--svg')
        p.add_argument('--color', action='store_true', default=None)
        p.add_argument('--nuclei', action='store_true', default=None)

        p = sub.add_parser('runs', help='últimas execuções registradas (JSON)')
        p.add_argument('--limit', type=int, default=20)

    # ==================== EXECUÇÃO ====================

    def handle(self, *args, **options):
        comando = options['subcomando']
        if comando == 'runs':
            return self._runs(options)

        flags = {k: options[k] for k in CHAVES_CONFIG if k in options}
        try:
            cfg = resolve_config(comando, flags, options.get('config_file'))
        except serializers.ValidationError as e:
            raise CommandError(f'configuração inválida: {_linha_unica(e)}', returncode=1)
        except (OSError, yaml.YAMLError) as e:
            raise CommandError(f'arquivo de configuração: {_linha_unica(e)}', returncode=1)

        hypmath.reset_tolerances()
        if cfg.tolerancias:
            hypmath.configure_tolerances(**cfg.tolerancias)
        metodo = getattr(self, '_cmd_' + comando.replace('-', '_'))
        try:
            resultado = metodo(cfg)
        except (LabError, ValueError, OSError) as e:
            self._registrar(cfg, 'erro', [])
            raise CommandError(f'{comando}: {_linha_unica(e)}', returncode=1)
        finally:
            hypmath.reset_tolerances()

        veredito = 'falha' if resultado.falhas else 'ok'
        saidas = [str(s) for s in resultado.saidas]
        self._registrar(cfg, veredito, saidas)
        self.stdout.write(render_to_string('APP/run_summary.txt', {
            'comando': comando, 'veredito': veredito, 'seed': str(cfg.seed),
            'destaques': resultado.destaques, 'saidas': saidas,
        }))
        if cfg.get('check') and resultado.falhas:
            for linha in resultado.falhas:
                self.stdout.write(f'FORA DA FAIXA: {linha}')
            raise CommandError(f'{comando}: {len(resultado.falhas)} faixa(s) de aceitação violada(s)', returncode=2)

    def _registrar(self, cfg, veredito, saidas):
        if not lab_settings().get('REGISTRAR_EXECUCOES', True):
            return
        try:
            ExperimentRun.objects.create(
                comando=cfg.command,
                config=exporters.limpar_json(cfg.echo()),
                seed_master=str(cfg.seed.master),
                artifact_version=lab_settings()['ARTIFACT_VERSION'],
                veredito=veredito,
                saidas=saidas,
            )
        except DatabaseError as e:
            logger.warning('registro da execução ignorado (banco sem migração?): %s', e)

    def _runs(self, options):
        limite = options.get('limit') or 20
        if not 1 <= limite <= 1000:
            raise CommandError('--limit fora de [1, 1000]', returncode=1)
        try:
            execucoes = list(ExperimentRun.objects.all()[:limite])
        except DatabaseError as e:
            raise CommandError(f'registro indisponível: {_linha_unica(e)}', returncode=1)
        self.stdout.write(exporters.dumps(ExperimentRunSerializer(execucoes, many=True).data), ending='')

    # ==================== SAÍDAS ====================

    def _tabela(self, cfg, nome, titulo, colunas, linhas, resultados, res):
        """CSV + JSON determinísticos e, se pedidos, xlsx e PDF"""
        csv_path = output_path(cfg, nome)
        res.saidas.append(exporters.write_csv(csv_path, cfg.echo(), colunas, linhas))
        res.saidas.append(exporters.write_json(csv_path.with_suffix('.json'),
                                               exporters.summary_payload(cfg, resultados)))
        if cfg.get('xlsx'):
            res.saidas.append(exporters.write_xlsx(cfg.get('xlsx'), titulo, colunas, linhas))
        if cfg.get('pdf') and not (cfg.get('svg') or cfg.get('color')):
            res.saidas.append(exporters.write_table_pdf(cfg.get('pdf'), titulo, colunas, linhas))

    def _figura(self, cfg, nome, svg, res):
        caminho = Path(cfg.get('svg')) if cfg.get('svg') else output_path(cfg, nome).with_suffix('.svg')
        res.saidas.append(exporters.write_text(caminho, svg))
        if cfg.get('pdf'):
            res.saidas.append(svg_to_pdf(svg, exporters.preparar_caminho(cfg.get('pdf'))))

    # ==================== SUBCOMANDOS ====================

    def _cmd_typical_cell(self, cfg):
        res = Resultado()
        seed, replicas = cfg.seed, cfg.get('replicas')
        linhas, rows = [], []
        for k, lam in enumerate(cfg.get('lambdas')):
            row = typical_cell_experiment(lam, replicas, seed.child(k * replicas), cfg.workers)
            rows.append(row)
            a, p = row.mean_area, row.mean_perimeter
            linha = [lam, a.n, a.excluded, a.mean, a.stderr, 1 / lam, p.mean, p.stderr,
                     row.reference_perimeter, row.ratio]
            linhas.append(linha)
            res.destaques.append(f'λ={lam:g}: área {a.mean:.6f} ± {a.stderr:.6f} (1/λ = {1 / lam:.6f}), '
                                 f'perímetro {p.mean:.6f} ± {p.stderr:.6f} (ref {row.reference_perimeter:.6f})')
            if not (a.within(1 / lam) and p.within(row.reference_perimeter) and a.valid):
                res.falhas.append(','.join(exporters.fmt(v) for v in linha))
        colunas = ['lambda', 'replicas', 'excluded', 'mean_area', 'stderr_area', 'reference_area',
                   'mean_perimeter', 'stderr_perimeter', 'reference_perimeter', 'ratio']
        self._tabela(cfg, 'typical_cell.csv', 'Célula típica', colunas, linhas,
                     RatioRowSerializer(rows, many=True).data, res)
        return res

    def _cmd_isokawa_ref(self, cfg):
        res = Resultado()
        linhas = []
        for lam in cfg.get('lambdas'):
            valor, erro = isokawa_perimeter_bound(lam)
            self.stdout.write(f'{valor:.10f}')
            res.destaques.append(f'λ={lam:g}: E|∂C| = {valor:.10f} (erro certificado {erro:.1e})')
            linhas.append([lam, valor, erro, 1 / lam, lam * valor, planar_boundary_density(lam)])
        colunas = ['lambda', 'perimeter', 'certified_error', 'area', 'ratio', 'density']
        resultados = [dict(zip(colunas, linha)) for linha in linhas]
        self._tabela(cfg, 'isokawa_ref.csv', 'Referência de Isokawa', colunas, linhas, resultados, res)
        return res

    def _cmd_density(self, cfg):
        res = Resultado()
        rows = density_experiment(cfg.get('lambdas'), cfg.get('replicas'), cfg.seed, cfg.workers)
        linhas = []
        for r in rows:
            a, p = r.mean_area, r.mean_perimeter
            razao_ref = r.lam * r.reference_perimeter
            densidade_ref = planar_boundary_density(r.lam)
            linha = [r.lam, a.n, r.excluded, a.mean, p.mean, r.ratio, razao_ref, RATIO_LIMIT,
                     r.density, densidade_ref, DENSITY_LIMIT]
            linhas.append(linha)
            res.destaques.append(f'λ={r.lam:g}: razão {r.ratio:.5f} (quadratura {razao_ref:.5f}; '
                                 f'{100 * (r.ratio / RATIO_LIMIT - 1):+.2f}% de 4/π), '
                                 f'densidade {r.density:.5f} (quadratura {densidade_ref:.5f}; '
                                 f'{100 * (r.density / DENSITY_LIMIT - 1):+.2f}% de 2/π)')
            # a faixa é a da quadratura em cada λ; a distância aos limites é só informativa
            if not (a.valid and a.within(1 / r.lam, SIGMAS_CHECK)
                    and p.within(r.reference_perimeter, SIGMAS_CHECK)):
                res.falhas.append(','.join(exporters.fmt(v) for v in linha))
        colunas = ['lambda', 'replicas', 'excluded', 'mean_area', 'mean_perimeter', 'ratio', 'ratio_reference',
                   'ratio_limit', 'density', 'density_reference', 'density_limit']
        self._tabela(cfg, 'density.csv', 'Densidade de fronteira', colunas, linhas,
                     RatioRowSerializer(rows, many=True).data, res)
        return res

    def _cores(self, cfg, n):
        return cfg.seed.generator(substream=1).random(n) < 0.5

    def _cmd_tessellate(self, cfg):
        res = Resultado()
        lam, raio, sub = cfg.get('lambdas')[0], cfg.get('radius'), cfg.get('subwindow')
        cloud = poisson_disk(lam, raio, cfg.seed)
        t = tessellate_window(cloud, cfg.workers)
        linhas = []
        for c in t.cells:
            vizinhos = sorted({s.neighbor for s in c.sides if s.neighbor is not None})
            arcos = sum(1 for b in c.boundary if isinstance(b, RimArc))
            linhas.append([c.index, c.area, c.polygon is not None, len(c.sides), arcos, vizinhos])
        soma = float(t.areas.sum())
        area_janela = cloud.window.area
        interna = boundary_length_in(t, sub) if sub > 0 else 0.0
        resumo = {
            'cells': len(t.cells),
            'area_sum': soma,
            'window_area': area_janela,
            'boundary_length': t.boundary_length,
            'subwindow': sub,
            'boundary_in_subwindow': interna,
            'density_subwindow': interna / hypmath.ball_area(sub) if sub > 0 else None,
            'planar_density': planar_boundary_density(lam),
        }
        res.destaques.append(f'{len(t.cells)} células, soma das áreas {soma:.9f} de {area_janela:.9f}')
        if abs(soma - area_janela) > TOL_SOMA_AREAS * area_janela:
            res.falhas.append(f'soma das áreas {soma:.12g} != {area_janela:.12g}')
        colunas = ['cell', 'area', 'bounded', 'sides', 'rim_arcs', 'neighbors']
        self._tabela(cfg, 'tessellate.csv', 'Tesselação', colunas, linhas, resumo, res)
        if cfg.get('svg') or cfg.get('color'):
            cores = self._cores(cfg, len(t.cells)) if cfg.get('color') else None
            self._figura(cfg, 'tessellate.svg', render_svg(t, cores, RenderSpec(), rim=raio), res)
        return res

    def _cmd_surface(self, cfg):
        res = Resultado()
        surf = bolza()
        lam = cfg.get('lambdas')[0]
        sorteios = locality_experiment(lam, surf, cfg.get('draws'), cfg.seed, cfg.workers)
        linhas = [[i, n, soma, comp, comp / surf.area] for i, (n, soma, comp) in enumerate(sorteios)]
        densidade = MCEstimate.from_samples([linha[4] for linha in linhas], 0, cfg.seed)
        previsto = planar_boundary_density(lam)
        erro_area = max(abs(linha[2] - surf.area) / surf.area for linha in linhas)
        desvio = densidade.mean / previsto - 1
        res.destaques.append(f'densidade {densidade.mean:.6f} ± {densidade.stderr:.6f}, '
                             f'plano {previsto:.6f} ({100 * desvio:+.2f}%)')
        if abs(desvio) > FAIXA_RELATIVA:
            res.falhas.append(f'densidade {densidade.mean:.12g} contra {previsto:.12g}')
        for linha in linhas:
            if abs(linha[2] - surf.area) > TOL_SOMA_AREAS * surf.area:
                res.falhas.append(','.join(exporters.fmt(v) for v in linha))
        resumo = {
            'density': MCEstimateSerializer(densidade).data,
            'planar_density': previsto,
            'relative_deviation': desvio,
            'max_area_error': erro_area,
            'surface_area': surf.area,
        }
        colunas = ['draw', 'cells', 'area_sum', 'boundary_length', 'density']
        self._tabela(cfg, 'surface.csv', 'Localidade na superfície', colunas, linhas, resumo, res)
        return res

    def _cmd_color(self, cfg):
        res = Resultado()
        surf = bolza()
        lam, tentativas = cfg.get('lambdas')[0], cfg.get('trials')
        resultados = coloring_experiment(lam, surf, tentativas, cfg.seed, cfg.workers)
        resumo = summarize_coloring(resultados, surf, lam, cfg.seed)
        linhas = [[i, o.cells, o.black_area, o.boundary_length, o.cheeger_value]
                  for i, o in enumerate(resultados)]
        preta = resumo.mean_black_area
        res.destaques.append(f'área preta {preta.mean:.6f} ± {preta.stderr:.6f} (metade: {surf.area / 2:.6f})')
        if not preta.within(surf.area / 2):
            res.falhas.append(f'área preta média {preta.mean:.12g} ± {preta.stderr:.12g}')
        saida = {
            'summary': ColoringSummarySerializer(resumo).data,
            'outcomes': ColoringOutcomeSerializer(resultados, many=True).data,
        }
        if cfg.get('colorings'):
            fixa = cfg.seed.child(tentativas)
            vc = coloring_variance(surface_voronoi(lam, surf, fixa), cfg.get('colorings'), fixa)
            saida['variance'] = VarianceCheckSerializer(vc).data
            res.destaques.append(f'variância {vc.variance:.6f} ± {vc.stderr:.6f} (identidade {vc.identity:.6f})')
            if not vc.within():
                res.falhas.append(f'variância {vc.variance:.12g} contra {vc.identity:.12g}')
        colunas = ['trial', 'cells', 'black_area', 'boundary_length', 'cheeger']
        self._tabela(cfg, 'color.csv', 'Coloração', colunas, linhas, saida, res)
        return res

    def _cmd_graph(self, cfg):
        res = Resultado()
        n, d, s, tentativas = cfg.get('n'), cfg.get('d'), cfg.get('s'), cfg.get('trials')
        seed = cfg.seed
        g = random_regular(n, d, seed.child(0))
        metade = half_coloring_estimate(g, tentativas, seed.child(1))
        particao = spanning_tree_regions(g, s, seed.child(2))
        regioes = region_coloring_estimate(g, particao, tentativas, seed.child(3))
        alvo = 1.15 * (d - 2) / 2
        razao_metade = metade.boundary.mean / (d * n / 4)
        res.destaques.append(f'h* regiões {regioes.h_star.mean:.5f} ± {regioes.h_star.stderr:.5f} '
                             f'(alvo <= {alvo:.4f}); '
                             f'|∂A| metade / (dn/4) = {razao_metade:.5f}')
        if regioes.h_star.mean > alvo:
            res.falhas.append(f'h* médio {regioes.h_star.mean:.12g} > {alvo:.12g}')
        if not 0.97 <= razao_metade <= 1.03:
            res.falhas.append(f'|∂A|/(dn/4) = {razao_metade:.12g}')
        linhas = ([['half', *linha] for linha in metade.rows]
                  + [['regions', *linha] for linha in regioes.rows])
        resumo = {
            'half': GraphColoringReportSerializer(metade).data,
            'regions': GraphColoringReportSerializer(regioes).data,
            'region_count': particao.count,
            'inter_region_edges': inter_region_edges(g, particao),
            'region_sd_bound': region_variance_bound(particao),
            'h_star_target': alvo,
            'half_boundary_ratio': razao_metade,
        }
        colunas = ['kind', 'trial', 'boundary_edges', 'black_count', 'h_star']
        self._tabela(cfg, 'graph.csv', 'Grafo regular', colunas, linhas, resumo, res)
        return res

    def _cmd_exact_cheeger(self, cfg):
        res = Resultado()
        nome = cfg.get('graph')
        if nome == 'random':
            g = random_regular(cfg.get('n'), cfg.get('d'), cfg.seed)
        else:
            g = NAMED_GRAPHS[nome]()
        exato = exact_cheeger(g)
        # cotas por subconjuntos sorteados: nunca abaixo do exato
        rng = cfg.seed.generator(substream=1)
        amostras = []
        for _ in range(cfg.get('trials')):
            tamanho = int(rng.integers(1, g.n // 2 + 1))
            black = np.zeros(g.n, dtype=bool)
            black[rng.permutation(g.n)[:tamanho]] = True
            amostras.append(cheeger_ratio(g, black))
        menor = min(amostras)
        self.stdout.write(f'{exato:.10f}')
        res.destaques.append(f'{nome} (n={g.n}, d={g.d}): h = {exato:.10f}, menor cota sorteada {menor:.6f}')
        if exato > menor + 1e-12:
            res.falhas.append(f'exato {exato:.12g} > cota sorteada {menor:.12g}')
        linhas = [[nome, g.n, g.d, exato, menor]]
        colunas = ['graph', 'n', 'd', 'exact', 'sampled_min']
        self._tabela(cfg, 'exact_cheeger.csv', 'Cheeger exato', colunas, linhas,
                     dict(zip(colunas, linhas[0])), res)
        return res

    def _cmd_lemma(self, cfg):
        res = Resultado()
        relatorios = run_lemmas(cfg.get('which'), cfg.get('samples'), cfg.seed)
        self.stdout.write(render_to_string('APP/lemma_report.txt', {'relatorios': relatorios, 'seed': str(cfg.seed)}))
        linhas = [[r.lemma, r.verdict, r.max_slack, r.samples] for r in relatorios]
        for r, linha in zip(relatorios, linhas):
            if not r.ok:
                res.falhas.append(','.join(exporters.fmt(v) for v in linha))
        colunas = ['lemma', 'verdict', 'max_slack', 'samples']
        self._tabela(cfg, 'lemma.csv', 'Lemas', colunas, linhas,
                     LemmaReportSerializer(relatorios, many=True).data, res)
        return res

    def _cmd_render(self, cfg):
        res = Resultado()
        lam, raio = cfg.get('lambdas')[0], cfg.get('radius')
        t = tessellate_window(poisson_disk(lam, raio, cfg.seed), cfg.workers)
        spec = RenderSpec(cfg.get('width'), cfg.get('height'), cfg.get('stroke'), show_nuclei=cfg.get('nuclei'))
        cores = self._cores(cfg, len(t.cells)) if cfg.get('color') else None
        self._figura(cfg, 'render.svg', render_svg(t, cores, spec, rim=raio), res)
        res.destaques.append(f'{len(t.cells)} células em {spec.width_px}x{spec.height_px}')
        if not math.isfinite(float(t.areas.sum())):
            res.falhas.append('áreas não finitas')
        return res
