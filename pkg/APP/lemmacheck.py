"""
Verificadores numéricos dos lemas técnicos: núcleo de seno, interseção de
anéis finos, inclusão do conjunto A^ε e a identidade do espessamento.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from . import hypmath
from .hypmath import ORIGIN, ConvexCell, HPoint
from .isokawa import MCEstimate
from .sampler import Seed, uniform_in_disk

logger = logging.getLogger(__name__)

SONDAS_ANGULOS = 64
SONDAS_RAIOS = 8
APROXIMACAO_A_EPS = f'A^ε por {SONDAS_ANGULOS}x{SONDAS_RAIOS}+1 sondas em B_ε(O)'


@dataclass
class LemmaReport:
    lemma: str
    params: dict
    verdict: str
    max_slack: float
    samples: int
    seed: str
    approximation: str = ''
    details: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.verdict == 'ok'


# ==================== NÚCLEO DE SENO ====================

@dataclass(frozen=True, eq=False)
class AngleMeasure:
    """Medida de probabilidade em [0, 2π]: átomos ou densidade"""
    thetas: np.ndarray = None
    weights: np.ndarray = None
    density: object = None

    def __post_init__(self):
        if self.density is not None:
            return
        thetas = np.asarray(self.thetas, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if thetas.shape != weights.shape or not len(thetas):
            raise ValueError('átomos e pesos com formatos diferentes')
        if np.any(weights <= 0) or abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError('pesos precisam ser positivos e somar 1')
        if np.any(thetas < 0) or np.any(thetas > 2 * math.pi):
            raise ValueError('ângulos fora de [0, 2π]')
        object.__setattr__(self, 'thetas', thetas)
        object.__setattr__(self, 'weights', weights)

    @classmethod
    def uniform(cls):
        return cls(density=lambda t: 1.0 / (2 * math.pi))

    @classmethod
    def from_atoms(cls, thetas, weights):
        weights = np.asarray(weights, dtype=float)
        return cls(np.asarray(thetas, dtype=float) % (2 * math.pi), weights / weights.sum())

    @classmethod
    def random(cls, k, rng):
        return cls.from_atoms(rng.random(k) * 2 * math.pi, rng.dirichlet(np.ones(k)))

    def rotated(self, alpha):
        return AngleMeasure((self.thetas + alpha) % (2 * math.pi), self.weights)


def sine_kernel(nu):
    """∬ |sin((θ₁−θ₂)/2)| dν dν"""
    if nu.density is None:
        dif = nu.thetas[:, None] - nu.thetas[None, :]
        return float(nu.weights @ np.abs(np.sin(dif / 2)) @ nu.weights)
    f = nu.density

    def interna(t1):
        valor, _ = quad(lambda t2: f(t2) * abs(math.sin((t1 - t2) / 2)), 0.0, 2 * math.pi,
                        points=[t1], epsabs=1e-10, epsrel=1e-10)
        return f(t1) * valor

    valor, _ = quad(interna, 0.0, 2 * math.pi, epsabs=1e-8, epsrel=1e-10)
    return valor


def sine_report(medidas, seed):
    rng = seed.generator()
    uniforme = sine_kernel(AngleMeasure.uniform())
    valores = [sine_kernel(AngleMeasure.random(int(rng.integers(1, 65)), rng)) for _ in range(medidas)]
    folga = max(max(valores) - 2 / math.pi, uniforme - 2 / math.pi)
    ok = abs(uniforme - 2 / math.pi) <= 1e-6 and folga <= 1e-9
    return LemmaReport('sine', {'medidas': medidas}, 'ok' if ok else 'falha', folga, medidas, str(seed),
                       details={'uniforme': uniforme, 'maximo_atomico': max(valores)})


# ==================== ANÉIS FINOS ====================

def _limites_cos(a, d, r, eps):
    base = math.cosh(d) * math.cosh(r)
    escala = math.sinh(d) * math.sinh(r)
    return (base - math.cosh(a + eps)) / escala, (base - math.cosh(a)) / escala


def _medida_angular(a, d, r, eps):
    lo, hi = _limites_cos(a, d, r, eps)
    lo, hi = max(lo, -1.0), min(hi, 1.0)
    if lo >= hi:
        return 0.0
    return 2 * (math.acos(lo) - math.acos(hi))


def ring_intersection_area(x, y, a, eps):
    """|R_a^{a+ε}(x) ∩ R_a^{a+ε}(y)| pela redução polar: ∫ |S(r)| sinh r dr"""
    d = hypmath.dist(x, y)
    if d <= hypmath.get_tolerances().degenerado:
        raise ValueError('centros coincidentes')
    if a <= 0 or eps <= 0:
        raise ValueError('a e ε precisam ser positivos')
    if d > 2 * a + 2 * eps:
        return 0.0
    pontos = []
    for k in (0, 1):
        for alvo in (-1.0, 1.0):
            g = lambda r, k=k, alvo=alvo: _limites_cos(a, d, r, eps)[k] - alvo
            if g(a) * g(a + eps) < 0:
                pontos.append(brentq(g, a, a + eps, xtol=1e-15))
    valor, _ = quad(lambda r: _medida_angular(a, d, r, eps) * math.sinh(r), a, a + eps,
                    points=sorted(pontos) or None, epsabs=1e-16, epsrel=1e-10, limit=200)
    return valor


def ring_intersection_area_mc(x, y, a, eps, samples, seed):
    """Conferência por rejeição no anel em volta de x: (área, erro padrão)"""
    rng = seed.generator()
    pts = uniform_in_disk(samples, a + eps, rng, R_in=a) @ hypmath.translation_to(x).m.T
    dy = hypmath.distances(y.vec, pts)
    frac = float(np.mean((dy >= a) & (dy <= a + eps)))
    total = hypmath.ball_area(a + eps) - hypmath.ball_area(a)
    return frac * total, total * math.sqrt(frac * (1 - frac) / samples)


def ring_slope(a, d, epsilons):
    """Inclinação log-log da área da interseção contra ε (mínimos quadrados)"""
    y = hypmath.from_polar(d, 0.0)
    areas = [ring_intersection_area(ORIGIN, y, a, e) for e in epsilons]
    return float(np.polyfit(np.log(epsilons), np.log(areas), 1)[0])


def rings_report(a=2.0, d=1.0, epsilons=(1e-2, 1e-3, 1e-4)):
    inclinacao = ring_slope(a, d, list(epsilons))
    return LemmaReport('rings', {'a': a, 'd': d, 'epsilons': list(epsilons)},
                       'ok' if inclinacao >= 1.4 else 'falha', 1.4 - inclinacao, 0, '',
                       approximation='quadratura adaptativa com pontos de quebra',
                       details={'inclinacao': inclinacao})


# ==================== A^ε E INCLUSÃO ====================

def _sondas(eps):
    angulos = 2 * math.pi * np.arange(SONDAS_ANGULOS) / SONDAS_ANGULOS
    raios = eps * np.arange(1, SONDAS_RAIOS + 1) / SONDAS_RAIOS
    r, t = np.meshgrid(raios, angulos)
    return np.vstack([ORIGIN.vec, hypmath.polar_array(r.ravel(), t.ravel())])


def _membros(zs, y, eps, lote=4096):
    """Versão vetorizada de a_eps_membership para uma matriz (n, 3) de candidatos"""
    zs = np.asarray(zs, dtype=float).reshape(-1, 3)
    sondas = _sondas(eps) * np.array([-1.0, 1.0, 1.0])
    dentro = np.zeros(len(zs), dtype=bool)
    longe = zs[:, 0] >= y.x0
    for inicio in range(0, len(zs), lote):
        bloco = slice(inicio, inicio + lote)
        # sinal de d(a,z) − d(a,y) = sinal de <a, y − z>
        valores = (y.vec - zs[bloco]) @ sondas.T
        dentro[bloco] = (valores.max(axis=1) >= 0) & (valores.min(axis=1) <= 0) & np.any(valores != 0, axis=1)
    return dentro & longe


def a_eps_membership(z, y, eps):
    """z ∈ A^ε(O, y): d(O,z) >= d(O,y) e o bissetor de y, z corta B_ε(O) (aproximado por sondas)"""
    if eps <= 0:
        raise ValueError('ε precisa ser positivo')
    if y.x0 <= 1.0:
        raise ValueError('y não pode ser a origem')
    return bool(_membros(z.vec[None], y, eps)[0])


def inclusion_check(r, eps, delta, samples, seed, theta=0.0):
    """
    Sorteia candidatos na coroa r <= r' <= r + 2ε, filtra os membros de A^ε(O, [r;θ])
    e confere r' − r <= 2(1+δ)|sin((θ'−θ)/2)|ε.
    """
    rng = seed.generator()
    y = hypmath.from_polar(r, theta)
    zs = uniform_in_disk(samples, r + 2 * eps, rng, R_in=r)
    membros = zs[_membros(zs, y, eps)]
    if len(membros):
        rr = np.arccosh(membros[:, 0])
        tt = np.arctan2(membros[:, 2], membros[:, 1])
        folgas = (rr - r) - 2 * (1 + delta) * np.abs(np.sin((tt - theta) / 2)) * eps
        max_folga = float(folgas.max())
        violacoes = int(np.count_nonzero(folgas > 0))
    else:
        max_folga, violacoes = -math.inf, 0
    logger.debug('inclusão r=%g ε=%g δ=%g: %d membros, %d violações', r, eps, delta, len(membros), violacoes)
    return LemmaReport('inclusion', {'r': r, 'eps': eps, 'delta': delta}, 'ok' if violacoes == 0 else 'falha',
                       max_folga, samples, str(seed), APROXIMACAO_A_EPS,
                       {'membros': len(membros), 'violacoes': violacoes})


def inclusion_control(r, eps, samples, seed, delta=-0.5):
    """Controle negativo: com δ apertado demais a inclusão precisa falhar"""
    rel = inclusion_check(r, eps, delta, samples, seed)
    rel.lemma = 'inclusion-controle'
    rel.verdict = 'ok' if rel.details['violacoes'] > 0 else 'falha'
    return rel


# ==================== ESPESSAMENTO ====================

def tube_area(L, eps):
    """Área da vizinhança de raio ε de um segmento geodésico de comprimento L"""
    return 2 * L * math.sinh(eps) + 2 * math.pi * (math.cosh(eps) - 1)


def _lado(p, q, u=None):
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    L = math.acosh(max(1.0, float(-hypmath.mink(p, q))))
    tau = (q - math.cosh(L) * p) / math.sinh(L)
    if u is None:
        u = hypmath.normalize_spacelike(hypmath.mink_cross(p, q))
    return p, q, np.asarray(u, dtype=float), tau, L


def _distancia_aos_lados(z, lados):
    """(n, m): distância de cada amostra a cada segmento"""
    saida = np.empty((len(z), len(lados)))
    for j, (p, q, u, tau, L) in enumerate(lados):
        s = np.arcsinh(hypmath.mink(z, u))
        pe = (z - np.sinh(s)[:, None] * u) / np.cosh(s)[:, None]
        t = np.arcsinh(hypmath.mink(pe, tau))
        ponta = np.minimum(hypmath.distances(p, z), hypmath.distances(q, z))
        saida[:, j] = np.where((t >= 0) & (t <= L), np.abs(s), ponta)
    return saida


def _espessamento(lados, eps, samples, seed):
    """Área de ∂^ε por amostragem estratificada em coordenadas de Fermi de cada lado"""
    rng = seed.generator()
    por_lado = max(1, samples // len(lados))
    area, variancia = 0.0, 0.0
    for j, (p, q, u, tau, L) in enumerate(lados):
        t = -eps + rng.random(por_lado) * (L + 2 * eps)
        s = np.arcsinh((2 * rng.random(por_lado) - 1) * math.sinh(eps))
        gamma = np.cosh(t)[:, None] * p + np.sinh(t)[:, None] * tau
        z = np.cosh(s)[:, None] * gamma + np.sinh(s)[:, None] * u
        dist = _distancia_aos_lados(z, lados)
        aceito = (dist[:, j] <= eps) & (np.argmin(dist, axis=1) == j)
        caixa = (L + 2 * eps) * 2 * math.sinh(eps)
        frac = float(aceito.mean())
        area += caixa * frac
        variancia += caixa ** 2 * frac * (1 - frac) / por_lado
    return area, math.sqrt(variancia), por_lado * len(lados)


def thickening_perimeter(cell, eps, samples, seed):
    """|∂^ε C| / 2ε como MCEstimate"""
    if not isinstance(cell, ConvexCell):
        raise ValueError('espessamento precisa de célula limitada')
    if not 0 < eps <= 0.05:
        raise ValueError('ε precisa estar em (0, 0.05]')
    v = cell.vertex_array
    n = len(v)
    lados = [_lado(v[i], v[(i + 1) % n], cell.walls[i].vec) for i in range(n)]
    area, erro, usados = _espessamento(lados, eps, samples, seed)
    return MCEstimate(area / (2 * eps), erro / (2 * eps), usados, 0, seed)


def segment_thickening_length(a, b, eps, samples, seed):
    area, erro, usados = _espessamento([_lado(a.vec, b.vec)], eps, samples, seed)
    return MCEstimate(area / (2 * eps), erro / (2 * eps), usados, 0, seed)


def reference_triangle():
    """Triângulo com vértices [1; 2πk/3], centrado em O"""
    return ConvexCell.from_vertices(ORIGIN, [hypmath.from_polar(1.0, 2 * math.pi * k / 3) for k in range(3)])


def thickening_report(samples, seed, epsilons=(0.04, 0.02, 0.01)):
    cell = reference_triangle()
    perimetro = hypmath.polygon_perimeter(cell)
    estimativas = {e: thickening_perimeter(cell, e, samples, seed) for e in epsilons}
    e_min = min(epsilons)
    fim = estimativas[e_min]
    folga = abs(fim.mean - perimetro) - (3 * fim.stderr + 5 * e_min * len(cell.vertices))
    return LemmaReport('thickening', {'epsilons': list(epsilons)}, 'ok' if folga <= 0 else 'falha', folga,
                       samples, str(seed), 'Monte Carlo estratificado em coordenadas de Fermi',
                       {'perimetro': perimetro, 'estimativas': {str(e): v.mean for e, v in estimativas.items()}})


# ==================== RELATÓRIO ====================

LEMAS = ('sine', 'rings', 'inclusion', 'thickening')


def run_lemmas(which, samples, seed):
    escolhidos = LEMAS if which == 'all' else (which,)
    if any(w not in LEMAS for w in escolhidos):
        raise ValueError(f'lema desconhecido: {which}')
    relatorios = []
    for w in escolhidos:
        if w == 'sine':
            relatorios.append(sine_report(1000, seed))
        elif w == 'rings':
            relatorios.append(rings_report())
        elif w == 'inclusion':
            relatorios.append(inclusion_check(5.0, 0.01, 0.1, samples, seed))
            relatorios.append(inclusion_control(5.0, 0.01, samples, seed))
        else:
            relatorios.append(thickening_report(samples, seed))
        logger.info('lema %s: %s', w, relatorios[-1].verdict)
    return relatorios
