"""
Superfície de Bolza (gênero 2) como superfície hiperbólica compacta computável.

O domínio fundamental é o octógono regular de ângulos π/4 centrado em O; os
geradores são as translações que colam lados opostos. Distâncias no quociente
e células de Voronoi são calculadas no plano, sobre as cópias transladadas.
"""
import functools
import logging
import math
from dataclasses import dataclass

import numpy as np
from django.conf import settings
from scipy.spatial import cKDTree

from . import hypmath
from .exceptions import CutoffTooSmall
from .hypmath import ORIGIN, HPoint, Isometry
from .isokawa import MCEstimate
from .parallel import map_replicas
from .sampler import PointCloud, SurfaceWindow, poisson_surface, void_probability
from .voronoi import CellPiece, Side, Tessellation, Vizinhanca, cell_of, certified_cell

logger = logging.getLogger(__name__)

LAMBDA_MINIMO = 0.25
_TOL_DOMINIO = 1e-9


# ==================== GRUPO E MODELO ====================

@dataclass(frozen=True, eq=False)
class FuchsianGroup:
    """generators[k] cola o lado k+4 no lado k; generators[k+4] é o inverso"""
    generators: tuple
    label: str


@dataclass(frozen=True, eq=False)
class SurfaceModel:
    group: FuchsianGroup
    domain: object  # ConvexCell
    genus: int
    area: float
    translates: tuple  # Isometry, identidade primeiro
    matrices: np.ndarray  # (m, 3, 3), mesma ordem de translates
    cutoff: float

    @property
    def circumradius(self):
        return self.domain.max_vertex_distance()

    @property
    def systole(self):
        return min(hypmath.translation_length(g) for g in self.translates[1:])

    def orbit(self, p):
        """Imagens de p por todos os translados (matriz (m, 3))"""
        v = p.vec if isinstance(p, HPoint) else np.asarray(p, dtype=float)
        return self.matrices @ v


@dataclass(frozen=True)
class SurfacePoint:
    rep: HPoint

    @classmethod
    def reduce(cls, p, surf):
        """Leva p ao domínio fundamental; no bordo vale a regra do primeiro lado (k < 4)"""
        v = p.vec if isinstance(p, HPoint) else np.asarray(p, dtype=float)
        normais = surf.domain.wall_array * np.array([-1.0, 1.0, 1.0])
        geradores = surf.group.generators
        for _ in range(1000):
            valores = normais @ v
            k = int(np.argmax(valores))
            if valores[k] <= _TOL_DOMINIO * max(1.0, v[0]):
                break
            v = hypmath.normalize_timelike(geradores[(k + 4) % 8].m @ v)
        else:
            raise CutoffTooSmall('redução ao domínio não convergiu')
        for _ in range(8):
            no_bordo = [k for k in range(4, 8) if abs(normais[k] @ v) <= _TOL_DOMINIO * max(1.0, v[0])]
            if not no_bordo:
                break
            v = hypmath.normalize_timelike(geradores[(no_bordo[0] + 4) % 8].m @ v)
        return cls(HPoint.from_vector(v))


def _geradores_bolza():
    h = math.acosh(1 + math.sqrt(2))
    return tuple(
        hypmath.compose(hypmath.rotation(k * math.pi / 4),
                        hypmath.compose(hypmath.boost(2 * h), hypmath.rotation(-k * math.pi / 4)))
        for k in range(8)
    )


def _enumerar_translados(geradores, corte, profundidade, rho):
    """Busca em largura por palavras, podando imagens de O além de corte + rho"""
    poda = corte + rho
    gens = np.array([g.m for g in geradores])
    matrizes = [np.eye(3)]
    pontos = [np.zeros(2)]
    fronteira = np.eye(3)[None]
    for nivel in range(profundidade):
        cand = (fronteira[:, None] @ gens[None]).reshape(-1, 3, 3)
        cand = cand[np.arccosh(np.maximum(1.0, cand[:, 0, 0])) <= poda]
        if not len(cand):
            break
        disco = hypmath.to_disk_array(cand[:, :, 0])
        dd, _ = cKDTree(np.array(pontos)).query(disco)
        cand, disco = cand[dd > 1e-9], disco[dd > 1e-9]
        repetidos = {max(par) for par in cKDTree(disco).query_pairs(1e-9)} if len(disco) else set()
        manter = np.array([i not in repetidos for i in range(len(cand))], dtype=bool)
        cand, disco = cand[manter], disco[manter]
        matrizes.extend(cand)
        pontos.extend(disco)
        fronteira = cand
        logger.debug('nível %d: %d translados novos', nivel + 1, len(cand))
        if not len(cand):
            break
    else:
        if len(fronteira):
            logger.warning('enumeração parou no comprimento %d com %d palavras ainda abertas',
                           profundidade, len(fronteira))
    return [m for m in matrizes if math.acosh(max(1.0, m[0, 0])) <= corte]


@functools.lru_cache(maxsize=4)
def bolza(cutoff=None, word_length=None):
    """Superfície de Bolza com os translados até a distância de corte"""
    cutoff = float(cutoff or settings.VORONOI_LAB['CORTE_TRANSLADOS'])
    word_length = int(word_length or settings.VORONOI_LAB['COMPRIMENTO_PALAVRA'])
    dominio = hypmath.regular_polygon(8, math.pi / 4)
    geradores = _geradores_bolza()
    matrizes = _enumerar_translados(geradores, cutoff, word_length, dominio.max_vertex_distance())
    translados = tuple(Isometry(m) for m in matrizes)
    logger.info('Bolza: %d translados até R = %.2f', len(translados), cutoff)
    return SurfaceModel(
        group=FuchsianGroup(geradores, 'bolza'),
        domain=dominio,
        genus=2,
        area=4 * math.pi,
        translates=translados,
        matrices=np.array([g.m for g in translados]),
        cutoff=cutoff,
    )


# ==================== DISTÂNCIAS ====================

def quotient_distance(x, y, surf):
    d0 = hypmath.dist(x.rep, y.rep)
    if d0 + 2 * surf.circumradius > surf.cutoff:
        raise CutoffTooSmall(f'corte {surf.cutoff} não cobre d = {d0:.3f} + 2·raio do domínio')
    return float(hypmath.distances(x.rep.vec, surf.orbit(y.rep)).min())


def injectivity_radius(x, surf):
    """Metade do menor laço geodésico por x"""
    return 0.5 * float(hypmath.distances(x.rep.vec, surf.orbit(x.rep)[1:]).min())


# ==================== DOMÍNIO DE DIRICHLET E I_r(x) ====================

def dirichlet_domain(x, surf):
    """Célula de x.rep entre as suas próprias cópias γ·x.rep"""
    return cell_of(x.rep, surf.orbit(x.rep)[1:])


def _arcos_para_intervalos(arcos):
    """Complemento em [0, 2π) da união de arcos abertos (centro, meia-largura)"""
    dois_pi = 2 * math.pi
    cortes = []
    for centro, w in arcos:
        if w >= math.pi:
            return []
        a = (centro - w) % dois_pi
        b = a + 2 * w
        if b <= dois_pi:
            cortes.append((a, b))
        else:
            cortes.extend([(a, dois_pi), (0.0, b - dois_pi)])
    cortes.sort()
    livres = []
    inicio = 0.0
    for a, b in cortes:
        if a > inicio:
            livres.append((inicio, a))
        inicio = max(inicio, b)
    if inicio < dois_pi:
        livres.append((inicio, dois_pi))
    return livres


def angular_set(x, r, surf):
    """I_r(x): ângulos θ com [r;θ] (polar em torno de x) dentro de D(S,x)"""
    if r <= 0:
        raise ValueError('raio precisa ser positivo')
    celula = dirichlet_domain(x, surf)
    volta = hypmath.inverse(hypmath.translation_to(x.rep)).m
    arcos = []
    for u in celula.wall_array @ volta.T:
        rho_u = math.hypot(u[1], u[2])
        c = u[0] * math.cosh(r) / (rho_u * math.sinh(r))
        if c < 1.0:
            arcos.append((math.atan2(u[2], u[1]), math.acos(max(-1.0, c))))
    return _arcos_para_intervalos(arcos)


def angular_measure(intervals):
    return float(sum(b - a for a, b in intervals))


# ==================== VORONOI NA SUPERFÍCIE ====================

def _levantar(pts, surf):
    """Cópias γX_j perto do domínio; as N primeiras linhas são os próprios X_j"""
    n = len(pts)
    copias = np.einsum('mij,nj->mni', surf.matrices, pts).reshape(-1, 3)
    rotulos = np.tile(np.arange(n), len(surf.matrices))
    perto = np.arccosh(np.maximum(1.0, copias[:, 0])) <= surf.cutoff - surf.circumradius
    perto[:n] = True
    return copias[perto], rotulos[perto]


def _celula_unica(surf):
    dominio = surf.domain
    n = len(dominio.vertices)
    lados = tuple(Side(dominio.vertices[k], dominio.vertices[(k + 1) % n], dominio.walls[k], None)
                  for k in range(n))
    return CellPiece(0, ORIGIN, surf.area, lados, dominio)


def tessellate_surface(cloud, surf):
    """Voronoi da nuvem na superfície; lados entre a célula e cópias dela mesma não contam"""
    pts = cloud.points
    n = len(pts)
    if n == 0:
        return Tessellation(pts, [_celula_unica(surf)], cloud.window, 0.0)
    copias, rotulos = _levantar(pts, surf)
    viz = Vizinhanca(copias)
    limite = surf.cutoff - 2 * surf.circumradius
    cells = []
    for i in range(n):
        poligono = certified_cell(viz, i)
        alcance = poligono.max_vertex_distance()
        if 2 * alcance > limite:
            raise CutoffTooSmall(f'célula {i} com raio {alcance:.3f} exige corte maior que {surf.cutoff}')
        k = len(poligono.vertices)
        lados = tuple(Side(poligono.vertices[j], poligono.vertices[(j + 1) % k], poligono.walls[j],
                           int(rotulos[poligono.sources[j]]))
                      for j in range(k))
        cells.append(CellPiece(i, poligono.nucleus, hypmath.polygon_area(poligono), lados, poligono))
    comprimento = 0.5 * sum(s.length for c in cells for s in c.sides if s.neighbor != c.index)
    return Tessellation(pts, cells, cloud.window, comprimento)


def surface_voronoi(lam, surf, seed):
    if lam < LAMBDA_MINIMO:
        raise ValueError(f'intensidade {lam} abaixo do mínimo {LAMBDA_MINIMO} na superfície')
    return tessellate_surface(poisson_surface(lam, surf, seed), surf)


def surface_boundary_density(t, surf):
    return t.boundary_length / surf.area


def _sorteio(tarefa):
    lam, seed, corte = tarefa
    surf = bolza(corte)
    t = surface_voronoi(lam, surf, seed)
    return len(t.cells), float(t.areas.sum()), t.boundary_length


def locality_experiment(lam, surf, draws, seed, workers=None):
    """(células, soma das áreas, comprimento de fronteira) por sorteio; o sorteio i usa seed.child(i)"""
    if draws < 1:
        raise ValueError('precisa de pelo menos um sorteio')
    linhas = map_replicas(_sorteio, [(lam, seed.child(i), surf.cutoff) for i in range(draws)], workers)
    logger.info('λ=%g: %d tesselações da superfície', lam, len(linhas))
    return linhas


# ==================== COLORAÇÃO ====================

@dataclass(frozen=True)
class ColoringOutcome:
    black_area: float
    boundary_length: float
    cheeger_value: float
    cells: int
    seed: object

    def __post_init__(self):
        if self.black_area < -1e-9 or self.cheeger_value < 0:
            raise ValueError('resultado de coloração inválido')


def colored_boundary(t, colors):
    """|∂A|: só lados entre células de cores diferentes (cada lado uma vez)"""
    return 0.5 * sum(s.length for c in t.cells for s in c.sides
                     if s.neighbor is not None and colors[s.neighbor] != colors[c.index])


def cheeger_value(black_area, boundary, total_area):
    menor = min(black_area, total_area - black_area)
    if menor <= 1e-9 * total_area:
        return math.inf
    return boundary / menor


def color_tessellation(t, surf, colors, seed):
    colors = np.asarray(colors, dtype=bool)
    if not len(t.nuclei):
        area = surf.area if (len(colors) and colors[0]) else 0.0
        return ColoringOutcome(area, 0.0, math.inf, 0, seed)
    preta = float(t.areas[colors].sum())
    borda = colored_boundary(t, colors)
    return ColoringOutcome(preta, borda, cheeger_value(preta, borda, surf.area), len(t.cells), seed)


def _tentativa(tarefa):
    lam, seed, corte = tarefa
    surf = bolza(corte)
    t = surface_voronoi(lam, surf, seed)
    cores = seed.generator(substream=1).random(max(1, len(t.cells))) < 0.5
    return color_tessellation(t, surf, cores, seed)


def coloring_experiment(lam, surf, trials, seed, workers=None):
    """Tesselação nova e coloração nova por tentativa; a tentativa i usa seed.child(i)"""
    if trials < 100:
        raise ValueError('o experimento de coloração precisa de pelo menos 100 tentativas')
    resultados = map_replicas(_tentativa, [(lam, seed.child(i), surf.cutoff) for i in range(trials)], workers)
    logger.info('λ=%g: %d tentativas de coloração', lam, len(resultados))
    return resultados


@dataclass(frozen=True)
class VarianceCheck:
    variance: float
    stderr: float
    identity: float
    colorings: int
    seed: object

    def within(self, k=3.0):
        return abs(self.variance - self.identity) <= k * self.stderr


def coloring_variance(t, colorings, seed):
    """Variância de |A| sobre colorações de uma tesselação fixa contra (1/4)Σ|C_i|²"""
    if colorings < 2:
        raise ValueError('precisa de pelo menos 2 colorações')
    areas = t.areas
    cores = seed.generator(substream=2).random((colorings, len(areas))) < 0.5
    preta = cores.astype(float) @ areas
    desvio = preta - preta.mean()
    variancia = float(desvio.var(ddof=1))
    m4 = float(np.mean(desvio ** 4))
    erro = math.sqrt(max(0.0, m4 - variancia ** 2) / colorings)
    return VarianceCheck(variancia, erro, 0.25 * float(np.sum(areas ** 2)), colorings, seed)


@dataclass(frozen=True)
class ColoringSummary:
    mean_black_area: object  # MCEstimate
    mean_boundary: object
    min_cheeger: float
    markov_threshold: float
    markov_bound: float
    void_bound: float


def markov_bound(mean_boundary, mean_min_area, t):
    """P(h* >= t) <= E|∂A| / (t · E[min(|A|, |S|−|A|)])"""
    if t <= 0 or mean_min_area <= 0:
        return math.inf
    return mean_boundary / (t * mean_min_area)


def summarize_coloring(outcomes, surf, lam, seed, threshold=None, void_radius=1.0):
    pretas = np.array([o.black_area for o in outcomes])
    bordas = np.array([o.boundary_length for o in outcomes])
    menores = np.minimum(pretas, surf.area - pretas)
    valores = [o.cheeger_value for o in outcomes if math.isfinite(o.cheeger_value)]
    limiar = threshold if threshold is not None else 2 / math.pi
    return ColoringSummary(
        mean_black_area=MCEstimate.from_samples(pretas, 0, seed),
        mean_boundary=MCEstimate.from_samples(bordas, 0, seed),
        min_cheeger=min(valores) if valores else math.inf,
        markov_threshold=limiar,
        markov_bound=markov_bound(float(bordas.mean()), float(menores.mean()), limiar),
        void_bound=void_probability(lam, void_radius),
    )


def surface_cloud(points, surf, lam=1.0):
    """Nuvem montada à mão (testes e figuras): cada ponto é reduzido ao domínio"""
    reps = np.array([SurfacePoint.reduce(p, surf).rep.vec for p in points]).reshape(-1, 3)
    return PointCloud(reps, lam, SurfaceWindow(surf.group.label, surf.area))
