"""
Células de Voronoi hiperbólicas por recorte incremental de semiplanos.

O recorte acontece na carta de Klein (coordenadas projetivas com x0 = 1), onde
geodésicas são retas. A região inicial é uma moldura poligonal que envolve o
disco inteiro (ou só a janela), então células ainda ilimitadas continuam
representáveis até o fim do recorte.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from django.conf import settings
from scipy.spatial import cKDTree

from . import hypmath
from .exceptions import DegenerateGeometry, PointBudgetExceeded, UnboundedCell, WindowCap
from .hypmath import ORIGIN, ConvexCell, HalfSpace, HPoint, distances, mink, mink_cross
from .parallel import map_replicas
from .sampler import DiskWindow, poisson_annulus

logger = logging.getLogger(__name__)

LADOS_MOLDURA = 32
LOTE = 64
VIZINHOS_INICIAIS = 16
_EPS_T = 1e-12
_SINAL = np.array([-1.0, 1.0, 1.0])


# ==================== REGIÃO PROJETIVA ====================

class _Regiao:
    """Polígono convexo na carta de Klein; parede i vai de verts[i] a verts[i+1]"""

    __slots__ = ('walls', 'labels', 'verts', 'vazia')

    def __init__(self, walls, labels, verts):
        self.walls = walls
        self.labels = labels
        self.verts = verts
        self.vazia = False

    @classmethod
    def moldura(cls, raio_klein, lados=LADOS_MOLDURA):
        """Polígono regular (euclidiano na carta) circunscrito ao círculo de raio raio_klein"""
        phis = 2 * math.pi * np.arange(lados) / lados
        r_v = raio_klein / math.cos(math.pi / lados)
        walls = [np.array([raio_klein, math.cos(f), math.sin(f)]) for f in phis]
        verts = [np.array([1.0, r_v * math.cos(f - math.pi / lados), r_v * math.sin(f - math.pi / lados)])
                 for f in phis]
        return cls(walls, [None] * lados, verts)

    def clip(self, u, label):
        """Intersecta com {<x,u> <= 0}; devolve True se a região mudou"""
        V = np.array(self.verts)
        s = V @ (u * _SINAL)
        fora = s > 1e-12 * float(np.abs(u).sum())
        if not fora.any():
            return False
        if fora.all():
            self.vazia = True
            return True
        n = len(V)
        a = next(i for i in range(n) if fora[i] and not fora[i - 1])
        k = 1
        while fora[(a + k) % n]:
            k += 1
        if k != int(fora.sum()):
            logger.debug('trecho externo não contíguo (%d de %d); usando o primeiro', k, int(fora.sum()))
        i0, i1, i2 = (a - 1) % n, (a + k - 1) % n, (a + k) % n
        t_p = min(1.0, max(0.0, s[i0] / (s[i0] - s[a])))
        t_q = min(1.0, max(0.0, s[i1] / (s[i1] - s[i2])))

        dentro = [(a + k + j) % n for j in range(n - k)]
        verts = [self.verts[i] for i in dentro]
        walls = [self.walls[i] for i in dentro]
        labels = [self.labels[i] for i in dentro]
        if t_p <= _EPS_T:
            # a nova reta passa pelo último vértice interno
            walls[-1], labels[-1] = u, label
        else:
            verts.append(V[i0] + t_p * (V[a] - V[i0]))
            walls.append(u)
            labels.append(label)
        if t_q < 1.0 - _EPS_T:
            verts.append(V[i1] + t_q * (V[i2] - V[i1]))
            walls.append(self.walls[i1])
            labels.append(self.labels[i1])
        self.verts, self.walls, self.labels = verts, walls, labels
        return True

    def clip_batch(self, normais, labels):
        """Recorta por vários semiplanos, na ordem dada, pulando os que não cortam"""
        S = np.array(self.verts) @ (normais * _SINAL).T
        tol = 1e-12 * np.abs(normais).sum(axis=1)
        mudou = False
        for j in np.nonzero((S > tol).any(axis=0))[0]:
            if self.vazia:
                break
            mudou |= self.clip(normais[j], labels[j])
        return mudou

    def klein(self):
        return np.array(self.verts)[:, 1:]

    def is_compact(self):
        if self.vazia or any(lab is None for lab in self.labels):
            return False
        return bool(np.all((self.klein() ** 2).sum(axis=1) < 1.0))

    def hyperboloid_vertices(self):
        return hypmath.normalize_timelike(np.array(self.verts))

    def radius(self, p):
        """Maior distância de p a um vértice (None se a região não é compacta)"""
        if not self.is_compact():
            return None
        return float(distances(p, self.hyperboloid_vertices()).max())


def _normais_bissetoras(p, qs):
    w = qs - p
    return w / np.sqrt(mink(w, w))[:, None]


def _para_celula(regiao, nucleus):
    vertices = tuple(HPoint.from_vector(v) for v in regiao.hyperboloid_vertices())
    walls = tuple(HalfSpace(tuple(u)) for u in regiao.walls)
    return ConvexCell(nucleus, vertices, walls, tuple(int(lab) for lab in regiao.labels))


def _como_matriz(pontos):
    if isinstance(pontos, np.ndarray):
        return pontos.reshape(-1, 3)
    return np.array([q.vec for q in pontos]).reshape(-1, 3)


# ==================== CÉLULA DE UM NÚCLEO ====================

def cell_of(nucleus, others):
    """
    Célula de Voronoi de nucleus entre others, certificada: quando o próximo
    candidato está a mais de 2·(maior distância a um vértice), nenhum ponto
    restante corta a célula. sources indexa others.
    """
    p = nucleus.vec
    pts = _como_matriz(others)
    if not len(pts):
        raise UnboundedCell('nenhum outro ponto: a célula é o plano inteiro')
    d = distances(p, pts)
    if d.min() <= hypmath.get_tolerances().coincidencia:
        raise DegenerateGeometry('núcleo coincide com outro ponto')
    ordem = np.argsort(d, kind='stable')
    regiao = _Regiao.moldura(1.0)
    rho = None
    for inicio in range(0, len(ordem), LOTE):
        bloco = ordem[inicio:inicio + LOTE]
        if rho is not None and d[bloco[0]] > 2 * rho:
            break
        if regiao.clip_batch(_normais_bissetoras(p, pts[bloco]), bloco):
            rho = regiao.radius(p)
    if rho is None:
        raise UnboundedCell(f'célula ilimitada com {len(pts)} pontos')
    return _para_celula(regiao, nucleus)


def _bola_poincare(p, raio):
    """Bola hiperbólica B(p, raio) como disco euclidiano no modelo de Poincaré"""
    pc = hypmath.to_polar(HPoint.from_vector(p, normalize=False))
    a1 = math.tanh((pc.r + raio) / 2)
    a2 = math.tanh((pc.r - raio) / 2)
    direcao = np.array([math.cos(pc.theta), math.sin(pc.theta)])
    return direcao * (a1 + a2) / 2, (a1 - a2) / 2


class Vizinhanca:
    """Nuvem de pontos com árvore k-d nas coordenadas de Poincaré"""

    def __init__(self, pts):
        self.pts = pts
        self.disco = hypmath.to_disk_array(pts)
        self.arvore = cKDTree(self.disco)

    def __len__(self):
        return len(self.pts)

    def vizinhos(self, i, k=VIZINHOS_INICIAIS):
        _, idx = self.arvore.query(self.disco[i], k=min(len(self), k + 1))
        return np.atleast_1d(idx)

    def na_bola(self, p, raio):
        centro, r = _bola_poincare(p, raio)
        return np.array(self.arvore.query_ball_point(centro, r * (1 + 1e-9) + 1e-15), dtype=int)

    def recortar(self, regiao, p, idx):
        if not len(idx):
            return False
        idx = idx[np.argsort(distances(p, self.pts[idx]), kind='stable')]
        mudou = False
        for inicio in range(0, len(idx), 4 * LOTE):
            bloco = idx[inicio:inicio + 4 * LOTE]
            mudou |= regiao.clip_batch(_normais_bissetoras(p, self.pts[bloco]), bloco)
        return mudou


def certified_cell(viz, i, excluir=()):
    """Célula compacta do ponto i entre os demais pontos de viz (usada na superfície)"""
    p = viz.pts[i]
    processados = np.zeros(len(viz), dtype=bool)
    processados[i] = True
    processados[list(excluir)] = True
    regiao = _Regiao.moldura(1.0)
    novos = viz.vizinhos(i)
    alcance = 0.0
    while True:
        novos = novos[~processados[novos]]
        if len(novos):
            alcance = max(alcance, float(distances(p, viz.pts[novos]).max()))
        viz.recortar(regiao, p, novos)
        processados[novos] = True
        rho = regiao.radius(p)
        raio = 2 * rho if rho is not None else 2 * max(alcance, 1.0)
        novos = viz.na_bola(p, raio)
        novos = novos[~processados[novos]]
        if not len(novos):
            if rho is None:
                raise UnboundedCell(f'ponto {i} sem célula compacta')
            return _para_celula(regiao, HPoint.from_vector(p, normalize=False))


# ==================== CÉLULA TÍPICA ====================

def _raio_limite(lam):
    cap = settings.VORONOI_LAB['RAIO_MAXIMO']
    orcamento = hypmath.radius_for_area(settings.VORONOI_LAB['MAX_PONTOS'] / lam)
    return min(cap, orcamento)


def initial_radius(lam):
    """R₀ = max(5, 4/√λ), limitado ao raio que contém PONTOS_INICIAIS pontos esperados"""
    r0 = max(5.0, 4.0 / math.sqrt(lam))
    inicial = hypmath.radius_for_area(settings.VORONOI_LAB['PONTOS_INICIAIS'] / lam)
    return min(r0, inicial, _raio_limite(lam))


def typical_cell(lam, seed):
    """Célula do núcleo extra em O (cálculo de Palm), com janela certificada"""
    if lam <= 0:
        raise ValueError('intensidade precisa ser positiva')
    rng = seed.generator()
    limite = _raio_limite(lam)
    R = initial_radius(lam)
    pts = poisson_annulus(lam, 0.0, R, rng)
    while True:
        alvo = R + math.log(2.0)
        if len(pts):
            try:
                cell = cell_of(ORIGIN, pts)
                rho = cell.max_vertex_distance()
                if 2 * rho < R - 1.0:
                    return cell
                alvo = max(alvo, 2 * rho + 1.25)
            except UnboundedCell:
                pass
        if R >= limite:
            raise WindowCap(alvo)
        novo = min(alvo, limite)
        logger.debug('seed %s: janela %.3f -> %.3f', seed, R, novo)
        try:
            pts = np.concatenate([pts, poisson_annulus(lam, R, novo, rng)])
        except PointBudgetExceeded:
            raise WindowCap(novo)
        R = novo


# ==================== TESSELAÇÃO NUMA JANELA ====================

@dataclass(frozen=True)
class Side:
    """Lado geodésico de uma célula recortada; neighbor None = moldura"""
    start: HPoint
    end: HPoint
    wall: HalfSpace
    neighbor: object

    @property
    def length(self):
        return hypmath.dist(self.start, self.end)


@dataclass(frozen=True)
class RimArc:
    """Arco do aro da janela, de theta0 no sentido anti-horário"""
    radius: float
    theta0: float
    sweep: float

    def point(self, t):
        return hypmath.from_polar(self.radius, (self.theta0 + t * self.sweep) % (2 * math.pi))

    @property
    def start(self):
        return self.point(0.0)

    @property
    def end(self):
        return self.point(1.0)


@dataclass(frozen=True, eq=False)
class CellPiece:
    index: int
    nucleus: HPoint
    area: float
    boundary: tuple
    polygon: object = None  # ConvexCell inteira quando compacta

    @property
    def sides(self):
        return [b for b in self.boundary if isinstance(b, Side)]


@dataclass(frozen=True, eq=False)
class Tessellation:
    nuclei: np.ndarray
    cells: list
    window: object
    boundary_length: float

    @property
    def areas(self):
        return np.array([c.area for c in self.cells])


def _tangente(elemento, z):
    if isinstance(elemento, Side):
        t = mink_cross(z, elemento.wall.vec)
    else:
        pc = hypmath.to_polar(HPoint.from_vector(z, normalize=False))
        R = elemento.radius
        normal = np.array([math.sinh(R), math.cosh(R) * math.cos(pc.theta), math.cosh(R) * math.sin(pc.theta)])
        t = mink_cross(z, normal)
    return hypmath.normalize_spacelike(t)


def curved_area(boundary):
    """Gauss–Bonnet com arcos do aro: área = Σ giros + cosh R·Σ varreduras − 2π"""
    giros = 0.0
    curvatura = 0.0
    n = len(boundary)
    for k, atual in enumerate(boundary):
        if isinstance(atual, RimArc):
            curvatura += math.cosh(atual.radius) * atual.sweep
        if n == 1:
            break
        seguinte = boundary[(k + 1) % n]
        z = atual.end.vec
        t_in, t_out = _tangente(atual, z), _tangente(seguinte, z)
        giros += math.atan2(float(mink(mink_cross(z, t_in), t_out)), float(mink(t_in, t_out)))
    return giros + curvatura - 2 * math.pi


def _recortar_segmento_klein(a, b, tau):
    """Parâmetros [t0, t1] do segmento a→b (carta de Klein) dentro do círculo de raio tau"""
    d = b - a
    A = float(d @ d)
    B = float(a @ d)
    C = float(a @ a) - tau * tau
    disc = B * B - A * C
    if A <= 0 or disc <= 0:
        return None
    raiz = math.sqrt(disc)
    t1, t2 = (-B - raiz) / A, (-B + raiz) / A
    t0, tf = max(0.0, t1), min(1.0, t2)
    if tf - t0 <= 1e-14:
        return None
    return t0, tf, t1 > 0.0, t2 < 1.0


def _do_klein(k, no_aro, R):
    if no_aro:
        return hypmath.from_polar(R, math.atan2(k[1], k[0]) % (2 * math.pi))
    return HPoint.from_vector(np.array([1.0, k[0], k[1]]))


def _peca_no_disco(regiao, R):
    """Contorno (lados e arcos, anti-horário) de região ∩ disco de raio R"""
    tau = math.tanh(R)
    K = regiao.klein()
    n = len(K)
    partes = []
    for i in range(n):
        corte = _recortar_segmento_klein(K[i], K[(i + 1) % n], tau)
        if corte is not None:
            partes.append((i,) + corte)
    if not partes:
        if all(u[0] >= 0 for u in regiao.walls):
            return (RimArc(R, 0.0, 2 * math.pi),)
        return ()
    contorno = []
    for j, (i, t0, t1, entra, sai) in enumerate(partes):
        a, b = K[i], K[(i + 1) % n]
        inicio = _do_klein(a + t0 * (b - a), entra, R)
        fim = _do_klein(a + t1 * (b - a), sai, R)
        contorno.append(Side(inicio, fim, HalfSpace(tuple(regiao.walls[i])), regiao.labels[i]))
        if sai:
            i2, t2 = partes[(j + 1) % len(partes)][:2]
            a2, b2 = K[i2], K[(i2 + 1) % n]
            entrada = a2 + t2 * (b2 - a2)
            theta0 = math.atan2(fim.x2, fim.x1) % (2 * math.pi)
            varredura = (math.atan2(entrada[1], entrada[0]) - theta0) % (2 * math.pi)
            if varredura > 1e-15:
                contorno.append(RimArc(R, theta0, varredura))
    return tuple(contorno)


def _alcance(contorno, p):
    """Maior distância de p a um ponto do contorno"""
    pc = hypmath.to_polar(HPoint.from_vector(p, normalize=False))
    maior = 0.0
    for elemento in contorno:
        if isinstance(elemento, Side):
            maior = max(maior, float(distances(p, np.array([elemento.start.vec, elemento.end.vec])).max()))
            continue
        R = elemento.radius
        oposto = (pc.theta + math.pi - elemento.theta0) % (2 * math.pi)
        if oposto <= elemento.sweep:
            cos_min = -1.0
        else:
            fim = elemento.theta0 + elemento.sweep
            cos_min = min(math.cos(elemento.theta0 - pc.theta), math.cos(fim - pc.theta))
        c = math.cosh(pc.r) * math.cosh(R) - math.sinh(pc.r) * math.sinh(R) * cos_min
        maior = max(maior, math.acosh(max(1.0, c)))
    return maior


def _celula_na_janela(viz, i, R):
    p = viz.pts[i]
    # moldura entre a janela e o infinito: nunca contribui lados dentro do disco
    regiao = _Regiao.moldura((1.0 + math.tanh(R)) / 2)
    processados = np.zeros(len(viz), dtype=bool)
    processados[i] = True
    novos = viz.vizinhos(i)
    while True:
        novos = novos[~processados[novos]]
        viz.recortar(regiao, p, novos)
        processados[novos] = True
        contorno = _peca_no_disco(regiao, R)
        novos = viz.na_bola(p, 2 * _alcance(contorno, p))
        novos = novos[~processados[novos]]
        if not len(novos):
            break
    nucleo = HPoint.from_vector(p, normalize=False)
    poligono = _para_celula(regiao, nucleo) if regiao.is_compact() else None
    return CellPiece(i, nucleo, curved_area(contorno) if contorno else 0.0, contorno, poligono)


def _bloco_de_celulas(tarefa):
    pts, indices, R = tarefa
    viz = Vizinhanca(pts)
    return [_celula_na_janela(viz, i, R) for i in indices]


def tessellate_window(cloud, workers=1):
    """Tesselação de Voronoi da nuvem recortada à janela (disco de raio R)"""
    if not len(cloud):
        raise ValueError('tesselação precisa de pelo menos um ponto')
    if not isinstance(cloud.window, DiskWindow):
        raise ValueError('tessellate_window trabalha com janelas em disco')
    R = cloud.window.radius
    pts = cloud.points
    blocos = np.array_split(np.arange(len(pts)), max(1, min(len(pts), 4 * int(workers))))
    partes = map_replicas(_bloco_de_celulas, [(pts, b, R) for b in blocos if len(b)], workers)
    cells = [c for parte in partes for c in parte]
    comprimento = 0.5 * sum(s.length for c in cells for s in c.sides if s.neighbor is not None)
    return Tessellation(pts, cells, cloud.window, comprimento)


def locate(t, x):
    """Índice do núcleo mais próximo (empate: menor índice)"""
    return int(np.argmin(distances(x.vec, t.nuclei)))


def _comprimento_no_disco(lado, raio):
    tau = math.tanh(raio)
    a = lado.start.vec[1:] / lado.start.x0
    b = lado.end.vec[1:] / lado.end.x0
    corte = _recortar_segmento_klein(a, b, tau)
    if corte is None:
        return 0.0
    t0, t1 = corte[:2]
    z0 = HPoint.from_vector(np.array([1.0, *(a + t0 * (b - a))]))
    z1 = HPoint.from_vector(np.array([1.0, *(a + t1 * (b - a))]))
    return hypmath.dist(z0, z1)


def boundary_length_in(t, raio):
    """Comprimento dos lados internos dentro do disco de raio `raio` (cada lado uma vez)"""
    return 0.5 * sum(_comprimento_no_disco(s, raio) for c in t.cells for s in c.sides
                     if s.neighbor is not None)
