"""
Primitivas do plano hiperbólico no modelo do hiperboloide.

Pontos são vetores de Minkowski (assinatura −,+,+) com <p,p> = −1 e x0 >= 1.
O disco de Poincaré só aparece na conversão para desenho (to_disk) e nas
consultas de vizinhança do voronoi.
"""
import functools
import logging
import math
from dataclasses import dataclass, fields

import numpy as np

from .exceptions import DegenerateGeometry

logger = logging.getLogger(__name__)

J = np.diag([-1.0, 1.0, 1.0])
_SINAL = np.array([-1.0, 1.0, 1.0])


# ==================== TOLERÂNCIAS ====================

@dataclass(frozen=True)
class Tolerances:
    """Pacote único de tolerâncias numéricas"""
    hiperboloide: float = 1e-9
    vertice: float = 1e-7
    bissetor: float = 1e-8
    degenerado: float = 1e-12
    coincidencia: float = 1e-10


_sobrescritas = {}


@functools.lru_cache(maxsize=1)
def get_tolerances():
    """Tolerâncias padrão + settings.VORONOI_LAB['TOLERANCIAS'] + sobrescritas do YAML"""
    valores = {}
    try:
        from django.conf import settings
        valores.update(settings.VORONOI_LAB.get('TOLERANCIAS', {}))
    except Exception:
        # Uso fora do Django (scripts soltos)
        pass
    valores.update(_sobrescritas)
    nomes = {f.name for f in fields(Tolerances)}
    return Tolerances(**{k: float(v) for k, v in valores.items() if k in nomes})


def configure_tolerances(**novas):
    _sobrescritas.update(novas)
    get_tolerances.cache_clear()


def tolerance_overrides():
    return dict(_sobrescritas)


def reset_tolerances():
    _sobrescritas.clear()
    get_tolerances.cache_clear()


# ==================== ÁLGEBRA DE MINKOWSKI ====================

def mink(a, b):
    """Produto de Minkowski <a,b> = −a0 b0 + a1 b1 + a2 b2 (vetorizado no último eixo)"""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return -a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1] + a[..., 2] * b[..., 2]


def mink_cross(a, b):
    """Vetor ortogonal (Minkowski) a a e b: J (a × b)"""
    return np.cross(a, b) * _SINAL


def normalize_timelike(v):
    """Projeta v (tipo tempo) no hiperboloide, com x0 > 0"""
    v = np.asarray(v, dtype=float)
    n2 = -mink(v, v)
    if np.any(n2 <= 0):
        raise DegenerateGeometry('vetor não é do tipo tempo')
    v = v / np.sqrt(n2)[..., None] if v.ndim > 1 else v / math.sqrt(n2)
    return v * np.sign(v[..., :1])


def normalize_spacelike(u):
    u = np.asarray(u, dtype=float)
    n2 = mink(u, u)
    if n2 <= 0:
        raise DegenerateGeometry('vetor não é do tipo espaço')
    return u / math.sqrt(n2)


def polar_array(r, theta):
    """Pontos [r;θ] como matriz (n, 3)"""
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    s = np.sinh(r)
    return np.stack([np.cosh(r), s * np.cos(theta), s * np.sin(theta)], axis=-1)


def distances(p, qs):
    """Distâncias de p a cada linha de qs"""
    return np.arccosh(np.maximum(1.0, -mink(p, qs)))


# ==================== TIPOS ====================

@dataclass(frozen=True)
class HPoint:
    x0: float
    x1: float
    x2: float

    def __post_init__(self):
        tol = get_tolerances().hiperboloide
        escala = max(1.0, self.x0 * self.x0)
        norma = self.x1 * self.x1 + self.x2 * self.x2 - self.x0 * self.x0
        if abs(norma + 1.0) > tol * escala or self.x0 < 1.0 - tol:
            raise DegenerateGeometry(f'ponto fora do hiperboloide: {self.vec}')

    @classmethod
    def from_vector(cls, v, normalize=True):
        v = normalize_timelike(v) if normalize else np.asarray(v, dtype=float)
        return cls(float(v[0]), float(v[1]), float(v[2]))

    @property
    def vec(self):
        return np.array([self.x0, self.x1, self.x2])

    def __str__(self):
        r = to_polar(self)
        return f'[{r.r:.6f};{r.theta:.6f}]'


ORIGIN = HPoint(1.0, 0.0, 0.0)


@dataclass(frozen=True)
class PolarCoord:
    r: float
    theta: float

    def __post_init__(self):
        if self.r < 0 or not 0.0 <= self.theta < 2 * math.pi:
            raise ValueError(f'coordenada polar inválida: ({self.r}, {self.theta})')


@dataclass(frozen=True)
class HalfSpace:
    """Semiplano {x : <x,u> <= 0}, com <u,u> = 1"""
    u: tuple

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        escala = max(1.0, float(np.dot(u, u)))
        if abs(mink(u, u) - 1.0) > get_tolerances().hiperboloide * escala:
            raise DegenerateGeometry('normal do semiplano não é unitária')
        object.__setattr__(self, 'u', tuple(float(x) for x in u))

    @property
    def vec(self):
        return np.array(self.u)

    def value(self, p):
        v = p.vec if isinstance(p, HPoint) else p
        return mink(v, self.vec)

    def contains(self, p, tol=0.0):
        return self.value(p) <= tol

    def complement(self):
        return HalfSpace(tuple(-x for x in self.u))


@dataclass(frozen=True, eq=False)
class Isometry:
    """Elemento de O⁺(2,1) agindo linearmente no hiperboloide"""
    m: np.ndarray

    def __post_init__(self):
        m = np.array(self.m, dtype=float)
        if m.shape != (3, 3):
            raise ValueError('isometria precisa ser 3x3')
        erro = np.abs(m.T @ J @ m - J).max()
        if erro > get_tolerances().hiperboloide * max(1.0, np.abs(m).max() ** 2) or m[0, 0] <= 0:
            raise DegenerateGeometry('matriz não preserva a forma de Minkowski')
        m.setflags(write=False)
        object.__setattr__(self, 'm', m)

    def __matmul__(self, other):
        return compose(self, other)

    @property
    def trace(self):
        return float(np.trace(self.m))


@dataclass(frozen=True, eq=False)
class ConvexCell:
    """
    Polígono convexo compacto: núcleo, vértices em ordem anti-horária e uma
    parede por aresta. A parede i liga vertices[i] a vertices[i+1].
    sources[i] é o índice do ponto que gerou a parede i (None = moldura ou domínio).
    """
    nucleus: HPoint
    vertices: tuple
    walls: tuple
    sources: tuple = ()

    def __post_init__(self):
        n = len(self.vertices)
        if n < 3 or len(self.walls) != n:
            raise DegenerateGeometry(f'polígono com {n} vértices e {len(self.walls)} paredes')
        if not self.sources:
            object.__setattr__(self, 'sources', (None,) * n)
        tol = get_tolerances()
        nuc = self.nucleus.vec
        for i, parede in enumerate(self.walls):
            if parede.value(nuc) >= 0:
                raise DegenerateGeometry(f'núcleo fora da parede {i}')
            u = parede.vec
            for v in (self.vertices[i], self.vertices[(i + 1) % n]):
                escala = np.linalg.norm(v.vec) * np.linalg.norm(u)
                if abs(mink(v.vec, u)) > tol.vertice * escala:
                    raise DegenerateGeometry(f'vértice fora da parede {i}')
        for i in range(n):
            a, b = self.vertices[i].vec, self.vertices[(i + 1) % n].vec
            if np.linalg.det(np.stack([nuc, a, b])) <= 0:
                raise DegenerateGeometry('vértices fora da ordem anti-horária')

    @classmethod
    def from_vertices(cls, nucleus, vertices, sources=()):
        """Monta as paredes a partir dos vértices (anti-horários)"""
        vertices = tuple(vertices)
        walls = []
        for i, v in enumerate(vertices):
            w = vertices[(i + 1) % len(vertices)]
            u = normalize_spacelike(mink_cross(v.vec, w.vec))
            if mink(nucleus.vec, u) > 0:
                u = -u
            walls.append(HalfSpace(tuple(u)))
        return cls(nucleus, vertices, tuple(walls), tuple(sources))

    @property
    def vertex_array(self):
        return np.array([v.vec for v in self.vertices])

    @property
    def wall_array(self):
        return np.array([w.vec for w in self.walls])

    def max_vertex_distance(self):
        return float(distances(self.nucleus.vec, self.vertex_array).max())


# ==================== DISTÂNCIAS E BOLAS ====================

def dist(p, q):
    return math.acosh(max(1.0, float(-mink(p.vec, q.vec))))


def law_of_cosines(d, r, theta):
    """d(y,z) para y = [d;0] e z = [r;θ]"""
    if d < 0 or r < 0:
        raise ValueError('distâncias negativas')
    c = math.cosh(d) * math.cosh(r) - math.cos(theta) * math.sinh(d) * math.sinh(r)
    return math.acosh(max(1.0, c))


def ball_area(r):
    if r < 0:
        raise ValueError('raio negativo')
    return 2 * math.pi * (math.cosh(r) - 1.0)


def ball_circumference(r):
    if r < 0:
        raise ValueError('raio negativo')
    return 2 * math.pi * math.sinh(r)


def radius_for_area(area):
    """Inverso de ball_area"""
    return math.acosh(1.0 + area / (2 * math.pi))


def midpoint(p, q):
    return HPoint.from_vector(p.vec + q.vec)


def bisector(p, q):
    """Semiplano dos pontos mais próximos de p do que de q"""
    w = q.vec - p.vec
    n2 = float(mink(w, w))
    if n2 <= get_tolerances().degenerado:
        raise DegenerateGeometry('bissetor de pontos coincidentes')
    return HalfSpace(tuple(w / math.sqrt(n2)))


def meet(u, w):
    """Ponto de encontro das geodésicas de normais u e w (None se não se cruzam em ℍ)"""
    m = mink_cross(np.asarray(u, dtype=float), np.asarray(w, dtype=float))
    n2 = float(mink(m, m))
    if n2 >= -get_tolerances().degenerado * float(np.dot(m, m)):
        return None
    return HPoint.from_vector(m)


# ==================== POLÍGONOS ====================

def interior_angles(c):
    """Ângulo interno em cada vértice (entre as paredes i−1 e i)"""
    normais = c.wall_array
    cosenos = np.clip(mink(np.roll(normais, 1, axis=0), normais), -1.0, 1.0)
    return np.pi - np.arccos(cosenos)


def gauss_bonnet_area(angles):
    """Área = (n−2)π − Σ ângulos; soma >= (n−2)π não existe no plano hiperbólico"""
    angles = np.asarray(angles, dtype=float)
    area = (len(angles) - 2) * math.pi - float(angles.sum())
    if area <= get_tolerances().degenerado:
        raise DegenerateGeometry(f'soma dos ângulos {angles.sum():.6f} não admite polígono hiperbólico')
    return area


def polygon_area(c):
    if not isinstance(c, ConvexCell):
        raise DegenerateGeometry('célula ilimitada não tem área')
    return gauss_bonnet_area(interior_angles(c))


def polygon_perimeter(c):
    if not isinstance(c, ConvexCell):
        raise DegenerateGeometry('célula ilimitada não tem perímetro')
    v = c.vertex_array
    return float(np.arccosh(np.maximum(1.0, -mink(v, np.roll(v, -1, axis=0)))).sum())


def contains(c, points, tol=None):
    """Pertinência ao polígono (aceita um HPoint ou matriz (n,3))"""
    tol = get_tolerances().vertice if tol is None else tol
    pts = points.vec if isinstance(points, HPoint) else np.asarray(points, dtype=float)
    valores = pts @ (c.wall_array * _SINAL).T
    return np.all(valores <= tol, axis=-1)


def regular_polygon(n, alpha):
    """n-ágono regular centrado em O com ângulo interno alpha"""
    cosh_h = math.cos(alpha / 2) / math.sin(math.pi / n)
    if cosh_h <= 1.0:
        raise DegenerateGeometry(f'não existe {n}-ágono regular hiperbólico com ângulo {alpha}')
    h = math.acosh(cosh_h)
    phis = 2 * math.pi * np.arange(n) / n
    normais = np.stack([np.full(n, math.sinh(h)), cosh_h * np.cos(phis), cosh_h * np.sin(phis)], axis=1)
    walls = tuple(HalfSpace(tuple(u)) for u in normais)
    vertices = tuple(meet(normais[i - 1], normais[i]) for i in range(n))
    return ConvexCell(ORIGIN, vertices, walls)


def mc_area(c, samples, rng):
    """Área por rejeição num disco centrado no núcleo: (estimativa, erro padrão)"""
    rho = c.max_vertex_distance()
    total = ball_area(rho)
    u = rng.random(samples)
    r = np.arccosh(1.0 + u * (math.cosh(rho) - 1.0))
    theta = rng.random(samples) * 2 * math.pi
    pts = polar_array(r, theta) @ translation_to(c.nucleus).m.T
    frac = float(np.mean(contains(c, pts, tol=0.0)))
    return frac * total, total * math.sqrt(frac * (1.0 - frac) / samples)


# ==================== ISOMETRIAS ====================

def identity():
    return Isometry(np.eye(3))


def rotation(alpha):
    c, s = math.cos(alpha), math.sin(alpha)
    return Isometry(np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]]))


def boost(t):
    """Translação de comprimento t ao longo do eixo x1"""
    c, s = math.cosh(t), math.sinh(t)
    return Isometry(np.array([[c, s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]))


def translation_to(p):
    """Translação que leva O em p"""
    pc = to_polar(p)
    return compose(rotation(pc.theta), compose(boost(pc.r), rotation(-pc.theta)))


def reflection(u):
    """Reflexão na geodésica {<x,u> = 0}"""
    u = normalize_spacelike(u)
    return Isometry(np.eye(3) - 2.0 * np.outer(u, u) @ J)


def inverse(g):
    return Isometry(J @ g.m.T @ J)


def apply(g, p):
    return HPoint.from_vector(g.m @ p.vec)


def compose(g, h):
    return Isometry(g.m @ h.m)


def translation_length(g):
    """Para matrizes de SO⁺(2,1): traço = 1 + 2 cosh ℓ (equivale a 2 cosh(ℓ/2) = |traço| em SL2)"""
    return math.acosh(max(1.0, (g.trace - 1.0) / 2.0))


# ==================== CONVERSÕES ====================

def from_polar(r, theta):
    s = math.sinh(r)
    return HPoint(math.cosh(r), s * math.cos(theta), s * math.sin(theta))


def to_polar(p):
    r = math.acosh(max(1.0, p.x0))
    theta = math.atan2(p.x2, p.x1) % (2 * math.pi) if r > 0 else 0.0
    if theta >= 2 * math.pi:
        theta = 0.0
    return PolarCoord(r, theta)


def to_disk(p):
    return p.x1 / (1.0 + p.x0), p.x2 / (1.0 + p.x0)


def to_disk_array(points):
    points = np.asarray(points, dtype=float)
    return points[..., 1:] / (1.0 + points[..., :1])


def from_disk(u, v):
    s = u * u + v * v
    if s >= 1.0:
        raise ValueError('ponto fora do disco unitário')
    return HPoint((1.0 + s) / (1.0 - s), 2 * u / (1.0 - s), 2 * v / (1.0 - s))


def disk_distance(z, w):
    """Distância pela fórmula do disco de Poincaré"""
    dz = (z[0] - w[0]) ** 2 + (z[1] - w[1]) ** 2
    nz = 1.0 - z[0] ** 2 - z[1] ** 2
    nw = 1.0 - w[0] ** 2 - w[1] ** 2
    return math.acosh(1.0 + 2.0 * dz / (nz * nw))
