"""
Amostragem com semente: processos de Poisson em discos hiperbólicos e no
domínio fundamental da superfície.

Cada réplica usa um gerador Philox com chave (master, stream), então réplicas
paralelas nunca compartilham estado.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from django.conf import settings

from . import hypmath
from .exceptions import PointBudgetExceeded

logger = logging.getLogger(__name__)

_MAX_U64 = 2 ** 64 - 1


@dataclass(frozen=True)
class Seed:
    master: int
    stream: int = 0

    def __post_init__(self):
        if not (0 <= self.master <= _MAX_U64 and 0 <= self.stream <= _MAX_U64):
            raise ValueError('semente fora do intervalo de 64 bits')

    @classmethod
    def parse(cls, texto):
        """Aceita 'M' ou 'M:S'"""
        partes = str(texto).split(':')
        if len(partes) > 2:
            raise ValueError(f'semente inválida: {texto}')
        return cls(int(partes[0]), int(partes[1]) if len(partes) == 2 else 0)

    def child(self, offset):
        return Seed(self.master, self.stream + int(offset))

    def generator(self, substream=0):
        """substream desloca a palavra alta do contador (sequências disjuntas do mesmo stream)"""
        chave = np.array([self.master, self.stream], dtype=np.uint64)
        contador = np.array([0, 0, 0, substream], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(counter=contador, key=chave))

    def __str__(self):
        return f'{self.master}:{self.stream}'


@dataclass(frozen=True)
class DiskWindow:
    """Disco de raio R centrado em O"""
    radius: float

    @property
    def area(self):
        return hypmath.ball_area(self.radius)


@dataclass(frozen=True)
class SurfaceWindow:
    """Domínio fundamental de uma superfície compacta"""
    label: str
    area: float


@dataclass(frozen=True, eq=False)
class PointCloud:
    points: np.ndarray  # (n, 3) no hiperboloide
    intensity: float
    window: object

    def __post_init__(self):
        if self.intensity <= 0:
            raise ValueError('intensidade precisa ser positiva')
        pts = np.asarray(self.points, dtype=float).reshape(-1, 3)
        pts.setflags(write=False)
        object.__setattr__(self, 'points', pts)

    def __len__(self):
        return len(self.points)

    @property
    def hpoints(self):
        return [hypmath.HPoint.from_vector(p, normalize=False) for p in self.points]


def _limite_pontos():
    return settings.VORONOI_LAB['MAX_PONTOS']


def expected_count(lam, R_in, R_out):
    return lam * 2 * math.pi * (math.cosh(R_out) - math.cosh(R_in))


def void_probability(lam, R):
    """P(N = 0) para o disco de raio R"""
    return math.exp(-lam * hypmath.ball_area(R))


def uniform_in_disk(n, R, rng, R_in=0.0):
    """n pontos uniformes (medida de área) no anel R_in < r <= R"""
    u = rng.random(n)
    c_in = math.cosh(R_in)
    r = np.arccosh(c_in + u * (math.cosh(R) - c_in))
    theta = rng.random(n) * 2 * math.pi
    return hypmath.polar_array(r, theta)


def _sem_coincidencias(pts, R_in, R, rng):
    """Reamostra sorteios com núcleos a menos de 1e−10 (evento de probabilidade zero)"""
    tol = hypmath.get_tolerances().coincidencia
    while len(pts) > 1:
        disco = hypmath.to_disk_array(pts)
        ordem = np.lexsort((disco[:, 1], disco[:, 0]))
        gaps = np.linalg.norm(np.diff(disco[ordem], axis=0), axis=1)
        ruins = ordem[1:][gaps < tol]
        if not len(ruins):
            break
        logger.debug('reamostrando %d pontos quase coincidentes', len(ruins))
        pts = pts.copy()
        pts[ruins] = uniform_in_disk(len(ruins), R, rng, R_in)
    return pts


def poisson_annulus(lam, R_in, R_out, rng):
    """Processo de Poisson no anel R_in < r <= R_out, continuando o gerador rng"""
    media = expected_count(lam, R_in, R_out)
    if media > _limite_pontos():
        raise PointBudgetExceeded(f'{media:.3g} pontos esperados acima do limite {_limite_pontos()}')
    n = int(rng.poisson(media))
    return _sem_coincidencias(uniform_in_disk(n, R_out, rng, R_in), R_in, R_out, rng)


def poisson_disk(lam, R, seed):
    if lam <= 0:
        raise ValueError('intensidade precisa ser positiva')
    if not 0 < R <= settings.VORONOI_LAB['RAIO_MAXIMO']:
        raise ValueError(f'raio {R} fora de (0, {settings.VORONOI_LAB["RAIO_MAXIMO"]}]')
    pts = poisson_annulus(lam, 0.0, R, seed.generator())
    return PointCloud(pts, lam, DiskWindow(R))


def surface_acceptance_rate(surf):
    """Área do octógono sobre a área do disco que o circunscreve"""
    return surf.area / hypmath.ball_area(surf.domain.max_vertex_distance())


def sample_domain(n, surf, rng):
    """n pontos uniformes no domínio fundamental, por rejeição do disco circunscrito"""
    rho = surf.domain.max_vertex_distance()
    taxa = surface_acceptance_rate(surf)
    aceitos = []
    total = 0
    while total < n:
        lote = uniform_in_disk(int((n - total) / taxa) + 16, rho, rng)
        lote = lote[hypmath.contains(surf.domain, lote, tol=0.0)]
        aceitos.append(lote)
        total += len(lote)
    return np.concatenate(aceitos)[:n] if aceitos else np.empty((0, 3))


def poisson_surface(lam, surf, seed):
    if lam <= 0:
        raise ValueError('intensidade precisa ser positiva')
    rng = seed.generator()
    n = int(rng.poisson(lam * surf.area))
    pts = sample_domain(n, surf, rng)
    return PointCloud(pts, lam, SurfaceWindow(surf.group.label, surf.area))
