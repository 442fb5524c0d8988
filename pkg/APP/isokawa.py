"""
Valores de referência da célula típica (fórmulas de Isokawa) e os
experimentos de Monte Carlo que os confrontam.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from . import hypmath
from .exceptions import WindowCap
from .parallel import map_replicas
from .voronoi import typical_cell

logger = logging.getLogger(__name__)

RATIO_LIMIT = 4 / math.pi
DENSITY_LIMIT = 2 / math.pi
LAMBDA_MAXIMO_DENSIDADE = 10.0
CORTE_QUADRATURA = 50.0
FRACAO_EXCLUSAO_MAXIMA = 0.01


# ==================== ESTIMATIVAS ====================

@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    n: int
    excluded: int
    seed: object

    def __post_init__(self):
        if self.n < 1 or self.stderr < 0:
            raise ValueError('estimativa precisa de n >= 1 e erro padrão >= 0')

    @classmethod
    def from_samples(cls, values, excluded, seed):
        values = np.asarray(values, dtype=float)
        if not len(values):
            raise ValueError('nenhuma réplica válida para a estimativa')
        erro = float(values.std(ddof=1) / math.sqrt(len(values))) if len(values) > 1 else 0.0
        return cls(float(values.mean()), erro, len(values), int(excluded), seed)

    @property
    def excluded_fraction(self):
        """Exclusões por réplica válida"""
        return self.excluded / self.n

    @property
    def valid(self):
        return self.excluded_fraction < FRACAO_EXCLUSAO_MAXIMA

    def within(self, alvo, k=3.0):
        """|média − alvo| <= k erros padrão"""
        return abs(self.mean - alvo) <= k * self.stderr


@dataclass(frozen=True)
class RatioRow:
    lam: float
    mean_area: MCEstimate
    mean_perimeter: MCEstimate
    ratio: float
    reference_perimeter: float

    @property
    def density(self):
        """Densidade de fronteira: cada lado é dividido por duas células"""
        return self.lam * self.mean_perimeter.mean / 2

    @property
    def excluded(self):
        return self.mean_area.excluded


# ==================== QUADRATURA ====================

def _integrando(u, lam):
    return math.exp(-u) * math.sqrt(u + u * u / (4 * math.pi * lam))


def isokawa_perimeter_bound(lam):
    """(valor, erro absoluto certificado) de E|∂C_λ| = (8/√(πλ)) ∫ e^{−u} √(u + u²/(4πλ)) du"""
    if lam <= 0:
        raise ValueError('intensidade precisa ser positiva')
    fator = 8 / math.sqrt(math.pi * lam)
    valor, erro = quad(_integrando, 0.0, CORTE_QUADRATURA, args=(lam,), epsabs=1e-10, epsrel=1e-12, limit=200)
    # ∫_50^∞ e^{−u}(√u + u/(2√(πλ))) du <= 51 e^{−50} (1 + 1/(2√(πλ)))
    cauda = 51 * math.exp(-CORTE_QUADRATURA) * (1 + 1 / (2 * math.sqrt(math.pi * lam)))
    return fator * valor, fator * (erro + cauda)


def isokawa_perimeter(lam):
    return isokawa_perimeter_bound(lam)[0]


def isokawa_area(lam):
    if lam <= 0:
        raise ValueError('intensidade precisa ser positiva')
    return 1.0 / lam


def planar_boundary_density(lam):
    """Comprimento esperado de fronteira por unidade de área"""
    return lam * isokawa_perimeter(lam) / 2


# ==================== EXPERIMENTOS ====================

def _replica(tarefa):
    lam, seed = tarefa
    try:
        cell = typical_cell(lam, seed)
    except WindowCap as e:
        logger.debug('réplica %s excluída: %s', seed, e)
        return None
    return hypmath.polygon_area(cell), hypmath.polygon_perimeter(cell)


def typical_cell_experiment(lam, replicas, seed, workers=None):
    """Médias de área e perímetro da célula típica; a réplica i usa o stream seed.stream + i"""
    if replicas < 100:
        raise ValueError('o experimento precisa de pelo menos 100 réplicas')
    resultados = map_replicas(_replica, [(lam, seed.child(i)) for i in range(replicas)], workers)
    validos = [r for r in resultados if r is not None]
    excluidos = replicas - len(validos)
    if excluidos:
        logger.warning('λ=%g: %d de %d réplicas excluídas pelo limite da janela', lam, excluidos, replicas)
    amostras = np.array(validos, dtype=float).reshape(-1, 2)
    area = MCEstimate.from_samples(amostras[:, 0], excluidos, seed)
    perimetro = MCEstimate.from_samples(amostras[:, 1], excluidos, seed)
    if not area.valid:
        logger.warning('λ=%g: fração de exclusões %.3f invalida a estimativa', lam, area.excluded_fraction)
    logger.info('λ=%g: área %.6f ± %.6f, perímetro %.6f ± %.6f (%d réplicas)',
                lam, area.mean, area.stderr, perimetro.mean, perimetro.stderr, area.n)
    return RatioRow(lam, area, perimetro, perimetro.mean / area.mean, isokawa_perimeter(lam))


def density_experiment(lambdas, replicas, seed, workers=None):
    """Uma linha por λ (decrescente); λ acima de 10 fica de fora com aviso"""
    lambdas = [float(x) for x in lambdas]
    if any(x <= 0 for x in lambdas):
        raise ValueError('intensidades precisam ser positivas')
    if any(b >= a for a, b in zip(lambdas, lambdas[1:])):
        raise ValueError('intensidades precisam estar em ordem decrescente')
    linhas = []
    for k, lam in enumerate(lambdas):
        if lam > LAMBDA_MAXIMO_DENSIDADE:
            logger.warning('λ=%g omitido: densidade só é reportada para λ <= %g', lam, LAMBDA_MAXIMO_DENSIDADE)
            continue
        linhas.append(typical_cell_experiment(lam, replicas, seed.child(k * replicas), workers))
    if linhas:
        logger.info('densidade na última linha: %.6f (limite 2/π = %.6f)', linhas[-1].density, DENSITY_LIMIT)
    return linhas
