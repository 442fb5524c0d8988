"""
Exceções do laboratório.
O comando `lab` converte qualquer LabError em saída com código 1.
"""


class LabError(Exception):
    """Base de todos os erros do laboratório"""


class DegenerateGeometry(LabError, ValueError):
    """Pontos coincidentes, bissetor indefinido ou polígono impossível"""


class UnboundedCell(LabError):
    """A interseção dos semiplanos não é compacta dentro da janela"""


class WindowCap(LabError):
    """A janela da célula típica precisaria passar do raio máximo"""

    def __init__(self, radius, message=None):
        self.radius = radius
        super().__init__(message or f'janela atingiria R = {radius:.3f}, acima do limite')


class PointBudgetExceeded(LabError, ValueError):
    """Número esperado de pontos acima do limite configurado"""


class CutoffTooSmall(LabError):
    """O raio de corte dos translados não cobre a distância pedida"""


class RejectionBudgetExhausted(LabError):
    """O modelo de configuração esgotou as tentativas"""


class SizeCapExceeded(LabError, ValueError):
    """Grafo grande demais para a enumeração exata"""
