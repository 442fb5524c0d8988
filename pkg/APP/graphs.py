"""
Aquecimento em grafos: grafos d-regulares aleatórios, coloração de metade dos
vértices, regiões por árvore geradora e o Cheeger exato de grafos pequenos.
"""
import logging
import math
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .exceptions import RejectionBudgetExhausted, SizeCapExceeded
from .isokawa import MCEstimate

logger = logging.getLogger(__name__)

MAX_TENTATIVAS = 1000
MAX_VERTICES_EXATO = 20


# ==================== GRAFOS ====================

@dataclass(frozen=True, eq=False)
class RegularGraph:
    n: int
    d: int
    edges: np.ndarray  # (n·d/2, 2), u < v

    def __post_init__(self):
        arestas = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if (self.n * self.d) % 2:
            raise ValueError('n·d precisa ser par')
        if np.any(arestas[:, 0] == arestas[:, 1]):
            raise ValueError('grafo com laço')
        if len(np.unique(np.sort(arestas, axis=1), axis=0)) != len(arestas):
            raise ValueError('grafo com arestas múltiplas')
        graus = np.bincount(arestas.ravel(), minlength=self.n)
        if len(graus) != self.n or np.any(graus != self.d):
            raise ValueError(f'grafo não é {self.d}-regular')
        arestas.setflags(write=False)
        object.__setattr__(self, 'edges', arestas)
        if not nx.is_connected(self.to_networkx()):
            raise ValueError('grafo desconexo')

    def to_networkx(self):
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(map(tuple, self.edges.tolist()))
        return g

    @classmethod
    def from_networkx(cls, g):
        g = nx.convert_node_labels_to_integers(g, ordering='sorted')
        graus = {grau for _, grau in g.degree()}
        if len(graus) != 1:
            raise ValueError('grafo não é regular')
        arestas = np.sort(np.array(list(g.edges()), dtype=np.int64).reshape(-1, 2), axis=1)
        return cls(g.number_of_nodes(), graus.pop(), arestas)

    def neighbors(self):
        viz = [[] for _ in range(self.n)]
        for u, v in self.edges.tolist():
            viz[u].append(v)
            viz[v].append(u)
        return viz


def complete_graph(n):
    return RegularGraph.from_networkx(nx.complete_graph(n))


def cycle_graph(n):
    return RegularGraph.from_networkx(nx.cycle_graph(n))


def petersen_graph():
    return RegularGraph.from_networkx(nx.petersen_graph())


NAMED_GRAPHS = {
    'k4': lambda: complete_graph(4),
    'c6': lambda: cycle_graph(6),
    'petersen': petersen_graph,
}


def random_regular(n, d, seed):
    """Modelo de configuração com rejeição de laços, arestas múltiplas e grafos desconexos"""
    if d < 3 or (n * d) % 2 or n <= d:
        raise ValueError(f'parâmetros inválidos: n={n}, d={d}')
    rng = seed.generator()
    meias = np.repeat(np.arange(n), d)
    for tentativa in range(MAX_TENTATIVAS):
        pares = np.sort(rng.permutation(meias).reshape(-1, 2), axis=1)
        if np.any(pares[:, 0] == pares[:, 1]):
            continue
        if len(np.unique(pares, axis=0)) != len(pares):
            continue
        try:
            g = RegularGraph(n, d, pares[np.lexsort((pares[:, 1], pares[:, 0]))])
        except ValueError:
            continue
        logger.debug('grafo %d-regular com %d vértices após %d tentativas', d, n, tentativa + 1)
        return g
    raise RejectionBudgetExhausted(f'{MAX_TENTATIVAS} tentativas sem grafo simples conexo (n={n}, d={d})')


# ==================== FRONTEIRAS ====================

def boundary_edges(g, black):
    black = np.asarray(black, dtype=bool)
    return int(np.count_nonzero(black[g.edges[:, 0]] != black[g.edges[:, 1]]))


def cheeger_ratio(g, black):
    """h*(A) com o menor entre A e o complemento no denominador"""
    pretos = int(np.count_nonzero(black))
    menor = min(pretos, g.n - pretos)
    if menor == 0:
        return math.inf
    return boundary_edges(g, black) / menor


@dataclass(frozen=True)
class GraphColoringReport:
    h_star: MCEstimate
    boundary: MCEstimate
    black: MCEstimate
    rows: list = field(default_factory=list)  # (trial, boundary_edges, black_count, h_star)


def _relatorio(linhas, seed):
    finitas = [linha for linha in linhas if math.isfinite(linha[3])]
    excluidas = len(linhas) - len(finitas)
    if excluidas:
        logger.info('%d colorações monocromáticas fora da média de h*', excluidas)
    return GraphColoringReport(
        h_star=MCEstimate.from_samples([linha[3] for linha in finitas], excluidas, seed),
        boundary=MCEstimate.from_samples([linha[1] for linha in linhas], 0, seed),
        black=MCEstimate.from_samples([linha[2] for linha in linhas], 0, seed),
        rows=linhas,
    )


def half_coloring_estimate(g, trials, seed):
    """A uniforme entre os subconjuntos de n/2 vértices; E|∂A| ≈ dn/4"""
    if g.n % 2:
        raise ValueError('coloração pela metade precisa de n par')
    rng = seed.generator()
    linhas = []
    for t in range(trials):
        black = np.zeros(g.n, dtype=bool)
        black[rng.permutation(g.n)[:g.n // 2]] = True
        borda = boundary_edges(g, black)
        linhas.append((t, borda, g.n // 2, borda / (g.n // 2)))
    return _relatorio(linhas, seed)


# ==================== REGIÕES ====================

@dataclass(frozen=True, eq=False)
class RegionPartition:
    region_of: np.ndarray
    sizes: np.ndarray
    s: int

    @property
    def count(self):
        return len(self.sizes)


def _dfs_aleatoria(g, rng):
    """Árvore geradora por busca em profundidade com vizinhos embaralhados"""
    viz = g.neighbors()
    raiz = int(rng.integers(g.n))
    pai = np.full(g.n, -1, dtype=np.int64)
    visitado = np.zeros(g.n, dtype=bool)
    ordem = []
    pilha = [(raiz, -1)]
    while pilha:
        v, p = pilha.pop()
        if visitado[v]:
            continue
        visitado[v] = True
        pai[v] = p
        ordem.append(v)
        for w in rng.permutation(viz[v]).tolist():
            if not visitado[w]:
                pilha.append((w, v))
    return pai, ordem


def cut_tree(pai, ordem, s, vizinhos):
    """
    Corta a árvore de baixo para cima: um vértice fecha uma região quando o
    que está pendurado nele soma pelo menos s. A sobra da raiz vai para a
    menor região adjacente.
    """
    regiao = np.full(len(ordem), -1, dtype=np.int64)
    pendentes = {v: [v] for v in ordem}
    tamanhos = []
    sobra = []
    for v in reversed(ordem):
        grupo = pendentes.pop(v)
        if len(grupo) >= s:
            regiao[grupo] = len(tamanhos)
            tamanhos.append(len(grupo))
        elif pai[v] >= 0:
            pendentes[pai[v]].extend(grupo)
        else:
            sobra = grupo
    if sobra:
        vizinhas = {int(regiao[w]) for v in sobra for w in vizinhos[v] if regiao[w] >= 0}
        if vizinhas:
            alvo = min(vizinhas, key=lambda r: (tamanhos[r], r))
            tamanhos[alvo] += len(sobra)
        else:
            alvo = len(tamanhos)
            tamanhos.append(len(sobra))
        regiao[sobra] = alvo
    return regiao, np.array(tamanhos, dtype=np.int64)


def spanning_tree_regions(g, s, seed):
    if s < 2 or g.n < 2 * s:
        raise ValueError(f'precisa s >= 2 e n >= 2s (n={g.n}, s={s})')
    pai, ordem = _dfs_aleatoria(g, seed.generator())
    regiao, tamanhos = cut_tree(pai, ordem, s, g.neighbors())
    logger.debug('%d regiões, tamanhos entre %d e %d', len(tamanhos), tamanhos.min(), tamanhos.max())
    return RegionPartition(regiao, tamanhos, s)


def inter_region_edges(g, p):
    return boundary_edges_between(g, p.region_of)


def boundary_edges_between(g, rotulos):
    return int(np.count_nonzero(rotulos[g.edges[:, 0]] != rotulos[g.edges[:, 1]]))


def region_variance_bound(p):
    """Desvio padrão exato de |Ã|/n: √(Σ tamanhos²)/(2n)"""
    return math.sqrt(float(np.sum(p.sizes.astype(float) ** 2))) / (2 * len(p.region_of))


def region_coloring_estimate(g, p, trials, seed):
    """Cada região preta ou branca com probabilidade 1/2, independentes"""
    if p.count < 2:
        raise ValueError('partição com uma única região')
    rng = seed.generator()
    linhas = []
    for t in range(trials):
        black = (rng.random(p.count) < 0.5)[p.region_of]
        linhas.append((t, boundary_edges(g, black), int(black.sum()), cheeger_ratio(g, black)))
    return _relatorio(linhas, seed)


# ==================== ORÁCULOS ====================

def exact_cheeger(g):
    """Mínimo de |∂A|/|A| sobre todos os A não vazios com |A| <= n/2 (enumeração por bits)"""
    if g.n > MAX_VERTICES_EXATO:
        raise SizeCapExceeded(f'enumeração exata limitada a {MAX_VERTICES_EXATO} vértices (n={g.n})')
    mascaras = np.arange(1, 2 ** g.n, dtype=np.int64)
    bits = ((mascaras[:, None] >> np.arange(g.n)) & 1).astype(bool)
    tamanhos = bits.sum(axis=1)
    borda = np.zeros(len(mascaras), dtype=np.int64)
    for u, v in g.edges.tolist():
        borda += bits[:, u] != bits[:, v]
    validos = tamanhos <= g.n // 2
    return float((borda[validos] / tamanhos[validos]).min())


def tree_ball(d, k):
    """Bola de raio k na árvore d-regular, como grafo do networkx"""
    arvore = nx.Graph()
    arvore.add_node(0)
    nivel = [0]
    proximo = 1
    for profundidade in range(k):
        novo = []
        for v in nivel:
            for _ in range(d if profundidade == 0 else d - 1):
                arvore.add_edge(v, proximo)
                novo.append(proximo)
                proximo += 1
        nivel = novo
    return arvore


def tree_ball_ratio(d, k):
    """h* da bola inteira dentro da árvore infinita: cada folha perde d−1 arestas"""
    if k < 1:
        raise ValueError('profundidade precisa ser >= 1')
    bola = tree_ball(d, k)
    folhas = sum(1 for _, grau in bola.degree() if grau == 1)
    return folhas * (d - 1) / bola.number_of_nodes()
