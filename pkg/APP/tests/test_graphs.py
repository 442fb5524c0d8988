import networkx as nx
import numpy as np
from django.test import SimpleTestCase, tag

from APP.exceptions import SizeCapExceeded
from APP.graphs import (RegularGraph, boundary_edges, cheeger_ratio, complete_graph, cut_tree, cycle_graph,
                        exact_cheeger, half_coloring_estimate, inter_region_edges, petersen_graph,
                        random_regular, region_coloring_estimate, region_variance_bound,
                        spanning_tree_regions, tree_ball_ratio)
from APP.sampler import Seed


class GrafoRegularTests(SimpleTestCase):

    def test_k4_e_o_unico_cubico_de_quatro_vertices(self):
        g = random_regular(4, 3, Seed(1))
        np.testing.assert_array_equal(g.edges, complete_graph(4).edges)

    def test_grafo_aleatorio(self):
        g = random_regular(100, 3, Seed(2))
        self.assertEqual(len(g.edges), 150)
        self.assertTrue(nx.is_connected(g.to_networkx()))
        np.testing.assert_array_equal(g.edges, random_regular(100, 3, Seed(2)).edges)

    def test_parametros_invalidos(self):
        with self.assertRaises(ValueError):
            random_regular(5, 3, Seed(1))
        with self.assertRaises(ValueError):
            random_regular(10, 2, Seed(1))

    def test_laco_e_aresta_multipla(self):
        with self.assertRaises(ValueError):
            RegularGraph(2, 1, np.array([[0, 0]]))
        with self.assertRaises(ValueError):
            RegularGraph(2, 2, np.array([[0, 1], [0, 1]]))


class CheegerTests(SimpleTestCase):

    def test_valores_exatos(self):
        self.assertAlmostEqual(exact_cheeger(complete_graph(4)), 2.0)
        self.assertAlmostEqual(exact_cheeger(cycle_graph(6)), 2 / 3)
        self.assertAlmostEqual(exact_cheeger(petersen_graph()), 1.0)

    def test_exato_nunca_acima_de_um_subconjunto(self):
        g = random_regular(12, 3, Seed(4))
        h = exact_cheeger(g)
        rng = Seed(4).generator(substream=1)
        for _ in range(200):
            black = np.zeros(g.n, dtype=bool)
            black[rng.permutation(g.n)[:int(rng.integers(1, 7))]] = True
            self.assertLessEqual(h, cheeger_ratio(g, black) + 1e-12)

    def test_limite_de_tamanho(self):
        with self.assertRaises(SizeCapExceeded):
            exact_cheeger(random_regular(22, 3, Seed(1)))

    def test_razao_de_conjunto_vazio(self):
        g = cycle_graph(6)
        self.assertEqual(cheeger_ratio(g, np.zeros(6, dtype=bool)), float('inf'))
        self.assertEqual(boundary_edges(g, np.array([1, 1, 1, 0, 0, 0], dtype=bool)), 2)

    def test_bola_da_arvore(self):
        self.assertAlmostEqual(tree_ball_ratio(3, 10), 1.0, delta=0.05)


class RegioesTests(SimpleTestCase):

    def test_caminho_cortado_em_tres(self):
        n = 9
        pai = np.array([-1] + list(range(n - 1)))
        vizinhos = [[w for w in (v - 1, v + 1) if 0 <= w < n] for v in range(n)]
        regiao, tamanhos = cut_tree(pai, list(range(n)), 3, vizinhos)
        self.assertEqual(tamanhos.tolist(), [3, 3, 3])
        self.assertEqual(len(set(regiao[:3])), 1)

    def test_regioes_conexas_e_de_tamanho_controlado(self):
        for k, d in enumerate([3] * 100 + [4] * 10):
            g = random_regular(500, d, Seed(10, k))
            p = spanning_tree_regions(g, 20, Seed(20, k))
            self.assertEqual(int(p.sizes.sum()), 500)
            self.assertTrue(np.all(p.sizes >= 20))
            self.assertTrue(np.all(p.sizes <= d * 20))
            grafo = g.to_networkx()
            for r in range(p.count):
                self.assertTrue(nx.is_connected(grafo.subgraph(np.nonzero(p.region_of == r)[0].tolist())))

    def test_s_grande_demais(self):
        with self.assertRaises(ValueError):
            spanning_tree_regions(random_regular(20, 3, Seed(1)), 11, Seed(1))

    def test_desvio_padrao_das_regioes(self):
        g = random_regular(100, 3, Seed(3))
        p = spanning_tree_regions(g, 10, Seed(3))
        esperado = np.sqrt(np.sum(p.sizes.astype(float) ** 2)) / 200
        self.assertAlmostEqual(region_variance_bound(p), esperado)


class ColoracaoTests(SimpleTestCase):

    def test_metade_dos_vertices(self):
        g = random_regular(1000, 3, Seed(5))
        rel = half_coloring_estimate(g, 1000, Seed(6))
        self.assertEqual(rel.black.mean, 500.0)
        self.assertAlmostEqual(rel.boundary.mean / 750, 1.0, delta=0.03)
        self.assertEqual(len(rel.rows), 1000)

    def test_metade_exige_n_par(self):
        g = RegularGraph.from_networkx(nx.circulant_graph(7, [1, 2]))
        with self.assertRaises(ValueError):
            half_coloring_estimate(g, 10, Seed(1))

    @tag('aceitacao')
    def test_regioes_aproximam_d_menos_2_sobre_2(self):
        g = random_regular(10_000, 3, Seed(42, 0))
        p = spanning_tree_regions(g, 50, Seed(42, 2))
        self.assertAlmostEqual(inter_region_edges(g, p) / g.n / 0.5, 1.05, delta=0.1)
        rel = region_coloring_estimate(g, p, 1000, Seed(42, 3))
        self.assertLessEqual(rel.h_star.mean, 0.575)
