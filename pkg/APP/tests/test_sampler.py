import math

import numpy as np
from django.test import SimpleTestCase, tag
from scipy import stats

from APP import hypmath
from APP.exceptions import PointBudgetExceeded
from APP.sampler import (DiskWindow, Seed, expected_count, poisson_disk, poisson_surface,
                         surface_acceptance_rate, uniform_in_disk, void_probability)
from APP.surface import bolza


class SeedTests(SimpleTestCase):

    def test_parse(self):
        self.assertEqual(Seed.parse('42'), Seed(42, 0))
        self.assertEqual(Seed.parse('42:7'), Seed(42, 7))
        self.assertEqual(str(Seed(3, 9)), '3:9')
        self.assertEqual(Seed(3, 9).child(2), Seed(3, 11))

    def test_parse_invalida(self):
        for texto in ('a', '1:2:3', '-1', str(2 ** 64)):
            with self.subTest(texto=texto), self.assertRaises(ValueError):
                Seed.parse(texto)

    def test_mesma_semente_mesma_sequencia(self):
        a = Seed(5, 1).generator().random(10)
        b = Seed(5, 1).generator().random(10)
        np.testing.assert_array_equal(a, b)

    def test_streams_e_subfluxos_independentes(self):
        base = Seed(5, 1).generator().random(10)
        self.assertFalse(np.array_equal(base, Seed(5, 2).generator().random(10)))
        self.assertFalse(np.array_equal(base, Seed(5, 1).generator(substream=1).random(10)))


class PoissonDiscoTests(SimpleTestCase):

    def test_pontos_dentro_da_janela(self):
        cloud = poisson_disk(1.0, 3.0, Seed(7))
        self.assertIsInstance(cloud.window, DiskWindow)
        raios = np.arccosh(cloud.points[:, 0])
        self.assertTrue(np.all(raios <= 3.0 + 1e-12))
        np.testing.assert_allclose(hypmath.mink(cloud.points, cloud.points), -1.0, atol=1e-9)

    def test_contagem_media(self):
        esperado = expected_count(1.0, 0.0, 3.0)
        contagens = [len(poisson_disk(1.0, 3.0, Seed(1, i))) for i in range(300)]
        self.assertLessEqual(abs(np.mean(contagens) - esperado), 4 * math.sqrt(esperado / 300))

    def test_uniforme_na_medida_de_area(self):
        # metade da área do disco de raio 2 fica além do raio mediano
        pts = uniform_in_disk(100_000, 2.0, Seed(3).generator())
        mediano = hypmath.radius_for_area(hypmath.ball_area(2.0) / 2)
        frac = float(np.mean(np.arccosh(pts[:, 0]) > mediano))
        self.assertAlmostEqual(frac, 0.5, delta=0.01)

    def test_determinismo(self):
        a = poisson_disk(2.0, 2.0, Seed(9)).points
        b = poisson_disk(2.0, 2.0, Seed(9)).points
        np.testing.assert_array_equal(a, b)

    def test_probabilidade_de_vazio(self):
        self.assertAlmostEqual(void_probability(0.5, 1.0), math.exp(-0.5 * hypmath.ball_area(1.0)), places=14)

    def test_parametros_invalidos(self):
        with self.assertRaises(ValueError):
            poisson_disk(0.0, 3.0, Seed(1))
        with self.assertRaises(ValueError):
            poisson_disk(1.0, 30.0, Seed(1))
        with self.assertRaises(PointBudgetExceeded):
            poisson_disk(1000.0, 20.0, Seed(1))


class PoissonSuperficieTests(SimpleTestCase):

    def test_taxa_de_aceitacao_do_octogono(self):
        self.assertAlmostEqual(surface_acceptance_rate(bolza()), math.sqrt(2) - 1, places=9)

    def test_pontos_no_dominio(self):
        surf = bolza()
        cloud = poisson_surface(2.0, surf, Seed(4))
        self.assertTrue(np.all(hypmath.contains(surf.domain, cloud.points, tol=1e-9)))
        self.assertEqual(cloud.window.area, surf.area)

    def test_taxa_de_aceitacao_empirica(self):
        surf = bolza()
        amostra = uniform_in_disk(200_000, surf.domain.max_vertex_distance(), Seed(12).generator())
        taxa = float(np.mean(hypmath.contains(surf.domain, amostra, tol=0.0)))
        esperada = surface_acceptance_rate(surf)
        self.assertLessEqual(abs(taxa - esperada), 4 * math.sqrt(esperada * (1 - esperada) / 200_000))

    @tag('aceitacao')
    def test_contagem_media_em_bolza(self):
        surf = bolza()
        contagens = [len(poisson_surface(1.0, surf, Seed(31, i))) for i in range(10_000)]
        self.assertLessEqual(abs(np.mean(contagens) - 4 * math.pi), 3 * np.std(contagens, ddof=1) / 100)


class DistribuicaoTests(SimpleTestCase):

    def test_distribuicao_radial(self):
        # 50 classes equiprováveis na medida de área do disco
        R = 2.0
        bordas = np.arccosh(1 + np.linspace(0.0, 1.0, 51) * (math.cosh(R) - 1))
        raios = np.concatenate([np.arccosh(poisson_disk(2.0, R, Seed(40, i)).points[:, 0]) for i in range(300)])
        contagens, _ = np.histogram(raios, bins=bordas)
        self.assertEqual(contagens.sum(), len(raios))
        self.assertGreater(stats.chisquare(contagens).pvalue, 1e-3)

    def test_probabilidade_de_vazio_empirica(self):
        lam, R, n = 0.5, 1.0, 20_000
        vazios = sum(len(poisson_disk(lam, R, Seed(41, i))) == 0 for i in range(n))
        p = void_probability(lam, R)
        self.assertLessEqual(abs(vazios / n - p), 4 * math.sqrt(p * (1 - p) / n))

    @tag('aceitacao')
    def test_probabilidade_de_vazio_em_lambda_pequeno(self):
        lam, R, n = 0.001, 2.0, 100_000
        vazios = sum(len(poisson_disk(lam, R, Seed(42, i))) == 0 for i in range(n))
        p = void_probability(lam, R)
        self.assertLessEqual(abs(vazios / n - p), 3 * math.sqrt(p * (1 - p) / n))

    @tag('aceitacao')
    def test_regioes_disjuntas_nao_se_correlacionam(self):
        a, b = hypmath.from_polar(1.0, 0.0), hypmath.from_polar(1.0, math.pi)
        contagens = np.zeros((10_000, 2))
        for i in range(len(contagens)):
            pts = poisson_disk(1.0, 2.0, Seed(43, i)).points
            if len(pts):
                contagens[i] = [np.count_nonzero(hypmath.distances(a.vec, pts) < 0.8),
                                np.count_nonzero(hypmath.distances(b.vec, pts) < 0.8)]
        self.assertLess(abs(np.corrcoef(contagens.T)[0, 1]), 0.05)
