import math

import numpy as np
from django.test import SimpleTestCase, tag

from APP.isokawa import (DENSITY_LIMIT, RATIO_LIMIT, MCEstimate, density_experiment, isokawa_area,
                         isokawa_perimeter, isokawa_perimeter_bound, planar_boundary_density,
                         typical_cell_experiment)
from APP.sampler import Seed


class ReferenciaTests(SimpleTestCase):

    def test_limite_euclidiano(self):
        # λ grande: a célula típica é quase euclidiana, E|∂C| ≈ 4/√λ
        lam = 1e4
        self.assertAlmostEqual(isokawa_perimeter(lam) * math.sqrt(lam), 4.0, delta=1e-4)

    def test_limite_hiperbolico(self):
        lam = 1e-5
        self.assertAlmostEqual(lam * isokawa_perimeter(lam), RATIO_LIMIT, delta=1e-3)
        self.assertAlmostEqual(planar_boundary_density(lam), DENSITY_LIMIT, delta=1e-3)

    def test_erro_certificado(self):
        for lam in (0.01, 1.0, 100.0):
            _, erro = isokawa_perimeter_bound(lam)
            self.assertLess(erro, 1e-6)

    def test_area(self):
        self.assertEqual(isokawa_area(2.0), 0.5)
        with self.assertRaises(ValueError):
            isokawa_area(0.0)
        with self.assertRaises(ValueError):
            isokawa_perimeter(-1.0)

    def test_perimetro_decresce_com_lambda(self):
        valores = [isokawa_perimeter(lam) for lam in np.logspace(-3, 3, 20)]
        self.assertTrue(all(a > b for a, b in zip(valores, valores[1:])))

    def test_razao_se_aproxima_de_4_sobre_pi(self):
        self.assertAlmostEqual(1e-4 * isokawa_perimeter(1e-4) / RATIO_LIMIT, 1.0, delta=0.01)
        densidades = [planar_boundary_density(lam) for lam in (1.0, 0.1, 0.01, 1e-3)]
        self.assertTrue(all(a > b for a, b in zip(densidades, densidades[1:])))
        self.assertGreater(densidades[-1], DENSITY_LIMIT)


class MCEstimateTests(SimpleTestCase):

    def test_media_e_erro_padrao(self):
        est = MCEstimate.from_samples([1.0, 2.0, 3.0], 0, Seed(1))
        self.assertEqual(est.mean, 2.0)
        self.assertAlmostEqual(est.stderr, 1 / math.sqrt(3), places=12)
        self.assertTrue(est.within(2.0 + 2 / math.sqrt(3)))
        self.assertFalse(est.within(4.0))

    def test_fracao_de_exclusao(self):
        self.assertTrue(MCEstimate(1.0, 0.1, 1000, 5, None).valid)
        self.assertFalse(MCEstimate(1.0, 0.1, 90, 10, None).valid)
        # exclusões contam sobre as réplicas válidas
        est = MCEstimate(1.0, 0.1, 100, 1, None)
        self.assertEqual(est.excluded_fraction, 0.01)
        self.assertFalse(est.valid)

    def test_sem_amostras(self):
        with self.assertRaises(ValueError):
            MCEstimate.from_samples([], 0, Seed(1))


class ExperimentoTests(SimpleTestCase):

    def test_poucas_replicas(self):
        with self.assertRaises(ValueError):
            typical_cell_experiment(1.0, 99, Seed(1))

    def test_lambdas_fora_de_ordem(self):
        with self.assertRaises(ValueError):
            density_experiment([0.1, 1.0], 100, Seed(1))

    @tag('aceitacao')
    def test_area_media_da_celula_tipica(self):
        row = typical_cell_experiment(1.0, 400, Seed(42))
        self.assertEqual(row.mean_area.n + row.excluded, 400)
        self.assertTrue(row.mean_area.within(1.0, k=4))
        self.assertTrue(row.mean_perimeter.within(isokawa_perimeter(1.0), k=4))
        self.assertAlmostEqual(row.ratio, row.mean_perimeter.mean / row.mean_area.mean)


class LeiDeAreaTests(SimpleTestCase):

    @tag('aceitacao')
    def test_area_e_perimetro_contra_a_quadratura(self):
        for k, lam in enumerate((1.0, 0.5, 0.1)):
            with self.subTest(lam=lam):
                row = typical_cell_experiment(lam, 10_000, Seed(42, k * 10_000))
                self.assertTrue(row.mean_area.valid)
                self.assertTrue(row.mean_area.within(1 / lam, k=3))
                self.assertTrue(row.mean_perimeter.within(isokawa_perimeter(lam), k=3))

    @tag('aceitacao')
    def test_razao_e_densidade_em_lambda_pequeno(self):
        lam = 0.01
        row = typical_cell_experiment(lam, 1000, Seed(7))
        a, p = row.mean_area, row.mean_perimeter
        razao_ref = lam * isokawa_perimeter(lam)
        # erro relativo da razão limitado pela soma dos erros relativos
        folga = 3 * razao_ref * (a.stderr / a.mean + p.stderr / p.mean)
        self.assertLessEqual(abs(row.ratio - razao_ref), folga)
        self.assertLessEqual(abs(row.density - planar_boundary_density(lam)), 3 * lam * p.stderr / 2)
        # em λ = 0,01 a própria quadratura ainda está quase 6% acima de 4/π
        self.assertLess(abs(row.ratio / RATIO_LIMIT - 1), 0.12)
        self.assertLess(abs(row.density / DENSITY_LIMIT - 1), 0.12)
