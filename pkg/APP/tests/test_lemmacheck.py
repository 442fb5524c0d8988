import math

import numpy as np
from django.test import SimpleTestCase, tag

from APP import hypmath
from APP.hypmath import ORIGIN
from APP.lemmacheck import (AngleMeasure, a_eps_membership, inclusion_check, inclusion_control,
                            reference_triangle, ring_intersection_area, ring_intersection_area_mc,
                            rings_report, run_lemmas, segment_thickening_length, sine_kernel, sine_report,
                            thickening_perimeter, thickening_report, tube_area)
from APP.sampler import Seed


class NucleoDeSenoTests(SimpleTestCase):

    def test_medida_uniforme_atinge_2_sobre_pi(self):
        self.assertAlmostEqual(sine_kernel(AngleMeasure.uniform()), 2 / math.pi, delta=1e-6)

    def test_atomos(self):
        self.assertEqual(sine_kernel(AngleMeasure.from_atoms([0.0], [1.0])), 0.0)
        self.assertAlmostEqual(sine_kernel(AngleMeasure.from_atoms([0.0, math.pi], [1.0, 1.0])), 0.5, places=12)

    def test_invariancia_por_rotacao(self):
        nu = AngleMeasure.random(12, Seed(2).generator())
        self.assertAlmostEqual(sine_kernel(nu), sine_kernel(nu.rotated(1.1)), places=12)

    def test_medidas_atomicas_nao_passam_de_2_sobre_pi(self):
        rng = Seed(3).generator()
        for _ in range(200):
            nu = AngleMeasure.random(int(rng.integers(1, 65)), rng)
            self.assertLessEqual(sine_kernel(nu), 2 / math.pi + 1e-9)

    def test_pesos_invalidos(self):
        with self.assertRaises(ValueError):
            AngleMeasure(np.array([0.0, 1.0]), np.array([0.5, 0.6]))

    def test_relatorio(self):
        rel = sine_report(50, Seed(1))
        self.assertTrue(rel.ok)
        self.assertLessEqual(rel.max_slack, 1e-6)


class AneisTests(SimpleTestCase):

    def test_inclinacao_quadratica(self):
        rel = rings_report()
        self.assertTrue(rel.ok)
        self.assertGreaterEqual(rel.details['inclinacao'], 1.4)

    def test_simetria(self):
        x, y = ORIGIN, hypmath.from_polar(1.0, 0.4)
        self.assertAlmostEqual(ring_intersection_area(x, y, 2.0, 0.05), ring_intersection_area(y, x, 2.0, 0.05),
                               places=12)

    def test_aneis_disjuntos(self):
        y = hypmath.from_polar(5.0, 0.0)
        self.assertEqual(ring_intersection_area(ORIGIN, y, 2.0, 0.1), 0.0)

    def test_confere_com_monte_carlo(self):
        y = hypmath.from_polar(1.0, 0.0)
        exata = ring_intersection_area(ORIGIN, y, 1.0, 0.3)
        estimada, erro = ring_intersection_area_mc(ORIGIN, y, 1.0, 0.3, 200_000, Seed(5))
        self.assertGreater(exata, 0.0)
        self.assertLessEqual(abs(exata - estimada), 4 * erro + 1e-4)

    def test_centros_coincidentes(self):
        with self.assertRaises(ValueError):
            ring_intersection_area(ORIGIN, ORIGIN, 1.0, 0.1)


class InclusaoTests(SimpleTestCase):

    def test_pertinencia(self):
        y = hypmath.from_polar(5.0, 0.0)
        self.assertTrue(a_eps_membership(hypmath.from_polar(5.01, math.pi), y, 0.01))
        self.assertFalse(a_eps_membership(hypmath.from_polar(5.01, 0.0), y, 0.01))
        # mais perto da origem que y nunca pertence
        self.assertFalse(a_eps_membership(hypmath.from_polar(4.99, math.pi), y, 0.01))
        with self.assertRaises(ValueError):
            a_eps_membership(y, ORIGIN, 0.01)

    def test_inclusao_sem_violacoes(self):
        rel = inclusion_check(5.0, 0.01, 0.1, 20_000, Seed(3))
        self.assertGreater(rel.details['membros'], 0)
        self.assertEqual(rel.details['violacoes'], 0)
        self.assertTrue(rel.ok)

    def test_controle_negativo_detecta_violacoes(self):
        rel = inclusion_control(5.0, 0.01, 20_000, Seed(3))
        self.assertGreater(rel.details['violacoes'], 0)
        self.assertTrue(rel.ok)

    @tag('aceitacao')
    def test_grade_de_inclusao(self):
        for k, (r, eps) in enumerate((r, eps) for r in (5.0, 8.0) for eps in (1e-2, 1e-3)):
            with self.subTest(r=r, eps=eps):
                rel = inclusion_check(r, eps, 0.1, 100_000, Seed(4, k))
                self.assertGreater(rel.details['membros'], 0)
                self.assertEqual(rel.details['violacoes'], 0)
                controle = inclusion_control(r, eps, 100_000, Seed(4, k))
                self.assertGreater(controle.details['violacoes'], 0)
                self.assertTrue(controle.ok)


class EspessamentoTests(SimpleTestCase):

    def test_area_do_tubo(self):
        self.assertAlmostEqual(tube_area(0.0, 1.0), hypmath.ball_area(1.0), places=12)
        self.assertAlmostEqual(tube_area(2.0, 1e-3) / 2e-3, 2.0, delta=1e-2)

    def test_segmento(self):
        b = hypmath.from_polar(2.0, 0.0)
        est = segment_thickening_length(ORIGIN, b, 1e-3, 20_000, Seed(5))
        self.assertAlmostEqual(est.mean / 2.0, 1.0, delta=0.02)

    def test_triangulo(self):
        cell = reference_triangle()
        perimetro = hypmath.polygon_perimeter(cell)
        est = thickening_perimeter(cell, 0.01, 60_000, Seed(6))
        self.assertLessEqual(abs(est.mean - perimetro), 3 * est.stderr + 0.15)

    def test_epsilon_fora_do_intervalo(self):
        with self.assertRaises(ValueError):
            thickening_perimeter(reference_triangle(), 0.1, 1000, Seed(1))

    @tag('aceitacao')
    def test_relatorio_do_espessamento(self):
        self.assertTrue(thickening_report(300_000, Seed(7)).ok)


class ExecucaoTests(SimpleTestCase):

    def test_lema_desconhecido(self):
        with self.assertRaises(ValueError):
            run_lemmas('nenhum', 1000, Seed(1))

    def test_um_lema(self):
        relatorios = run_lemmas('rings', 1000, Seed(1))
        self.assertEqual([r.lemma for r in relatorios], ['rings'])
