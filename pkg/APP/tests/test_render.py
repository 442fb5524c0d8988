import math
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from APP.hypmath import from_polar, to_disk
from APP.render import RenderSpec, cell_path, geodesic_arc, render_svg, svg_to_pdf
from APP.sampler import DiskWindow, PointCloud, Seed, poisson_disk
from APP.voronoi import RimArc, tessellate_window


class ArcoGeodesicoTests(SimpleTestCase):

    def test_circulo_ortogonal_ao_unitario(self):
        a, b = np.array([0.3, 0.1]), np.array([-0.2, 0.4])
        centro, raio = geodesic_arc(a, b)
        self.assertAlmostEqual(centro @ centro, raio ** 2 + 1, places=10)
        self.assertAlmostEqual(np.linalg.norm(a - centro), raio, places=10)
        self.assertAlmostEqual(np.linalg.norm(b - centro), raio, places=10)

    def test_diametro(self):
        self.assertIsNone(geodesic_arc(np.array([0.2, 0.2]), np.array([-0.5, -0.5])))


class RenderSpecTests(SimpleTestCase):

    def test_dimensoes_invalidas(self):
        with self.assertRaises(ValueError):
            RenderSpec(width_px=10)
        with self.assertRaises(ValueError):
            RenderSpec(stroke_width=0.0)
        with self.assertRaises(ValueError):
            RenderSpec(palette=('#000000',))

    def test_pixel_do_centro(self):
        spec = RenderSpec(400, 200)
        self.assertEqual(spec.pixel((0.0, 0.0)), (200.0, 100.0))
        self.assertAlmostEqual(spec.scale, 0.98 * 100)


class SvgTests(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.t = tessellate_window(poisson_disk(1.0, 3.0, Seed(7)))

    def test_estrutura(self):
        svg = render_svg(self.t, rim=3.0)
        self.assertTrue(svg.startswith('<?xml'))
        self.assertTrue(svg.endswith('</svg>\n'))
        self.assertEqual(svg.count('<path '), len(self.t.cells))
        self.assertIn('fill="none"', svg)
        self.assertNotIn('-0.000000', svg)

    def test_mesma_entrada_mesmos_bytes(self):
        cores = Seed(7).generator(substream=1).random(len(self.t.cells)) < 0.5
        self.assertEqual(render_svg(self.t, cores), render_svg(self.t, cores))

    def test_cores(self):
        n = len(self.t.cells)
        svg = render_svg(self.t, np.ones(n, dtype=bool), RenderSpec(show_nuclei=True))
        self.assertEqual(svg.count('<path d="'), n)
        self.assertEqual(svg.count('fill="#000000"/>'), n)
        # um círculo de fundo e um por núcleo
        self.assertEqual(svg.count('<circle'), 1 + n)

    def test_pdf(self):
        with tempfile.TemporaryDirectory() as pasta:
            caminho = Path(pasta) / 'figura.pdf'
            svg_to_pdf(render_svg(self.t, spec=RenderSpec(200, 200)), caminho)
            self.assertTrue(caminho.read_bytes().startswith(b'%PDF'))

    def test_arco_do_aro_em_celula_unica(self):
        t = tessellate_window(PointCloud(np.array([from_polar(0.2, 0.0).vec]), 1.0, DiskWindow(1.0)))
        svg = render_svg(t)
        raio = f'{math.tanh(0.5) * RenderSpec().scale:.6f}'
        self.assertEqual(svg.count(f'A {raio} {raio} 0 0 0'), 2)


class GeometriaDoCaminhoTests(SimpleTestCase):
    """Comandos do SVG conferidos contra a tesselação em pixels"""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.R = 3.0
        cls.spec = RenderSpec()
        cls.t = tessellate_window(poisson_disk(1.0, cls.R, Seed(7)))

    def _comandos(self, d):
        tokens = d.split()
        comandos, k = [], 0
        while k < len(tokens):
            letra = tokens[k]
            n = {'M': 2, 'L': 2, 'A': 7, 'Z': 0}[letra]
            comandos.append((letra, [float(v) for v in tokens[k + 1:k + 1 + n]]))
            k += 1 + n
        return comandos

    def _centros(self, p, q, rho):
        meio, corda = (p + q) / 2, q - p
        h = np.linalg.norm(corda) / 2
        k = math.sqrt(max(0.0, rho ** 2 - h ** 2))
        normal = np.array([-corda[1], corda[0]]) / (2 * h)
        return meio + k * normal, meio - k * normal

    def test_arcos_ortogonais_ao_bordo_ou_no_aro(self):
        s = self.spec.scale
        origem = np.array([self.spec.width_px / 2, self.spec.height_px / 2])
        raio_aro = math.tanh(self.R / 2) * s
        conferidos = 0
        for piece in self.t.cells:
            atual = None
            for letra, args in self._comandos(cell_path(piece, self.spec)):
                if letra in 'ML':
                    atual = np.array(args)
                    continue
                if letra == 'Z':
                    continue
                rho, destino = args[0], np.array(args[5:7])
                if abs(rho - raio_aro) <= 1e-5 and abs(np.linalg.norm(destino - origem) - raio_aro) <= 1e-4:
                    self.assertAlmostEqual(np.linalg.norm(atual - origem), raio_aro, delta=1e-4)
                elif np.linalg.norm(destino - atual) >= 0.5 and rho <= 50 * s:
                    folgas = [abs(np.sum((c - origem) ** 2) / (rho ** 2 + s ** 2) - 1)
                              for c in self._centros(atual, destino, rho)]
                    self.assertLess(min(folgas), 1e-3)
                    conferidos += 1
                atual = destino
        self.assertGreater(conferidos, 0)

    def test_extremos_dos_lados_nos_pixels(self):
        for piece in self.t.cells:
            comandos = self._comandos(cell_path(piece, self.spec))
            esperado = self.spec.pixel(to_disk(piece.boundary[0].start))
            np.testing.assert_allclose(comandos[0][1], esperado, atol=1e-5)
            k = 1
            for elemento in piece.boundary:
                k += max(1, math.ceil(elemento.sweep / math.pi)) if isinstance(elemento, RimArc) else 1
                letra, args = comandos[k - 1]
                self.assertIn(letra, 'AL')
                np.testing.assert_allclose(args[-2:], self.spec.pixel(to_disk(elemento.end)), atol=1e-4)
            self.assertEqual(comandos[k][0], 'Z')
