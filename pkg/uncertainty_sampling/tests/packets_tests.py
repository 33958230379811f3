import math
from unittest import TestCase

from hypothesis import given, settings, strategies as st
import numpy as np

from uncertainty_sampling.exceptions import ParameterException
from uncertainty_sampling.packets import (
    DomainParams, ElementaryPacket, MomentSet, analytic_moments, eval_packet, kennard_product
)
from uncertainty_sampling.spectral import QuadratureSpec, packet_moments


class ElementaryPacketTests(TestCase):
    """
    Tests for ElementaryPacket and eval_packet
    """

    def test_invalid_indices(self):
        """
        Test k < 1 and non-integer indices are rejected
        """
        for kwargs in ({'n': 1, 'k': 0}, {'n': 1.5}, {'n': 1, 'k': True}):
            with self.assertRaises(ParameterException):
                ElementaryPacket(**kwargs)

    def test_momenta(self):
        """
        Test p_n and p_k
        """
        packet = ElementaryPacket(n=10, k=3)
        self.assertAlmostEqual(packet.p_n, 10 * math.pi)
        self.assertAlmostEqual(packet.p_k, 3 * math.pi)

    def test_peak_density(self):
        """
        Test |psi_{n,1}|^2 peaks at 2 in the middle of the box
        """
        for n in (0, 1, 10):
            value = eval_packet(ElementaryPacket(n=n), 0.5)
            self.assertIsInstance(value, complex)
            self.assertAlmostEqual(abs(value) ** 2, 2.0, places=12)

    def test_vanishes_at_walls(self):
        """
        Test the packet vanishes at both ends of its window
        """
        values = eval_packet(ElementaryPacket(n=10, k=4), np.array([0.0, 1.0]))
        np.testing.assert_allclose(np.abs(values), 0.0, atol=1e-14)

    def test_window_moves_with_time(self):
        """
        Test the window starts at p_n lam T
        """
        dom = DomainParams(lam=1e-5, T=3.7)
        packet = ElementaryPacket(n=10)
        start, stop = packet.window(dom)
        self.assertAlmostEqual(start, 10 * math.pi * 1e-5 * 3.7, places=15)
        self.assertAlmostEqual(stop - start, 1.0, places=15)

    def test_invalid_domain(self):
        """
        Test non-positive lambda and negative time are rejected
        """
        with self.assertRaises(ParameterException):
            DomainParams(lam=0.0)
        with self.assertRaises(ParameterException):
            DomainParams(T=-1.0)


class AnalyticMomentsTests(TestCase):
    """
    Tests for analytic_moments and kennard_product
    """

    def test_ground_packet(self):
        """
        Test the k = 1 deviations and their product
        """
        moments = analytic_moments(ElementaryPacket(n=10, k=1))
        self.assertAlmostEqual(moments.sd_x, 0.180756, places=6)
        self.assertAlmostEqual(moments.sd_p, 3.14159, places=5)
        self.assertAlmostEqual(moments.product, 0.567862, delta=1e-6)
        self.assertAlmostEqual(moments.mean_x, 0.5)
        self.assertAlmostEqual(moments.mean_p, 10 * math.pi)

    def test_kennard_product(self):
        """
        Test the products for k = 1 and k = 2
        """
        self.assertAlmostEqual(kennard_product(1), 0.567862, delta=1e-6)
        self.assertAlmostEqual(kennard_product(2), 1.670293, delta=1e-5)

    def test_kennard_product_invalid(self):
        """
        Test k < 1 is rejected
        """
        with self.assertRaises(ParameterException):
            kennard_product(0)

    def test_kennard_bound(self):
        """
        Test every product stays above 1/2 and grows with k
        """
        products = [kennard_product(k) for k in range(1, 51)]
        self.assertTrue(all(product >= 0.5 for product in products))
        self.assertTrue(all(a < b for a, b in zip(products, products[1:])))

    @given(n=st.integers(-50, 50), k=st.integers(1, 30))
    @settings(max_examples=50)
    def test_independent_of_n(self, n, k):
        """
        Test the deviations do not depend on the Bloch index
        """
        moments = analytic_moments(ElementaryPacket(n=n, k=k))
        self.assertAlmostEqual(moments.sd_p, math.pi * k)
        self.assertAlmostEqual(moments.product, kennard_product(k), places=12)

    def test_time_invariance(self):
        """
        Test a moving packet keeps its deviations and shifts its mean position
        """
        packet = ElementaryPacket(n=10, k=1)
        dom = DomainParams(lam=1e-5, T=3.7)
        at_rest = analytic_moments(packet)
        moving = analytic_moments(packet, dom)

        self.assertAlmostEqual(moving.sd_x, at_rest.sd_x, delta=1e-8)
        self.assertAlmostEqual(moving.sd_p, at_rest.sd_p, delta=1e-8)
        self.assertAlmostEqual(moving.mean_x - at_rest.mean_x, packet.p_n * 1e-5 * 3.7, delta=1e-15)

    def test_moving_quadrature(self):
        """
        Test quadrature moments of a moving packet against the closed forms
        """
        packet = ElementaryPacket(n=10, k=1)
        dom = DomainParams(lam=1e-5, T=3.7)
        numeric = packet_moments(packet, dom, QuadratureSpec(100000))
        exact = analytic_moments(packet, dom)

        self.assertAlmostEqual(numeric.sd_x, exact.sd_x, delta=1e-8)
        self.assertAlmostEqual(numeric.mean_x, exact.mean_x, delta=1e-8)

    def test_oracle_parity(self):
        """
        Test quadrature against closed forms over a grid of packets
        """
        spec = QuadratureSpec(100000)
        for n in (0, 1, 10):
            for k in range(1, 21):
                packet = ElementaryPacket(n=n, k=k)
                numeric = packet_moments(packet, spec=spec)
                exact = analytic_moments(packet)
                for name in ('mean_x', 'mean_x2', 'sd_x', 'sd_p'):
                    self.assertAlmostEqual(getattr(numeric, name), getattr(exact, name), delta=1e-8,
                                           msg='{0} of n={1}, k={2}'.format(name, n, k))
                for name in ('mean_p', 'mean_p2'):
                    self.assertAlmostEqual(getattr(numeric, name), getattr(exact, name),
                                           delta=1e-8 * max(1.0, getattr(exact, name)))


class MomentSetTests(TestCase):
    """
    Tests for MomentSet
    """

    def test_combine(self):
        """
        Test .combine() merges position and momentum entries
        """
        moments = MomentSet.position(0.5, 0.3).combine(MomentSet.momentum(1.0, 2.0))
        self.assertAlmostEqual(moments.sd_x, math.sqrt(0.05))
        self.assertAlmostEqual(moments.sd_p, 1.0)
        self.assertAlmostEqual(moments.product, math.sqrt(0.05))

    def test_missing_product(self):
        """
        Test the product needs both deviations
        """
        with self.assertRaises(ValueError):
            MomentSet.position(0.5, 0.3).product

    def test_to_dict(self):
        """
        Test .to_dict()
        """
        self.assertDictEqual(MomentSet.momentum(1.0, 2.0).to_dict(), {
            'mean_x': None,
            'mean_x2': None,
            'mean_p': 1.0,
            'mean_p2': 2.0,
            'sd_x': None,
            'sd_p': 1.0,
        })
