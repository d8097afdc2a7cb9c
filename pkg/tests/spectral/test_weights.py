import pickle
import unittest

import numpy as np
from numpy.testing import assert_allclose

from polefinder.errors import DomainError, WeightNotCentered
from polefinder.spectral.weights import (
    PSI_PAPER,
    W_PAPER,
    WeightId,
    WeightSpec,
    band_weights,
    discrete_h_bar,
    psi,
    psi_prime,
    psi_second,
    tabulated_weight,
    w,
    weight_constants,
)


class TestWeightFunctions(unittest.TestCase):
    def test_end_points(self):
        self.assertEqual(psi(0.0), 0.0)
        self.assertAlmostEqual(psi(1.0), 0.0, places=12)
        self.assertEqual(w(0.0), 0.0)
        self.assertAlmostEqual(w(1.0), -1.0 / 8.0, places=12)

    def test_vectorised_evaluation(self):
        u = np.linspace(0.0, 1.0, 11)
        self.assertEqual(psi(u).shape, (11,))
        self.assertIsInstance(psi(0.5), float)

    def test_outside_unit_interval(self):
        for func in (psi, psi_prime, psi_second, w):
            with self.subTest(func=func.__name__):
                with self.assertRaises(DomainError):
                    func(1.5)
                with self.assertRaises(DomainError):
                    func(np.array([0.2, -0.1]))

    def test_pole_search_weight_at_one_half(self):
        # -1/4 + 35 / (6 * 2^{5/2}) - 29/48 - log(2) / 4
        self.assertAlmostEqual(psi(0.5), 0.0037439, delta=2e-6)

    def test_pole_search_weight_is_bounded_near_the_ends(self):
        u = np.concatenate([np.geomspace(1e-6, 0.5, 2000), 1.0 - np.geomspace(1e-6, 0.5, 2000)])
        self.assertLessEqual(float(np.max(np.abs(psi(u) / u**2))), 100.0)
        self.assertLessEqual(float(np.max(np.abs(psi(u) / (1.0 - u)))), 100.0)

    def test_derivatives_match_finite_differences(self):
        u = np.linspace(0.1, 0.9, 9)
        eps = 1e-6
        assert_allclose(psi_prime(u), (psi(u + eps) - psi(u - eps)) / (2 * eps), atol=1e-7)
        assert_allclose(
            psi_second(u), (psi_prime(u + eps) - psi_prime(u - eps)) / (2 * eps), atol=1e-6
        )


class TestWeightConstants(unittest.TestCase):
    def test_two_step_weight_closed_forms(self):
        constants = W_PAPER.constants
        self.assertAlmostEqual(constants.h, 1.0 / 16.0, delta=1e-9)
        integral_w_sq = 3.0 / 5.0 - 27.0 / 22.0 + 81.0 / 128.0
        self.assertAlmostEqual(constants.phi_sq, integral_w_sq / 2.0, delta=1e-9)
        self.assertAlmostEqual(constants.u2_moment, -3.0 / 140.0, delta=1e-9)
        self.assertIsNone(constants.varsigma)
        self.assertIsNone(constants.psi_bar_dd)

    def test_variance_constant_of_the_two_step_estimate(self):
        constants = W_PAPER.constants
        ratio = constants.phi_sq / constants.h**2
        self.assertGreaterEqual(ratio, 0.704)
        self.assertLessEqual(ratio, 0.714)
        self.assertAlmostEqual(ratio, 0.70910, places=4)

    def test_pole_search_weight_closed_forms(self):
        constants = PSI_PAPER.constants
        self.assertAlmostEqual(constants.h, 1.0 / 2016.0, delta=1e-9)
        self.assertAlmostEqual(constants.psi_bar_dd, 1.0 / 36.0, delta=1e-8)
        self.assertGreater(constants.varsigma, 0.0)
        self.assertGreater(constants.phi_sq, 0.0)

    def test_explicit_tolerance_recomputes(self):
        loose = weight_constants(W_PAPER, tol=1e-8)
        self.assertAlmostEqual(loose.h, W_PAPER.constants.h, delta=1e-8)
        self.assertIs(weight_constants(W_PAPER), W_PAPER.constants)

    def test_discrete_h_bar_with_two_terms(self):
        # only p = 1 contributes: -psi(1/2) log(1/2) / 2
        self.assertAlmostEqual(discrete_h_bar(PSI_PAPER, 2), 0.0012976, delta=2e-6)
        self.assertAlmostEqual(
            discrete_h_bar(PSI_PAPER, 2), -0.5 * psi(0.5) * np.log(0.5), delta=1e-15
        )

    def test_constants_are_stable_when_the_tolerance_tightens(self):
        for spec in (PSI_PAPER, W_PAPER):
            with self.subTest(weight=spec.id.value):
                coarse = weight_constants(spec, tol=1e-10)
                fine = weight_constants(spec, tol=1e-12)
                for name in ("h", "varsigma", "psi_bar_dd", "phi_sq", "u2_moment"):
                    a, b = getattr(coarse, name), getattr(fine, name)
                    if a is None:
                        self.assertIsNone(b)
                    else:
                        self.assertAlmostEqual(a, b, delta=1e-9)

    def test_discrete_h_bar_converges_to_h(self):
        h = W_PAPER.constants.h
        coarse = abs(discrete_h_bar(W_PAPER, 64) - h)
        fine = abs(discrete_h_bar(W_PAPER, 4096) - h)
        self.assertLess(fine, coarse)
        self.assertLess(fine, 1e-3)
        with self.assertRaises(DomainError):
            discrete_h_bar(W_PAPER, 1)

    def test_band_weights(self):
        weights, h_bar = band_weights(PSI_PAPER, 8)
        assert_allclose(weights, psi(np.arange(1, 9) / 8.0))
        self.assertEqual(h_bar, discrete_h_bar(PSI_PAPER, 8))
        self.assertFalse(weights.flags.writeable)


class TestWeightSpec(unittest.TestCase):
    def test_built_in_weight_ids(self):
        self.assertIs(PSI_PAPER.id, WeightId.PSI_PAPER)
        self.assertIs(W_PAPER.id, WeightId.W_PAPER)
        self.assertEqual([i.name for i in WeightId], ["PSI_PAPER", "W_PAPER", "USER_TABULATED"])

    def test_uncentered_weight_is_rejected(self):
        with self.assertRaises(WeightNotCentered):
            WeightSpec(id=WeightId.USER_TABULATED, func=lambda u: u)

    def test_nonpositive_h_is_rejected(self):
        spec = WeightSpec(id=WeightId.USER_TABULATED, func=lambda u: u - 0.5)
        with self.assertRaises(DomainError):
            spec.constants

    def test_tabulated_linear_weight(self):
        u = np.array([0.1, 0.3, 0.5, 0.7, 0.9])
        spec = tabulated_weight(u, 0.5 - u)
        self.assertEqual(spec.id, WeightId.USER_TABULATED)
        self.assertAlmostEqual(spec.eval(0.2), 0.3, places=12)
        constants = spec.constants
        self.assertAlmostEqual(constants.h, 0.25, delta=1e-8)
        self.assertAlmostEqual(constants.varsigma, 1.0, delta=1e-8)
        self.assertAlmostEqual(constants.psi_bar_dd, 0.0, delta=1e-8)
        self.assertAlmostEqual(constants.phi_sq, 1.0 / 24.0, delta=1e-8)
        self.assertAlmostEqual(constants.u2_moment, -1.0 / 12.0, delta=1e-8)

    def test_tabulated_weight_survives_pickling(self):
        u = np.array([0.1, 0.3, 0.5, 0.7, 0.9])
        spec = pickle.loads(pickle.dumps(tabulated_weight(u, 0.5 - u)))
        self.assertAlmostEqual(spec.eval(0.6), -0.1, places=12)

    def test_tabulated_weight_validation(self):
        with self.assertRaises(DomainError):
            tabulated_weight([0.2, 0.4, 0.6], [0.1, 0.0, -0.1])
        with self.assertRaises(DomainError):
            tabulated_weight([0.2, 0.1, 0.6, 0.8], [0.1, 0.0, -0.1, 0.0])
        with self.assertRaises(DomainError):
            tabulated_weight([0.0, 0.3, 0.6, 0.9], [0.1, 0.0, -0.1, 0.0])


if __name__ == "__main__":
    unittest.main()
