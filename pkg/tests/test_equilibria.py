import math
import unittest

import numpy as np

from py_chemostat import (
    HollingII,
    Parameters,
    Point,
    branch_derivatives,
    break_even,
    coexistence,
    equilibrium_set,
    holling2_nutrient,
    lambda_prime,
    mu_c1,
    predator_bound,
    single_species,
)
from py_chemostat.equilibria import (
    bracketed_newton,
    coexistence_nutrient,
    coexistence_residuals,
    lambda_p,
    lambda_z,
)
from py_chemostat.errors import BracketError, ConvergenceError, NoBreakEvenError
from tests.reference_cases.parameter_sets import (
    HOLLING2_F1,
    HOLLING2_F2,
    HOLLING3_F1,
    holling2_equal,
    holling2_perturbed,
    holling3_perturbed,
)


class TestBracketedNewton(unittest.TestCase):
    def test_finds_square_root(self):
        root = bracketed_newton(lambda x: (x * x - 2.0, 2.0 * x), 0.0, 2.0)
        self.assertAlmostEqual(root, math.sqrt(2.0), places=12)

    def test_flat_derivative_falls_back_to_bisection(self):
        root = bracketed_newton(lambda x: (x**3, 3.0 * x * x), -1.0, 0.5)
        self.assertAlmostEqual(root, 0.0, places=4)

    def test_unbracketed_raises(self):
        with self.assertRaises(BracketError):
            bracketed_newton(lambda x: (x * x + 1.0, 2.0 * x), -1.0, 1.0)

    def test_iteration_limit_raises(self):
        with self.assertRaises(ConvergenceError):
            bracketed_newton(lambda x: (x * x - 2.0, 2.0 * x), 0.0, 2.0, max_iter=1)


class TestBreakEven(unittest.TestCase):
    def test_holling2_closed_form(self):
        cases = [(HOLLING2_F1, 2.0, 1.0, 0.2), (HOLLING2_F2, 1.5, 1.0, 0.25)]
        for response, gamma, removal, expected in cases:
            with self.subTest(response=response):
                exact = response.alpha * removal / (gamma * response.m - removal)
                self.assertAlmostEqual(exact, expected, places=15)
                self.assertAlmostEqual(break_even(response, gamma, removal), exact, places=12)

    def test_holling3_closed_form(self):
        self.assertAlmostEqual(break_even(HOLLING3_F1, 0.8, 1.2), math.sqrt(6.0), places=11)

    def test_no_break_even(self):
        with self.assertRaises(NoBreakEvenError):
            break_even(HOLLING2_F1, 2.0, 2.0)
        with self.assertRaises(ValueError):
            break_even(HOLLING2_F1, 2.0, 0.0)

    def test_lambda_prime_matches_finite_difference(self):
        h = 1e-4
        for removal in (0.5, 1.0, 1.5):
            with self.subTest(removal=removal):
                lam = break_even(HOLLING2_F1, 2.0, removal)
                numeric = (break_even(HOLLING2_F1, 2.0, removal + h)
                           - break_even(HOLLING2_F1, 2.0, removal - h)) / (2.0 * h)
                self.assertAlmostEqual(lambda_prime(HOLLING2_F1, 2.0, lam), numeric, places=6)

    def test_removal_overrides(self):
        params = holling2_equal()
        self.assertAlmostEqual(lambda_p(params, 1.2), 0.3, places=12)
        self.assertAlmostEqual(lambda_z(params, 1.3), 0.65 / 1.7, places=12)


class TestThresholds(unittest.TestCase):
    def test_mu_c1(self):
        self.assertAlmostEqual(mu_c1(holling2_equal()), 0.325, places=12)
        self.assertAlmostEqual(mu_c1(holling2_perturbed()), 0.3 + 0.6 * 0.65 / 1.7, places=12)
        self.assertAlmostEqual(mu_c1(holling3_perturbed()), 5.009, places=2)

    def test_mu_c1_exceeds_lambda_p(self):
        for params in (holling2_equal(), holling2_perturbed(), holling3_perturbed()):
            with self.subTest(params=params):
                self.assertGreater(mu_c1(params), lambda_p(params))


class TestEquilibria(unittest.TestCase):
    def test_single_species(self):
        point = single_species(holling2_equal(0.3))
        self.assertAlmostEqual(point.n, 0.2, places=12)
        self.assertAlmostEqual(point.p, 0.2, places=12)
        self.assertEqual(point.z, 0.0)

    def test_single_species_absent_below_lambda_p(self):
        self.assertIsNone(single_species(holling2_equal(0.15)))
        lp = lambda_p(holling2_equal())
        self.assertIsNone(single_species(holling2_equal(lp)))
        self.assertIsNotNone(single_species(holling2_equal(lp), boundary=True))

    def test_coexistence_values(self):
        point = coexistence(holling2_equal(0.6))
        self.assertAlmostEqual(point.n, 0.429436, places=6)
        self.assertAlmostEqual(point.p, 0.25, places=12)
        self.assertAlmostEqual(point.z, 0.1367, places=4)
        for residual in coexistence_residuals(holling2_equal(0.6), point):
            self.assertAlmostEqual(residual, 0.0, places=10)

    def test_coexistence_absent_below_threshold(self):
        self.assertIsNone(coexistence(holling2_equal(0.3)))
        self.assertIsNone(coexistence(holling2_equal(mu_c1(holling2_equal()))))

    def test_coexistence_boundary_coalesces_with_single_species(self):
        params = holling2_equal(mu_c1(holling2_equal()))
        point = coexistence(params, boundary=True)
        self.assertAlmostEqual(point.n, 0.2, places=9)
        self.assertAlmostEqual(point.z, 0.0, places=9)
        self.assertGreaterEqual(point.z, 0.0)

    def test_holling2_nutrient_agrees_with_root_finder(self):
        for params in (holling2_equal(0.4), holling2_equal(0.9), holling2_perturbed(1.1)):
            with self.subTest(mu=params.mu):
                self.assertAlmostEqual(coexistence_nutrient(params), holling2_nutrient(params),
                                       places=10)

    def test_holling2_nutrient_needs_holling2_prey(self):
        with self.assertRaises(TypeError):
            holling2_nutrient(holling3_perturbed())

    def test_branch_is_monotone_and_bounded(self):
        base = holling2_equal()
        threshold = mu_c1(base)
        grid = np.linspace(threshold, threshold + 10.0 * (threshold - 0.2), 201)[1:]
        points = [coexistence(base.with_mu(mu)) for mu in grid]
        n = np.array([p.n for p in points])
        z = np.array([p.z for p in points])
        self.assertTrue(np.all(np.diff(n) > 0))
        self.assertTrue(np.all(np.diff(z) > 0))
        self.assertTrue(np.all(z < predator_bound(base)))

    def test_branch_derivatives_match_finite_differences(self):
        h = 1e-5
        for params in (holling2_equal(0.6), holling3_perturbed(7.0)):
            with self.subTest(mu=params.mu):
                lower = coexistence(params.with_mu(params.mu - h))
                upper = coexistence(params.with_mu(params.mu + h))
                n_prime, z_prime = branch_derivatives(params)
                self.assertAlmostEqual(n_prime, (upper.n - lower.n) / (2 * h), places=5)
                self.assertAlmostEqual(z_prime, (upper.z - lower.z) / (2 * h), places=5)

    def test_equilibrium_set(self):
        found = equilibrium_set(holling2_equal(0.6))
        self.assertEqual(list(found.present()), ["E0", "E1", "E2"])
        self.assertEqual(found.e0, Point(0.6, 0.0, 0.0))
        self.assertAlmostEqual(found.e1.p, 0.8, places=12)
        self.assertAlmostEqual(found.mu_c1, 0.325, places=12)

    def test_equilibrium_set_washout_only(self):
        found = equilibrium_set(holling2_equal(0.1))
        self.assertEqual(list(found.present()), ["E0"])

    def test_equilibrium_set_threshold_matches_mu_c1(self):
        for params in (holling2_perturbed(0.9), holling3_perturbed(7.0)):
            with self.subTest(params=params):
                found = equilibrium_set(params)
                self.assertEqual(found.mu_c1, mu_c1(params))
                self.assertEqual(found.lambda_p, lambda_p(params))
                self.assertEqual(found.lambda_z, lambda_z(params))

    def test_steep_prey_response(self):
        params = Parameters(
            mu=50.0, D=1.0, gamma1=2.0, gamma2=1.5, f1=HollingII(1.0, 1e-3), f2=HOLLING2_F2
        )
        point = coexistence(params)
        for residual in coexistence_residuals(params, point):
            self.assertAlmostEqual(residual, 0.0, places=8)


if __name__ == "__main__":
    unittest.main()
