import math

import numpy as np
from scipy import integrate, special

from nonlocal_koch.apps.symbols.exceptions import SymbolDomainError
from nonlocal_koch.apps.symbols.models import INFINITY, BernsteinSymbol
from nonlocal_koch.apps.symbols.utils import (
    check_bernstein_shape, eval_phi, exponential_jump_law, levy_density,
    levy_tail, phi_prime_at_zero, tail_integral, truncated_power_law,
    variance_gamma_exponent,
)
from tests.test_base import BaseTest


class TestEvalPhi(BaseTest):

    def test_closed_forms(self):
        self.assertAlmostEqual(eval_phi(self.stable_half, 4.0), 2.0)
        self.assertAlmostEqual(eval_phi(self.gamma, 2.0), math.log(2.0))
        self.assertAlmostEqual(eval_phi(self.cf_half, 1.0), 1.0)
        self.assertAlmostEqual(eval_phi(self.drifted, 1.0), 1.5)
        self.assertAlmostEqual(eval_phi(self.telegraph, 16.0), 6.0)
        self.assertEqual(eval_phi(self.linear, 3.5), 3.5)

    def test_tempered(self):
        # √(λ+1) − 1 for μ = 2
        self.assertAlmostEqual(eval_phi(self.tempered, 3.0), 1.0)
        self.assertAlmostEqual(eval_phi(BernsteinSymbol.tempered(0.0), 9.0), 3.0)

    def test_zero_and_negative_argument(self):
        for sym in self.symbols:
            self.assertEqual(eval_phi(sym, 0.0), 0.0)
        with self.assertRaises(SymbolDomainError):
            eval_phi(self.stable_half, -1.0)

    def test_array_argument(self):
        values = eval_phi(self.stable_half, np.array([1.0, 4.0, 9.0]))
        np.testing.assert_allclose(values, [1.0, 2.0, 3.0])

    def test_compound_poisson_matches_caputo_fabrizio(self):
        jumps = exponential_jump_law(2.0, 1.0)
        for lam in (0.5, 1.0, 3.0):
            self.assertAlmostEqual(eval_phi(jumps, lam),
                                   eval_phi(self.cf_half, lam), places=8)

    def test_variance_gamma_exponent(self):
        self.assertAlmostEqual(variance_gamma_exponent(self.gamma, 2.0),
                               math.log(3.0))

    def test_shape_checks(self):
        for sym in self.symbols:
            self.assertTrue(all(check_bernstein_shape(sym).values()), str(sym))


class TestPhiPrimeAtZero(BaseTest):

    def test_values(self):
        self.assertIs(phi_prime_at_zero(self.stable_half), INFINITY)
        self.assertIs(phi_prime_at_zero(self.telegraph), INFINITY)
        self.assertEqual(phi_prime_at_zero(self.gamma), 0.5)
        self.assertEqual(phi_prime_at_zero(self.cf_half), 2.0)
        self.assertEqual(phi_prime_at_zero(self.drifted), 2.5)
        self.assertEqual(phi_prime_at_zero(self.tempered), 0.5)
        self.assertIs(phi_prime_at_zero(BernsteinSymbol.tempered(0.0)), INFINITY)
        self.assertEqual(phi_prime_at_zero(self.linear), 1.0)

    def test_matches_difference_quotient(self):
        for sym in (self.gamma, self.cf_half, self.drifted, self.tempered):
            self.assertAlmostEqual(eval_phi(sym, 1e-7) / 1e-7,
                                   phi_prime_at_zero(sym), places=5)


class TestLevyMeasure(BaseTest):

    def test_tail_identity(self):
        # Φ(λ)/λ = drift + ∫ e^{−λz} φ̄(z) dz
        for sym in (self.gamma, self.cf_half, self.drifted, self.tempered,
                    self.stable_half):
            for lam in (0.5, 2.0):
                body = lambda z: math.exp(-lam * z) * levy_tail(sym, z)  # noqa: E731
                laplace = (integrate.quad(body, 0, 1, limit=200)[0]
                           + integrate.quad(body, 1, math.inf, limit=200)[0])
                self.assertAlmostEqual(
                    eval_phi(sym, lam) / lam, sym.drift + laplace, places=6,
                    msg=str(sym))

    def test_tail_integral_matches_quadrature(self):
        for sym in (self.gamma, self.cf_half, self.tempered, self.telegraph):
            expected = integrate.quad(lambda y: levy_tail(sym, y), 0, 1.5,
                                      limit=200)[0]
            self.assertAlmostEqual(tail_integral(sym, 1.5), expected, places=6,
                                   msg=str(sym))

    def test_density_integrates_to_tail(self):
        for sym in (self.gamma, self.cf_half, self.tempered):
            expected = integrate.quad(lambda y: levy_density(sym, y), 1.0,
                                      math.inf)[0]
            self.assertAlmostEqual(levy_tail(sym, 1.0), expected, places=7)

    def test_stable_tail(self):
        self.assertAlmostEqual(levy_tail(self.stable_half, 1.0),
                               1 / math.sqrt(math.pi))
        self.assertAlmostEqual(tail_integral(self.stable_half, 1.0),
                               1 / special.gamma(1.5))

    def test_caputo_fabrizio_tail(self):
        self.assertAlmostEqual(levy_tail(self.cf_half, 1.0), 2 * math.exp(-1))


class TestJumpLaws(BaseTest):

    def test_truncated_power_law_tail(self):
        sym = truncated_power_law(0.5, 1e4)
        self.assertAlmostEqual(levy_tail(sym, 2.0),
                               levy_tail(self.stable_half, 2.0))
        self.assertAlmostEqual(eval_phi(sym, 1.0), 1.0, delta=0.01)

    def test_invalid_parameters(self):
        with self.assertRaises(SymbolDomainError):
            BernsteinSymbol.stable(1.0)
        with self.assertRaises(SymbolDomainError):
            BernsteinSymbol.gamma(0, 1)
        with self.assertRaises(SymbolDomainError):
            BernsteinSymbol.telegraph_sum(0.5)
        with self.assertRaises(SymbolDomainError):
            exponential_jump_law(0.0, 1.0)

    def test_symbols_are_hashable(self):
        self.assertEqual(BernsteinSymbol.stable(0.5), self.stable_half)
        self.assertEqual(len({self.stable_half, BernsteinSymbol.stable(0.5)}), 1)
        self.assertEqual(str(self.gamma), 'gamma(a=1, b=2)')
