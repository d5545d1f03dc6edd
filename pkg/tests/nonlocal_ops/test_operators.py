import math

import numpy as np
from scipy import special

from nonlocal_koch.apps.nonlocal_ops.exceptions import (
    OperatorDomainError, OperatorUnsupported,
)
from nonlocal_koch.apps.nonlocal_ops.models import SampledFunction
from nonlocal_koch.apps.nonlocal_ops.utils import (
    caputo_dzherbashian, caputo_fabrizio, marchaud_minus,
    riemann_liouville_minus, young_bound,
)
from tests.test_base import BaseTest


def _square(y):
    return y * y


def _damped(y):
    return y * math.exp(-y)


class TestCaputoDzherbashian(BaseTest):

    def setUp(self):
        super().setUp()
        self.root = SampledFunction.from_callable(
            lambda s: s ** 0.5 / special.gamma(1.5), 1.0, 2001)
        self.identity = SampledFunction.from_callable(lambda s: s, 1.0, 1001)

    def test_stable_derivative_of_power(self):
        self.assertAlmostEqual(
            caputo_dzherbashian(self.stable_half, self.root, 1.0), 1.0,
            delta=1e-3)

    def test_constant_has_zero_derivative(self):
        constant = SampledFunction(np.linspace(0, 1, 11), np.full(11, 3.0))
        for sym in self.symbols:
            self.assertEqual(caputo_dzherbashian(sym, constant, 1.0), 0.0)

    def test_telegraph_sum_of_derivatives(self):
        expected = 1 / special.gamma(1.5) + 1 / special.gamma(1.75)
        self.assertAlmostEqual(
            caputo_dzherbashian(self.telegraph, self.identity, 1.0), expected,
            delta=1e-3)

    def test_drift_contributes_first_derivative(self):
        value = caputo_dzherbashian(self.linear, self.identity, 0.5)
        self.assertAlmostEqual(value, 1.0)

    def test_grid_checks(self):
        self.assertEqual(
            caputo_dzherbashian(self.stable_half, self.identity, 0.0), 0.0)
        with self.assertRaises(OperatorDomainError):
            caputo_dzherbashian(self.stable_half, self.identity, 0.12345)
        with self.assertRaises(OperatorDomainError):
            SampledFunction([0.0, 0.1, 0.3], [0.0, 1.0, 2.0])


class TestCaputoFabrizio(BaseTest):

    def setUp(self):
        super().setUp()
        self.identity = SampledFunction.from_callable(lambda s: s, 1.0, 1001)
        self.square = SampledFunction.from_callable(_square, 1.0, 1001)

    def test_identity(self):
        self.assertAlmostEqual(caputo_fabrizio(0.5, self.identity, 1.0),
                               2 * (1 - math.exp(-1)), delta=1e-9)

    def test_limits(self):
        self.assertAlmostEqual(caputo_fabrizio(0.999, self.square, 1.0), 2.0,
                               delta=1e-2)
        self.assertAlmostEqual(caputo_fabrizio(0.001, self.square, 1.0), 1.0,
                               delta=1e-2)

    def test_matches_caputo_fabrizio_symbol(self):
        wave = SampledFunction.from_callable(math.sin, 2.0, 801)
        for x in (0.5, 1.0, 2.0):
            self.assertAlmostEqual(caputo_fabrizio(0.5, wave, x),
                                   caputo_dzherbashian(self.cf_half, wave, x),
                                   delta=1e-6)

    def test_alpha_range(self):
        with self.assertRaises(OperatorDomainError):
            caputo_fabrizio(1.0, self.identity, 1.0)


class TestSpaceOperators(BaseTest):

    def test_zero_function(self):
        for sym in (self.stable_half, self.gamma, self.cf_half):
            self.assertEqual(marchaud_minus(sym, lambda y: 0.0, 1.0), 0.0)
            self.assertEqual(riemann_liouville_minus(sym, lambda y: 0.0, 1.0),
                             0.0)

    def test_identity_under_stable_symbol(self):
        marchaud = marchaud_minus(self.stable_half, lambda y: y, 1.0)
        self.assertAlmostEqual(marchaud, 1 / special.gamma(1.5), delta=1e-3)
        self.assertAlmostEqual(
            marchaud, riemann_liouville_minus(self.stable_half, lambda y: y, 1.0),
            delta=1e-3)

    def test_identity_under_caputo_fabrizio_symbol(self):
        identity = SampledFunction.from_callable(lambda s: s, 1.0, 1001)
        self.assertAlmostEqual(
            marchaud_minus(self.cf_half, lambda y: y, 1.0),
            caputo_fabrizio(0.5, identity, 1.0), delta=1e-6)

    def test_riemann_liouville_of_constant(self):
        for alpha in (0.25, 0.5):
            sym = self.stable_half if alpha == 0.5 else self.stable_quarter
            self.assertAlmostEqual(
                riemann_liouville_minus(sym, lambda y: 1.0, 2.0),
                2.0 ** -alpha / special.gamma(1 - alpha), delta=1e-3)

    def test_operators_agree(self):
        functions = (_square, math.sin, _damped)
        for sym in (self.stable_half, self.gamma, self.cf_half):
            for function in functions:
                sampled = SampledFunction.from_callable(function, 2.0, 4001)
                for x in (0.5, 1.0, 2.0):
                    marchaud = marchaud_minus(sym, function, x)
                    self.assertAlmostEqual(
                        marchaud, riemann_liouville_minus(sym, function, x),
                        delta=1e-3, msg='%s %s %g' % (sym, function.__name__, x))
                    self.assertAlmostEqual(
                        marchaud, caputo_dzherbashian(sym, sampled, x),
                        delta=1e-3, msg='%s %s %g' % (sym, function.__name__, x))

    def test_point_must_be_positive(self):
        with self.assertRaises(OperatorDomainError):
            marchaud_minus(self.stable_half, _square, 0.0)


class TestYoungBound(BaseTest):

    def test_bound_holds(self):
        wave = SampledFunction.from_callable(math.sin, 5.0, 1001)
        for sym in (self.gamma, self.cf_half, self.tempered):
            lhs, rhs = young_bound(sym, wave)
            self.assertGreater(lhs, 0.0)
            self.assertLessEqual(lhs, rhs * (1 + 1e-9))

    def test_needs_finite_mean(self):
        wave = SampledFunction.from_callable(math.sin, 1.0, 11)
        with self.assertRaises(OperatorUnsupported):
            young_bound(self.stable_half, wave)
