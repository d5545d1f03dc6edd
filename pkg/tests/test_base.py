import math
import unittest

import numpy as np
from django.conf import settings
from django.test import SimpleTestCase

from nonlocal_koch.apps.symbols.models import BernsteinSymbol

slow = unittest.skipUnless(
    settings.NONLOCAL_KOCH_SLOW_TESTS,
    'set NONLOCAL_KOCH_SLOW_TESTS=True to run desk-scale checks')


class BaseTest(SimpleTestCase):

    def setUp(self):
        self.seed = 20240601
        self.rng = np.random.default_rng(self.seed)
        self.stable_half = BernsteinSymbol.stable(0.5)
        self.stable_quarter = BernsteinSymbol.stable(0.25)
        self.gamma = BernsteinSymbol.gamma(1, 2)
        self.cf_half = BernsteinSymbol.caputo_fabrizio(0.5)
        self.drifted = BernsteinSymbol.drifted_cf(1.0, 0.5)
        self.telegraph = BernsteinSymbol.telegraph_sum(0.25)
        self.tempered = BernsteinSymbol.tempered(2.0)
        self.linear = BernsteinSymbol.linear()
        self.symbols = [
            self.stable_half, self.gamma, self.cf_half, self.drifted,
            self.telegraph, self.tempered, self.linear,
        ]

    def assertWithinSE(self, estimate, expected, k=3.0, slack=0.0):
        """Monte Carlo estimate within k standard errors of an oracle."""
        distance = abs(estimate.mean - expected)
        self.assertLessEqual(
            distance, k * estimate.se + slack,
            '%r is %.3g SE from %r' % (
                estimate.mean, distance / estimate.se if estimate.se else
                math.inf, expected))
