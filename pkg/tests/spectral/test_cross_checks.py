import math

import numpy as np

from nonlocal_koch.apps.spectral.models import EigenBasis
from nonlocal_koch.apps.spectral.utils import (
    CLASSICAL, solve_elliptic, solve_space_nonlocal, solve_time_nonlocal,
)
from nonlocal_koch.apps.walker.domains import Interval
from nonlocal_koch.apps.walker.models import WalkSpec
from nonlocal_koch.apps.walker.utils import (
    DIRECT, INVERSE, expected_value, mean_exit_time,
)
from tests.test_base import BaseTest, slow


@slow
class TestWalkersAgainstExpansions(BaseTest):

    def setUp(self):
        super().setUp()
        self.basis = EigenBasis.interval(math.pi, modes=16)
        self.domain = Interval(0.0, math.pi)

    def test_direct_change(self):
        spec = WalkSpec(self.domain, math.pi / 2, 1e-3)
        mc = expected_value(spec, np.sin, 0.25, 20000, self.seed, DIRECT,
                            self.stable_half).estimate
        exact = solve_space_nonlocal(self.stable_half, self.basis, np.sin, 0.25,
                                     [math.pi / 2])[0]
        self.assertWithinSE(mc, exact, k=4)

    def test_inverse_change(self):
        for number, (t, x) in enumerate(((0.1, 1.0), (0.25, math.pi / 2),
                                         (0.5, 2.0))):
            spec = WalkSpec(self.domain, x, 1e-3)
            mc = expected_value(spec, np.sin, t, 20000, (self.seed, number),
                                INVERSE, self.stable_half).estimate
            exact = solve_time_nonlocal(self.stable_half, self.basis, np.sin, t,
                                        [x])[0]
            self.assertWithinSE(mc, exact, k=4, slack=2e-3)

    def test_classical_elliptic_matches_delayed_lifetime(self):
        spec = WalkSpec(Interval(0.0, 1.0), 0.5, 2e-4)
        result = mean_exit_time(spec, 20000, self.seed, INVERSE, self.gamma)
        expected = solve_elliptic(self.gamma, EigenBasis.interval(1.0),
                                  lambda x: 1.0, [0.5], mode=CLASSICAL)[0]
        self.assertWithinSE(result.estimate, expected, k=4, slack=1e-3)
