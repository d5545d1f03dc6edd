import math

import numpy as np
from scipy import special

from nonlocal_koch.apps.core.stats import estimate, z_score
from nonlocal_koch.apps.subordinate.exceptions import (
    PathDomainError, PathHorizonError,
)
from nonlocal_koch.apps.subordinate.models import SubordinatorPath
from nonlocal_koch.apps.subordinate.utils import (
    extend_path, invert_drifted, invert_path, overshoot, sample_inverse,
    sample_overshoot, sample_path, sample_values,
)
from nonlocal_koch.apps.symbols.utils import eval_phi
from tests.test_base import BaseTest


class TestSamplePath(BaseTest):

    def test_linear_path_is_identity(self):
        path = sample_path(self.linear, 1.0, 0.1, self.rng)
        np.testing.assert_allclose(path.values, path.times)
        self.assertEqual(path.times.size, 11)

    def test_paths_start_at_zero_and_increase(self):
        for sym in self.symbols:
            path = sample_path(sym, 1.0, 0.01, self.rng)
            self.assertEqual(path.values[0], 0.0)
            self.assertTrue(np.all(np.diff(path.values) >= 0), str(sym))

    def test_invalid_step(self):
        with self.assertRaises(PathDomainError):
            sample_path(self.stable_half, 1.0, 0.0, self.rng)
        with self.assertRaises(PathDomainError):
            sample_path(self.stable_half, 0.1, 1.0, self.rng)

    def test_same_seed_same_path(self):
        first = sample_path(self.gamma, 1.0, 0.01, 3)
        second = sample_path(self.gamma, 1.0, 0.01, 3)
        np.testing.assert_array_equal(first.values, second.values)

    def test_extend_path(self):
        path = sample_path(self.cf_half, 1.0, 0.01, self.rng)
        longer = extend_path(path, 2.5, self.rng)
        self.assertAlmostEqual(longer.horizon, 2.5)
        np.testing.assert_array_equal(longer.values[:path.values.size],
                                      path.values)
        self.assertTrue(np.all(np.diff(longer.values) >= 0))

    def test_laplace_transform_of_marginals(self):
        for sym in (self.stable_half, self.cf_half, self.tempered, self.gamma):
            draws = sample_values(sym, 1.0, 100000, self.rng)
            for lam in (0.5, 1.0, 2.0):
                self.assertWithinSE(estimate(np.exp(-lam * draws)),
                                    math.exp(-eval_phi(sym, lam)), k=4)

    def test_mean_of_finite_kinds(self):
        for sym, expected in ((self.gamma, 1.0), (self.cf_half, 4.0)):
            draws = sample_values(sym, 2.0, 100000, self.rng)
            self.assertWithinSE(estimate(draws), expected, k=4)


class TestInversion(BaseTest):

    def test_inverse_of_identity(self):
        path = sample_path(self.linear, 1.0, 0.1, self.rng)
        self.assertAlmostEqual(invert_path(path, 0.37), 0.37)
        self.assertEqual(overshoot(path, 0.37), 0.0)

    def test_drift_only(self):
        times = np.linspace(0.0, 5.0, 51)
        path = SubordinatorPath(times, np.zeros(51), self.cf_half)
        self.assertAlmostEqual(invert_drifted(path, 1.0, 2.0), 2.0)

    def test_drifted_inverse_laplace(self):
        # H̄_s = cαs + H_s: ∫₀^∞ e^{−λt}P(H̄⁻¹_t > s)dt = (1/λ)e^{−s(cαλ + Φ(λ))},
        # and with T ~ Exp(λ) the left side is P(H̄⁻¹_T > s)/λ
        drift, lam, s = 1.0 * 0.5, 1.0, 0.5
        hits = np.zeros(4000)
        for number in range(hits.size):
            path = sample_path(self.cf_half, 1.0, 1e-3, self.rng)
            level = self.rng.exponential(1 / lam)
            top = path.values[-1] + drift * path.times[-1]
            hits[number] = level > top or invert_drifted(path, drift, level) > s
        expected = math.exp(-s * (drift * lam + eval_phi(self.cf_half, lam)))
        self.assertWithinSE(estimate(hits), expected, k=4, slack=2e-3)

    def test_zero_drift_matches_inverse(self):
        path = sample_path(self.stable_half, 2.0, 0.01, self.rng)
        for level in path.level * np.array([0.1, 0.5, 0.9]):
            self.assertEqual(invert_drifted(path, 0.0, level),
                             invert_path(path, level))

    def test_jump_gives_plateau(self):
        path = sample_path(self.cf_half, 5.0, 0.01, self.rng)
        index = int(np.flatnonzero(np.diff(path.values) > 0)[0]) + 1
        low, high = path.values[index - 1], path.values[index]
        first = invert_path(path, low + 0.25 * (high - low))
        second = invert_path(path, low + 0.75 * (high - low))
        self.assertEqual(first, second)
        self.assertEqual(first, path.times[index])
        self.assertAlmostEqual(overshoot(path, low + 0.75 * (high - low)),
                               0.25 * (high - low))

    def test_beyond_horizon(self):
        path = sample_path(self.gamma, 1.0, 0.01, self.rng)
        with self.assertRaises(PathHorizonError):
            invert_path(path, path.level + 1.0)

    def test_duality_with_marginal_law(self):
        # P(L_1 > t) = P(H_t < 1) = erfc(t/2) for the 1/2-stable clock
        passage = sample_inverse(self.stable_half, 1.0, 20000, 0.01, self.rng)
        for t in (0.5, 1.0, 2.0):
            exceed = estimate(passage > t + 0.005)
            below = estimate(sample_values(self.stable_half, t, 20000,
                                           self.rng) < 1.0)
            self.assertLess(abs(z_score(exceed, below)), 4)
            self.assertWithinSE(exceed, special.erfc(t / 2), k=4)

    def test_overshoot_of_exponential_jumps(self):
        # memoryless jumps: R_1 ~ Exp(θ) with θ = 1
        over = sample_overshoot(self.cf_half, 1.0, 20000, 0.001, self.rng)
        self.assertWithinSE(estimate(over), 1.0, k=4, slack=0.01)

    def test_overshoot_vanishes_for_linear_clock(self):
        over = sample_overshoot(self.linear, 0.73, 100, 0.01, self.rng)
        np.testing.assert_allclose(over, 0.0)

    def test_pure_jump_clock_overshoots(self):
        over = sample_overshoot(self.gamma, 1.0, 2000, 0.01, self.rng)
        self.assertTrue(np.all(over > 0))

    def test_drifted_passage_is_continuous_without_jumps(self):
        passage = sample_inverse(self.linear, 0.73, 10, 0.01, self.rng)
        np.testing.assert_allclose(passage, 0.73)
