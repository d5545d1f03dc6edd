import math

import numpy as np
from scipy import special, stats

from nonlocal_koch.apps.core.stats import estimate
from nonlocal_koch.apps.koch.models import EnvironmentSequence
from nonlocal_koch.apps.koch.utils import build_trapped_domain
from nonlocal_koch.apps.walker.domains import (
    Disk, HalfLine, Interval, PolygonDomain, Rectangle, build_domain,
)
from nonlocal_koch.apps.walker.engine import (
    exit_times, extend_base_path, simulate_base_path, terminal_states,
)
from nonlocal_koch.apps.walker.exceptions import WalkDomainError
from nonlocal_koch.apps.walker.models import BoundaryMode, WalkSpec
from tests.test_base import BaseTest

UNIT_SQUARE = np.array([0, 1, 1 + 1j, 1j])


class TestSpecs(BaseTest):

    def test_start_outside(self):
        with self.assertRaises(WalkDomainError):
            WalkSpec(Interval(0, 1), 1.5, 1e-3)
        with self.assertRaises(WalkDomainError):
            WalkSpec(PolygonDomain(UNIT_SQUARE), [2.0, 0.5], 1e-3)

    def test_bad_step(self):
        with self.assertRaises(WalkDomainError):
            WalkSpec(Interval(0, 1), 0.5, 0.0)

    def test_one_mode_per_class(self):
        spec = WalkSpec(Interval(0, 1), 0.5, 1e-3, {
            'left': BoundaryMode.kill(), 'right': BoundaryMode.reflect()})
        self.assertEqual(spec.absorbing, (True, False))
        with self.assertRaises(WalkDomainError):
            WalkSpec(Interval(0, 1), 0.5, 1e-3, {'left': BoundaryMode.kill()})
        with self.assertRaises(WalkDomainError):
            WalkSpec(Interval(0, 1), 0.5, 1e-3, {
                'left': BoundaryMode.kill(), 'middle': BoundaryMode.kill()})

    def test_walls_always_reflect(self):
        domain = PolygonDomain(UNIT_SQUARE, [[0.5, 0.5 + 0.5j]])
        spec = WalkSpec(domain, [0.25, 0.25], 1e-3, BoundaryMode.kill())
        self.assertEqual(spec.modes['walls'].kind, 'reflect')
        with self.assertRaises(WalkDomainError):
            WalkSpec(domain, [0.25, 0.25], 1e-3,
                     {'boundary': BoundaryMode.kill(),
                      'walls': BoundaryMode.kill()})

    def test_boundary_modes(self):
        with self.assertRaises(WalkDomainError):
            BoundaryMode.sticky(1.0, 0.0, 0.0, self.stable_half)
        with self.assertRaises(WalkDomainError):
            BoundaryMode.sticky(-1.0, 1.0, 0.0, self.stable_half)
        with self.assertRaises(WalkDomainError):
            BoundaryMode('sticky', eta=1.0)
        self.assertEqual(BoundaryMode.elastic(2.0, 4.0).ratio, 0.5)

    def test_descriptors(self):
        self.assertIsInstance(build_domain({'type': 'half_line'}), HalfLine)
        square = build_domain({'type': 'polygon',
                               'vertices': [[0, 0], [1, 0], [1, 1], [0, 1]]})
        self.assertTrue(square.contains([0.5 + 0.5j])[0])
        self.assertFalse(square.contains([1.5 + 0.5j])[0])
        with self.assertRaises(WalkDomainError):
            build_domain({'type': 'torus'})


class TestKilledWalkers(BaseTest):

    def test_interval_exit_time(self):
        spec = WalkSpec(Interval(0, 1), 0.5, 2e-4)
        tau, _ = exit_times(spec, 20000, self.rng)
        self.assertWithinSE(estimate(tau), 0.125, k=4, slack=2e-4)

    def test_disk_exit_time(self):
        spec = WalkSpec(Disk(0j, 1.0), [0.0, 0.0], 1e-3)
        tau, _ = exit_times(spec, 8000, self.rng)
        self.assertWithinSE(estimate(tau), 0.25, k=4, slack=5e-3)

    def test_polygon_square_exit_time(self):
        spec = WalkSpec(PolygonDomain(UNIT_SQUARE), [0.5, 0.5], 5e-4)
        tau, _ = exit_times(spec, 8000, self.rng)
        # torsion function of the unit square at its center
        self.assertWithinSE(estimate(tau), 0.0736713, k=4, slack=2e-3)

    def test_bridge_correction_near_the_edge(self):
        # a coarse step must not overshoot the edge unseen
        near = [0.05, 0.5]
        coarse, _ = exit_times(
            WalkSpec(PolygonDomain(UNIT_SQUARE), near, 2e-3), 4000, self.rng)
        fine, _ = exit_times(
            WalkSpec(PolygonDomain(UNIT_SQUARE), near, 1e-4), 4000, self.rng)
        coarse, fine = estimate(coarse), estimate(fine)
        self.assertLessEqual(abs(coarse.mean - fine.mean),
                             4 * math.hypot(coarse.se, fine.se) + 1e-3)

    def test_censoring(self):
        spec = WalkSpec(Interval(0, 1), 0.5, 1e-4, max_steps=10)
        tau, _ = exit_times(spec, 500, self.rng)
        self.assertTrue(np.isnan(tau).sum() > 400)


class TestReflectedWalkers(BaseTest):

    def test_rectangle_occupation_is_uniform(self):
        spec = WalkSpec(Rectangle(), [0.5, 0.5], 2e-3, BoundaryMode.reflect())
        batch = terminal_states(spec, 2.0, 4000, self.rng)
        self.assertTrue(batch.alive.all())
        x, y = batch.position.real, batch.position.imag
        self.assertTrue(((x >= 0) & (x <= 1) & (y >= 0) & (y <= 1)).all())
        counts, _, _ = np.histogram2d(x, y, bins=4, range=[[0, 1], [0, 1]])
        self.assertGreater(stats.chisquare(counts.ravel()).pvalue, 0.01)

    def test_polygon_paths_stay_inside(self):
        domain = PolygonDomain(UNIT_SQUARE)
        spec = WalkSpec(domain, [0.1, 0.1], 1e-3, BoundaryMode.reflect())
        batch = terminal_states(spec, 0.3, 500, self.rng)
        self.assertTrue(domain.contains(batch.position).all())
        self.assertTrue((batch.local[0] > 0).any())
        self.assertTrue((batch.local[1] == 0).all())

    def test_walls_separate_bumps(self):
        env = EnvironmentSequence.constant(3.0)
        prefractal = build_trapped_domain(env, 1, lambda k: 0.5)
        domain = PolygonDomain.from_prefractal(prefractal)
        spec = WalkSpec(domain, [0.5, 0.5], 1e-4, BoundaryMode.reflect())
        batch = terminal_states(spec, 0.05, 300, self.rng)
        self.assertTrue(domain.contains(batch.position).all())

    def test_half_line_elastic_weight(self):
        spec = WalkSpec(HalfLine(), 0.0, 1e-3, BoundaryMode.elastic(1.0))
        batch = terminal_states(spec, 1.0, 20000, self.rng)
        weights = batch.weights()
        self.assertTrue(((weights > 0) & (weights <= 1)).all())
        exact = math.e * special.erfc(1.0)
        self.assertWithinSE(estimate(weights), exact, k=4)

    def test_elastic_matches_exponential_killing(self):
        spec = WalkSpec(Interval(0, 1), 0.5, 1e-3, BoundaryMode.elastic(1.0))
        batch = terminal_states(spec, 0.5, 10000, self.rng)
        weighted = estimate(batch.weights())
        killed = estimate(
            self.rng.exponential(1.0, 10000) > batch.total_local_time())
        self.assertLessEqual(abs(weighted.mean - killed.mean),
                             4 * math.hypot(weighted.se, killed.se))


class TestBasePaths(BaseTest):

    def test_grid_and_exit(self):
        spec = WalkSpec(Interval(0, 1), 0.5, 1e-3)
        path = simulate_base_path(spec, 10.0, self.rng)
        self.assertTrue(path.killed)
        self.assertLessEqual(path.exit_time, path.horizon)
        np.testing.assert_allclose(np.diff(path.times), 1e-3)
        _, _, alive = path.state_at(path.exit_time + 1.0)
        self.assertFalse(alive)

    def test_extension_keeps_prefix(self):
        spec = WalkSpec(Interval(0, 1), 0.5, 1e-3, BoundaryMode.reflect())
        path = simulate_base_path(spec, 0.1, self.rng)
        longer = extend_base_path(path, 0.3, self.rng)
        self.assertAlmostEqual(longer.horizon, 0.3)
        np.testing.assert_array_equal(longer.positions[:path.times.size],
                                      path.positions)
        self.assertTrue((np.diff(longer.local_time) >= 0).all())
