import numpy as np

from nonlocal_koch.apps.core.stats import estimate, z_score
from nonlocal_koch.apps.core.streams import chunk_sizes, run_chunked
from tests.test_base import BaseTest


def _uniforms(size, rng):
    return {'u': rng.random(size), 'size': np.full(size, size)}


class TestStreams(BaseTest):

    def test_chunk_sizes(self):
        self.assertEqual(chunk_sizes(1300, 512), [512, 512, 276])
        self.assertEqual(chunk_sizes(1024, 512), [512, 512])

    def test_results_do_not_depend_on_threads(self):
        single = run_chunked(_uniforms, 1300, 7, threads=1, chunk_size=512)
        pooled = run_chunked(_uniforms, 1300, 7, threads=4, chunk_size=512)
        self.assertEqual(single['u'].size, 1300)
        np.testing.assert_array_equal(single['u'], pooled['u'])

    def test_different_seeds_differ(self):
        first = run_chunked(_uniforms, 100, 1, chunk_size=50)
        second = run_chunked(_uniforms, 100, 2, chunk_size=50)
        self.assertFalse(np.array_equal(first['u'], second['u']))

    def test_empty_run(self):
        self.assertEqual(run_chunked(_uniforms, 0, 1), {})


class TestStats(BaseTest):

    def test_estimate(self):
        result = estimate([1.0, 2.0, 3.0], censored=2)
        self.assertEqual(result.mean, 2.0)
        self.assertAlmostEqual(result.se, (1 / 3) ** 0.5)
        self.assertEqual(result.as_dict()['censored'], 2)

    def test_order_does_not_matter(self):
        values = self.rng.random(1000)
        self.assertEqual(estimate(values).mean, estimate(values[::-1]).mean)

    def test_confidence_interval_contains_mean(self):
        low, high = estimate([1.0, 2.0, 4.0]).confidence_interval()
        self.assertLess(low, 7 / 3)
        self.assertGreater(high, 7 / 3)

    def test_z_score(self):
        first = estimate([0.0, 2.0])
        self.assertEqual(z_score(first, first), 0.0)
