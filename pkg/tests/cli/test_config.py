import math

import numpy as np

from nonlocal_koch.apps.cli.exceptions import ConfigError, ConfigParseError
from nonlocal_koch.apps.cli.functions import on_positions, resolve_function
from nonlocal_koch.apps.cli.serializers import (
    CompareConfigSerializer, SpectralConfigSerializer, VerifyConfigSerializer,
    WalkConfigSerializer,
)
from nonlocal_koch.apps.cli.utils import load_config, validate_config
from tests.cli.test_base import CommandTest
from tests.test_base import BaseTest


class TestFunctions(BaseTest):

    def test_names_and_parameters(self):
        sine, dim = resolve_function({'name': 'sine', 'k': 2})
        self.assertEqual(dim, 1)
        self.assertAlmostEqual(sine(0.25), math.sin(0.5))
        self.assertIsInstance(sine(0.25), float)
        one, _ = resolve_function('one')
        np.testing.assert_array_equal(one(np.array([0.1, 0.2])), [1.0, 1.0])

    def test_parabola_vanishes_at_the_ends(self):
        parabola, _ = resolve_function('parabola')
        self.assertEqual(parabola(0.0), 0.0)
        self.assertAlmostEqual(parabola(math.pi), 0.0)

    def test_bump_support(self):
        bump, _ = resolve_function({'name': 'bump', 'a': 0, 'b': 1})
        self.assertEqual(bump(1.5), 0.0)
        self.assertAlmostEqual(bump(0.5), 1.0)
        with self.assertRaises(ConfigError):
            resolve_function({'name': 'bump', 'a': 1, 'b': 0})

    def test_two_dimensional_on_positions(self):
        product, dim = resolve_function('sine_product')
        self.assertEqual(dim, 2)
        walker = on_positions(product, dim)
        np.testing.assert_allclose(walker(np.array([0.5 + 0.5j])), [1.0])

    def test_bad_specs(self):
        for spec in ('cosine', {'k': 1}, 3, {'name': 'sine', 'k': 'two'}):
            with self.assertRaises(ConfigError):
                resolve_function(spec)


class TestSerializers(BaseTest):

    def test_verify_defaults(self):
        serializer = VerifyConfigSerializer(data={})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.validated_data['formats'], ['json'])

    def test_walk_requires_a_seed(self):
        serializer = WalkConfigSerializer(data={
            'quantity': 'exit_time', 'domain': {'type': 'interval'},
            'start': [0.5]})
        self.assertFalse(serializer.is_valid())
        self.assertIn('seed', serializer.errors)

    def test_walk_needs_per_quantity(self):
        serializer = WalkConfigSerializer(data={
            'quantity': 'survival', 'domain': {'type': 'interval'},
            'start': [0.5], 'seed': 1})
        self.assertFalse(serializer.is_valid())
        self.assertIn('t_grid', serializer.errors)
        self.assertIn('change', serializer.errors)

    def test_walk_rejects_too_few_paths(self):
        serializer = WalkConfigSerializer(data={
            'quantity': 'exit_time', 'domain': {'type': 'interval'},
            'start': [0.5], 'seed': 1, 'n_paths': 10})
        self.assertFalse(serializer.is_valid())
        self.assertIn('n_paths', serializer.errors)

    def test_spectral_rectangle_needs_y_grid(self):
        serializer = SpectralConfigSerializer(data={
            'problem': 'elliptic', 'symbol': {'kind': 'linear'},
            'basis': {'kind': 'rectangle'}, 'x_grid': [0.5]})
        self.assertFalse(serializer.is_valid())
        self.assertIn('y_grid', serializer.errors)

    def test_compare_fills_in_a_basis(self):
        serializer = CompareConfigSerializer(data={
            'symbol': {'kind': 'linear'}, 't_grid': [0.1], 'x_grid': [1.0],
            'seed': 3})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        basis = serializer.validated_data['basis']
        self.assertEqual(basis['kind'], 'interval')
        self.assertAlmostEqual(basis['length'], math.pi)


class TestConfigFiles(CommandTest):

    def test_hash_ignores_output_and_threads(self):
        data = {'battery': ['gamma_mean'], 'threads': 4}
        _, first = validate_config(VerifyConfigSerializer, data, 'verify', out='a')
        _, second = validate_config(VerifyConfigSerializer, dict(data, threads=1),
                                    'verify', out='b')
        self.assertEqual(first, second)
        self.assertEqual(first['command'], 'verify')

    def test_seed_override_is_hashed(self):
        data = {'battery': []}
        _, hashed = validate_config(VerifyConfigSerializer, data, 'verify', seed=9)
        self.assertEqual(hashed['seed'], 9)

    def test_parse_error_position(self):
        path = self.write_config('{\n  "seed": 1,\n  oops\n}')
        with self.assertRaises(ConfigParseError) as context:
            load_config(path)
        self.assertEqual(str(context.exception.detail['line']), '3')

    def test_top_level_must_be_an_object(self):
        with self.assertRaises(ConfigError):
            load_config(self.write_config([1, 2]))

    def test_no_path_is_empty(self):
        self.assertEqual(load_config(None), {})
