import math
from io import StringIO

import simplejson as json
from django.core.management import call_command
from django.core.management.base import CommandError

from tests.cli.test_base import CommandTest
from tests.test_base import slow


class TestVerify(CommandTest):

    def test_selected_checks_pass(self):
        self.call('verify', {'battery': ['mittag_leffler_half', 'gamma_mean',
                                         'sonine_identity']})
        payload = self.read_json('verify.json')
        report = payload['report']
        self.assertTrue(report['passed'])
        self.assertEqual(report['count'], 3)
        self.assertIn('config_hash', payload['meta'])
        self.assertIn('version', payload['meta'])

    def test_forced_tolerance_fails(self):
        with self.assertRaises(CommandError) as context:
            self.call('verify', {'battery': ['caputo_power', 'mittag_leffler_half'],
                                 'tolerance': 1e-15})
        self.assertEqual(context.exception.returncode, 1)
        report = self.read_json('verify.json')['report']
        self.assertFalse(report['passed'])
        self.assertGreaterEqual(report['failures'], 1)

    @slow
    def test_default_battery_passes(self):
        self.call('verify')
        report = self.read_json('verify.json')['report']
        self.assertTrue(report['passed'], report)
        self.assertGreater(report['count'], 10)

    def test_empty_battery(self):
        self.call('verify', {'battery': []})
        report = self.read_json('verify.json')['report']
        self.assertTrue(report['passed'])
        self.assertEqual(report['count'], 0)

    def test_parse_error_reports_line(self):
        path = self.write_config('{\n  "battery": [\n    "gamma_mean",\n}\n')
        stderr = StringIO()
        with self.assertRaises(CommandError) as context:
            call_command('verify', config=path, out=self.out, stderr=stderr)
        self.assertEqual(context.exception.returncode, 1)
        errors = json.loads(stderr.getvalue())['errors']
        self.assertEqual(errors['code'], 'config_parse_error')
        self.assertIn('line', errors['detail'])

    def test_missing_config_file(self):
        with self.assertRaises(CommandError):
            call_command('verify', config=self.out + '.json', out=self.out,
                         stderr=StringIO())

    def test_unknown_check(self):
        with self.assertRaises(CommandError):
            self.call('verify', {'battery': ['no_such_check']})

    def test_wrong_command(self):
        with self.assertRaises(CommandError):
            self.call('verify', {'command': 'walk'})


class TestKoch(CommandTest):

    def test_domain_files(self):
        self.call('koch', {'domain': {'n': 2, 'environment': {'ell': 3}}})
        domain = self.read_json('domain.json')['domain']
        self.assertEqual(domain['level'], 2)
        self.assertAlmostEqual(domain['sigma'], 9 / 16)
        self.assertAlmostEqual(domain['dimension_estimate'], math.log(4) / math.log(3))
        self.assertEqual(len(domain['realization']), 2)
        svg = self.read('domain.svg').decode('utf-8')
        self.assertIn('config_hash=', svg)
        self.assertIn('viewBox', svg)

    def test_same_config_same_bytes(self):
        config = {'domain': {'n': 3, 'environment': {
            'alphabet': [2.7, 3.3], 'probabilities': [0.5, 0.5]}}, 'seed': 7}
        self.call('koch', config)
        first = self.read('domain.json')
        self.call('koch', config, out=self.out + '2')
        self.assertEqual(first, self.read('domain.json', self.out + '2'))

    def test_invalid_level(self):
        with self.assertRaises(CommandError):
            self.call('koch', {'domain': {'n': -1, 'environment': {'ell': 3}}})


class TestWalk(CommandTest):

    def config(self, **extra):
        config = {
            'quantity': 'exit_time',
            'domain': {'type': 'interval', 'lower': 0, 'upper': 1},
            'start': [0.5],
            'dt': 1e-3,
            'n_paths': 2000,
            'seed': 11,
        }
        config.update(extra)
        return config

    def test_exit_time(self):
        self.call('walk', self.config())
        comment, header, rows = self.read_csv('walk.csv')
        self.assertTrue(comment.startswith('# config_hash='))
        self.assertEqual(header, ['quantity', 'mean', 'se', 'count', 'censored'])
        mean, se = float(rows[0][1]), float(rows[0][2])
        self.assertLessEqual(abs(mean - 0.125), 4 * se + 2e-3)

    def test_threads_do_not_change_bytes(self):
        self.call('walk', self.config(), threads=1)
        self.call('walk', self.config(), threads=2, out=self.out + '2')
        self.assertEqual(self.read('walk.csv'), self.read('walk.csv', self.out + '2'))
        self.assertEqual(self.read('walk.json'),
                         self.read('walk.json', self.out + '2'))

    def test_seed_flag_overrides(self):
        self.call('walk', self.config(), seed=11)
        self.call('walk', self.config(), seed=12, out=self.out + '2')
        self.assertNotEqual(self.read('walk.csv'),
                            self.read('walk.csv', self.out + '2'))

    def test_seed_is_required(self):
        config = self.config()
        del config['seed']
        with self.assertRaises(CommandError):
            self.call('walk', config)

    def test_missing_fields(self):
        with self.assertRaises(CommandError):
            self.call('walk', self.config(quantity='value'))

    def test_expected_values_on_a_grid(self):
        self.call('walk', self.config(
            quantity='value', function={'name': 'sine', 'k': math.pi},
            t_grid=[0.01, 0.02], n_paths=500))
        _, header, rows = self.read_csv('walk.csv')
        self.assertEqual(header, ['t', 'mean', 'se', 'count'])
        self.assertEqual(len(rows), 2)

    def test_traces(self):
        self.call('walk', self.config(
            domain={'type': 'rectangle', 'bounds': [0, 0, 1, 1]},
            start=[0.5, 0.5], boundary={'kind': 'kill'}, n_paths=200,
            traces=3, horizon=0.01, formats=['csv', 'svg']))
        svg = self.read('traces.svg').decode('utf-8')
        self.assertEqual(svg.count('steelblue'), 3)


class TestSpectral(CommandTest):

    def test_space_nonlocal_table(self):
        self.call('spectral', {
            'problem': 'space', 'symbol': {'kind': 'stable', 'alpha': 0.5},
            'basis': {'modes': 8}, 'function': 'sine', 't_grid': [1.0],
            'x_grid': [math.pi / 2], 'coefficients': True,
        })
        _, header, rows = self.read_csv('spectral.csv')
        self.assertEqual(header, ['t', 'x', 'u'])
        self.assertAlmostEqual(float(rows[0][2]), math.exp(-1), places=10)
        _, header, rows = self.read_csv('coefficients.csv')
        self.assertEqual(header, ['t', 'k', 'mu', 'coefficient'])
        self.assertEqual(len(rows), 8)

    def test_elliptic_on_rectangle(self):
        self.call('spectral', {
            'problem': 'elliptic', 'symbol': {'kind': 'linear'},
            'basis': {'kind': 'rectangle', 'modes': 4},
            'function': 'sine_product', 'x_grid': [0.5], 'y_grid': [0.5],
        })
        _, header, rows = self.read_csv('spectral.csv')
        self.assertEqual(header, ['x', 'y', 'u'])
        self.assertAlmostEqual(float(rows[0][2]), 1 / (2 * math.pi ** 2), places=8)

    def test_lbar(self):
        self.call('spectral', {
            'problem': 'lbar', 'symbol': {'kind': 'linear'},
            'function': 'one', 'x_grid': [1.0, 2.0],
        })
        _, _, rows = self.read_csv('spectral.csv')
        self.assertAlmostEqual(float(rows[0][1]), 1.0, places=8)
        self.assertAlmostEqual(float(rows[1][1]), 2.0, places=8)

    def test_unsupported_problem(self):
        with self.assertRaises(CommandError):
            self.call('spectral', {
                'problem': 'elliptic_classical',
                'symbol': {'kind': 'stable', 'alpha': 0.5},
                'basis': {}, 'x_grid': [1.0],
            })

    def test_needs_basis(self):
        with self.assertRaises(CommandError):
            self.call('spectral', {
                'problem': 'time', 'symbol': {'kind': 'linear'},
                't_grid': [1.0], 'x_grid': [1.0],
            })


class TestCompare(CommandTest):

    def config(self, **extra):
        config = {
            'symbol': {'kind': 'linear'},
            'function': 'sine',
            't_grid': [0.1],
            'x_grid': [math.pi / 2],
            'n_paths': 2000,
            'dt': 1e-3,
            'seed': 5,
        }
        config.update(extra)
        return config

    def test_heat_agrees(self):
        self.call('compare', self.config())
        summary = self.read_json('compare.json')['comparison']
        self.assertEqual(summary['flags'], 0)
        _, header, rows = self.read_csv('compare.csv')
        self.assertEqual(header, ['t', 'x', 'mc_mean', 'mc_se', 'reference',
                                  'delta', 'flag'])
        self.assertAlmostEqual(float(rows[0][4]), math.exp(-0.1), places=10)

    def test_mismatched_symbol_is_flagged(self):
        self.call('compare', self.config(
            symbol={'kind': 'stable', 'alpha': 0.5},
            spectral_symbol={'kind': 'gamma', 'a': 1, 'b': 2},
            tag='H', t_grid=[0.5]))
        self.assertEqual(self.read_json('compare.json')['comparison']['flags'], 1)

    def test_grid_mismatch(self):
        stderr = StringIO()
        path = self.write_config(self.config(spectral_x_grid=[1.0]))
        with self.assertRaises(CommandError):
            call_command('compare', config=path, out=self.out, stderr=stderr)
        self.assertIn('grid_mismatch', stderr.getvalue())

    def test_points_must_be_inside(self):
        with self.assertRaises(CommandError):
            self.call('compare', self.config(x_grid=[4.0]))

    def test_boundary_columns(self):
        self.call('compare', self.config(
            mode='boundary', symbol={'kind': 'stable', 'alpha': 0.5},
            function='one', t_grid=[0.05], x_grid=[0.5], n_paths=200))
        _, header, rows = self.read_csv('compare.csv')
        self.assertEqual(header[:2], ['t', 'x'])
        self.assertIn('baseline_mean', header)
        self.assertEqual(len(rows), 1)

    @slow
    def test_boundary_representations_agree(self):
        self.call('compare', self.config(
            mode='boundary', symbol={'kind': 'stable', 'alpha': 0.5},
            function='one', t_grid=[0.5], x_grid=[0.25, 0.5], n_paths=20000))
        summary = self.read_json('compare.json')['comparison']
        self.assertEqual(summary['flags'], 0)
