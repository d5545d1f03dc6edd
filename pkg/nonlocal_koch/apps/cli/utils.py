"""
Runners behind the management commands.

Each runner takes a validated config and the hashed form of the raw
config and returns a `RunResult` holding the bytes of every output file.
Nothing here touches the filesystem except `load_config` and
`write_outputs`.
"""
import logging
import math

import numpy as np
import simplejson as json

from ..core.renderers import CSVRenderer, write_output
from ..core.stats import combined_se, estimate
from ..core.streams import run_chunked
from ..koch.renderers import SVGRenderer
from ..koch.serializers import DomainConfigSerializer, DomainDescriptorSerializer
from ..koch.utils import box_counting_dimension, dimension_estimate, dimension_limit
from ..spectral.models import DIRICHLET, INTERVAL
from ..spectral.utils import (
    project, solve_elliptic, solve_hbar, solve_hf, solve_lbar, solve_lf,
    solve_space_nonlocal, solve_time_nonlocal, subordination_quadrature,
    time_coefficients,
)
from ..symbols.models import BernsteinSymbol
from ..symbols.serializers import SymbolSerializer, build_symbol
from ..symbols.utils import eval_phi
from ..walker.boundary import (
    hat_process_path, jump_and_stop_path, sticky_elastic_path,
)
from ..walker.domains import (
    LEFT, RIGHT, Disk, Interval, PolygonDomain, Rectangle,
)
from ..walker.models import Ball, BoundaryMode, WalkSpec
from ..walker.utils import (
    INVERSE, classify_delay, expected_value, free_time_change_H_characteristic,
    mean_exit_time, mean_hitting_time, start_grid, survival_probability,
    trace_paths, trap_scan,
)
from .batteries import run_battery
from .exceptions import ConfigError, ConfigParseError, GridMismatchError, OutputPathError
from .functions import on_positions, resolve_function
from .models import RunResult
from .renderers import (
    ComparisonRenderer, DomainRenderer, ReportRenderer, RunRenderer, render_json,
)
from .serializers import (
    BASE, CSV, JSON, SVG, UNHASHED_KEYS, BasisSerializer, BoundarySerializer,
    WalkDomainSerializer,
)

logger = logging.getLogger(__name__)

DISK_OUTLINE_VERTICES = 256


def load_config(path):
    """Read a JSON run config; syntax errors carry their line and column."""
    if path is None:
        return {}
    try:
        with open(path, encoding='utf-8') as handle:
            text = handle.read()
    except OSError as error:
        raise ConfigError({'config': 'cannot read %s: %s' % (path, error.strerror)})
    try:
        data = json.loads(text)
    except json.JSONDecodeError as error:
        raise ConfigParseError({
            'config': path,
            'line': error.lineno,
            'column': error.colno,
            'detail': error.msg,
        })
    if not isinstance(data, dict):
        raise ConfigError({'config': 'the top level must be a JSON object'})
    return data


def validate_config(serializer_class, data, command, seed=None, out=None):
    """
    Apply command-line overrides and validate.

    Returns the validated config and the dictionary its hash is taken of.
    Output location and thread count do not enter the hash.
    """
    data = dict(data)
    if data.get('command', command) != command:
        raise ConfigError({'command': 'config is for %r, not %r' % (
            data['command'], command)})
    if seed is not None:
        data['seed'] = seed
    if out is not None:
        data['out'] = out
    serializer = serializer_class(data=data)
    serializer.is_valid(raise_exception=True)
    hashed = {key: value for key, value in data.items()
              if key not in UNHASHED_KEYS}
    hashed['command'] = command
    return serializer.validated_data, hashed


def write_outputs(directory, outputs):
    paths = []
    try:
        for filename in sorted(outputs):
            paths.append(write_output(directory, filename, outputs[filename]))
    except OSError as error:
        raise OutputPathError({'out': '%s: %s' % (directory, error.strerror)})
    return paths


def _plain(value):
    if hasattr(value, 'item'):
        return value.item()
    return value


def _records(header, rows):
    return [{name: _plain(value) for name, value in zip(header, row)}
            for row in rows]


def _table(outputs, config, hashed, stem, header, rows, summary, renderer_class):
    if CSV in config['formats']:
        outputs[stem + '.csv'] = CSVRenderer().render(header, rows, hashed)
    if JSON in config['formats']:
        payload = dict(summary)
        payload['rows'] = _records(header, rows)
        outputs[stem + '.json'] = render_json(renderer_class, payload, hashed)


def run_verify(config, hashed):
    report = run_battery(config.get('battery'), config.get('tolerance'),
                         config.get('tolerances'))
    outputs = {'verify.json': render_json(ReportRenderer, report, hashed)}
    return RunResult(outputs, report, failed=not report['passed'])


def run_koch(config, hashed):
    domain_config = dict(config['domain'])
    environment = dict(domain_config['environment'])
    if config.get('seed') is not None:
        environment.setdefault('seed', config['seed'])
    domain_config['environment'] = environment
    domain = DomainConfigSerializer().create(domain_config)
    descriptor = dict(DomainDescriptorSerializer(domain).data)
    descriptor['perimeter'] = domain.perimeter
    env = DomainConfigSerializer().fields['environment'].create(environment)
    descriptor['dimension_limit'] = dimension_limit(env)
    if domain.level:
        descriptor['dimension_estimate'] = dimension_estimate(domain.realization)
    if config.get('box_scales'):
        descriptor['box_counting_dimension'] = box_counting_dimension(
            domain.vertices, config['box_scales'])
    outputs = {}
    if JSON in config['formats']:
        outputs['domain.json'] = render_json(DomainRenderer, descriptor, hashed)
    if SVG in config['formats']:
        outputs['domain.svg'] = SVGRenderer().render(domain, config=hashed)
    report = {'level': domain.level, 'sigma': domain.sigma,
              'segments': domain.segment_count}
    return RunResult(outputs, report)


def _start(values):
    values = list(values)
    return values[0] if len(values) == 1 else complex(values[0], values[1])


def _boundary(config):
    if 'edges' in config:
        return {name: BoundarySerializer().create(mode)
                for name, mode in config['edges'].items()}
    if 'boundary' in config:
        return BoundarySerializer().create(config['boundary'])
    return BoundaryMode.kill()


def walk_spec(config, domain=None, start=None):
    domain = domain or WalkDomainSerializer().create(config['domain'])
    start = config['start'] if start is None else start
    return WalkSpec(domain, _start(start), config['dt'], _boundary(config),
                    max_steps=config.get('max_steps'))


def _change(config):
    change = config.get('change')
    if change is None:
        return None, None, None
    return change['tag'], build_symbol(change['symbol']), change.get('clock_dt')


def _outline(domain):
    """A polygon to draw walker traces over, or None in one dimension."""
    if isinstance(domain, PolygonDomain):
        return domain
    if isinstance(domain, Rectangle):
        x0, y0, x1, y1 = domain.bounds
        return PolygonDomain([complex(x0, y0), complex(x1, y0),
                              complex(x1, y1), complex(x0, y1)])
    if isinstance(domain, Disk):
        turns = np.exp(2j * np.pi * np.arange(DISK_OUTLINE_VERTICES)
                       / DISK_OUTLINE_VERTICES)
        return PolygonDomain(domain.center + domain.radius * turns)
    return None


def _boundary_walker(function, t, n_paths, seed, threads, sampler):
    """Estimate E[f(X_t)·weight] for a walker with a boundary clock."""

    def worker(size, rng):
        sample = sampler(t, size, rng)
        values = np.zeros(size)
        live = sample.alive
        values[live] = np.asarray(
            function(sample.positions[live]), dtype=float) * sample.weights[live]
        return {'value': values}
    return estimate(run_chunked(worker, n_paths, seed, threads)['value'])


BOUNDARY_SAMPLERS = {
    'sticky': sticky_elastic_path,
    'hat': hat_process_path,
    'jump_and_stop': jump_and_stop_path,
}


def _walk_rows(config, threads):
    quantity = config['quantity']
    seed = config['seed']
    n_paths = config['n_paths']
    tag, sym, clock_dt = _change(config)
    summary = {'quantity': quantity, 'n_paths': n_paths}
    spec = None
    if 'domain' in config and quantity != 'trap_scan':
        spec = walk_spec(config)
        summary['spec'] = spec.describe()

    if quantity == 'exit_time':
        result = mean_exit_time(spec, n_paths, seed, tag, sym, threads, clock_dt)
        summary.update(result.as_dict())
        header = ['quantity', 'mean', 'se', 'count', 'censored']
        value = result.estimate
        return header, [['lifetime', value.mean, value.se, value.count,
                         value.censored]], summary, spec

    if quantity == 'hitting_time':
        ball = Ball(config['ball']['center'], config['ball']['radius'])
        result = mean_hitting_time(spec, ball, n_paths, seed, threads)
        summary.update(result.as_dict())
        value = result.estimate
        header = ['quantity', 'mean', 'se', 'count', 'censored']
        return header, [['hitting_time', value.mean, value.se, value.count,
                         value.censored]], summary, spec

    if quantity == 'value':
        function, dim = resolve_function(config['function'])
        function = on_positions(function, dim)
        rows = []
        for i, t in enumerate(config['t_grid']):
            value = expected_value(spec, function, t, n_paths, (seed, i), tag,
                                   sym, threads, clock_dt).estimate
            rows.append([t, value.mean, value.se, value.count])
        return ['t', 'mean', 'se', 'count'], rows, summary, spec

    if quantity == 'survival':
        if tag != INVERSE:
            raise ConfigError({'change': 'survival needs an inverse (L) change'})
        rows = []
        for i, t in enumerate(config['t_grid']):
            both = survival_probability(spec, sym, t, n_paths, (seed, i), threads,
                                        clock_dt)
            rows.append([t, both['direct'].mean, both['direct'].se,
                         both['mixed'].mean, both['mixed'].se])
        header = ['t', 'direct_mean', 'direct_se', 'mixed_mean', 'mixed_se']
        return header, rows, summary, spec

    if quantity == 'classify':
        verdict = classify_delay(spec, sym, tag, n_paths, seed, threads, clock_dt)
        baseline = verdict.get('baseline')
        changed = verdict.get('changed')
        summary['verdict'] = verdict['verdict']
        header = ['verdict', 'exact', 'baseline_mean', 'baseline_se',
                  'changed_mean', 'changed_se', 'z']
        row = [verdict['verdict'], verdict['exact'],
               baseline.mean if baseline else math.nan,
               baseline.se if baseline else math.nan,
               changed.mean if changed else math.nan,
               changed.se if changed else math.nan,
               verdict.get('z', math.nan)]
        return header, [row], summary, spec

    if quantity == 'trap_scan':
        domain = WalkDomainSerializer().create(config['domain'])
        ball = Ball(config['ball']['center'], config['ball']['radius'])
        starts = start_grid(domain, config['starts_per_side'], ball)
        scan = trap_scan(domain, ball, starts, n_paths, seed, config['dt'],
                         threads, config.get('max_steps'))
        summary['sup'] = scan['sup']
        summary['sup_se'] = scan['sup_se']
        header = ['x', 'y', 'mean', 'se', 'count', 'censored']
        rows = [[row[name] for name in header] for row in scan['rows']]
        return header, rows, summary, None

    if quantity in BOUNDARY_SAMPLERS:
        function, dim = resolve_function(config['function'])
        function = on_positions(function, dim)
        sampler = BOUNDARY_SAMPLERS[quantity]
        rows = []
        for i, t in enumerate(config['t_grid']):
            value = _boundary_walker(
                function, t, n_paths, (seed, i), threads,
                lambda s, size, rng: sampler(spec, s, size, rng))
            rows.append([t, value.mean, value.se, value.count])
        return ['t', 'mean', 'se', 'count'], rows, summary, spec

    rows = []
    for i, t in enumerate(config['t_grid']):
        value, exact = free_time_change_H_characteristic(
            sym, t, config['xi'], n_paths, (seed, i), threads)
        rows.append([t, value.mean, value.se, exact])
    return ['t', 'mean', 'se', 'exact'], rows, summary, None


def run_walk(config, hashed, threads=None):
    header, rows, summary, spec = _walk_rows(config, threads)
    outputs = {}
    _table(outputs, config, hashed, 'walk', header, rows, summary, RunRenderer)
    if config['traces'] and SVG in config['formats']:
        outline = _outline(spec.domain) if spec is not None else None
        if outline is None:
            logger.warning('traces are drawn for two-dimensional walkers only')
        else:
            traces = trace_paths(spec, config['traces'], config['horizon'],
                                 config['seed'])
            outputs['traces.svg'] = SVGRenderer().render(outline, traces, hashed)
    return RunResult(outputs, summary)


def _spectral_points(config):
    """Solution points and the leading table columns for each of them."""
    xs = [float(x) for x in config['x_grid']]
    if 'y_grid' not in config or config.get('basis', {}).get('kind', INTERVAL) == INTERVAL:
        return xs, [[x] for x in xs], ['x']
    pairs = [[x, float(y)] for x in xs for y in config['y_grid']]
    return pairs, pairs, ['x', 'y']


def _check_dimension(basis, dim):
    if basis is not None and basis.dim != dim:
        raise ConfigError({'function': 'a %d-d function on a %d-d basis' % (
            dim, basis.dim)})


def run_spectral(config, hashed):
    problem = config['problem']
    sym = build_symbol(config['symbol'])
    function, dim = resolve_function(config['function'])
    basis = BasisSerializer().create(config['basis']) if 'basis' in config else None
    _check_dimension(basis, dim)
    if basis is None and dim != 1:
        raise ConfigError({'function': 'first-order problems take 1-d functions'})
    points, columns, names = _spectral_points(config)
    rows = []
    if problem in ('space', 'time', 'subordination'):
        solver = {
            'space': solve_space_nonlocal,
            'time': solve_time_nonlocal,
            'subordination': subordination_quadrature,
        }[problem]
        header = ['t'] + names + ['u']
        for t in config['t_grid']:
            values = solver(sym, basis, function, t, points)
            rows.extend([t] + column + [u] for column, u in zip(columns, values))
    elif problem in ('elliptic', 'elliptic_classical'):
        mode = 'classical' if problem == 'elliptic_classical' else 'subordinated'
        header = names + ['u']
        values = solve_elliptic(sym, basis, function, points, mode)
        rows.extend(column + [u] for column, u in zip(columns, values))
    elif problem in ('hf', 'lf'):
        solver = solve_hf if problem == 'hf' else solve_lf
        header = ['t', 'x', 'u']
        for t in config['t_grid']:
            values = solver(sym, function, t, points)
            rows.extend([t, x, u] for x, u in zip(points, values))
    else:
        solver = solve_hbar if problem == 'hbar' else solve_lbar
        header = ['x', 'u']
        values = solver(sym, function, points)
        rows.extend([x, u] for x, u in zip(points, values))

    summary = {'problem': problem, 'symbol': SymbolSerializer(sym).data}
    if basis is not None:
        summary['basis'] = basis.describe()
    outputs = {}
    _table(outputs, config, hashed, 'spectral', header, rows, summary, RunRenderer)
    if config['coefficients'] and problem in ('space', 'time') and CSV in config['formats']:
        outputs['coefficients.csv'] = CSVRenderer().render(
            ['t', 'k', 'mu', 'coefficient'],
            _coefficient_rows(problem, sym, basis, function, config['t_grid']),
            hashed)
    return RunResult(outputs, summary)


def _coefficient_rows(problem, sym, basis, function, t_grid):
    coefficients = project(function, basis)
    multipliers = np.asarray(eval_phi(sym, basis.eigenvalues), dtype=float)
    rows = []
    for t in t_grid:
        if problem == 'space':
            at_t = coefficients.scaled(np.exp(-t * multipliers))
        else:
            at_t = time_coefficients(sym, coefficients, t)
        rows.extend([t, k, mu, value] for k, (mu, value) in enumerate(
            zip(basis.eigenvalues, at_t.values), start=1))
    return rows


def _match_grid(name, given, expected):
    if given is not None and [float(v) for v in given] != [float(v) for v in expected]:
        raise GridMismatchError({name: 'spectral and Monte Carlo grids differ'})


def _compare_spectral(config, threads):
    basis = BasisSerializer().create(config['basis'])
    _match_grid('t_grid', config.get('spectral_t_grid'), config['t_grid'])
    _match_grid('x_grid', config.get('spectral_x_grid'), config['x_grid'])
    sym = build_symbol(config['symbol'])
    reference_sym = build_symbol(config.get('spectral_symbol') or config['symbol'])
    function, dim = resolve_function(config['function'])
    _check_dimension(basis, dim)
    points, columns, names = _spectral_points(config)
    if basis.kind == INTERVAL:
        domain = Interval(0.0, basis.lengths[0])
        inside = [0 < x < basis.lengths[0] for x in points]
    else:
        a, b = basis.lengths
        domain = Rectangle(0.0, 0.0, a, b)
        inside = [0 < x < a and 0 < y < b for x, y in points]
    if not all(inside):
        raise GridMismatchError({'x_grid': 'every point must lie inside the domain'})
    mode = BoundaryMode.kill() if basis.condition == DIRICHLET else BoundaryMode.reflect()
    tag = None if config['tag'] == BASE else config['tag']
    if tag is None:
        solver, reference_sym = solve_space_nonlocal, BernsteinSymbol.linear()
    elif tag == INVERSE:
        solver = solve_time_nonlocal
    else:
        solver = solve_space_nonlocal
    walker_function = on_positions(function, dim)
    header = ['t'] + names + ['mc_mean', 'mc_se', 'reference', 'delta', 'flag']
    rows = []
    for i, t in enumerate(config['t_grid']):
        reference = solver(reference_sym, basis, function, t, points)
        for j, (point, column) in enumerate(zip(points, columns)):
            spec = WalkSpec(domain, _start(np.atleast_1d(point)), config['dt'], mode)
            value = expected_value(
                spec, walker_function, t, config['n_paths'], (config['seed'], i, j),
                tag, sym, threads, config.get('clock_dt')).estimate
            delta = value.mean - reference[j]
            flag = abs(delta) > config['separation'] * value.se + 1e-12
            rows.append([t] + column + [value.mean, value.se, reference[j], delta,
                                        int(flag)])
    return header, rows


def _compare_boundary(config, threads):
    """Both constructions of the sticky walker on (0, length), plus η = 0."""
    sym = build_symbol(config['symbol'])
    function, dim = resolve_function(config['function'])
    if dim != 1:
        raise ConfigError({'function': 'the boundary comparison is one-dimensional'})
    domain = Interval(0.0, config['length'])
    right = BoundaryMode(config['right'])
    sticky = {LEFT: BoundaryMode.sticky(config['eta'], config['sigma'], config['c'], sym),
              RIGHT: right}
    # η = 0 leaves the elastic walker on the sticky clock
    elastic = {LEFT: BoundaryMode.sticky(0.0, config['sigma'], config['c'], sym),
               RIGHT: right}
    header = ['t', 'x', 'first_mean', 'first_se', 'second_mean', 'second_se',
              'baseline_mean', 'baseline_se', 'delta', 'combined_se', 'flag']
    rows = []
    for i, t in enumerate(config['t_grid']):
        for j, x in enumerate(config['x_grid']):
            if not 0 < x < config['length']:
                raise GridMismatchError({'x_grid': 'points must lie inside the interval'})
            seed = (config['seed'], i, j)
            spec = WalkSpec(domain, x, config['dt'], sticky)
            baseline_spec = WalkSpec(domain, x, config['dt'], elastic)
            first = _boundary_walker(
                function, t, config['n_paths'], seed + (0,), threads,
                lambda s, size, rng: sticky_elastic_path(spec, s, size, rng))
            second = _boundary_walker(
                function, t, config['n_paths'], seed + (1,), threads,
                lambda s, size, rng: hat_process_path(spec, s, size, rng))
            baseline = _boundary_walker(
                function, t, config['n_paths'], seed + (2,), threads,
                lambda s, size, rng: sticky_elastic_path(
                    baseline_spec, s, size, rng))
            delta = first.mean - second.mean
            se = combined_se(first, second)
            flag = abs(delta) > config['separation'] * se + 1e-12
            rows.append([t, x, first.mean, first.se, second.mean, second.se,
                         baseline.mean, baseline.se, delta, se, int(flag)])
    return header, rows


def run_compare(config, hashed, threads=None):
    if config['mode'] == 'spectral':
        header, rows = _compare_spectral(config, threads)
    else:
        header, rows = _compare_boundary(config, threads)
    flags = sum(row[-1] for row in rows)
    summary = {'mode': config['mode'], 'flags': flags,
               'separation': config['separation'], 'points': len(rows)}
    if flags:
        logger.warning('%d of %d points differ by more than %g SE',
                       flags, len(rows), config['separation'])
    outputs = {}
    _table(outputs, config, hashed, 'compare', header, rows, summary,
           ComparisonRenderer)
    return RunResult(outputs, summary)
