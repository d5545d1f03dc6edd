import logging
import math

import numpy as np

from ..core.stats import estimate, z_score
from ..core.streams import run_chunked
from ..koch.renderers import MAX_TRACES
from ..subordinate.utils import (
    as_generator, first_passage_batch, sample_increments, sample_inverse,
    sample_values,
)
from ..symbols.models import LINEAR, is_infinite
from ..symbols.utils import eval_phi, phi_prime_at_zero
from .engine import (
    WalkerBatch, exit_times, extend_base_path, hitting_times,
    simulate_base_path, terminal_states,
)
from .exceptions import UnreachableTargetError, WalkDomainError
from .models import (
    Ball, BoundaryMode, ChangedState, TerminalSample, WalkResult,
    WalkSpec,
)

logger = logging.getLogger(__name__)

INVERSE = 'L'
DIRECT = 'H'
CHANGES = (INVERSE, DIRECT)

DELAYED = 'delayed'
RUSHED = 'rushed'
NEUTRAL = 'neutral'
INFINITE_MEAN = 'infinite_mean'

MIN_PATHS = 100


def _check_change(tag, sym):
    if tag is None:
        return
    if tag not in CHANGES:
        raise WalkDomainError({'change': 'expected L or H, got %r' % tag})
    if sym is None:
        raise WalkDomainError({'symbol': 'a time change needs a symbol'})


def _check_paths(n_paths):
    if n_paths < MIN_PATHS:
        raise WalkDomainError({'n_paths': 'need at least %d paths' % MIN_PATHS})


def _time_change(path, t, rng, inner):
    if t < 0:
        raise WalkDomainError({'t': 'must be nonnegative'})
    rng = as_generator(rng)
    s = float(inner(rng))
    if not path.killed and s > path.horizon:
        logger.debug('extending base path from %g to %g', path.horizon, s)
        path = extend_base_path(path, s + path.spec.dt, rng)
    position, local, alive = path.state_at(s)
    return ChangedState(s, position, local, alive, path)


def time_change_L(path, sym, t, rng, clock_dt=None):
    """The recorded path read at an independent L_t."""
    clock_dt = clock_dt or path.spec.dt
    return _time_change(
        path, t, rng,
        lambda gen: sample_inverse(sym, t, 1, clock_dt, gen)[0])


def time_change_H(path, sym, t, rng):
    """The recorded path read at an independent H_t."""
    return _time_change(path, t, rng,
                        lambda gen: sample_values(sym, t, 1, gen)[0])


def inner_times(sym, tag, t, size, rng, clock_dt):
    """Independent draws of the inner clock at outer time t."""
    if tag is None or sym.kind == LINEAR:
        return np.full(size, float(t))
    if tag == INVERSE:
        return sample_inverse(sym, t, size, clock_dt, rng)
    return sample_values(sym, t, size, rng)


def changed_terminal_states(spec, t, size, rng, tag=None, sym=None,
                            clock_dt=None):
    """
    Batch of X^T_t for the time change `tag` by `sym`.

    Every walker gets its own independent clock draw.
    """
    _check_change(tag, sym)
    rng = as_generator(rng)
    horizons = inner_times(sym, tag, t, size, rng, clock_dt or spec.dt)
    batch = terminal_states(spec, horizons, size, rng)
    return TerminalSample(
        positions=batch.position, alive=batch.alive.copy(),
        weights=batch.weights(), local_time=batch.total_local_time(),
        extra={'inner_time': horizons})


def expected_value(spec, function, t, n_paths, seed, tag=None, sym=None,
                   threads=None, clock_dt=None):
    """Estimate of E_x[f(X^T_t)] with f = 0 after killing."""
    _check_paths(n_paths)

    def worker(size, rng):
        sample = changed_terminal_states(spec, t, size, rng, tag, sym, clock_dt)
        values = np.zeros(size)
        live = sample.alive
        values[live] = np.asarray(
            function(sample.positions[live]), dtype=float) * sample.weights[live]
        return {'value': values}

    records = run_chunked(worker, n_paths, seed, threads)
    return WalkResult('value', records)


def _behind(batch, level, index, tag, t):
    """Walkers in `index` whose inner clock has not reached outer time t."""
    if tag == INVERSE:
        return index[level[index] <= t]
    return index[batch.clock[index] < level[index]]


def changed_lifetimes(spec, size, rng, tag, sym, clock_dt=None, horizon=None):
    """
    Run X^T on the outer grid clock_dt, 2·clock_dt, ... until it is killed.

    For L the walker keeps stepping while H of its inner clock stays at or
    below the outer time; for H it steps until its inner clock reaches H of
    the outer time. A walker is recorded at the first outer tick it is seen
    dead. Walkers still alive past `horizon` get +inf; censored ones NaN.
    Returns (ζ, ζ^T) for the same walkers.
    """
    _check_change(tag, sym)
    rng = as_generator(rng)
    clock_dt = clock_dt or spec.dt
    batch = WalkerBatch(spec, size, rng)
    level = np.zeros(size)
    lifetime = np.full(size, np.nan)
    limit = spec.max_steps
    alive = np.arange(size)
    ticks = 0
    while alive.size:
        if ticks >= limit:
            logger.warning('%d changed walkers censored after %d ticks',
                           alive.size, ticks)
            break
        ticks += 1
        t = ticks * clock_dt
        if tag == DIRECT:
            level[alive] += sample_increments(sym, clock_dt, alive.size, rng)
        behind = _behind(batch, level, alive, tag, t)
        while behind.size:
            batch.advance(behind)
            if tag == INVERSE:
                level[behind] += sample_increments(sym, batch.dt, behind.size, rng)
            behind = behind[batch.alive[behind] & (batch.steps[behind] < limit)]
            behind = _behind(batch, level, behind, tag, t)
        lifetime[alive[~batch.alive[alive]]] = t
        stuck = alive[batch.alive[alive] & (batch.steps[alive] >= limit)]
        if stuck.size:
            logger.warning('%d changed walkers censored after %d steps',
                           stuck.size, limit)
        alive = alive[batch.alive[alive] & (batch.steps[alive] < limit)]
        if horizon is not None and t > horizon:
            lifetime[alive] = math.inf
            break
    return batch.exit_time, lifetime


def lifetimes(spec, size, rng, tag=None, sym=None, clock_dt=None, horizon=None):
    """
    Lifetimes ζ of the base walker and ζ^T of the changed one.

    ζ^T is measured by running the changed walker in outer time, never by
    reading a clock at ζ. Censored walkers are NaN.
    """
    _check_change(tag, sym)
    if tag is None or sym.kind == LINEAR:
        zeta, _ = exit_times(spec, size, as_generator(rng))
        return zeta, zeta.copy()
    return changed_lifetimes(spec, size, rng, tag, sym, clock_dt, horizon)


def clock_at_exit(spec, size, rng, tag, sym, clock_dt=None):
    """
    H_ζ or L_ζ read from an independent clock at the base exit time.

    The reference side of E[ζ^L] = E[H_ζ] and E[ζ^H] = E[L_ζ].
    """
    _check_change(tag, sym)
    rng = as_generator(rng)
    zeta, _ = exit_times(spec, size, rng)
    clock = np.full(size, np.nan)
    known = np.isfinite(zeta)
    if tag == INVERSE:
        clock[known] = sample_increments(sym, zeta[known], int(known.sum()), rng)
    else:
        clock[known] = first_passage_batch(
            sym, zeta[known], int(known.sum()), clock_dt or spec.dt, rng)[0]
    return clock


def mean_exit_time(spec, n_paths, seed, tag=None, sym=None, threads=None,
                   clock_dt=None):
    """
    Mean lifetime of the walker, or of its time change by L or H.

    Records hold `exit_time` (ζ of the base walker) and `lifetime`
    (the lifetime of the changed walker).
    """
    _check_paths(n_paths)
    _check_change(tag, sym)

    def worker(size, rng):
        zeta, changed = lifetimes(spec, size, rng, tag, sym, clock_dt)
        return {'exit_time': zeta, 'lifetime': changed}

    records = run_chunked(worker, n_paths, seed, threads)
    censored = int(np.count_nonzero(np.isnan(records['lifetime'])))
    if censored:
        logger.warning('mean exit time: %d of %d paths censored',
                       censored, n_paths)
    return WalkResult('lifetime', records, censored)


def mean_hitting_time(spec, ball, n_paths, seed, threads=None):
    """Mean first time the walker reaches `ball`; the boundary must not kill."""
    _check_paths(n_paths)
    if any(spec.absorbing):
        raise WalkDomainError({'boundary': 'hitting times need a non-killing boundary'})
    if not isinstance(ball, Ball):
        raise WalkDomainError({'ball': 'expected a Ball'})

    def worker(size, rng):
        return {'hitting_time': hitting_times(spec, ball, size, rng)}

    records = run_chunked(worker, n_paths, seed, threads)
    censored = int(np.count_nonzero(np.isnan(records['hitting_time'])))
    if censored:
        logger.warning('mean hitting time: %d of %d paths censored',
                       censored, n_paths)
    return WalkResult('hitting_time', records, censored)


def survival_probability(spec, sym, t, n_paths, seed, threads=None,
                         clock_dt=None):
    """
    P_x(t < ζ^L) two ways.

    `direct` runs the changed walker past t; `mixed` integrates the base
    survival against an independent L_t.
    """
    _check_paths(n_paths)
    clock_dt = clock_dt or spec.dt

    def worker(size, rng):
        zeta, changed = lifetimes(spec, size, rng, INVERSE, sym, clock_dt,
                                  horizon=t)
        clock = sample_inverse(sym, t, size, clock_dt, rng)
        return {
            'direct': (changed > t).astype(float),
            'mixed': (np.nan_to_num(zeta, nan=math.inf) > clock).astype(float),
        }

    records = run_chunked(worker, n_paths, seed, threads)
    return {name: estimate(values) for name, values in records.items()}


def classify_delay(spec, sym, tag, n_paths, seed, threads=None, clock_dt=None,
                   separation=3.0):
    """
    Compare E_x[ζ^T] with E_x[ζ].

    An inverse change by a symbol with Φ'(0) = ∞ has infinite mean lifetime
    and is reported without simulation. Otherwise ζ and ζ^T come from the
    same walkers and the paired difference decides: more than `separation`
    standard errors either way is delayed or rushed, anything closer is
    neutral and flagged as overlapping.
    """
    _check_change(tag, sym)
    if tag is None:
        raise WalkDomainError({'change': 'a time change tag is required'})
    if sym.kind == LINEAR:
        return {'verdict': NEUTRAL, 'overlapping': False, 'exact': True}
    if tag == INVERSE and is_infinite(phi_prime_at_zero(sym)):
        return {'verdict': INFINITE_MEAN, 'overlapping': False, 'exact': True}

    result = mean_exit_time(spec, n_paths, seed, tag, sym, threads, clock_dt)
    zeta = result.records['exit_time']
    changed = result.records['lifetime']
    known = np.isfinite(zeta) & np.isfinite(changed)
    baseline = estimate(zeta[known])
    delayed = estimate(changed[known])
    difference = estimate(changed[known] - zeta[known])
    z = difference.mean / difference.se if difference.se > 0 else 0.0
    if z > separation:
        verdict = DELAYED
    elif z < -separation:
        verdict = RUSHED
    else:
        verdict = NEUTRAL
    return {
        'verdict': verdict,
        'overlapping': verdict == NEUTRAL,
        'exact': False,
        'baseline': baseline,
        'changed': delayed,
        'z': z,
        'independent_z': z_score(delayed, baseline),
        'censored': result.censored,
    }


def start_grid(domain, per_side, ball=None):
    """Grid of starting points inside a two-dimensional domain."""
    x0, y0, x1, y1 = domain.bounds
    margin = 0.5 / per_side
    xs = x0 + (x1 - x0) * np.linspace(margin, 1 - margin, per_side)
    ys = y0 + (y1 - y0) * np.linspace(margin, 1 - margin, per_side)
    points = (xs[None, :] + 1j * ys[:, None]).ravel()
    points = points[domain.contains(points)]
    if ball is not None:
        points = points[ball.distance(points) > 0]
    return points


def trap_scan(domain, ball, starts, n_paths, seed, dt, threads=None,
              max_steps=None):
    """
    Mean hitting times of `ball` from each start of a reflecting domain.

    Returns the per-start rows and the largest mean. A target no walker
    reaches is an error; a few censored walkers are reported per row.
    """
    rows = []
    censored_all = True
    for number, start in enumerate(starts):
        spec = WalkSpec(domain, start, dt, BoundaryMode.reflect(),
                        max_steps=max_steps)
        domain = spec.domain
        result = mean_hitting_time(spec, ball, n_paths, (seed, number), threads)
        summary = result.estimate
        if summary.count:
            censored_all = False
        rows.append({
            'x': float(np.real(spec.start)),
            'y': float(np.imag(spec.start)),
            'mean': summary.mean,
            'se': summary.se,
            'count': summary.count,
            'censored': result.censored,
        })
    if rows and censored_all:
        raise UnreachableTargetError()
    reached = [row for row in rows if row['count']]
    top = max(reached, key=lambda row: row['mean'], default=None)
    return {
        'rows': rows,
        'sup': top['mean'] if top else math.nan,
        'sup_se': top['se'] if top else math.nan,
    }


def sup_trend(sups, ses=None, separation=1.0):
    """
    Whether the sup estimates grow with the prefractal level.

    With standard errors each step must clear `separation` combined SE.
    """
    sups = list(sups)
    if ses is None:
        return all(b > a for a, b in zip(sups, sups[1:]))
    ses = list(ses)
    return all(
        b - a > separation * math.hypot(se_a, se_b)
        for a, b, se_a, se_b in zip(sups, sups[1:], ses, ses[1:]))


def free_time_change_H_characteristic(sym, t, xi, n_paths, seed, threads=None):
    """
    E[cos(ξ X_{H_t})] for a free walker with generator Δ, and its exact value.

    X_{H_t} given H_t is Gaussian with variance 2H_t, so the exact value is
    exp(−tΦ(ξ²)).
    """
    _check_paths(n_paths)

    def worker(size, rng):
        clock = sample_values(sym, t, size, rng)
        position = np.sqrt(2 * clock) * rng.standard_normal(size)
        return {'value': np.cos(xi * position)}

    records = run_chunked(worker, n_paths, seed, threads)
    return estimate(records['value']), math.exp(-t * eval_phi(sym, xi ** 2))


def trace_paths(spec, count, horizon, seed):
    """Recorded positions of up to MAX_TRACES walkers, for drawing."""
    if count > MAX_TRACES:
        logger.warning('only %d of %d traces recorded', MAX_TRACES, count)
        count = MAX_TRACES
    children = np.random.SeedSequence(seed).spawn(count)
    return [
        simulate_base_path(spec, horizon, np.random.default_rng(child)).positions
        for child in children
    ]


__all__ = [
    'time_change_L', 'time_change_H', 'changed_terminal_states',
    'expected_value', 'lifetimes', 'changed_lifetimes', 'clock_at_exit',
    'mean_exit_time', 'mean_hitting_time',
    'survival_probability', 'classify_delay', 'start_grid', 'trap_scan',
    'sup_trend', 'free_time_change_H_characteristic', 'trace_paths',
]
