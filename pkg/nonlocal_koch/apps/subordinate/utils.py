import logging
import math

import numpy as np
from django.conf import settings
from scipy import optimize

from ..symbols.models import (
    CAPUTO_FABRIZIO, COMPOUND_POISSON, DRIFTED_CF, GAMMA, LINEAR, STABLE,
    TELEGRAPH_SUM, TEMPERED,
)
from .exceptions import PathDomainError, PathHorizonError
from .models import SubordinatorPath

logger = logging.getLogger(__name__)


def as_generator(rng):
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def seed_record(rng):
    seed_seq = getattr(rng.bit_generator, 'seed_seq', None)
    if seed_seq is None or not hasattr(seed_seq, 'entropy'):
        return None
    return (seed_seq.entropy, tuple(seed_seq.spawn_key))


def positive_stable(alpha, size, rng):
    """
    Chambers–Mallows–Stuck draws with E[e^{−λS}] = e^{−λ^α}.
    """
    u = np.pi * (rng.random(size) - 0.5)
    w = rng.exponential(1.0, size)
    term1 = np.sin(alpha * (u + np.pi / 2)) / np.cos(u) ** (1 / alpha)
    term2 = (np.cos(u - alpha * (u + np.pi / 2)) / w) ** ((1 - alpha) / alpha)
    return term1 * term2


def _inverse_survival_sampler(survival):
    """Inverse-transform sampler for a survival function without one."""
    def sampler(rng, size):
        draws = np.empty(size)
        for index, u in enumerate(rng.random(size)):
            upper = 1.0
            while survival(upper) > u:
                upper *= 2
            draws[index] = optimize.brentq(
                lambda y: survival(y) - u, 0.0, upper, xtol=1e-12)
        return draws
    return sampler


def compound_sums(rate, dt, size, sampler, rng):
    """Sums of a Poisson(rate·dt) number of i.i.d. jumps, one per entry."""
    counts = rng.poisson(rate * np.broadcast_to(dt, (size,)))
    total = int(counts.sum())
    if total == 0:
        return np.zeros(size)
    jumps = sampler(rng, total)
    owners = np.repeat(np.arange(size), counts)
    return np.bincount(owners, weights=jumps, minlength=size)


def sample_increments(sym, dt, size, rng):
    """
    Exact independent increments H_{s+dt} − H_s.

    `dt` may be a scalar or an array of per-entry step lengths.
    """
    rng = as_generator(rng)
    dt = np.broadcast_to(np.asarray(dt, dtype=float), (size,))
    if np.any(dt < 0):
        raise PathDomainError({'dt': 'step lengths must be nonnegative'})
    kind = sym.kind
    if kind == STABLE:
        return dt ** (1 / sym.alpha) * positive_stable(sym.alpha, size, rng)
    if kind == GAMMA:
        return rng.gamma(sym.a * dt, 1 / sym.b)
    if kind in (CAPUTO_FABRIZIO, DRIFTED_CF):
        steps = sym.drift * dt
        if sym.alpha < 1:
            theta = sym.theta
            steps = steps + compound_sums(
                theta + 1, dt, size,
                lambda gen, count: gen.exponential(1 / theta, count), rng)
        return steps
    if kind == TELEGRAPH_SUM:
        fast = dt ** (1 / (2 * sym.alpha)) * positive_stable(
            2 * sym.alpha, size, rng)
        slow = dt ** (1 / sym.alpha) * positive_stable(sym.alpha, size, rng)
        return fast + slow
    if kind == TEMPERED:
        kappa = sym.kappa
        if kappa == 0:
            return dt ** 2 * positive_stable(0.5, size, rng)
        steps = np.zeros(size)
        live = dt > 0
        steps[live] = rng.wald(dt[live] / (2 * math.sqrt(kappa)),
                               dt[live] ** 2 / 2)
        return steps
    if kind == COMPOUND_POISSON:
        sampler = sym.jump_sampler or _inverse_survival_sampler(sym.survival)
        return compound_sums(sym.rate, dt, size, sampler, rng)
    return dt.copy()


def sample_values(sym, t, size, rng):
    """Draws of H_t; a single increment over [0, t]."""
    return sample_increments(sym, t, size, rng)


def sample_path(sym, horizon, dt, rng):
    """Sample H on the grid 0, dt, ..., horizon."""
    if not dt > 0 or not horizon >= dt:
        raise PathDomainError({'dt': 'need horizon >= dt > 0'})
    rng = as_generator(rng)
    steps = int(round(horizon / dt))
    times = dt * np.arange(steps + 1)
    if sym.kind == LINEAR:
        values = times.copy()
    else:
        increments = sample_increments(sym, dt, steps, rng)
        values = np.concatenate([[0.0], np.cumsum(increments)])
    return SubordinatorPath(times, values, sym, seed_record(rng))


def extend_path(path, horizon, rng):
    """Continue a path to a longer horizon with fresh increments."""
    if horizon <= path.horizon:
        return path
    rng = as_generator(rng)
    dt = path.dt
    steps = int(math.ceil((horizon - path.horizon) / dt - 1e-9))
    times = path.times[-1] + dt * np.arange(1, steps + 1)
    if path.symbol.kind == LINEAR:
        values = times.copy()
    else:
        values = path.values[-1] + np.cumsum(
            sample_increments(path.symbol, dt, steps, rng))
    return SubordinatorPath(
        np.concatenate([path.times, times]),
        np.concatenate([path.values, values]),
        path.symbol, path.seed,
    )


def _crossing(times, values, drift, t):
    """
    Index of the first grid value ≥ t and whether the drift part crossed.
    """
    if t > values[-1]:
        raise PathHorizonError({'t': t, 'level': float(values[-1])})
    index = int(np.searchsorted(values, t, side='left'))
    if index == 0:
        return 0, True
    step = times[index] - times[index - 1]
    creeping = drift > 0 and values[index - 1] + drift * step >= t
    return index, creeping


def _first_passage(times, values, drift, t):
    if t <= 0:
        return 0.0
    index, creeping = _crossing(times, values, drift, t)
    if index == 0:
        return float(times[0])
    if creeping:
        return float(times[index - 1] + (t - values[index - 1]) / drift)
    return float(times[index])


def invert_path(path, t):
    """L_t = inf{s : H_s ≥ t} on the stored grid."""
    if t < 0:
        raise PathDomainError({'t': 'level must be nonnegative'})
    return _first_passage(path.times, path.values, path.symbol.drift, t)


def invert_drifted(path, drift, t):
    """First passage of s ↦ drift·s + H_s through t."""
    if drift < 0 or t < 0:
        raise PathDomainError({'drift': 'drift and level must be nonnegative'})
    values = path.values + drift * path.times
    return _first_passage(path.times, values, path.symbol.drift + drift, t)


def overshoot(path, t):
    """R_t = H_{L_t} − t; zero when the level is reached without a jump."""
    if t < 0:
        raise PathDomainError({'t': 'level must be nonnegative'})
    if t == 0:
        return 0.0
    index, creeping = _crossing(path.times, path.values, path.symbol.drift, t)
    if creeping:
        return 0.0
    return float(path.values[index] - t)


def first_passage_batch(sym, t, size, dt, rng, drift=0.0):
    """
    Vectorized first passage of drift·s + H_s through level t.

    Returns (L_t, R_t) arrays following the same grid rule as
    `invert_path` and `overshoot`; each entry is an independent path.
    """
    rng = as_generator(rng)
    t = np.broadcast_to(np.asarray(t, dtype=float), (size,))
    total_drift = sym.drift + drift
    passage = np.zeros(size)
    over = np.zeros(size)
    level = np.zeros(size)
    active = np.flatnonzero(t > 0)
    cap = settings.NONLOCAL_KOCH_CENSOR_STEPS
    steps = 0
    while active.size:
        clock = steps * dt
        if steps >= cap:
            logger.warning('%d first passages censored after %d steps',
                           active.size, steps)
            passage[active] = np.nan
            over[active] = np.nan
            break
        new = level[active] + drift * dt + sample_increments(
            sym, dt, active.size, rng)
        hit = new >= t[active]
        if np.any(hit):
            idx = active[hit]
            before = level[idx]
            creeping = (total_drift > 0) & (
                before + total_drift * dt >= t[idx])
            rate = total_drift if total_drift > 0 else 1.0
            passage[idx] = np.where(
                creeping, clock + (t[idx] - before) / rate, clock + dt)
            over[idx] = np.where(creeping, 0.0, new[hit] - t[idx])
        level[active] = new
        active = active[~hit]
        steps += 1
    return passage, over


def sample_inverse(sym, t, size, dt, rng):
    return first_passage_batch(sym, t, size, dt, rng)[0]


def sample_overshoot(sym, t, size, dt, rng):
    return first_passage_batch(sym, t, size, dt, rng)[1]
