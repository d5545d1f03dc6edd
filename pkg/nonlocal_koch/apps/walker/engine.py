"""Vectorized stepping of walker batches."""
import logging
import math

import numpy as np

from ..subordinate.utils import as_generator
from .exceptions import WalkDomainError
from .models import BasePath

logger = logging.getLogger(__name__)


class WalkerBatch:
    """
    State of `size` independent walkers sharing one spec.

    `local` holds the local time per edge class; `steps` counts the steps
    each walker has taken, so walkers can be advanced to different
    horizons.
    """

    def __init__(self, spec, size, rng):
        self.spec = spec
        self.rng = as_generator(rng)
        self.size = size
        self.position = spec.domain.start_array(spec.start, size)
        self.local = np.zeros((len(spec.domain.edge_classes), size))
        self.alive = np.ones(size, dtype=bool)
        self.exit_time = np.full(size, np.nan)
        self.steps = np.zeros(size, dtype=np.int64)
        self._absorbing = spec.absorbing
        self._ratios = spec.ratios

    @property
    def dt(self):
        return self.spec.dt

    @property
    def clock(self):
        return self.steps * self.dt

    def advance(self, index):
        """One step for the walkers in `index`; returns the step outcome."""
        outcome = self.spec.domain.step(
            self.position[index], self.dt, self.rng, self._absorbing)
        self.position[index] = outcome.position
        self.local[:, index] += outcome.local
        if outcome.exited.any():
            gone = index[outcome.exited]
            self.alive[gone] = False
            self.exit_time[gone] = (
                self.steps[gone] + outcome.exit_fraction[outcome.exited]) * self.dt
        self.steps[index] += 1
        return outcome

    def weights(self, index=None):
        """Elastic weights exp(−Σ (c/σ)·γ) per walker."""
        local = self.local if index is None else self.local[:, index]
        return np.exp(-self._ratios @ local)

    def total_local_time(self):
        return self.local.sum(axis=0)


def simulate_base_path(spec, horizon, rng):
    """Record one walker on the grid 0, dt, ..., horizon or until it exits."""
    if not horizon > 0:
        raise WalkDomainError({'horizon': 'must be positive'})
    return _record(WalkerBatch(spec, 1, rng), spec, horizon, [], [], [])


def extend_base_path(path, horizon, rng):
    """Continue a recorded path with fresh increments."""
    if horizon <= path.horizon or path.killed:
        return path
    batch = WalkerBatch(path.spec, 1, rng)
    batch.position[:] = path.positions[-1]
    batch.local[:, 0] = 0.0
    batch.steps[:] = path.times.size - 1
    offset = float(path.local_time[-1])
    return _record(batch, path.spec, horizon, list(path.times[:-1]),
                   list(path.positions[:-1]), list(path.local_time[:-1]),
                   offset)


def _record(batch, spec, horizon, times, positions, local, offset=0.0):
    steps = int(math.ceil(horizon / spec.dt - 1e-9))
    index = np.zeros(1, dtype=int)
    exit_time = None
    start = int(batch.steps[0])
    times.append(start * spec.dt)
    positions.append(batch.position[0])
    local.append(offset + batch.local[:, 0].sum())
    for _ in range(start, steps):
        batch.advance(index)
        times.append(float(batch.steps[0]) * spec.dt)
        positions.append(batch.position[0])
        local.append(offset + batch.local[:, 0].sum())
        if not batch.alive[0]:
            exit_time = float(batch.exit_time[0])
            break
    return BasePath(spec, np.array(times), np.array(positions),
                    np.array(local), exit_time)


def exit_times(spec, size, rng, limit=None):
    """
    Exit times τ of a batch; censored walkers get NaN.

    Returns (tau, weights) where weights are the elastic weights carried
    at the exit.
    """
    batch = WalkerBatch(spec, size, rng)
    limit = limit or spec.max_steps
    active = np.arange(size)
    while active.size and batch.steps[active[0]] < limit:
        batch.advance(active)
        active = active[batch.alive[active]]
    if active.size:
        logger.warning('%d of %d walkers censored after %d steps',
                       active.size, size, limit)
    return batch.exit_time, batch.weights()


def hitting_times(spec, ball, size, rng, limit=None):
    """
    First times the walkers come within `ball`; censored walkers get NaN.

    Between grid points a Brownian-bridge crossing correction decides the
    hit, using the crossing probability of a flat target at both distances.
    """
    batch = WalkerBatch(spec, size, rng)
    limit = limit or spec.max_steps
    hit = np.full(size, np.nan)
    distance = ball.distance(batch.position)
    hit[distance <= 0] = 0.0
    active = np.flatnonzero(distance > 0)
    while active.size and batch.steps[active[0]] < limit:
        before = distance[active]
        batch.advance(active)
        after = ball.distance(batch.position[active])
        crossed = after <= 0
        crossed |= batch.rng.random(active.size) < np.exp(
            -before * after / batch.dt)
        if crossed.any():
            done = active[crossed]
            hit[done] = batch.steps[done] * batch.dt
        dead = ~batch.alive[active] & ~crossed
        distance[active] = after
        active = active[~crossed & ~dead]
    if active.size:
        logger.warning('%d of %d walkers censored before reaching the ball',
                       active.size, size)
    return hit


def terminal_states(spec, horizons, size, rng, limit=None):
    """
    Walker states at per-path times `horizons` (a scalar or an array).

    Each walker takes round(horizon/dt) steps; walkers that die earlier
    stay dead. Returns the batch, whose `alive` flags the survivors.
    """
    batch = WalkerBatch(spec, size, rng)
    horizons = np.broadcast_to(np.asarray(horizons, dtype=float), (size,))
    if np.any(horizons < 0):
        raise WalkDomainError({'t': 'times must be nonnegative'})
    limit = limit or spec.max_steps
    targets = np.minimum(np.rint(horizons / spec.dt), limit).astype(np.int64)
    if np.any(np.rint(horizons / spec.dt) > limit):
        logger.warning('%d walkers truncated at %d steps',
                       int(np.count_nonzero(np.rint(horizons / spec.dt) > limit)),
                       limit)
    active = np.flatnonzero(targets > 0)
    while active.size:
        batch.advance(active)
        active = active[batch.alive[active] & (batch.steps[active] < targets[active])]
    return batch
