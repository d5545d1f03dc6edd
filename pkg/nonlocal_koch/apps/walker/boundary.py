"""
Walkers with a boundary clock.

A sticky edge stops the walker for a while each time it collects local
time there. Two constructions of the same process live here:

* `sticky_elastic_path` builds V̄_s = s + H((η/σ)·γ_s) along the reflected
  path and reads the path at V̄⁻¹_t.
* `hat_process_path` ticks an outer clock: ordinary time in the
  interior, and frozen stretches read off an independent subordinator
  while boundary budget is paid off.

`jump_and_stop_path` adds the overshoot of a second subordinator at the
local-time level, which throws the walker back into the interior.
"""
import logging
import math

import numpy as np

from ..subordinate.utils import (
    as_generator, first_passage_batch, sample_increments,
)
from .domains import HalfLine
from .engine import WalkerBatch
from .exceptions import WalkDomainError
from .models import JUMP_AND_STOP, STICKY, TerminalSample

logger = logging.getLogger(__name__)


def _boundary_clock(spec, kinds):
    index, mode = spec.nonlocal_class()
    if mode is None or mode.kind not in kinds:
        raise WalkDomainError(
            {'boundary': 'one edge class must use the %s mode' % '/'.join(kinds)})
    if not mode.sigma > 0 or mode.eta < 0:
        raise WalkDomainError({'eta': 'need eta >= 0 and sigma > 0'})
    return index, mode


def _terminal(batch, stopped, extra=None):
    return TerminalSample(
        positions=stopped,
        alive=batch.alive.copy(),
        weights=batch.weights(),
        local_time=batch.total_local_time(),
        extra=extra or {},
    )


def _run_clock(spec, t, size, rng, waiting, on_step=None):
    """
    Step walkers until their outer clock passes t.

    `waiting(index, gained)` returns the boundary waiting time accrued by
    walkers `index` for local time `gained` on the sticky class.
    """
    rng = as_generator(rng)
    if not t >= 0:
        raise WalkDomainError({'t': 'must be nonnegative'})
    index, mode = spec.nonlocal_class()
    batch = WalkerBatch(spec, size, rng)
    clock = np.zeros(size)
    stopped = batch.position.copy()
    active = np.flatnonzero(clock < t) if t > 0 else np.zeros(0, dtype=int)
    steps = 0
    while active.size:
        if steps >= spec.max_steps:
            logger.warning('%d boundary-clock walkers censored at %d steps',
                           active.size, steps)
            batch.alive[active] = False
            break
        outcome = batch.advance(active)
        gained = outcome.local[index]
        clock[active] += batch.dt + waiting(active, gained)
        if on_step is not None:
            on_step(active, gained)
        stopped[active] = batch.position[active]
        active = active[batch.alive[active] & (clock[active] < t)]
        steps += 1
    return batch, stopped


def sticky_elastic_path(spec, t, size, rng):
    """
    Walkers read at V̄⁻¹_t with V̄_s = s + H((η/σ)·γ_s).

    H jumps land at the end of the step that collected the local time, so
    a walker whose clock jumps over t is reported where that step ended.
    With η = 0 this is the elastic walker at time t.
    """
    _, mode = _boundary_clock(spec, (STICKY, JUMP_AND_STOP))
    rng = as_generator(rng)

    def waiting(active, gained):
        budget = mode.delay * gained
        return sample_increments(mode.symbol, budget, active.size, rng)

    batch, stopped = _run_clock(spec, t, size, rng, waiting)
    return _terminal(batch, stopped)


def hat_process_path(spec, t, size, rng, budget_step=None):
    """
    Outer-time construction of the sticky walker.

    The outer clock ticks in steps of dt. Local time collected on the
    sticky class becomes a debt of (η/σ)·γ boundary budget, and a walker
    in debt is frozen where it stands. Debt is paid in cells of
    `budget_step`; each cell freezes the walker for one independent
    increment of H over the cell, so frozen stretches are the plateaus of
    an inverse clock L independent of the path. Running time left over
    inside a tick is carried to the next one.
    """
    index, mode = _boundary_clock(spec, (STICKY,))
    rng = as_generator(rng)
    if not t >= 0:
        raise WalkDomainError({'t': 'must be nonnegative'})
    cell = budget_step or spec.dt
    batch = WalkerBatch(spec, size, rng)
    debt = np.zeros(size)
    frozen = np.zeros(size)
    owed = np.zeros(size)
    waits = np.zeros(size)
    ticks = math.ceil(t / spec.dt - 1e-9)
    for tick in range(ticks):
        if tick >= spec.max_steps:
            live = int(batch.alive.sum())
            logger.warning('%d hat walkers censored at %d ticks', live, tick)
            batch.alive[:] = False
            break
        remaining = np.where(batch.alive, spec.dt, 0.0)
        waits += _hold(mode.symbol, cell, debt, frozen, remaining, rng)
        owed += remaining
        running = np.flatnonzero(batch.alive & (owed >= spec.dt * (1 - 1e-12)))
        if running.size:
            owed[running] -= spec.dt
            outcome = batch.advance(running)
            debt[running] += mode.delay * outcome.local[index]
    return _terminal(batch, batch.position.copy(), {'waited': waits})


def _hold(sym, cell, debt, frozen, remaining, rng):
    """
    Spend `remaining` outer time on frozen stretches and debt, in place.

    Returns the outer time each walker spent frozen.
    """
    spent = np.zeros(debt.size)
    held = np.flatnonzero((remaining > 0) & ((debt > 0) | (frozen > 0)))
    while held.size:
        use = np.minimum(frozen[held], remaining[held])
        frozen[held] -= use
        remaining[held] -= use
        spent[held] += use
        refill = held[(frozen[held] <= 0) & (debt[held] > 0)
                      & (remaining[held] > 0)]
        if refill.size:
            take = np.minimum(debt[refill], cell)
            debt[refill] = np.where(debt[refill] > cell, debt[refill] - take, 0.0)
            frozen[refill] = sample_increments(sym, take, refill.size, rng)
        held = held[(remaining[held] > 0) & ((debt[held] > 0) | (frozen[held] > 0))]
    return spent


def jump_and_stop_path(spec, t, size, rng, space_step=None):
    """
    Jump-and-stop walker on the half-line.

    The reflected walker X⁺ is read at V̄⁻¹_t and shifted by the overshoot
    R of the space subordinator H^Φ over the local-time level γ at that
    moment. R is zero where H^Φ creeps, so Φ linear gives back the sticky
    walker.
    """
    _, mode = _boundary_clock(spec, (JUMP_AND_STOP,))
    if not isinstance(spec.domain, HalfLine):
        raise WalkDomainError({'domain': 'jump-and-stop walkers live on the half-line'})
    rng = as_generator(rng)
    space_step = space_step or spec.dt
    level = np.zeros(size)
    local = np.zeros(size)

    def waiting(active, gained):
        return sample_increments(
            mode.symbol, mode.delay * gained, active.size, rng)

    def follow(active, gained):
        local[active] += gained
        gamma = local[active]
        behind = gamma > level[active]
        if behind.any():
            catch = active[behind]
            _, over = first_passage_batch(
                mode.space_symbol, gamma[behind] - level[catch], catch.size,
                space_step, rng)
            level[catch] = gamma[behind] + np.nan_to_num(over)

    batch, stopped = _run_clock(spec, t, size, rng, waiting, on_step=follow)
    jump = np.where(local > 0, level - local, 0.0)
    return _terminal(batch, stopped + jump,
                     {'jump': jump, 'touched': local > 0})


__all__ = [
    'sticky_elastic_path', 'hat_process_path', 'jump_and_stop_path',
]
