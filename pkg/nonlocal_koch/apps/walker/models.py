import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np
from django.conf import settings

from ..core.stats import estimate
from ..symbols.models import BernsteinSymbol
from .domains import WALLS, build_domain
from .exceptions import WalkDomainError

KILL = 'kill'
REFLECT = 'reflect'
ELASTIC = 'elastic'
STICKY = 'sticky'
JUMP_AND_STOP = 'jump_and_stop'

MODES = (KILL, REFLECT, ELASTIC, STICKY, JUMP_AND_STOP)
NONLOCAL_MODES = (STICKY, JUMP_AND_STOP)


@dataclass(frozen=True)
class BoundaryMode:
    """
    Behaviour of the walker on one class of boundary edges.

    Elastic, sticky and jump-and-stop edges weight a path by
    exp(−(c/σ)·γ) where γ is the local time on those edges. Sticky edges
    slow the clock by an independent subordinator run at (η/σ)·γ; jump and
    stop edges add the overshoot of a second subordinator on top.
    """
    kind: str
    c: float = 0.0
    sigma: float = 1.0
    eta: float = 0.0
    symbol: Optional[BernsteinSymbol] = None
    space_symbol: Optional[BernsteinSymbol] = None

    def __post_init__(self):
        if self.kind not in MODES:
            raise WalkDomainError({'mode': 'unknown boundary mode %r' % self.kind})
        if self.kind == KILL or self.kind == REFLECT:
            return
        if not self.sigma > 0:
            raise WalkDomainError({'sigma': 'must be positive'})
        if self.c < 0:
            raise WalkDomainError({'c': 'must be nonnegative'})
        if self.kind in NONLOCAL_MODES:
            if self.eta < 0:
                raise WalkDomainError({'eta': 'must be nonnegative'})
            if self.symbol is None:
                raise WalkDomainError({'symbol': 'a time symbol is required'})
        if self.kind == JUMP_AND_STOP and self.space_symbol is None:
            raise WalkDomainError({'space_symbol': 'a space symbol is required'})

    @classmethod
    def kill(cls):
        return cls(KILL)

    @classmethod
    def reflect(cls):
        return cls(REFLECT)

    @classmethod
    def elastic(cls, c, sigma=1.0):
        return cls(ELASTIC, c=float(c), sigma=float(sigma))

    @classmethod
    def sticky(cls, eta, sigma, c, symbol):
        return cls(STICKY, c=float(c), sigma=float(sigma), eta=float(eta),
                   symbol=symbol)

    @classmethod
    def jump_and_stop(cls, eta, sigma, symbol, space_symbol, c=0.0):
        return cls(JUMP_AND_STOP, c=float(c), sigma=float(sigma),
                   eta=float(eta), symbol=symbol, space_symbol=space_symbol)

    @property
    def absorbing(self):
        return self.kind == KILL

    @property
    def ratio(self):
        """c/σ, the elastic rate per unit local time."""
        if self.kind in (KILL, REFLECT):
            return 0.0
        return self.c / self.sigma

    @property
    def delay(self):
        """η/σ, the boundary clock rate per unit local time."""
        if self.kind not in NONLOCAL_MODES:
            return 0.0
        return self.eta / self.sigma


@dataclass(frozen=True, eq=False)
class WalkSpec:
    """
    A walker: domain, start, step and the mode of every edge class.

    `boundary` is one mode for the whole boundary or a mapping from edge
    class to mode. Interior walls always reflect.
    """
    domain: Any
    start: Any
    dt: float
    boundary: Any = field(default_factory=BoundaryMode.kill)
    max_steps: Optional[int] = None
    modes: Dict[str, BoundaryMode] = field(init=False)

    def __post_init__(self):
        domain = build_domain(self.domain)
        object.__setattr__(self, 'domain', domain)
        if not self.dt > 0 or not math.isfinite(self.dt):
            raise WalkDomainError({'dt': 'must be a positive real'})
        start = domain.coerce(self.start)
        if not domain.contains(np.atleast_1d(start))[0]:
            raise WalkDomainError({'start': '%r lies outside the domain' % (start,)})
        object.__setattr__(self, 'start', start)
        object.__setattr__(self, 'modes', self._resolve(domain, self.boundary))
        if self.max_steps is None:
            object.__setattr__(
                self, 'max_steps', int(settings.NONLOCAL_KOCH_CENSOR_STEPS))

    @staticmethod
    def _resolve(domain, boundary):
        if isinstance(boundary, BoundaryMode):
            boundary = {name: boundary for name in domain.edge_classes
                        if name != WALLS}
        modes = {}
        for name, mode in boundary.items():
            domain.class_index(name)
            if name == WALLS and mode.kind != REFLECT:
                raise WalkDomainError({'walls': 'interior walls always reflect'})
            modes[name] = mode
        for name in domain.edge_classes:
            if name == WALLS:
                modes.setdefault(WALLS, BoundaryMode.reflect())
            elif name not in modes:
                raise WalkDomainError({'boundary': 'no mode for edge class %r' % name})
        nonlocal_classes = [name for name, mode in modes.items()
                            if mode.kind in NONLOCAL_MODES]
        if len(nonlocal_classes) > 1:
            raise WalkDomainError(
                {'boundary': 'at most one edge class may carry a boundary clock'})
        return modes

    @property
    def ordered_modes(self):
        return tuple(self.modes[name] for name in self.domain.edge_classes)

    @property
    def absorbing(self):
        return tuple(mode.absorbing for mode in self.ordered_modes)

    @property
    def ratios(self):
        return np.array([mode.ratio for mode in self.ordered_modes])

    def nonlocal_class(self):
        """(index, mode) of the edge class with a boundary clock, if any."""
        for index, mode in enumerate(self.ordered_modes):
            if mode.kind in NONLOCAL_MODES:
                return index, mode
        return None, None

    def describe(self):
        start = self.start
        if isinstance(start, complex):
            start = [start.real, start.imag]
        return {
            'domain': self.domain.describe(),
            'start': start,
            'dt': self.dt,
            'boundary': {name: mode.kind for name, mode in self.modes.items()},
        }


@dataclass(frozen=True)
class Ball:
    """Closed ball {|x − center| ≤ radius}; an interval in one dimension."""
    center: Any
    radius: float

    def __post_init__(self):
        if not self.radius >= 0:
            raise WalkDomainError({'radius': 'must be nonnegative'})
        if not isinstance(self.center, (int, float, complex)):
            values = np.asarray(self.center, dtype=float).ravel()
            center = complex(values[0], values[1]) if values.size == 2 else float(values[0])
            object.__setattr__(self, 'center', center)

    def distance(self, points):
        """Distance to the ball, zero inside."""
        return np.maximum(np.abs(points - self.center) - self.radius, 0.0)


@dataclass(frozen=True, eq=False)
class BasePath:
    """
    One recorded walker path on the grid k·dt.

    `exit_time` is None while the path is alive at the end of the record.
    """
    spec: WalkSpec
    times: np.ndarray
    positions: np.ndarray
    local_time: np.ndarray
    exit_time: Optional[float] = None

    @property
    def horizon(self):
        return float(self.times[-1])

    @property
    def killed(self):
        return self.exit_time is not None

    def index_at(self, s):
        return min(int(math.floor(s / self.spec.dt + 1e-9)), self.times.size - 1)

    def state_at(self, s):
        """(position, local time, alive) at inner time s."""
        if self.exit_time is not None and s >= self.exit_time:
            index = self.times.size - 1
            return self.positions[index], float(self.local_time[index]), False
        index = self.index_at(s)
        return self.positions[index], float(self.local_time[index]), True


@dataclass(frozen=True, eq=False)
class TerminalSample:
    """Batch of walker states at a fixed outer time."""
    positions: np.ndarray
    alive: np.ndarray
    weights: np.ndarray
    local_time: np.ndarray
    extra: Dict[str, np.ndarray] = field(default_factory=dict)

    def expectation(self, function):
        """Estimate of E[f(X_t)·weight] with f = 0 on the cemetery."""
        values = np.zeros(self.positions.size)
        live = self.alive
        values[live] = np.asarray(
            function(self.positions[live]), dtype=float) * self.weights[live]
        return estimate(values)

    def survival(self):
        return estimate(np.where(self.alive, self.weights, 0.0))


@dataclass(frozen=True, eq=False)
class WalkResult:
    """Per-path records of a batch and the aggregate estimate."""
    name: str
    records: Dict[str, np.ndarray]
    censored: int = 0

    @property
    def values(self):
        return self.records[self.name]

    @property
    def estimate(self):
        values = self.values
        return estimate(values[np.isfinite(values)], self.censored)

    def as_dict(self):
        summary = {'quantity': self.name}
        summary.update(self.estimate.as_dict())
        return summary


@dataclass(frozen=True, eq=False)
class ChangedState:
    """A recorded path read at a random inner time."""
    inner_time: float
    position: Any
    local_time: float
    alive: bool
    path: BasePath
