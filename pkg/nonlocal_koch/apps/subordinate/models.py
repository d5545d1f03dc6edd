from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from django.conf import settings

from ..symbols.models import BernsteinSymbol
from .exceptions import PathDomainError

TALBOT = 'talbot'
GAVER_STEHFEST = 'stehfest'


@dataclass(frozen=True, eq=False)
class SubordinatorPath:
    """
    A sampled path of H on a uniform grid.

    `values[i]` is H at `times[i]`. Within a step the drift part of the
    symbol is laid down first and the jumps arrive at the end of the step.
    """
    times: np.ndarray
    values: np.ndarray
    symbol: BernsteinSymbol
    seed: Optional[Tuple] = None

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape or times.size < 2:
            raise PathDomainError(
                {'values': 'times and values must be matching 1-d arrays'})
        steps = np.diff(times)
        if not steps[0] > 0 or not np.allclose(steps, steps[0], rtol=1e-9,
                                               atol=1e-12):
            raise PathDomainError({'times': 'grid must be uniform'})
        if values[0] != 0 or np.any(np.diff(values) < 0):
            raise PathDomainError(
                {'values': 'path must start at 0 and be nondecreasing'})
        object.__setattr__(self, 'times', times)
        object.__setattr__(self, 'values', values)

    @property
    def dt(self):
        return float(self.times[1] - self.times[0])

    @property
    def horizon(self):
        return float(self.times[-1])

    @property
    def level(self):
        """Largest level the path has reached."""
        return float(self.values[-1])

    def to_rows(self):
        return list(zip(self.times.tolist(), self.values.tolist()))


@dataclass(frozen=True)
class LaplaceInverter:
    method: str = TALBOT
    nodes: Optional[int] = None

    def __post_init__(self):
        if self.method not in (TALBOT, GAVER_STEHFEST):
            raise PathDomainError({'method': 'unknown inversion method'})
        if self.nodes is None:
            default = (settings.NONLOCAL_KOCH_TALBOT_NODES
                       if self.method == TALBOT
                       else settings.NONLOCAL_KOCH_STEHFEST_NODES)
            object.__setattr__(self, 'nodes', default)
        if self.method == GAVER_STEHFEST and (
                self.nodes < 8 or self.nodes % 2):
            raise PathDomainError(
                {'nodes': 'Gaver-Stehfest needs an even node count of at least 8'})
        if self.nodes < 1:
            raise PathDomainError({'nodes': 'node count must be positive'})
