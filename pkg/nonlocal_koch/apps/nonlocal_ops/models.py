from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..symbols.models import BernsteinSymbol
from .exceptions import OperatorDomainError


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """
    Values of u on a uniform grid, optionally with u′ on the same grid.
    """
    grid: np.ndarray
    values: np.ndarray
    derivative: Optional[np.ndarray] = None

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or grid.size < 2 or values.shape != grid.shape:
            raise OperatorDomainError(
                {'grid': 'grid and values must be matching 1-d arrays '
                         'with at least two points'})
        steps = np.diff(grid)
        if not steps[0] > 0 or not np.allclose(steps, steps[0], rtol=1e-9,
                                               atol=1e-12):
            raise OperatorDomainError({'grid': 'grid must be uniform'})
        if self.derivative is not None:
            derivative = np.asarray(self.derivative, dtype=float)
            if derivative.shape != grid.shape:
                raise OperatorDomainError(
                    {'derivative': 'derivative must match the grid'})
            object.__setattr__(self, 'derivative', derivative)
        object.__setattr__(self, 'grid', grid)
        object.__setattr__(self, 'values', values)

    @classmethod
    def from_callable(cls, function, upper, points, derivative=None):
        grid = np.linspace(0.0, upper, points)
        values = np.array([function(x) for x in grid], dtype=float)
        slopes = None
        if derivative is not None:
            slopes = np.array([derivative(x) for x in grid], dtype=float)
        return cls(grid, values, slopes)

    @property
    def step(self):
        return float(self.grid[1] - self.grid[0])

    @property
    def slopes(self):
        """Cell averages of u′, exact for the piecewise linear interpolant."""
        return np.diff(self.values) / self.step

    def derivative_values(self):
        if self.derivative is not None:
            return self.derivative
        edge_order = 2 if self.grid.size > 2 else 1
        return np.gradient(self.values, self.step, edge_order=edge_order)

    def index_of(self, x):
        index = int(round((x - self.grid[0]) / self.step))
        if index < 0 or index >= self.grid.size or not np.isclose(
                self.grid[index], x, rtol=0, atol=1e-9 * max(1.0, abs(x))):
            raise OperatorDomainError({'t': '%r is not a grid point' % x})
        return index


@dataclass(frozen=True)
class SoninePair:
    """
    Potential density κ of H and the kernel ℓ = φ̄ of its inverse.

    The pair satisfies ∫₀^x κ(z)ℓ(x−z)dz = 1 for every x > 0.
    """
    kappa: Callable
    ell: Callable
    symbol: BernsteinSymbol
    kappa_exponent: Optional[float] = None
    ell_exponent: Optional[float] = None
    # κ(z) = kappa_scale·z^kappa_exponent for power pairs, same for ℓ
    kappa_scale: Optional[float] = None
    ell_scale: Optional[float] = None

    def convolution_at_one(self):
        from .utils import sonine_convolution
        return sonine_convolution(self, 1.0)
