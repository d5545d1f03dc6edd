import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from django.conf import settings

from .exceptions import SpectralDomainError

DIRICHLET = 'dirichlet'
NEUMANN = 'neumann'
CONDITIONS = (DIRICHLET, NEUMANN)

INTERVAL = 'interval'
RECTANGLE = 'rectangle'


def _modes_1d(length, condition, count):
    """Wave numbers kπ/ℓ of the one-dimensional sine or cosine family."""
    first = 1 if condition == DIRICHLET else 0
    return np.arange(first, first + count) * math.pi / length


def _evaluate_1d(length, condition, waves, x):
    x = np.asarray(x, dtype=float)[..., None]
    if condition == DIRICHLET:
        return math.sqrt(2 / length) * np.sin(waves * x)
    values = math.sqrt(2 / length) * np.cos(waves * x)
    values[..., waves == 0] = 1 / math.sqrt(length)
    return values


@dataclass(frozen=True, eq=False)
class EigenBasis:
    """
    Eigenpairs of −Δ on (0, ℓ) or (0, a) × (0, b).

    Modes are ordered by nondecreasing eigenvalue. On a rectangle the
    eigenfunctions are products of the interval families; `pairs` holds
    their (i, j) indices.
    """
    kind: str
    condition: str
    lengths: Tuple[float, ...]
    eigenvalues: np.ndarray
    pairs: np.ndarray

    @classmethod
    def interval(cls, length=math.pi, condition=DIRICHLET, modes=None):
        modes = modes or settings.NONLOCAL_KOCH_SPECTRAL_MODES
        _check(length, condition, modes)
        waves = _modes_1d(length, condition, modes)
        pairs = np.arange(modes)[:, None]
        return cls(INTERVAL, condition, (float(length),), waves ** 2, pairs)

    @classmethod
    def rectangle(cls, a=1.0, b=1.0, condition=DIRICHLET, modes=None):
        modes = modes or settings.NONLOCAL_KOCH_SPECTRAL_MODES_2D
        _check(a, condition, modes)
        _check(b, condition, modes)
        across = _modes_1d(a, condition, modes) ** 2
        up = _modes_1d(b, condition, modes) ** 2
        i, j = np.meshgrid(np.arange(modes), np.arange(modes), indexing='ij')
        values = (across[i] + up[j]).ravel()
        order = np.argsort(values, kind='stable')
        pairs = np.stack([i.ravel(), j.ravel()], axis=1)[order]
        return cls(RECTANGLE, condition, (float(a), float(b)), values[order], pairs)

    def __len__(self):
        return int(self.eigenvalues.size)

    @property
    def dim(self):
        return len(self.lengths)

    @property
    def volume(self):
        return math.prod(self.lengths)

    def evaluate(self, x, y=None):
        """Matrix of e_k at the given points, one column per mode."""
        if self.kind == INTERVAL:
            waves = _modes_1d(self.lengths[0], self.condition, len(self))
            return _evaluate_1d(self.lengths[0], self.condition, waves, x)
        if y is None:
            raise SpectralDomainError({'y': 'rectangle points need two coordinates'})
        count = int(self.pairs.max()) + 1
        across = _evaluate_1d(self.lengths[0], self.condition,
                              _modes_1d(self.lengths[0], self.condition, count), x)
        up = _evaluate_1d(self.lengths[1], self.condition,
                          _modes_1d(self.lengths[1], self.condition, count), y)
        return across[..., self.pairs[:, 0]] * up[..., self.pairs[:, 1]]

    def quadrature(self, order=None):
        """Gauss–Legendre nodes and weights over the domain."""
        order = order or max(4 * int(self.pairs.max() + 1), 64)
        nodes, weights = np.polynomial.legendre.leggauss(order)
        axes = [((nodes + 1) * length / 2, weights * length / 2)
                for length in self.lengths]
        if self.kind == INTERVAL:
            return axes[0]
        (x, wx), (y, wy) = axes
        xx, yy = np.meshgrid(x, y, indexing='ij')
        return (xx.ravel(), yy.ravel()), np.outer(wx, wy).ravel()

    def gram_deviation(self, count=10):
        """Largest entry of |Gram − I| over the first `count` modes."""
        points, weights = self.quadrature()
        if self.kind == INTERVAL:
            values = self.evaluate(points)[:, :count]
        else:
            values = self.evaluate(*points)[:, :count]
        gram = values.T @ (values * weights[:, None])
        return float(np.abs(gram - np.eye(gram.shape[0])).max())

    def describe(self):
        return {'kind': self.kind, 'condition': self.condition,
                'lengths': list(self.lengths), 'modes': len(self)}


def _check(length, condition, modes):
    if not length > 0:
        raise SpectralDomainError({'length': 'must be positive'})
    if condition not in CONDITIONS:
        raise SpectralDomainError({'condition': 'expected dirichlet or neumann'})
    if modes < 1:
        raise SpectralDomainError({'modes': 'need at least one mode'})


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """Coefficients (f, e_k) of a function in an eigenbasis."""
    basis: EigenBasis
    values: np.ndarray
    norm_squared: float = math.nan

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (len(self.basis),):
            raise SpectralDomainError({'values': 'one coefficient per mode expected'})
        if not np.all(np.isfinite(values)):
            raise SpectralDomainError({'values': 'coefficients must be finite'})
        object.__setattr__(self, 'values', values)

    def scaled(self, factors):
        return CoefficientVector(self.basis, self.values * factors)

    @property
    def parseval_sum(self):
        return math.fsum(self.values ** 2)

    def evaluate(self, x, y=None):
        return self.basis.evaluate(x, y) @ self.values
