import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .exceptions import KochDomainError

INWARD = 'inward'
OUTWARD = 'outward'
ORIENTATIONS = (INWARD, OUTWARD)

DETERMINISTIC = 'deterministic'
IID = 'iid'

P1 = 0j
P2 = 1 + 0j


@dataclass(frozen=True)
class SimilitudeFamily:
    """
    The four contractions of ratio 1/ℓ building one Koch generation.

    Maps act on complex numbers; `maps[i]` is (rotation·scale, shift).
    """
    ell: float
    maps: Tuple[Tuple[complex, complex], ...] = field(repr=False)

    @property
    def theta(self):
        return math.asin(math.sqrt(self.ell * (4 - self.ell)) / 2)

    def apply(self, index, points):
        factor, shift = self.maps[index]
        return factor * np.asarray(points) + shift

    def contraction_ratios(self):
        return [abs(factor) for factor, _ in self.maps]


@dataclass(frozen=True)
class EnvironmentSequence:
    """
    Which family ℓ builds each generation.

    Deterministic environments cycle through `pattern` (indices into
    `alphabet`); i.i.d. environments draw indices with `probabilities`.
    """
    alphabet: Tuple[float, ...]
    probabilities: Tuple[float, ...] = ()
    mode: str = DETERMINISTIC
    pattern: Tuple[int, ...] = ()
    seed: Optional[int] = None

    def __post_init__(self):
        if not self.alphabet:
            raise KochDomainError({'alphabet': 'at least one ℓ is required'})
        for ell in self.alphabet:
            if not 2 < ell < 4:
                raise KochDomainError({'alphabet': 'every ℓ must lie in (2, 4)'})
        if self.mode == DETERMINISTIC:
            if not self.pattern:
                raise KochDomainError(
                    {'pattern': 'a deterministic environment needs a pattern'})
            if any(not 0 <= index < len(self.alphabet) for index in self.pattern):
                raise KochDomainError({'pattern': 'index outside the alphabet'})
        elif self.mode == IID:
            probabilities = np.asarray(self.probabilities, dtype=float)
            if (probabilities.size != len(self.alphabet)
                    or np.any(probabilities < 0)
                    or not math.isclose(probabilities.sum(), 1.0, abs_tol=1e-12)):
                raise KochDomainError(
                    {'probabilities': 'must be one mass per ℓ summing to 1'})
        else:
            raise KochDomainError({'mode': 'unknown environment mode'})

    @classmethod
    def constant(cls, ell):
        return cls(alphabet=(float(ell),), pattern=(0,))

    @classmethod
    def cycle(cls, ells):
        alphabet = tuple(sorted(set(float(ell) for ell in ells)))
        return cls(alphabet=alphabet,
                   pattern=tuple(alphabet.index(float(ell)) for ell in ells))

    @classmethod
    def iid(cls, alphabet, probabilities, seed=None):
        return cls(alphabet=tuple(float(ell) for ell in alphabet),
                   probabilities=tuple(float(p) for p in probabilities),
                   mode=IID, seed=seed)

    def realize(self, n, rng=None):
        """ξ₁..ξₙ as a tuple of ℓ values."""
        if n < 0:
            raise KochDomainError({'n': 'level must be nonnegative'})
        if self.mode == DETERMINISTIC:
            return tuple(self.alphabet[self.pattern[i % len(self.pattern)]]
                         for i in range(n))
        if rng is None:
            rng = np.random.default_rng(self.seed)
        indices = rng.choice(len(self.alphabet), size=n, p=self.probabilities)
        return tuple(self.alphabet[i] for i in indices)

    def mean_log_ell(self):
        logs = np.log(self.alphabet)
        if self.mode == DETERMINISTIC:
            return float(np.mean(logs[list(self.pattern)]))
        return float(np.dot(self.probabilities, logs))

    def mean_ell(self):
        if self.mode == DETERMINISTIC:
            return float(np.mean([self.alphabet[i] for i in self.pattern]))
        return float(np.dot(self.probabilities, self.alphabet))


@dataclass(frozen=True, eq=False)
class PrefractalDomain:
    """
    A regular m-gon with unit sides, each side replaced by the level-n curve.

    `vertices` run counterclockwise around the base polygon without
    repeating the first vertex. `walls` holds extra reflecting segments as
    an array of (start, end) complex pairs.
    """
    m: int
    orientation: str
    level: int
    realization: Tuple[float, ...]
    vertices: np.ndarray
    walls: np.ndarray = field(default_factory=lambda: np.zeros((0, 2), complex))
    openings: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.orientation not in ORIENTATIONS:
            raise KochDomainError({'orientation': 'must be inward or outward'})

    @property
    def sigma(self):
        """σ = ℓ₁⋯ℓₙ / 4ⁿ."""
        return math.prod(self.realization) / 4 ** self.level

    @property
    def segment_count(self):
        return int(self.vertices.size)

    @property
    def segments(self):
        return self.vertices, np.roll(self.vertices, -1)

    @property
    def perimeter(self):
        start, end = self.segments
        return math.fsum(np.abs(end - start))

    @property
    def bounding_box(self):
        points = np.concatenate([self.vertices, self.walls.ravel()])
        return (float(points.real.min()), float(points.imag.min()),
                float(points.real.max()), float(points.imag.max()))

    @property
    def center(self):
        """Center of the base polygon."""
        corners = base_polygon(self.m)
        return complex(np.mean(corners))

    def cells_per_side(self):
        return 4 ** self.level


def base_polygon(m):
    """Counterclockwise regular m-gon with unit sides, first side on [0, 1]."""
    turns = np.exp(2j * np.pi * np.arange(m) / m)
    return np.concatenate([[0j], np.cumsum(turns)[:-1]])
