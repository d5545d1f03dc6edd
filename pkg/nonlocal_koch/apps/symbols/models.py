import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

from .exceptions import SymbolDomainError

STABLE = 'stable'
GAMMA = 'gamma'
CAPUTO_FABRIZIO = 'caputo_fabrizio'
DRIFTED_CF = 'drifted_cf'
TELEGRAPH_SUM = 'telegraph_sum'
TEMPERED = 'tempered'
COMPOUND_POISSON = 'compound_poisson'
LINEAR = 'linear'

KINDS = (
    STABLE, GAMMA, CAPUTO_FABRIZIO, DRIFTED_CF, TELEGRAPH_SUM, TEMPERED,
    COMPOUND_POISSON, LINEAR,
)


class Extended(enum.Enum):
    """Marker for the +infinity value of an extended nonnegative real."""
    INFINITY = 'infinity'

    def __repr__(self):
        return 'INFINITY'


INFINITY = Extended.INFINITY


def is_infinite(value):
    return value is INFINITY


@dataclass(frozen=True)
class BernsteinSymbol:
    """
    Laplace exponent of a subordinator.

    Build instances through the class methods; the raw constructor only
    checks parameter ranges. Instances are immutable and hashable, so they
    can be shared across threads and used as memoization keys.
    """
    kind: str
    alpha: Optional[float] = None
    a: Optional[float] = None
    b: Optional[float] = None
    c: Optional[float] = None
    mu: Optional[float] = None
    rate: Optional[float] = None
    survival: Optional[Callable] = field(default=None, compare=False)
    jump_sampler: Optional[Callable] = field(default=None, compare=False)
    jump_density: Optional[Callable] = field(default=None, compare=False)
    mean_jump: Optional[float] = None
    breakpoints: Tuple[float, ...] = ()
    label: str = ''

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SymbolDomainError({'kind': 'Unknown symbol kind %r' % self.kind})
        check = _RANGE_CHECKS.get(self.kind)
        if check is not None:
            check(self)

    def __hash__(self):
        return hash(self.key)

    def __eq__(self, other):
        return isinstance(other, BernsteinSymbol) and self.key == other.key

    @property
    def key(self):
        """Identity of the symbol: kind, parameters and jump law."""
        return (
            self.kind, self.alpha, self.a, self.b, self.c, self.mu,
            self.rate, self.label, id(self.survival) if self.survival else None,
        )

    @classmethod
    def stable(cls, alpha):
        return cls(kind=STABLE, alpha=float(alpha))

    @classmethod
    def gamma(cls, a, b):
        return cls(kind=GAMMA, a=float(a), b=float(b))

    @classmethod
    def caputo_fabrizio(cls, alpha):
        return cls(kind=CAPUTO_FABRIZIO, alpha=float(alpha))

    @classmethod
    def drifted_cf(cls, c, alpha):
        return cls(kind=DRIFTED_CF, c=float(c), alpha=float(alpha))

    @classmethod
    def telegraph_sum(cls, alpha):
        return cls(kind=TELEGRAPH_SUM, alpha=float(alpha))

    @classmethod
    def tempered(cls, mu):
        return cls(kind=TEMPERED, mu=float(mu))

    @classmethod
    def linear(cls):
        return cls(kind=LINEAR)

    @property
    def theta(self):
        """Jump rate parameter α/(1−α) of the Caputo–Fabrizio kinds."""
        if self.kind not in (CAPUTO_FABRIZIO, DRIFTED_CF):
            return None
        if self.alpha == 1:
            return math.inf
        return self.alpha / (1 - self.alpha)

    @property
    def kappa(self):
        if self.kind != TEMPERED:
            return None
        return (self.mu / 2) ** 2

    @property
    def drift(self):
        if self.kind == LINEAR:
            return 1.0
        if self.kind == CAPUTO_FABRIZIO:
            return 1.0 if self.alpha == 1 else 0.0
        if self.kind == DRIFTED_CF:
            return self.c * self.alpha + (1.0 if self.alpha == 1 else 0.0)
        return 0.0

    @property
    def jump_rate(self):
        """Total Lévy mass; None when infinite."""
        if self.kind == COMPOUND_POISSON:
            return self.rate
        if self.kind in (CAPUTO_FABRIZIO, DRIFTED_CF):
            return 0.0 if self.alpha == 1 else self.theta + 1
        if self.kind == LINEAR:
            return 0.0
        return None

    @property
    def finite_levy_mass(self):
        return self.jump_rate is not None

    @property
    def has_jumps(self):
        return self.jump_rate is None or self.jump_rate > 0

    @property
    def finite_mean(self):
        from .utils import phi_prime_at_zero
        return not is_infinite(phi_prime_at_zero(self))

    def __str__(self):
        params = ', '.join(
            '%s=%g' % (name, getattr(self, name))
            for name in ('alpha', 'a', 'b', 'c', 'mu', 'rate')
            if getattr(self, name) is not None
        )
        name = self.label or self.kind
        return '%s(%s)' % (name, params)


def _positive(value, name, upper=None, closed_upper=False):
    if value is None or not value > 0 or not math.isfinite(value):
        raise SymbolDomainError({name: 'must be a positive real'})
    if upper is not None:
        bad = value > upper if closed_upper else value >= upper
        if bad:
            bound = 'at most' if closed_upper else 'below'
            raise SymbolDomainError({name: 'must be %s %g' % (bound, upper)})


def _check_stable(sym):
    _positive(sym.alpha, 'alpha', 1.0)


def _check_gamma(sym):
    _positive(sym.a, 'a')
    _positive(sym.b, 'b')


def _check_cf(sym):
    _positive(sym.alpha, 'alpha', 1.0, closed_upper=True)


def _check_drifted(sym):
    _check_cf(sym)
    if sym.c is None or sym.c < 0:
        raise SymbolDomainError({'c': 'must be a nonnegative real'})


def _check_telegraph(sym):
    _positive(sym.alpha, 'alpha', 0.5)


def _check_tempered(sym):
    if sym.mu is None or not math.isfinite(sym.mu):
        raise SymbolDomainError({'mu': 'must be a real number'})


def _check_compound(sym):
    _positive(sym.rate, 'rate')
    if sym.survival is None:
        raise SymbolDomainError({'survival': 'a jump survival function is required'})


_RANGE_CHECKS = {
    STABLE: _check_stable,
    GAMMA: _check_gamma,
    CAPUTO_FABRIZIO: _check_cf,
    DRIFTED_CF: _check_drifted,
    TELEGRAPH_SUM: _check_telegraph,
    TEMPERED: _check_tempered,
    COMPOUND_POISSON: _check_compound,
}
