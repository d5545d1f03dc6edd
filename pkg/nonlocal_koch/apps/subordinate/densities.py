import math

import mpmath
from scipy import stats

from ..symbols.exceptions import SymbolUnsupported
from ..symbols.models import GAMMA, LINEAR, STABLE
from .exceptions import PathDomainError
from .laplace import laplace_exponent, laplace_invert


def _is_half_stable(sym):
    return sym.kind == STABLE and sym.alpha == 0.5


def density_h(sym, t, x, inverter=None):
    """
    Density of H_t at x.

    For symbols with finite Lévy mass H_t has an atom at drift·t of mass
    e^{−t·rate}; the value returned is the density of the remaining part.
    """
    if not t > 0 or not x > 0:
        raise PathDomainError({'t': 't and x must be positive'})
    if sym.kind == LINEAR:
        raise SymbolUnsupported({'kind': 'H_t = t has no density'})
    if _is_half_stable(sym):
        return t * x ** -1.5 * math.exp(-t * t / (4 * x)) / (2 * math.sqrt(math.pi))
    if sym.kind == GAMMA:
        return float(stats.gamma.pdf(x, sym.a * t, scale=1 / sym.b))
    phi = laplace_exponent(sym)
    rate = sym.jump_rate
    drift = sym.drift

    def transform(s):
        value = mpmath.exp(-t * phi(s))
        if rate:
            value -= mpmath.exp(-t * rate - s * drift * t)
        return value
    return laplace_invert(transform, x, inverter)


def density_l(sym, t, x, inverter=None):
    """Density of L_t at x ≥ 0, the inverse of (Φ(λ)/λ)e^{−xΦ(λ)} in t."""
    if not t > 0 or x < 0:
        raise PathDomainError({'t': 't must be positive and x nonnegative'})
    if sym.kind == LINEAR:
        raise SymbolUnsupported({'kind': 'L_t = t has no density'})
    if _is_half_stable(sym):
        return math.exp(-x * x / (4 * t)) / math.sqrt(math.pi * t)
    phi = laplace_exponent(sym)

    def transform(s):
        value = phi(s)
        return value / s * mpmath.exp(-x * value)
    return laplace_invert(transform, t, inverter)
