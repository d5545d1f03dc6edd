import logging
import math

import mpmath

from ..symbols.models import (
    CAPUTO_FABRIZIO, COMPOUND_POISSON, DRIFTED_CF, GAMMA, STABLE,
    TELEGRAPH_SUM, TEMPERED,
)
from .exceptions import InversionError, PathDomainError
from .models import TALBOT, LaplaceInverter

logger = logging.getLogger(__name__)

WORKING_DPS = 30


def laplace_exponent(sym):
    """Φ continued to complex arguments with mpmath arithmetic."""
    kind = sym.kind
    if kind == STABLE:
        return lambda s: s ** sym.alpha
    if kind == GAMMA:
        return lambda s: sym.a * mpmath.log(1 + s / sym.b)
    if kind in (CAPUTO_FABRIZIO, DRIFTED_CF):
        theta = sym.theta

        def phi(s):
            value = sym.drift * s
            if sym.alpha < 1:
                value += (theta + 1) * s / (theta + s)
            return value
        return phi
    if kind == TELEGRAPH_SUM:
        return lambda s: s ** (2 * sym.alpha) + s ** sym.alpha
    if kind == TEMPERED:
        kappa = sym.kappa
        return lambda s: mpmath.sqrt(s + kappa) - mpmath.sqrt(kappa)
    if kind == COMPOUND_POISSON:
        edges = [0] + sorted(p for p in sym.breakpoints if p > 0) + [mpmath.inf]

        def phi(s):
            integral = mpmath.quad(
                lambda y: mpmath.exp(-s * y) * sym.survival(float(y)), edges)
            return sym.rate * s * integral
        return phi
    return lambda s: s


def laplace_invert(transform, t, inverter=None):
    """
    Invert a Laplace transform at t > 0.

    `transform` receives mpmath numbers (complex for Talbot). Talbot is the
    default; Gaver-Stehfest only evaluates the transform on the real axis.
    """
    inverter = inverter or LaplaceInverter()
    if not t > 0:
        raise PathDomainError({'t': 'inversion point must be positive'})
    method = 'talbot' if inverter.method == TALBOT else 'stehfest'
    try:
        with mpmath.workdps(WORKING_DPS):
            value = mpmath.invertlaplace(
                transform, t, method=method, degree=inverter.nodes)
            value = float(mpmath.re(value))
    except (ZeroDivisionError, OverflowError, ValueError,
            mpmath.libmp.NoConvergence) as error:
        raise InversionError({
            'detail': 'inversion raised %s' % type(error).__name__,
            'method': method, 't': t,
        })
    if not math.isfinite(value):
        raise InversionError({
            'detail': 'inversion returned a non-finite value',
            'method': method, 't': t,
        })
    return value
