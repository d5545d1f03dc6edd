import logging
import math

import numpy as np
from django.conf import settings
from rest_framework import serializers
from scipy import integrate, special

from .exceptions import SymbolDomainError, SymbolUnsupported
from .models import (
    CAPUTO_FABRIZIO, COMPOUND_POISSON, DRIFTED_CF, GAMMA, INFINITY,
    STABLE, TELEGRAPH_SUM, TEMPERED, BernsteinSymbol,
)

logger = logging.getLogger(__name__)

SQRT_PI = math.sqrt(math.pi)


def _scalar_or_array(function):
    """Apply a scalar evaluator elementwise when given an array."""
    def wrapper(sym, value):
        if np.ndim(value) == 0:
            return function(sym, float(value))
        flat = [function(sym, float(item)) for item in np.ravel(value)]
        return np.reshape(np.array(flat, dtype=float), np.shape(value))
    wrapper.__name__ = function.__name__
    wrapper.__doc__ = function.__doc__
    return wrapper


def _compound_laplace(sym, lam):
    """∫₀^∞ e^{−λy} S(y) dy split at the survival breakpoints."""
    epsabs = settings.NONLOCAL_KOCH_QUAD_EPSABS
    edges = [0.0] + sorted(p for p in sym.breakpoints if p > 0) + [math.inf]
    total = 0.0
    for lower, upper in zip(edges[:-1], edges[1:]):
        value, _ = integrate.quad(
            lambda y: math.exp(-lam * y) * sym.survival(y),
            lower, upper, epsabs=epsabs, limit=200,
        )
        total += value
    return total


@_scalar_or_array
def eval_phi(sym, lam):
    """Φ(λ) by the closed form of the kind."""
    if lam < 0:
        raise SymbolDomainError({'lambda': 'must be nonnegative'})
    if lam == 0:
        return 0.0
    kind = sym.kind
    if kind == STABLE:
        return lam ** sym.alpha
    if kind == GAMMA:
        return sym.a * math.log1p(lam / sym.b)
    if kind in (CAPUTO_FABRIZIO, DRIFTED_CF):
        value = sym.drift * lam
        if sym.alpha < 1:
            theta = sym.theta
            value += (theta + 1) * lam / (theta + lam)
        return value
    if kind == TELEGRAPH_SUM:
        return lam ** (2 * sym.alpha) + lam ** sym.alpha
    if kind == TEMPERED:
        half = abs(sym.mu) / 2
        return math.sqrt(lam + half ** 2) - half
    if kind == COMPOUND_POISSON:
        return sym.rate * lam * _compound_laplace(sym, lam)
    return lam


def compose_multiplier(sym, psi):
    """Φ(ψ) for the symbol ψ of an inner process, e.g. an eigenvalue μ_k."""
    return eval_phi(sym, psi)


def variance_gamma_exponent(sym, xi):
    """
    Characteristic exponent of Brownian motion run on the clock H.

    With generator Δ the free motion has exponent ξ², so X_{H_t} has
    characteristic function exp(−tΦ(ξ²)).
    """
    return eval_phi(sym, np.square(xi))


@_scalar_or_array
def levy_tail(sym, z):
    """φ̄(z) = φ((z, ∞))."""
    if z <= 0:
        raise SymbolDomainError({'z': 'must be positive'})
    kind = sym.kind
    if kind == STABLE:
        return z ** -sym.alpha / special.gamma(1 - sym.alpha)
    if kind == GAMMA:
        return sym.a * special.exp1(sym.b * z)
    if kind in (CAPUTO_FABRIZIO, DRIFTED_CF):
        if sym.alpha == 1:
            return 0.0
        theta = sym.theta
        return (theta + 1) * math.exp(-theta * z)
    if kind == TELEGRAPH_SUM:
        alpha = sym.alpha
        return (z ** (-2 * alpha) / special.gamma(1 - 2 * alpha)
                + z ** -alpha / special.gamma(1 - alpha))
    if kind == TEMPERED:
        kappa = sym.kappa
        if kappa == 0:
            return 1 / math.sqrt(math.pi * z)
        root = math.sqrt(kappa * z)
        return math.exp(-kappa * z) * (
            1 / math.sqrt(math.pi * z) - math.sqrt(kappa) * special.erfcx(root))
    if kind == COMPOUND_POISSON:
        return sym.rate * sym.survival(z)
    return 0.0


@_scalar_or_array
def tail_integral(sym, z):
    """∫₀^z φ̄(y) dy; finite for every Bernstein function."""
    if z < 0:
        raise SymbolDomainError({'z': 'must be nonnegative'})
    if z == 0:
        return 0.0
    kind = sym.kind
    if kind == STABLE:
        return z ** (1 - sym.alpha) / special.gamma(2 - sym.alpha)
    if kind == GAMMA:
        bz = sym.b * z
        return sym.a * (z * special.exp1(bz) - math.expm1(-bz) / sym.b)
    if kind in (CAPUTO_FABRIZIO, DRIFTED_CF):
        if sym.alpha == 1:
            return 0.0
        theta = sym.theta
        return -(theta + 1) * math.expm1(-theta * z) / theta
    if kind == TELEGRAPH_SUM:
        alpha = sym.alpha
        return (z ** (1 - 2 * alpha) / special.gamma(2 - 2 * alpha)
                + z ** (1 - alpha) / special.gamma(2 - alpha))
    if kind == TEMPERED:
        kappa = sym.kappa
        if kappa == 0:
            return 2 * math.sqrt(z / math.pi)
        w = math.sqrt(kappa * z)
        return (special.erf(w) / 2 - w * w * special.erfc(w)
                + w * math.exp(-w * w) / SQRT_PI) / math.sqrt(kappa)
    if kind == COMPOUND_POISSON:
        edges = [0.0] + sorted(p for p in sym.breakpoints if 0 < p < z) + [z]
        total = 0.0
        for lower, upper in zip(edges[:-1], edges[1:]):
            total += integrate.quad(sym.survival, lower, upper, limit=200)[0]
        return sym.rate * total
    return 0.0


@_scalar_or_array
def levy_density(sym, y):
    """Density of the Lévy measure φ(dy) at y > 0."""
    if y <= 0:
        raise SymbolDomainError({'y': 'must be positive'})
    kind = sym.kind
    if kind == STABLE:
        alpha = sym.alpha
        return alpha * y ** (-alpha - 1) / special.gamma(1 - alpha)
    if kind == GAMMA:
        return sym.a * math.exp(-sym.b * y) / y
    if kind in (CAPUTO_FABRIZIO, DRIFTED_CF):
        if sym.alpha == 1:
            return 0.0
        theta = sym.theta
        return (theta + 1) * theta * math.exp(-theta * y)
    if kind == TELEGRAPH_SUM:
        alpha = sym.alpha
        return (2 * alpha * y ** (-2 * alpha - 1) / special.gamma(1 - 2 * alpha)
                + alpha * y ** (-alpha - 1) / special.gamma(1 - alpha))
    if kind == TEMPERED:
        return y ** -1.5 * math.exp(-sym.kappa * y) / (2 * SQRT_PI)
    if kind == COMPOUND_POISSON:
        if sym.jump_density is None:
            raise SymbolUnsupported(
                {'jump_density': 'compound Poisson symbol has no jump density'})
        return sym.rate * sym.jump_density(y)
    return 0.0


def phi_prime_at_zero(sym):
    """lim_{λ↓0} Φ(λ)/λ, or INFINITY."""
    kind = sym.kind
    if kind == STABLE or kind == TELEGRAPH_SUM:
        return INFINITY
    if kind == GAMMA:
        return sym.a / sym.b
    if kind == CAPUTO_FABRIZIO:
        return 1 / sym.alpha
    if kind == DRIFTED_CF:
        return sym.c * sym.alpha + 1 / sym.alpha
    if kind == TEMPERED:
        return INFINITY if sym.mu == 0 else 1 / abs(sym.mu)
    if kind == COMPOUND_POISSON:
        mean = sym.mean_jump
        if mean is None:
            mean = _compound_laplace(sym, 0.0)
        if not math.isfinite(mean):
            return INFINITY
        return sym.rate * mean
    return 1.0


def validate_survival(survival, breakpoints=()):
    """
    Check a jump survival function on a log-spaced grid.

    Raises a validation error when S(0) ≠ 1, a value leaves [0, 1], or S
    increases somewhere.
    """
    grid = np.concatenate([
        [0.0], np.logspace(-6, 6, 241),
        [p * (1 + s) for p in breakpoints for s in (-1e-9, 1e-9)],
    ])
    grid.sort()
    values = np.array([survival(y) for y in grid], dtype=float)
    if not math.isclose(values[0], 1.0, abs_tol=1e-12):
        raise serializers.ValidationError(
            {'survival': 'Survival function must equal 1 at 0'})
    if np.any(values < -1e-12) or np.any(values > 1 + 1e-12):
        raise serializers.ValidationError(
            {'survival': 'Survival function must take values in [0, 1]'})
    if np.any(np.diff(values) > 1e-12):
        raise serializers.ValidationError(
            {'survival': 'Survival function must be nonincreasing'})


def symbol_from_jump_law(rate, survival, jump_sampler=None, jump_density=None,
                         mean_jump=None, breakpoints=(), label=''):
    """
    Compound Poisson symbol with jump rate `rate` and P(Y > y) = survival(y).

    Its kernel is rate·survival, i.e. Φ(λ) = rate·λ∫e^{−λy}P(Y>y)dy.
    """
    if rate is None or not rate > 0:
        raise SymbolDomainError({'rate': 'must be a positive real'})
    validate_survival(survival, breakpoints)
    return BernsteinSymbol(
        kind=COMPOUND_POISSON, rate=float(rate), survival=survival,
        jump_sampler=jump_sampler, jump_density=jump_density,
        mean_jump=mean_jump, breakpoints=tuple(breakpoints), label=label,
    )


def exponential_jump_law(rate, theta):
    """Compound Poisson with Exp(θ) jumps; rate θ+1 gives the CF symbol."""
    return symbol_from_jump_law(
        rate,
        lambda y: math.exp(-theta * y) if y > 0 else 1.0,
        jump_sampler=lambda rng, size: rng.exponential(1 / theta, size),
        jump_density=lambda y: theta * math.exp(-theta * y),
        mean_jump=1 / theta,
        label='exponential_jumps',
    )


def mittag_leffler_jump_law(rate, alpha, r):
    """
    Compound Poisson with P(Y > y) = E_α(−r y^α).

    Jumps are drawn with the Kozubowski representation; α = 1 gives
    exponential jumps with mean 1/r.
    """
    from ..nonlocal_ops.utils import mittag_leffler

    if not 0 < alpha <= 1:
        raise SymbolDomainError({'alpha': 'must lie in (0, 1]'})
    if not r > 0:
        raise SymbolDomainError({'r': 'must be positive'})
    scale = r ** (-1 / alpha)

    def survival(y):
        if y <= 0:
            return 1.0
        return mittag_leffler(alpha, -r * y ** alpha)

    def sampler(rng, size):
        u = 1 - rng.random(size)
        if alpha == 1:
            return -scale * np.log(u)
        v = rng.random(size)
        inner = (math.sin(alpha * math.pi) / np.tan(alpha * math.pi * v)
                 - math.cos(alpha * math.pi))
        return -scale * np.log(u) * np.power(inner, 1 / alpha)

    return symbol_from_jump_law(
        rate, survival, jump_sampler=sampler,
        mean_jump=scale if alpha == 1 else math.inf,
        label='mittag_leffler_jumps',
    )


def truncated_power_law(alpha, n):
    """
    Stable(α) with jumps shorter than 1/n suppressed.

    Jumps have P(Y > y) = (ny)^{−α} ∧ 1 and arrive at rate n^α/Γ(1−α), so
    the Lévy measure agrees with the stable one above 1/n.
    """
    if not 0 < alpha < 1:
        raise SymbolDomainError({'alpha': 'must lie in (0, 1)'})
    if not n > 0:
        raise SymbolDomainError({'n': 'must be positive'})
    threshold = 1 / n

    def survival(y):
        return 1.0 if y <= threshold else (n * y) ** -alpha

    def sampler(rng, size):
        return threshold * (1 - rng.random(size)) ** (-1 / alpha)

    def density(y):
        return 0.0 if y <= threshold else alpha * n ** -alpha * y ** (-alpha - 1)

    return symbol_from_jump_law(
        n ** alpha / special.gamma(1 - alpha), survival, jump_sampler=sampler,
        jump_density=density, mean_jump=math.inf, breakpoints=(threshold,),
        label='truncated_power_law',
    )


def check_bernstein_shape(sym, grid=None):
    """
    Numerical shape checks on a log-spaced grid.

    Φ(0)=0, Φ nondecreasing and concave, Φ(λ)/λ nonincreasing.
    """
    if grid is None:
        grid = np.logspace(-3, 3, 61)
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(eval_phi(sym, grid))
    scale = max(1.0, float(np.max(np.abs(values))))
    tol = 1e-9 * scale
    slopes = np.diff(values) / np.diff(grid)
    ratios = values / grid
    checks = {
        'zero_at_origin': eval_phi(sym, 0.0) == 0.0,
        'nondecreasing': bool(np.all(np.diff(values) >= -tol)),
        'concave': bool(np.all(np.diff(slopes) <= tol)),
        'ratio_nonincreasing': bool(np.all(np.diff(ratios) <= tol)),
    }
    if not all(checks.values()):
        logger.warning('shape check failed for %s: %s', sym, checks)
    return checks
