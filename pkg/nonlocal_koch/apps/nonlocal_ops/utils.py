import logging
import math
import warnings

import mpmath
import numpy as np
from django.conf import settings
from scipy import integrate, special

from ..subordinate.laplace import laplace_exponent, laplace_invert
from ..symbols.models import (
    COMPOUND_POISSON, STABLE, TEMPERED, is_infinite,
)
from ..symbols.utils import (
    levy_density, levy_tail, phi_prime_at_zero, tail_integral,
)
from .exceptions import OperatorDomainError, OperatorUnsupported, QuadratureError
from .models import SampledFunction, SoninePair

logger = logging.getLogger(__name__)

SERIES_DPS = 40
SERIES_MAX_TERMS = 20000
HEAD_WIDTH = 1e-5


def _quad(function, lower, upper, **kwargs):
    """scipy quad that raises QuadratureError instead of warning."""
    kwargs.setdefault('limit', 200)
    kwargs.setdefault('epsabs', settings.NONLOCAL_KOCH_QUAD_EPSABS)
    with warnings.catch_warnings():
        warnings.simplefilter('error', integrate.IntegrationWarning)
        try:
            value, error = integrate.quad(function, lower, upper, **kwargs)
        except integrate.IntegrationWarning as warning:
            raise QuadratureError({
                'detail': str(warning).splitlines()[0],
                'interval': [lower, upper],
            })
    return value


def ml_series(alpha, z):
    """
    E_α(z) = Σ z^k/Γ(αk+1), summed in mpmath with enough digits to absorb
    the cancellation of the alternating terms.
    """
    if z == 0:
        return 1.0
    log_z = math.log(abs(z))
    # the largest term decides the working precision
    peak = 0.0
    k = 1
    while True:
        magnitude = k * log_z - special.gammaln(alpha * k + 1)
        peak = max(peak, magnitude)
        if magnitude < peak - 80 or k > SERIES_MAX_TERMS:
            break
        k += 1
    if k > SERIES_MAX_TERMS:
        raise QuadratureError({
            'detail': 'Mittag-Leffler series needs too many terms',
            'alpha': alpha, 'z': z,
        })
    dps = SERIES_DPS + int(peak / math.log(10)) + 1
    with mpmath.workdps(dps):
        z_mp = mpmath.mpf(z)
        a_mp = mpmath.mpf(alpha)
        total = mpmath.mpf(0)
        for index in range(k + 1):
            total += z_mp ** index / mpmath.gamma(a_mp * index + 1)
        return float(total)


def ml_integral(alpha, z):
    """
    E_α(−x) for x > 0, 0 < α < 1, from the completely monotone
    representation (sin απ/π)∫₀^∞ r^{α−1}e^{−r x^{1/α}} / (r^{2α} + 2r^α cos απ + 1) dr,
    integrated in s = r^α.
    """
    if z >= 0 or not 0 < alpha < 1:
        raise OperatorDomainError(
            {'z': 'integral form needs z < 0 and 0 < alpha < 1'})
    x = -z
    cos_term = math.cos(alpha * math.pi)

    def body(s):
        return math.exp(-(s * x) ** (1 / alpha)) / (s * s + 2 * s * cos_term + 1)

    opts = {'epsabs': 1e-13, 'epsrel': 1e-11}
    total = _quad(body, 0.0, 1.0, **opts) + _quad(body, 1.0, math.inf, **opts)
    return math.sin(alpha * math.pi) / (alpha * math.pi) * total


def _mittag_leffler(alpha, z):
    if not 0 < alpha <= 1:
        raise OperatorDomainError({'alpha': 'must lie in (0, 1]'})
    if alpha == 1:
        return math.exp(z)
    if z < -settings.NONLOCAL_KOCH_ML_SWITCH_RADIUS:
        return ml_integral(alpha, z)
    try:
        return ml_series(alpha, z)
    except QuadratureError:
        if z > 0:
            raise
        logger.debug('series for E_%g(%g) too long, using the integral',
                     alpha, z)
        return ml_integral(alpha, z)


def mittag_leffler(alpha, z):
    """E_α(z); arrays are evaluated elementwise."""
    if np.ndim(z) == 0:
        return _mittag_leffler(alpha, float(z))
    flat = [_mittag_leffler(alpha, float(item)) for item in np.ravel(z)]
    return np.reshape(np.array(flat), np.shape(z))


def _tail_increments(sym, step, count):
    """T(kΔ) − T((k−1)Δ) for k = 1..count, T the integrated tail."""
    nodes = step * np.arange(count + 1)
    return np.diff(np.asarray(tail_integral(sym, nodes), dtype=float))


def caputo_profile(sym, u):
    """
    𝔇^Φ_t u on every grid point: drift·u′ + ∫₀^t u′(t−s)φ̄(s)ds.

    u′ is taken piecewise constant between grid points and integrated
    against the exact tail integral, so the singularity of φ̄ at 0 costs
    no accuracy.
    """
    slopes = u.slopes
    weights = _tail_increments(sym, u.step, slopes.size)
    profile = np.zeros(u.grid.size)
    profile[1:] = np.convolve(slopes, weights)[:slopes.size]
    if sym.drift:
        profile = profile + sym.drift * u.derivative_values()
        profile[0] = 0.0
    return profile


def caputo_dzherbashian(sym, u, t):
    if not isinstance(u, SampledFunction):
        raise OperatorDomainError({'u': 'expected sampled values on a grid'})
    index = u.index_of(t)
    if index == 0:
        return 0.0
    slopes = u.slopes[:index]
    weights = _tail_increments(sym, u.step, index)
    value = math.fsum(slopes[::-1] * weights)
    if sym.drift:
        value += sym.drift * u.derivative_values()[index]
    return value


def caputo_fabrizio(alpha, u, x):
    """
    (1/(1−α))∫₀^x u′(τ)e^{−α(x−τ)/(1−α)}dτ with M(α) = 1.

    One pass of the exponential recurrence; exact for piecewise linear u.
    """
    if not 0 < alpha < 1:
        raise OperatorDomainError({'alpha': 'must lie in (0, 1)'})
    index = u.index_of(x)
    theta = alpha / (1 - alpha)
    decay = math.exp(-theta * u.step)
    gain = -math.expm1(-theta * u.step) / theta
    value = 0.0
    for slope in u.slopes[:index]:
        value = decay * value + slope * gain
    return value / (1 - alpha)


def _derivative(u, x, width):
    return (u(x + width) - u(x - width)) / (2 * width)


def _extended(u):
    return lambda y: u(y) if y > 0 else 0.0


def marchaud_minus(sym, u, x):
    """
    ∫₀^∞ (u(x) − u(x−y)) φ(dy) for u vanishing on (−∞, 0].

    The first HEAD_WIDTH of jumps is linearized in u; kinds without a Lévy
    density use the tail-kernel form ∫₀^x u′(x−y)φ̄(y)dy + u(0+)φ̄(x).
    """
    if not x > 0:
        raise OperatorDomainError({'x': 'must be positive'})
    u = _extended(u)
    ux = u(x)
    width = min(1e-6, x / 4)
    slope = _derivative(u, x, width)
    value = sym.drift * slope if sym.drift else 0.0
    if not sym.has_jumps:
        return value
    if sym.kind == COMPOUND_POISSON and sym.jump_density is None:
        points = [x - p for p in sym.breakpoints if 0 < p < x] or None
        value += _quad(lambda y: _derivative(u, x - y, width) * levy_tail(sym, y),
                       width, x - width, points=points)
        return value + u(width) * levy_tail(sym, x)
    head = min(HEAD_WIDTH, x / 10)
    value += slope * (tail_integral(sym, head) - head * levy_tail(sym, head))
    points = [p for p in sym.breakpoints if head < p < x] or None
    value += _quad(lambda y: (ux - u(x - y)) * levy_density(sym, y),
                   head, x, points=points)
    return value + ux * levy_tail(sym, x)


def _tail_convolution(sym, u, x):
    """∫₀^x u(x−y)φ̄(y)dy."""
    if x <= 0:
        return 0.0
    points = [p for p in sym.breakpoints if 0 < p < x] or None
    return _quad(lambda y: u(x - y) * levy_tail(sym, y) if y > 0 else 0.0,
                 0.0, x, points=points)


def riemann_liouville_minus(sym, u, x):
    """d/dx ∫₀^x u(x−y)φ̄(y)dy, plus drift·u′(x)."""
    if not x > 0:
        raise OperatorDomainError({'x': 'must be positive'})
    u = _extended(u)
    value = 0.0
    if sym.drift:
        value += sym.drift * _derivative(u, x, min(1e-6, x / 4))
    if not sym.has_jumps:
        return value
    width = min(1e-4, x / 4)
    upper = _tail_convolution(sym, u, x + width)
    lower = _tail_convolution(sym, u, x - width)
    return value + (upper - lower) / (2 * width)


def _potential_density(sym):
    phi = laplace_exponent(sym)

    def kappa(x):
        return laplace_invert(lambda s: 1 / phi(s), x)
    return kappa


def sonine_pair(sym):
    """
    κ(x) = ∫₀^∞ h(t, x)dt and ℓ = φ̄ with ∫₀^x κ(z)ℓ(x−z)dz = 1.
    """
    if sym.kind == STABLE or (sym.kind == TEMPERED and sym.mu == 0):
        alpha = sym.alpha if sym.kind == STABLE else 0.5
        norm_kappa = special.gamma(alpha)
        norm_ell = special.gamma(1 - alpha)
        return SoninePair(
            kappa=lambda x: x ** (alpha - 1) / norm_kappa if x > 0 else math.inf,
            ell=lambda x: x ** -alpha / norm_ell if x > 0 else math.inf,
            symbol=sym, kappa_exponent=alpha - 1, ell_exponent=-alpha,
            kappa_scale=1 / norm_kappa, ell_scale=1 / norm_ell,
        )
    if sym.finite_levy_mass or sym.drift:
        raise OperatorUnsupported(
            {'kind': '%s has no Sonine pair: the potential measure has an '
                     'atom or the kernel is not locally integrable' % sym.kind})
    if is_infinite(phi_prime_at_zero(sym)):
        raise OperatorUnsupported(
            {'kind': 'no closed-form potential density for %s' % sym.kind})
    logger.debug('potential density of %s by Laplace inversion', sym)
    return SoninePair(
        kappa=_potential_density(sym),
        ell=lambda x: levy_tail(sym, x),
        symbol=sym,
    )


def sonine_convolution(pair, x):
    """
    ∫₀^x κ(z)ℓ(x−z)dz.

    Power pairs put both endpoint singularities into the algebraic weight
    and integrate only the constant left over.
    """
    if pair.kappa_exponent is not None:
        p, q = pair.kappa_exponent, pair.ell_exponent
        scale = pair.kappa_scale * pair.ell_scale
        return _quad(lambda z: scale, 0.0, x, weight='alg', wvar=(p, q))
    return _quad(lambda z: pair.kappa(z) * pair.ell(x - z), 0.0, x,
                 epsabs=1e-8, epsrel=1e-6)


def young_bound(sym, u):
    """
    Both sides of ∫|𝔇^Φ_t u|dt ≤ Φ′(0)∫|u′|dt over the grid of u.
    """
    prime = phi_prime_at_zero(sym)
    if is_infinite(prime):
        raise OperatorUnsupported(
            {'kind': 'Young bound needs a finite Φ′(0)'})
    profile = caputo_profile(sym, u)
    lhs = math.fsum(np.abs(profile[1:])) * u.step
    rhs = prime * math.fsum(np.abs(u.slopes)) * u.step
    return lhs, rhs
