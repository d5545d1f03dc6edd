import logging
import math
from functools import lru_cache

import numpy as np
from scipy import integrate

from ..nonlocal_ops.exceptions import QuadratureError
from ..nonlocal_ops.utils import mittag_leffler, sonine_pair
from ..subordinate.densities import density_h, density_l
from ..subordinate.exceptions import InversionError
from ..subordinate.laplace import laplace_exponent, laplace_invert
from ..symbols.models import LINEAR, STABLE, is_infinite
from ..symbols.utils import compose_multiplier, eval_phi, phi_prime_at_zero
from .exceptions import RelaxationError, SpectralDomainError, SpectralUnsupported
from .models import INTERVAL, CoefficientVector

logger = logging.getLogger(__name__)

SUBORDINATED = 'subordinated'
CLASSICAL = 'classical'
ELLIPTIC_MODES = (SUBORDINATED, CLASSICAL)

# Gauss–Legendre panels in u for s = u/(1 − u)
MIXING_PANELS = (0.0, 0.2, 0.4, 0.6, 0.8, 0.9, 0.97, 0.995, 1.0)
MIXING_ORDER = 24
PARSEVAL_TOLERANCE = 1e-8
LBAR_DOUBLINGS = 40


def _points(basis, points):
    if basis.kind == INTERVAL:
        return (np.asarray(points, dtype=float),)
    points = np.asarray(points)
    if np.iscomplexobj(points):
        return points.real, points.imag
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    return points[:, 0], points[:, 1]


def project(f, basis, order=None):
    """
    Coefficients (f, e_k) by Gauss–Legendre quadrature.

    `f` takes x on an interval and (x, y) on a rectangle, vectorized.
    """
    if isinstance(f, CoefficientVector):
        return f
    nodes, weights = basis.quadrature(order)
    if basis.kind == INTERVAL:
        values = np.asarray(f(nodes), dtype=float) * np.ones_like(nodes)
        modes = basis.evaluate(nodes)
    else:
        values = np.asarray(f(*nodes), dtype=float) * np.ones_like(nodes[0])
        modes = basis.evaluate(*nodes)
    if not np.all(np.isfinite(values)):
        raise QuadratureError({'detail': 'f is not finite at the quadrature nodes'})
    norm_squared = math.fsum(weights * values ** 2)
    coefficients = CoefficientVector(
        basis, modes.T @ (weights * values), norm_squared)
    if coefficients.parseval_sum > norm_squared + PARSEVAL_TOLERANCE * max(
            1.0, norm_squared):
        logger.warning('projection breaks Bessel: %g > %g; raise the order',
                       coefficients.parseval_sum, norm_squared)
    return coefficients


def apply_phi_laplacian(sym, basis, f):
    """
    Φ(−Δ)f in `basis`: coefficient k times Φ(μ_k).

    `f` is a function or coefficients already taken in `basis`.
    """
    coefficients = project(f, basis)
    if coefficients.basis is not basis and (
            coefficients.basis.kind != basis.kind
            or coefficients.basis.condition != basis.condition
            or coefficients.basis.lengths != basis.lengths
            or len(coefficients.basis) != len(basis)):
        raise SpectralDomainError({'basis': 'coefficients belong to another basis'})
    multipliers = compose_multiplier(sym, basis.eigenvalues)
    return coefficients.scaled(np.asarray(multipliers, dtype=float))


def _evaluate(coefficients, points):
    return coefficients.evaluate(*_points(coefficients.basis, points))


def solve_space_nonlocal(sym, basis, f, t, points):
    """u(t) = e^{−tΦ(−Δ)}f, evaluated at `points`."""
    if t < 0:
        raise SpectralDomainError({'t': 'must be nonnegative'})
    coefficients = project(f, basis)
    if t == 0:
        return _evaluate(coefficients, points)
    decay = np.exp(-t * np.asarray(eval_phi(sym, basis.eigenvalues), dtype=float))
    return _evaluate(coefficients.scaled(decay), points)


@lru_cache(maxsize=4096)
def relaxation(sym, mu, t):
    """
    The mode factor E[e^{−μ L_t}] of the time-nonlocal problem.

    Its Laplace transform in t is (Φ(λ)/λ)/(Φ(λ) + μ); stable symbols use
    E_α(−μt^α) and the linear symbol e^{−μt}.
    """
    if t == 0 or mu == 0:
        return 1.0
    if sym.kind == LINEAR:
        return math.exp(-mu * t)
    if sym.kind == STABLE:
        return float(mittag_leffler(sym.alpha, -mu * t ** sym.alpha))
    phi = laplace_exponent(sym)

    def transform(s):
        value = phi(s)
        return value / s / (value + mu)
    try:
        return laplace_invert(transform, t)
    except InversionError as error:
        raise RelaxationError({'detail': error.detail, 'mu': mu, 't': t})


def time_coefficients(sym, coefficients, t):
    """Coefficients of the time-nonlocal solution at time t."""
    if t < 0:
        raise SpectralDomainError({'t': 'must be nonnegative'})
    factors = [relaxation(sym, float(mu), float(t))
               for mu in coefficients.basis.eigenvalues]
    return coefficients.scaled(np.array(factors))


def solve_time_nonlocal(sym, basis, f, t, points):
    """
    Solution of 𝔇^Φ_t u = Δu with u(0) = f at time t.

    Every mode relaxes by E[e^{−μ_k L_t}]; t = 0 returns f.
    """
    coefficients = project(f, basis)
    return _evaluate(time_coefficients(sym, coefficients, t), points)


def _mixing_rule():
    nodes, weights = np.polynomial.legendre.leggauss(MIXING_ORDER)
    u, w = [], []
    for lower, upper in zip(MIXING_PANELS[:-1], MIXING_PANELS[1:]):
        half = (upper - lower) / 2
        u.append(lower + half * (nodes + 1))
        w.append(half * weights)
    u, w = np.concatenate(u), np.concatenate(w)
    return u / (1 - u), w / (1 - u) ** 2


def mixing_weights(sym, t, eigenvalues, scale=1.0):
    """∫₀^∞ e^{−μ s} l(t, s) ds per eigenvalue, from the density of L_t."""
    s, w = _mixing_rule()
    s, w = scale * s, scale * w
    density = np.array([density_l(sym, t, float(point)) for point in s])
    mass = math.fsum(w * density)
    if abs(mass - 1) > 1e-4:
        logger.warning('density of L_%g integrates to %.8f', t, mass)
    return np.exp(-np.outer(eigenvalues, s)) @ (w * density)


def subordination_quadrature(sym, basis, f, t, points, scale=None):
    """
    u(t) = ∫₀^∞ e^{sΔ}f P(L_t ∈ ds), integrated against the density of L_t.

    The linear symbol and t = 0 skip the integral.
    """
    coefficients = project(f, basis)
    if t == 0:
        return _evaluate(coefficients, points)
    if sym.kind == LINEAR:
        return _evaluate(coefficients.scaled(np.exp(-t * basis.eigenvalues)), points)
    if scale is None:
        prime = phi_prime_at_zero(sym)
        scale = max(t, 1e-3) if is_infinite(prime) else max(t / prime, 1e-3)
    factors = mixing_weights(sym, t, basis.eigenvalues, scale)
    return _evaluate(coefficients.scaled(factors), points)


def solve_elliptic(sym, basis, f, points, mode=SUBORDINATED):
    """
    Φ(−Δ)u = f (subordinated) or −Δu = Φ′(0)f (classical).

    The classical form exists only where Φ′(0) is finite.
    """
    if mode not in ELLIPTIC_MODES:
        raise SpectralDomainError({'mode': 'expected subordinated or classical'})
    coefficients = project(f, basis)
    mu = basis.eigenvalues
    if mode == SUBORDINATED:
        multipliers = np.asarray(eval_phi(sym, mu), dtype=float)
        if np.any(multipliers <= 0):
            raise SpectralDomainError(
                {'basis': 'Φ(μ_k) vanishes; the elliptic problem is singular'})
        return _evaluate(coefficients.scaled(1 / multipliers), points)
    prime = phi_prime_at_zero(sym)
    if is_infinite(prime):
        raise SpectralUnsupported(
            {'kind': 'the classical problem needs a finite Φ′(0), %s has none' % sym})
    if np.any(mu <= 0):
        raise SpectralDomainError({'basis': 'a zero eigenvalue makes −Δ singular'})
    return _evaluate(coefficients.scaled(prime / mu), points)


def _convolve(f, kernel, x, points=None):
    if x <= 0:
        return 0.0
    value, _ = integrate.quad(lambda y: f(x - y) * kernel(y), 0.0, x,
                              limit=200, points=points)
    return value


def _atom(sym, t):
    """Location and mass of the atom of H_t, if any."""
    rate = sym.jump_rate
    if rate is None:
        return None, 0.0
    return sym.drift * t, math.exp(-rate * t)


def solve_hf(sym, f, t, x_grid):
    """h_f(t, x) = ∫₀^x f(x−y) P(H_t ∈ dy) on a grid of x."""
    if not t > 0:
        raise SpectralDomainError({'t': 'must be positive'})
    if sym.kind == LINEAR:
        return np.array([f(x - t) if x > t else 0.0 for x in x_grid])
    location, mass = _atom(sym, t)
    values = []
    for x in x_grid:
        value = _convolve(f, lambda y: density_h(sym, t, y) if y > 0 else 0.0, x)
        if mass and location < x:
            value += mass * f(x - location)
        values.append(value)
    return np.array(values)


def solve_lf(sym, f, t, x_grid):
    """l_f(t, x) = ∫₀^x f(x−y) P(L_t ∈ dy) on a grid of x."""
    if not t > 0:
        raise SpectralDomainError({'t': 'must be positive'})
    if sym.kind == LINEAR:
        return np.array([f(x - t) if x > t else 0.0 for x in x_grid])
    return np.array([_convolve(f, lambda y: density_l(sym, t, y), x)
                     for x in x_grid])


def solve_hbar(sym, f, x_grid):
    """h̄_f(x) = ∫₀^x f(x−y)κ(y)dy with κ the potential density of H."""
    pair = sonine_pair(sym)
    values = []
    for x in x_grid:
        if x <= 0:
            values.append(0.0)
            continue
        if pair.kappa_exponent is not None:
            p, scale = pair.kappa_exponent, pair.kappa_scale
            value, _ = integrate.quad(
                lambda y: scale * f(x - y), 0.0, x,
                weight='alg', wvar=(p, 0.0), limit=200)
        else:
            value = _convolve(f, pair.kappa, x)
        values.append(value)
    return np.array(values)


def _lf_horizon(sym, x, tol):
    """Outer time past which P(L_t < x) = P(H_x > t) is below `tol`."""
    horizon = max(float(phi_prime_at_zero(sym)) * x, x)
    for _ in range(LBAR_DOUBLINGS):
        if solve_lf(sym, lambda z: 1.0, horizon, [x])[0] <= tol:
            return horizon
        horizon *= 2
    logger.warning('l̄_f tail at x=%g still above %g at t=%g', x, tol, horizon)
    return horizon


def solve_lbar(sym, f, x_grid, tol=1e-8):
    """
    l̄_f(x) = ∫₀^∞ l_f(t, x)dt by quadrature in t.

    The integral is cut where P(H_x > t) drops below `tol`.
    """
    prime = phi_prime_at_zero(sym)
    if is_infinite(prime):
        raise SpectralUnsupported(
            {'kind': 'l_f is not integrable in time when Φ′(0) is infinite'})
    values = []
    for x in x_grid:
        if x <= 0:
            values.append(0.0)
            continue
        horizon = _lf_horizon(sym, x, tol)
        points = [p for p in (float(prime) * x, x) if 0 < p < horizon]
        value, _ = integrate.quad(
            lambda t: solve_lf(sym, f, t, [x])[0], 0.0, horizon,
            points=points or None, limit=100)
        values.append(value)
    return np.array(values)


__all__ = [
    'project', 'apply_phi_laplacian', 'solve_space_nonlocal', 'relaxation',
    'solve_time_nonlocal', 'subordination_quadrature', 'solve_elliptic',
    'solve_hf', 'solve_lf', 'solve_hbar', 'solve_lbar', 'mixing_weights',
    'time_coefficients',
]
