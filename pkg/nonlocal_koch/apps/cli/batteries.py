"""
The analytic identity battery run by `manage.py verify`.

Every check computes a value and the value it must equal; a check passes
when they agree within its tolerance. Inequalities report how far they
are violated against zero.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, special

from ..nonlocal_ops.models import SampledFunction
from ..nonlocal_ops.utils import (
    caputo_dzherbashian, caputo_fabrizio, marchaud_minus, mittag_leffler,
    riemann_liouville_minus, sonine_convolution, sonine_pair, young_bound,
)
from ..spectral.models import EigenBasis
from ..spectral.utils import solve_time_nonlocal, subordination_quadrature
from ..subordinate.densities import density_h, density_l
from ..symbols.models import BernsteinSymbol
from ..symbols.utils import (
    check_bernstein_shape, eval_phi, levy_tail, phi_prime_at_zero,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Check:
    name: str
    description: str
    tolerance: float
    compute: Callable

    def run(self, tolerance=None):
        tolerance = self.tolerance if tolerance is None else tolerance
        value, expected = self.compute()
        deviation = abs(value - expected)
        passed = bool(deviation <= tolerance)
        if not passed:
            logger.warning('check %s failed: |%r - %r| = %.3g > %.3g',
                           self.name, value, expected, deviation, tolerance)
        return {
            'name': self.name,
            'description': self.description,
            'value': value,
            'expected': expected,
            'deviation': deviation,
            'tolerance': tolerance,
            'passed': passed,
        }


def _laplace_of_tail(sym, lam):
    body = lambda z: math.exp(-lam * z) * levy_tail(sym, z)  # noqa: E731
    return (integrate.quad(body, 0, 1, limit=200)[0]
            + integrate.quad(body, 1, math.inf, limit=200)[0])


def tail_reconstruction():
    """Φ(λ)/λ = drift + ∫e^{−λz}φ̄(z)dz; worst error over the grid."""
    worst = 0.0
    for sym in (BernsteinSymbol.gamma(1, 2), BernsteinSymbol.caputo_fabrizio(0.5),
                BernsteinSymbol.tempered(2.0)):
        for lam in (0.5, 1.0, 2.0):
            rebuilt = sym.drift + _laplace_of_tail(sym, lam)
            worst = max(worst, abs(eval_phi(sym, lam) / lam - rebuilt))
    return worst, 0.0


def sonine_identity():
    worst = 0.0
    for alpha in (0.25, 0.5, 0.75):
        pair = sonine_pair(BernsteinSymbol.stable(alpha))
        worst = max(worst, abs(sonine_convolution(pair, 1.0) - 1))
    return worst, 0.0


def l_at_zero():
    """l(z, 0) = φ̄(z) for the stable and Caputo-Fabrizio clocks."""
    worst = 0.0
    for sym in (BernsteinSymbol.stable(0.5), BernsteinSymbol.caputo_fabrizio(0.5)):
        worst = max(worst, abs(density_l(sym, 1.0, 0.0) - levy_tail(sym, 1.0)))
    return worst, 0.0


def stable_density_ratio():
    """h(v, z)/l(z, v) = αv/z for the 1/2-stable clock."""
    worst = 0.0
    for v, z in ((1.0, 2.0), (0.5, 1.5)):
        sym = BernsteinSymbol.stable(0.5)
        ratio = density_h(sym, v, z) / density_l(sym, z, v)
        worst = max(worst, abs(ratio - 0.5 * v / z))
    return worst, 0.0


def caputo_power():
    root = SampledFunction.from_callable(
        lambda s: s ** 0.5 / special.gamma(1.5), 1.0, 2001)
    return caputo_dzherbashian(BernsteinSymbol.stable(0.5), root, 1.0), 1.0


def caputo_fabrizio_limits():
    square = SampledFunction.from_callable(lambda s: s * s, 1.0, 1001)
    upper = abs(caputo_fabrizio(0.999, square, 1.0) - 2.0)
    lower = abs(caputo_fabrizio(0.001, square, 1.0) - 1.0)
    return max(upper, lower), 0.0


def operator_agreement():
    """Marchaud, Riemann-Liouville and Caputo forms of the same operator."""
    worst = 0.0
    wave = SampledFunction.from_callable(math.sin, 2.0, 4001)
    for sym in (BernsteinSymbol.stable(0.5), BernsteinSymbol.gamma(1, 2),
                BernsteinSymbol.caputo_fabrizio(0.5)):
        for x in (0.5, 1.0, 2.0):
            marchaud = marchaud_minus(sym, math.sin, x)
            worst = max(worst,
                        abs(marchaud - riemann_liouville_minus(sym, math.sin, x)),
                        abs(marchaud - caputo_dzherbashian(sym, wave, x)))
    return worst, 0.0


def young_inequality():
    """Excess of ∫|𝔇^Φ u| over Φ′(0)∫|u′|, zero when the bound holds."""
    wave = SampledFunction.from_callable(math.sin, 2.0, 2001)
    excess = 0.0
    for sym in (BernsteinSymbol.gamma(1, 2), BernsteinSymbol.caputo_fabrizio(0.5)):
        lhs, rhs = young_bound(sym, wave)
        excess = max(excess, lhs - rhs)
    return excess, 0.0


def mittag_leffler_half():
    """E_{1/2}(−1) = e·erfc(1)."""
    return mittag_leffler(0.5, -1.0), math.e * special.erfc(1.0)


def time_nonlocal_mode():
    basis = EigenBasis.interval(math.pi, modes=4)
    value = solve_time_nonlocal(BernsteinSymbol.stable(0.5), basis, np.sin, 1.0,
                                [math.pi / 2])[0]
    return value, 0.4275836


def dual_methods():
    """Talbot relaxation against subordination quadrature, Gamma(1, 2)."""
    basis = EigenBasis.interval(math.pi, modes=6)
    sym = BernsteinSymbol.gamma(1, 2)

    def f(x):
        return np.sin(x) + 0.5 * np.sin(3 * x)
    points = [0.5, math.pi / 2, 2.5]
    talbot = solve_time_nonlocal(sym, basis, f, 0.5, points)
    mixed = subordination_quadrature(sym, basis, f, 0.5, points)
    return float(np.max(np.abs(talbot - mixed))), 0.0


def symbol_shapes():
    """Number of failed Bernstein shape checks over the shipped kinds."""
    failures = 0
    for sym in (BernsteinSymbol.stable(0.5), BernsteinSymbol.gamma(1, 2),
                BernsteinSymbol.caputo_fabrizio(0.5),
                BernsteinSymbol.drifted_cf(1.0, 0.5),
                BernsteinSymbol.telegraph_sum(0.25),
                BernsteinSymbol.tempered(2.0), BernsteinSymbol.linear()):
        failures += sum(not ok for ok in check_bernstein_shape(sym).values())
    return float(failures), 0.0


def gamma_mean():
    return phi_prime_at_zero(BernsteinSymbol.gamma(1, 2)), 0.5


CHECKS = {check.name: check for check in (
    Check('tail_reconstruction', 'Φ rebuilt from its Lévy tail', 1e-6,
          tail_reconstruction),
    Check('sonine_identity', 'κ∗ℓ = 1 for stable pairs', 1e-6, sonine_identity),
    Check('l_at_zero', 'density of L at the origin is the Lévy tail', 1e-4,
          l_at_zero),
    Check('stable_density_ratio', 'h(v, z)/l(z, v) = αv/z', 1e-4,
          stable_density_ratio),
    Check('caputo_power', 'D^{1/2} of s^{1/2}/Γ(3/2) is one', 1e-3, caputo_power),
    Check('caputo_fabrizio_limits', 'α → 1 gives u′, α → 0 gives u − u(0)',
          1e-2, caputo_fabrizio_limits),
    Check('operator_agreement', 'Marchaud, Riemann-Liouville and Caputo forms',
          1e-3, operator_agreement),
    Check('young_bound', 'Young-type L¹ bound', 1e-9, young_inequality),
    Check('mittag_leffler_half', 'E_{1/2}(−1) = e·erfc(1)', 1e-9,
          mittag_leffler_half),
    Check('time_nonlocal_mode', 'single-mode time-nonlocal decay', 1e-6,
          time_nonlocal_mode),
    Check('dual_methods', 'Talbot against subordination quadrature', 1e-4,
          dual_methods),
    Check('symbol_shapes', 'Bernstein shape of every kind', 0.0, symbol_shapes),
    Check('gamma_mean', 'Φ′(0) of Gamma(1, 2)', 1e-12, gamma_mean),
)}


def run_battery(names=None, tolerance=None, tolerances=None):
    """
    Run the named checks, or all of them when `names` is None.

    `tolerance` overrides every check; `tolerances` overrides single ones.
    """
    tolerances = tolerances or {}
    names = list(CHECKS) if names is None else list(names)
    results = []
    for name in names:
        override = tolerances.get(name, tolerance)
        logger.info('running check %s', name)
        results.append(CHECKS[name].run(override))
    failures = sum(not result['passed'] for result in results)
    return {
        'checks': results,
        'count': len(results),
        'failures': failures,
        'passed': failures == 0,
    }
