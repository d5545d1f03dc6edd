import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm


@dataclass(frozen=True)
class Estimate:
    """A Monte Carlo mean with its standard error."""
    mean: float
    se: float
    count: int
    censored: int = 0

    def confidence_interval(self, alpha=0.05):
        z = norm.ppf(1 - alpha / 2)
        return self.mean - z * self.se, self.mean + z * self.se

    def as_dict(self):
        return {
            'mean': self.mean,
            'se': self.se,
            'count': self.count,
            'censored': self.censored,
        }


def estimate(values, censored=0):
    """
    Mean and standard error of a sample.

    The sum is compensated so the result does not depend on the order in
    which chunks were produced.
    """
    values = np.asarray(values, dtype=float).ravel()
    count = values.size
    if count == 0:
        return Estimate(float('nan'), float('nan'), 0, censored)
    mean = math.fsum(values) / count
    if count < 2:
        return Estimate(mean, float('nan'), count, censored)
    variance = math.fsum((values - mean) ** 2) / (count - 1)
    return Estimate(mean, math.sqrt(variance / count), count, censored)


def combined_se(first, second):
    return math.hypot(first.se, second.se)


def z_score(first, second):
    """Separation of two independent estimates in combined SE units."""
    se = combined_se(first, second)
    if se == 0:
        return 0.0 if first.mean == second.mean else math.inf
    return (first.mean - second.mean) / se
