"""
Named test functions for run configs.

A config names a function as a string ("sine") or an object with
parameters ({"name": "sine", "k": 2}). Functions are vectorized and
return plain floats for scalar input, so the same callable feeds
projections, convolution quadratures and walker expectations.
"""
import math

import numpy as np

from .exceptions import ConfigError


def _shaped(x, values):
    if np.ndim(x) == 0:
        return float(values)
    return values


def one(params):
    return lambda x: _shaped(x, np.ones_like(np.asarray(x, dtype=float)))


def sine(params):
    k = params.get('k', 1.0)
    return lambda x: _shaped(x, np.sin(k * np.asarray(x, dtype=float)))


def parabola(params):
    """x(ℓ − x), zero at both ends of (0, ℓ)."""
    length = params.get('length', math.pi)

    def body(x):
        x = np.asarray(x, dtype=float)
        return _shaped(x, x * (length - x))
    return body


def bump(params):
    """Smooth bump supported on (a, b)."""
    a, b = params.get('a', 0.25), params.get('b', 0.75)
    if not a < b:
        raise ConfigError({'function': 'bump needs a < b'})

    def body(x):
        x = np.asarray(x, dtype=float)
        inside = (x > a) & (x < b)
        s = np.where(inside, (2 * x - a - b) / (b - a), 0.0)
        values = np.where(inside, np.exp(1 - 1 / np.where(inside, 1 - s * s, 1.0)), 0.0)
        return _shaped(x, values)
    return body


def power(params):
    p = params.get('p', 1.0)

    def body(x):
        x = np.asarray(x, dtype=float)
        return _shaped(x, np.where(x > 0, np.abs(x) ** p, 0.0))
    return body


def sine_product(params):
    """sin(kπx/a)·sin(jπy/b) on the rectangle (0, a) × (0, b)."""
    a, b = params.get('a', 1.0), params.get('b', 1.0)
    k, j = params.get('k', 1.0), params.get('j', 1.0)

    def body(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return _shaped(x, np.sin(k * np.pi * x / a) * np.sin(j * np.pi * y / b))
    return body


CATALOGUE = {
    'one': (one, 1),
    'sine': (sine, 1),
    'parabola': (parabola, 1),
    'bump': (bump, 1),
    'power': (power, 1),
    'sine_product': (sine_product, 2),
}


def resolve_function(spec):
    """(callable, dimension) for a catalogue entry."""
    if isinstance(spec, str):
        spec = {'name': spec}
    if not isinstance(spec, dict):
        raise ConfigError({'function': 'expected a name or an object'})
    name = spec.get('name')
    if name not in CATALOGUE:
        raise ConfigError({'function': 'unknown function %r; choose from %s' % (
            name, ', '.join(sorted(CATALOGUE)))})
    factory, dim = CATALOGUE[name]
    try:
        params = {key: float(value) for key, value in spec.items()
                  if key != 'name'}
    except (TypeError, ValueError):
        raise ConfigError({'function': 'parameters must be numbers'})
    return factory(params), dim


def on_positions(function, dim):
    """Adapt a catalogue function to walker positions (complex in 2-D)."""
    if dim == 1:
        return function
    return lambda z: function(np.real(z), np.imag(z))
