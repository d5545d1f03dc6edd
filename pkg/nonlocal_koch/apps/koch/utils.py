import logging
import math
from collections import defaultdict
from functools import lru_cache

import numpy as np

from .exceptions import KochDomainError, SelfIntersectionError
from .models import (
    INWARD, ORIENTATIONS, OUTWARD, P1, P2, PrefractalDomain, SimilitudeFamily,
    base_polygon,
)

logger = logging.getLogger(__name__)

CHAIN_TOLERANCE = 1e-12


@lru_cache(maxsize=128)
def build_family(ell):
    """ψ₁..ψ₄ for the Koch curve of contraction ratio 1/ℓ, ℓ ∈ (2, 4)."""
    ell = float(ell)
    if not 2 < ell < 4:
        raise KochDomainError({'ell': 'must lie in (2, 4)'})
    theta = math.asin(math.sqrt(ell * (4 - ell)) / 2)
    rotation = complex(math.cos(theta), math.sin(theta))
    apex = 0.5 + 1j * math.sqrt(1 / ell - 0.25)
    maps = (
        (1 / ell, 0j),
        (rotation / ell, 1 / ell),
        (rotation.conjugate() / ell, apex),
        (1 / ell, 1 - 1 / ell),
    )
    family = SimilitudeFamily(ell=ell, maps=maps)
    _check_chaining(family)
    return family


def _check_chaining(family):
    images = [(family.apply(i, P1), family.apply(i, P2)) for i in range(4)]
    gaps = [abs(images[0][0] - P1), abs(images[3][1] - P2)]
    gaps += [abs(images[i][1] - images[i + 1][0]) for i in range(3)]
    if max(gaps) > CHAIN_TOLERANCE:
        raise KochDomainError(
            {'ell': 'maps for ℓ=%g do not chain (gap %.3g)' % (family.ell,
                                                                max(gaps))})


def curve_from_realization(realization):
    """
    Vertices of Υ^{(ξ₁)}∘…∘Υ^{(ξₙ)} applied to the unit segment.

    `realization` is the tuple ξ₁..ξₙ of ℓ values; the result has 4ⁿ+1
    complex vertices from P₁ to P₂.
    """
    points = np.array([P1, P2])
    for ell in reversed(realization):
        family = build_family(ell)
        pieces = [family.apply(0, points)]
        pieces += [family.apply(i, points)[1:] for i in (1, 2, 3)]
        points = np.concatenate(pieces)
    points[0], points[-1] = P1, P2
    return points


def generate_curve(env, n, rng=None):
    return curve_from_realization(env.realize(n, rng))


def curve_length(realization):
    return 4 ** len(realization) / math.prod(realization)


def _side_curves(m, realization, orientation):
    curve = curve_from_realization(realization)
    if orientation == OUTWARD:
        curve = curve.conjugate()
    corners = base_polygon(m)
    sides = []
    for start, end in zip(corners, np.roll(corners, -1)):
        sides.append(start + (end - start) * curve[:-1])
    return np.concatenate(sides)


def build_domain(m, env, n, orientation, rng=None, validate=True):
    """
    Regular m-gon whose sides are the level-n curve of one realization of
    `env`. Outward curves bulge away from the polygon interior.
    """
    if m < 3:
        raise KochDomainError({'m': 'a polygon needs at least three sides'})
    if orientation not in ORIENTATIONS:
        raise KochDomainError({'orientation': 'must be inward or outward'})
    realization = env.realize(n, rng)
    vertices = _side_curves(m, realization, orientation)
    domain = PrefractalDomain(m=m, orientation=orientation, level=n,
                              realization=realization, vertices=vertices)
    if validate:
        check_simple(domain)
    logger.debug('built %s domain m=%d n=%d sigma=%g', orientation, m, n,
                 domain.sigma)
    return domain


def mouth_indices(n, k):
    """
    Vertex offsets of the mouths of level-k bumps within one side.

    Returns pairs (a, b): the bump of a level-(k−1) cell spans vertices
    a..b and the straight mouth joins them.
    """
    block = 4 ** (n - k + 1)
    quarter = 4 ** (n - k)
    starts = block * np.arange(4 ** (k - 1))
    return np.stack([starts + quarter, starts + 3 * quarter], axis=1)


def build_trapped_domain(env, n, opening, m=4, rng=None, validate=True):
    """
    Outward domain whose bumps are closed by walls across their mouths.

    `opening(k)` is the fraction of the level-k mouth left open, centered.
    """
    domain = build_domain(m, env, n, OUTWARD, rng=rng, validate=validate)
    per_side = 4 ** n
    walls = []
    openings = []
    for k in range(1, n + 1):
        fraction = float(opening(k))
        if not 0 < fraction <= 1:
            raise KochDomainError(
                {'opening': 'opening fraction at level %d must lie in (0, 1]' % k})
        openings.append(fraction)
        if fraction == 1:
            continue
        pairs = mouth_indices(n, k)
        for side in range(m):
            offsets = side * per_side + pairs
            start = domain.vertices[offsets[:, 0]]
            end = domain.vertices[offsets[:, 1]]
            span = (1 - fraction) / 2 * (end - start)
            walls.append(np.stack([start, start + span], axis=1))
            walls.append(np.stack([end - span, end], axis=1))
    walls = np.concatenate(walls) if walls else np.zeros((0, 2), complex)
    trapped = PrefractalDomain(
        m=m, orientation=OUTWARD, level=n, realization=domain.realization,
        vertices=domain.vertices, walls=walls, openings=tuple(openings))
    if validate and walls.size:
        check_simple(trapped)
    return trapped


def _segment_cells(start, end, size):
    low_x = np.floor(np.minimum(start.real, end.real) / size).astype(int)
    high_x = np.floor(np.maximum(start.real, end.real) / size).astype(int)
    low_y = np.floor(np.minimum(start.imag, end.imag) / size).astype(int)
    high_y = np.floor(np.maximum(start.imag, end.imag) / size).astype(int)
    return low_x, high_x, low_y, high_y


def _cross(a, b):
    return a.real * b.imag - a.imag * b.real


def _intersecting(p, q, r, s, tol):
    """Closed segments [p, q] and [r, s] meet, vectorized."""
    d1 = _cross(q - p, r - p)
    d2 = _cross(q - p, s - p)
    d3 = _cross(s - r, p - r)
    d4 = _cross(s - r, q - r)
    proper = (d1 * d2 < -tol) & (d3 * d4 < -tol)

    def on_segment(a, b, c, d):
        return (np.abs(d) <= tol) & (
            np.minimum(a.real, b.real) - tol <= c.real) & (
            c.real <= np.maximum(a.real, b.real) + tol) & (
            np.minimum(a.imag, b.imag) - tol <= c.imag) & (
            c.imag <= np.maximum(a.imag, b.imag) + tol)
    touching = (on_segment(p, q, r, d1) | on_segment(p, q, s, d2)
                | on_segment(r, s, p, d3) | on_segment(r, s, q, d4))
    return proper | touching


def find_intersections(starts, ends, closed_count=None, limit=10):
    """
    Pairs of segments that meet where they should not.

    The first `closed_count` segments form a closed polygon and may only
    meet their two neighbours; the remaining ones (walls) may share an
    endpoint with anything.

    Segments are bucketed on a uniform grid of the longest segment length,
    so only nearby pairs are tested.
    """
    lengths = np.abs(ends - starts)
    size = float(lengths.max())
    tol = 1e-12 * size * size
    buckets = defaultdict(list)
    low_x, high_x, low_y, high_y = _segment_cells(starts, ends, size)
    for index in range(starts.size):
        for cx in range(low_x[index], high_x[index] + 1):
            for cy in range(low_y[index], high_y[index] + 1):
                buckets[cx, cy].append(index)
    pairs = set()
    for members in buckets.values():
        for i, first in enumerate(members):
            for second in members[i + 1:]:
                pairs.add((min(first, second), max(first, second)))
    if not pairs:
        return []
    pairs = np.array(sorted(pairs))
    i, j = pairs[:, 0], pairs[:, 1]
    eps = 1e-9 * size
    if closed_count is None:
        closed_count = starts.size
    shared = ((np.abs(starts[i] - starts[j]) < eps)
              | (np.abs(starts[i] - ends[j]) < eps)
              | (np.abs(ends[i] - starts[j]) < eps)
              | (np.abs(ends[i] - ends[j]) < eps))
    polygon = j < closed_count
    neighbours = (j == i + 1) | ((i == 0) & (j == closed_count - 1))
    skip = np.where(polygon, neighbours, shared)
    i, j = i[~skip], j[~skip]
    hits = _intersecting(starts[i], ends[i], starts[j], ends[j], tol)
    return list(zip(i[hits].tolist(), j[hits].tolist()))[:limit]


def check_simple(domain):
    """Raise SelfIntersectionError unless boundary and walls are simple."""
    starts, ends = domain.segments
    closed_count = starts.size
    if domain.walls.size:
        starts = np.concatenate([starts, domain.walls[:, 0]])
        ends = np.concatenate([ends, domain.walls[:, 1]])
    hits = find_intersections(starts, ends, closed_count)
    if hits:
        raise SelfIntersectionError({
            'segments': hits,
            'detail': '%s m=%d level=%d boundary is not simple' % (
                domain.orientation, domain.m, domain.level),
        })


def dimension_estimate(realization):
    """ln 4ⁿ / ln ℓ^{(ξ|n)}."""
    if not realization:
        raise KochDomainError({'n': 'need at least one generation'})
    return len(realization) * math.log(4) / math.fsum(
        math.log(ell) for ell in realization)


def dimension_limit(env):
    """ln 4 / E[ln ℓ_ξ₁]."""
    return math.log(4) / env.mean_log_ell()


def box_counting_dimension(points, scales):
    """Slope of log N(ε) against log 1/ε over the given box sizes."""
    points = np.asarray(points)
    if np.iscomplexobj(points):
        points = np.stack([points.real, points.imag], axis=1)
    scales = np.asarray(scales, dtype=float)
    if scales.size < 2 or np.any(scales <= 0):
        raise KochDomainError({'scales': 'need two or more positive box sizes'})
    counts = []
    for scale in scales:
        boxes = np.floor(points / scale).astype(np.int64)
        counts.append(np.unique(boxes, axis=0).shape[0])
    slope, _ = np.polyfit(np.log(1 / scales), np.log(counts), 1)
    return float(slope)


def _check_word(word):
    if any(symbol not in (1, 2, 3, 4) for symbol in word):
        raise KochDomainError({'word': 'symbols must be 1, 2, 3 or 4'})


def volume_measure_weight(word):
    """μ of the cell ψ_{w|n}(K): every level-n cell carries 4⁻ⁿ."""
    _check_word(word)
    return 4.0 ** -len(word)


def cell_polyline(curve, word):
    """Vertices of the cell addressed by `word` on a finer curve."""
    _check_word(word)
    segments = curve.size - 1
    level = round(math.log(segments, 4))
    if 4 ** level != segments or len(word) > level:
        raise KochDomainError(
            {'word': 'curve must have 4ⁿ segments with n ≥ word length'})
    start = 0
    for depth, symbol in enumerate(word, start=1):
        start += (symbol - 1) * 4 ** (level - depth)
    width = 4 ** (level - len(word))
    return curve[start:start + width + 1]


__all__ = [
    'INWARD', 'OUTWARD', 'build_family', 'generate_curve', 'curve_from_realization',
    'curve_length',
    'build_domain', 'build_trapped_domain', 'mouth_indices', 'check_simple',
    'find_intersections', 'dimension_estimate', 'dimension_limit',
    'box_counting_dimension', 'volume_measure_weight', 'cell_polyline',
]
