"""
Domains a walker can move in, and one Euler step with boundary handling.

One-dimensional domains and rectangles reflect exactly: the Skorokhod
regulator of each coordinate is drawn from the Brownian-bridge maximum of
the step, so reflected paths and local time have the right law at every
dt. Disks and polygons reflect specularly and pick up local time
2·penetration per crossing.

Positions are float arrays in one dimension and complex arrays in two.
"""
import logging
import math
from collections import namedtuple

import numpy as np

from ..koch.models import PrefractalDomain
from .exceptions import WalkDomainError

logger = logging.getLogger(__name__)

BOUNDARY = 'boundary'
WALLS = 'walls'
LEFT = 'left'
RIGHT = 'right'

# max bounces resolved per polygon step
BOUNCE_LIMIT = 12
# step lengths beyond REACH_SIGMAS standard deviations are checked globally
REACH_SIGMAS = 8.0

StepOutcome = namedtuple(
    'StepOutcome', ['position', 'local', 'exited', 'exit_fraction'])


def _gaussian(dt, size, rng):
    return rng.normal(0.0, math.sqrt(2 * dt), size)


def _bridge_excursions(delta, dt, rng):
    """
    Maxima of the step path above and below its start.

    Both are drawn with one uniform per path from the bridge law
    P(max > m) = exp(−m(m − δ)/dt) of a variance-2 Brownian bridge.
    """
    log_u = np.log1p(-rng.random(delta.size))
    root = np.sqrt(delta ** 2 - 4 * dt * log_u)
    return (delta + root) / 2, (-delta + root) / 2


class Domain:
    """Common surface of the walker domains."""
    dim = 1
    edge_classes = (BOUNDARY,)

    def start_array(self, start, size):
        start = self.coerce(start)
        if not self.contains(np.atleast_1d(start))[0]:
            raise WalkDomainError({'start': '%r lies outside the domain' % (start,)})
        dtype = complex if self.dim == 2 else float
        return np.full(size, start, dtype=dtype)

    def coerce(self, point):
        if self.dim == 1:
            return float(np.asarray(point, dtype=float).ravel()[0])
        if isinstance(point, complex):
            return point
        values = np.asarray(point, dtype=float).ravel()
        if values.size != 2:
            raise WalkDomainError({'start': 'expected a point [x, y]'})
        return complex(values[0], values[1])

    def class_index(self, name):
        try:
            return self.edge_classes.index(name)
        except ValueError:
            raise WalkDomainError({'boundary': 'unknown edge class %r' % name})

    def describe(self):
        return {'type': type(self).__name__}


class Interval(Domain):
    """The interval [lower, upper]; `upper` may be infinite."""
    edge_classes = (LEFT, RIGHT)

    def __init__(self, lower=0.0, upper=1.0):
        if not lower < upper:
            raise WalkDomainError({'interval': 'need lower < upper'})
        self.lower = float(lower)
        self.upper = float(upper)

    def contains(self, points):
        points = np.asarray(points, dtype=float)
        return (points >= self.lower) & (points <= self.upper)

    def distance(self, points):
        return np.minimum(points - self.lower, self.upper - points)

    def step(self, x, dt, rng, absorbing):
        size = x.size
        delta = _gaussian(dt, size, rng)
        height, depth = _bridge_excursions(delta, dt, rng)
        to_left = x - self.lower
        to_right = self.upper - x
        near_left = to_left <= to_right
        excess = np.where(near_left, depth - to_left, height - to_right)
        gap = np.where(near_left, to_left, to_right)
        hit = excess > 0

        local = np.zeros((2, size))
        exited = np.zeros(size, dtype=bool)
        fraction = np.zeros(size)
        new = x + delta

        for index, side, sign in ((0, near_left, 1.0), (1, ~near_left, -1.0)):
            touched = hit & side
            if not touched.any():
                continue
            if absorbing[index]:
                exited |= touched
                fraction[touched] = gap[touched] / (gap[touched] + excess[touched])
                new[touched] = self.lower if index == 0 else self.upper
            else:
                new[touched] += sign * excess[touched]
                local[index, touched] = excess[touched]

        # the far side is only reachable on coarse grids
        live = ~exited
        for index, beyond, edge in ((0, new < self.lower, self.lower),
                                    (1, new > self.upper, self.upper)):
            beyond &= live
            if not beyond.any():
                continue
            overshoot = np.abs(new[beyond] - edge)
            if absorbing[index]:
                exited |= beyond
                travel = np.abs(x[beyond] - edge)
                fraction[beyond] = travel / (travel + overshoot)
                new[beyond] = edge
            else:
                new[beyond] = 2 * edge - new[beyond]
                local[index, beyond] += 2 * overshoot
        return StepOutcome(new, local, exited, fraction)

    def describe(self):
        return {'type': 'interval', 'lower': self.lower, 'upper': self.upper}


class HalfLine(Interval):
    """[0, ∞) with a single boundary point."""
    edge_classes = ('origin',)

    def __init__(self):
        super().__init__(0.0, math.inf)

    def step(self, x, dt, rng, absorbing):
        outcome = super().step(x, dt, rng, (absorbing[0], False))
        return outcome._replace(local=outcome.local[:1])

    def describe(self):
        return {'type': 'half_line'}


class Rectangle(Domain):
    """[x0, x1] × [y0, y1]; each coordinate reflects independently."""
    dim = 2

    def __init__(self, x0=0.0, y0=0.0, x1=1.0, y1=1.0):
        self.horizontal = Interval(x0, x1)
        self.vertical = Interval(y0, y1)

    @property
    def bounds(self):
        return (self.horizontal.lower, self.vertical.lower,
                self.horizontal.upper, self.vertical.upper)

    def contains(self, points):
        points = np.asarray(points, dtype=complex)
        return (self.horizontal.contains(points.real)
                & self.vertical.contains(points.imag))

    def distance(self, points):
        return np.minimum(self.horizontal.distance(points.real),
                          self.vertical.distance(points.imag))

    def step(self, x, dt, rng, absorbing):
        sides = (absorbing[0], absorbing[0])
        across = self.horizontal.step(x.real.copy(), dt, rng, sides)
        up = self.vertical.step(x.imag.copy(), dt, rng, sides)
        exited = across.exited | up.exited
        fraction = np.where(
            across.exited & up.exited,
            np.minimum(across.exit_fraction, up.exit_fraction),
            np.where(across.exited, across.exit_fraction, up.exit_fraction))
        local = (across.local.sum(axis=0) + up.local.sum(axis=0))[None, :]
        return StepOutcome(across.position + 1j * up.position, local,
                           exited, fraction)

    def describe(self):
        return {'type': 'rectangle', 'bounds': list(self.bounds)}


class Disk(Domain):
    dim = 2

    def __init__(self, center=0j, radius=1.0):
        if not radius > 0:
            raise WalkDomainError({'radius': 'must be positive'})
        self.center = self.coerce(center)
        self.radius = float(radius)

    @property
    def bounds(self):
        c, r = self.center, self.radius
        return (c.real - r, c.imag - r, c.real + r, c.imag + r)

    def contains(self, points):
        return np.abs(np.asarray(points, dtype=complex) - self.center) <= self.radius

    def distance(self, points):
        return self.radius - np.abs(points - self.center)

    def step(self, x, dt, rng, absorbing):
        size = x.size
        y = x + _gaussian(dt, size, rng) + 1j * _gaussian(dt, size, rng)
        offset = y - self.center
        r = np.abs(offset)
        outside = r > self.radius
        local = np.zeros((1, size))
        exited = np.zeros(size, dtype=bool)
        fraction = np.zeros(size)
        d0 = self.distance(x)
        if absorbing[0]:
            d1 = self.radius - r
            crossed = outside | (
                rng.random(size) < np.exp(-d0 * np.maximum(d1, 0) / dt))
            exited = crossed
            fraction[crossed] = np.where(
                outside[crossed], d0[crossed] / (d0[crossed] + np.abs(d1[crossed])),
                0.5)
            y[crossed] = self.center + self.radius * offset[crossed] / np.maximum(
                r[crossed], 1e-300)
        elif outside.any():
            scale = (2 * self.radius - r[outside]) / r[outside]
            y[outside] = self.center + offset[outside] * scale
            local[0, outside] = 2 * (r[outside] - self.radius)
        return StepOutcome(y, local, exited, fraction)

    def describe(self):
        return {'type': 'disk', 'center': [self.center.real, self.center.imag],
                'radius': self.radius}


class SegmentIndex:
    """
    Uniform grid over a segment soup.

    Each cell lists every segment within `reach` of it, so a move of
    length below `reach` can only meet segments listed for its start cell.
    """

    def __init__(self, starts, ends, reach):
        self.starts = starts
        self.ends = ends
        self.reach = reach
        points = np.concatenate([starts, ends])
        self.x0 = points.real.min() - reach
        self.y0 = points.imag.min() - reach
        self.size = reach
        self.nx = int(math.ceil((points.real.max() + reach - self.x0) / reach)) + 1
        self.ny = int(math.ceil((points.imag.max() + reach - self.y0) / reach)) + 1

        lo_x = np.minimum(starts.real, ends.real) - reach
        hi_x = np.maximum(starts.real, ends.real) + reach
        lo_y = np.minimum(starts.imag, ends.imag) - reach
        hi_y = np.maximum(starts.imag, ends.imag) + reach
        i0 = np.floor((lo_x - self.x0) / reach).astype(int)
        i1 = np.floor((hi_x - self.x0) / reach).astype(int)
        j0 = np.floor((lo_y - self.y0) / reach).astype(int)
        j1 = np.floor((hi_y - self.y0) / reach).astype(int)

        cells, owners = [], []
        for di in range(int((i1 - i0).max()) + 1):
            for dj in range(int((j1 - j0).max()) + 1):
                keep = (i0 + di <= i1) & (j0 + dj <= j1)
                segment = np.flatnonzero(keep)
                cells.append((i0[keep] + di) * self.ny + (j0[keep] + dj))
                owners.append(segment)
        cells = np.concatenate(cells)
        owners = np.concatenate(owners)
        order = np.argsort(cells, kind='stable')
        self.indices = owners[order]
        counts = np.bincount(cells, minlength=self.nx * self.ny)
        self.indptr = np.concatenate([[0], np.cumsum(counts)])
        logger.debug('segment index: %dx%d cells, %d entries',
                     self.nx, self.ny, self.indices.size)

    def cell_of(self, points):
        i = np.clip(np.floor((points.real - self.x0) / self.size).astype(int),
                    0, self.nx - 1)
        j = np.clip(np.floor((points.imag - self.y0) / self.size).astype(int),
                    0, self.ny - 1)
        return i * self.ny + j

    def counts(self, cells):
        return self.indptr[cells + 1] - self.indptr[cells]

    def pairs(self, cells):
        """(owner, segment) pairs listing the candidates of each cell."""
        counts = self.counts(cells)
        owners = np.repeat(np.arange(cells.size), counts)
        first = np.repeat(self.indptr[cells] - np.cumsum(counts) + counts, counts)
        return owners, self.indices[np.arange(owners.size) + first]


def _cross(a, b):
    return (np.conj(a) * b).imag


def _point_segment_distance(points, starts, ends):
    direction = ends - starts
    length = np.abs(direction) ** 2
    t = np.clip(((np.conj(direction) * (points - starts)).real
                 / np.where(length > 0, length, 1.0)), 0.0, 1.0)
    return np.abs(points - (starts + t * direction))


class PolygonDomain(Domain):
    """
    A simple polygon, optionally with reflecting interior walls.

    Built from a `PrefractalDomain` or directly from a counterclockwise
    vertex array. Wall segments always reflect and carry no local time.
    """
    dim = 2
    edge_classes = (BOUNDARY, WALLS)

    def __init__(self, vertices, walls=None, source=None):
        self.vertices = np.asarray(vertices, dtype=complex)
        if self.vertices.size < 3:
            raise WalkDomainError({'vertices': 'a polygon needs three vertices'})
        walls = np.zeros((0, 2), complex) if walls is None else np.asarray(
            walls, dtype=complex).reshape(-1, 2)
        self.walls = walls
        self.source = source
        self.boundary_count = self.vertices.size
        self.starts = np.concatenate([self.vertices, walls[:, 0]])
        self.ends = np.concatenate([np.roll(self.vertices, -1), walls[:, 1]])
        self.kinds = np.concatenate([
            np.zeros(self.boundary_count, dtype=int),
            np.ones(len(walls), dtype=int)])
        self._indexes = {}

    @classmethod
    def from_prefractal(cls, domain):
        if not isinstance(domain, PrefractalDomain):
            raise WalkDomainError({'domain': 'expected a prefractal domain'})
        return cls(domain.vertices, domain.walls, source=domain)

    @property
    def bounds(self):
        return (float(self.vertices.real.min()), float(self.vertices.imag.min()),
                float(self.vertices.real.max()), float(self.vertices.imag.max()))

    @property
    def bounding_box(self):
        points = np.concatenate([self.vertices, self.walls.ravel()])
        return (float(points.real.min()), float(points.imag.min()),
                float(points.real.max()), float(points.imag.max()))

    def contains(self, points):
        """Even-odd rule against the boundary polygon."""
        points = np.atleast_1d(np.asarray(points, dtype=complex))
        a = self.vertices
        b = np.roll(a, -1)
        inside = np.zeros(points.size, dtype=bool)
        for index, point in enumerate(points):
            straddles = (a.imag > point.imag) != (b.imag > point.imag)
            with np.errstate(divide='ignore', invalid='ignore'):
                crossing = a.real + (point.imag - a.imag) * (
                    b.real - a.real) / (b.imag - a.imag)
            inside[index] = np.count_nonzero(straddles & (point.real < crossing)) % 2
            if not inside[index]:
                distance = _point_segment_distance(point, a, b).min()
                inside[index] = distance < 1e-12
        return inside

    def index_for(self, dt):
        reach = REACH_SIGMAS * math.sqrt(2 * dt) * math.sqrt(2)
        key = round(reach, 15)
        if key not in self._indexes:
            self._indexes[key] = SegmentIndex(self.starts, self.ends, reach)
        return self._indexes[key]

    def step(self, x, dt, rng, absorbing):
        """
        One step. Killing edges get a Brownian-bridge crossing correction.
        """
        size = x.size
        index = self.index_for(dt)
        move = (_gaussian(dt, size, rng) + 1j * _gaussian(dt, size, rng))
        position = x + move
        local = np.zeros((2, size))
        exited = np.zeros(size, dtype=bool)
        fraction = np.zeros(size)

        cells = index.cell_of(x)
        far = np.abs(move) >= index.reach
        near = np.flatnonzero((index.counts(cells) > 0) | far)
        if near.size == 0:
            return StepOutcome(position, local, exited, fraction)
        if far.any():
            logger.debug('%d long steps checked against every segment',
                         int(far.sum()))

        owners, segments = index.pairs(cells[near])
        for slot in np.flatnonzero(far[near]):
            # rare: very long move, test every segment
            keep = owners != slot
            everything = np.arange(self.starts.size)
            owners = np.concatenate([owners[keep], np.full(everything.size, slot)])
            segments = np.concatenate([segments[keep], everything])

        start = x[near].copy()
        remaining = move[near].copy()
        travelled = np.zeros(near.size)
        length = np.abs(move[near])
        dead = np.zeros(near.size, dtype=bool)
        hits = np.zeros((2, near.size))
        last = np.full(near.size, -1)
        active = np.ones(near.size, dtype=bool)

        for _ in range(BOUNCE_LIMIT):
            live = active[owners]
            if not live.any():
                break
            o, s = owners[live], segments[live]
            a, b = self.starts[s], self.ends[s]
            r = remaining[o]
            edge = b - a
            denom = _cross(r, edge)
            offset = a - start[o]
            with np.errstate(divide='ignore', invalid='ignore'):
                t = _cross(offset, edge) / denom
                u = _cross(offset, r) / denom
            valid = ((denom != 0) & (t > 1e-12) & (t <= 1) & (u >= 0) & (u <= 1)
                     & (s != last[o]))
            if not valid.any():
                break
            t_best = np.full(near.size, np.inf)
            np.minimum.at(t_best, o[valid], t[valid])
            chosen = valid & (t == t_best[o])
            slots, first = np.unique(o[chosen], return_index=True)
            hit_segment = s[chosen][first]
            t_hit = t_best[slots]
            active[:] = False

            kind = self.kinds[hit_segment]
            edge = self.ends[hit_segment] - self.starts[hit_segment]
            unit = edge / np.abs(edge)
            point = start[slots] + t_hit * remaining[slots]
            rest = (1 - t_hit) * remaining[slots]
            travelled[slots] += t_hit * np.abs(remaining[slots])

            killed = (kind == 0) & bool(absorbing[0])
            if killed.any():
                gone = slots[killed]
                dead[gone] = True
                fraction_ = travelled[gone] / np.maximum(length[gone], 1e-300)
                start[gone] = point[killed]
                remaining[gone] = 0
                fraction[near[gone]] = np.clip(fraction_, 0.0, 1.0)
            bounce = ~killed
            if bounce.any():
                moving = slots[bounce]
                penetration = np.abs(_cross(unit[bounce], rest[bounce]))
                hits[kind[bounce], moving] += 2 * penetration
                start[moving] = point[bounce]
                remaining[moving] = unit[bounce] ** 2 * np.conj(rest[bounce])
                last[moving] = hit_segment[bounce]
                active[moving] = True
        else:
            if active.any():
                logger.warning('bounce limit reached for %d paths',
                               int(active.sum()))

        position[near] = start + remaining
        local[:, near] = hits
        exited[near] = dead

        if absorbing[0]:
            self._bridge_kill(x, position, near, owners, segments, exited,
                              fraction, dt, rng)
        return StepOutcome(position, local, exited, fraction)

    def _bridge_kill(self, x, position, near, owners, segments, exited,
                     fraction, dt, rng):
        """
        Brownian-bridge crossing correction: kill paths whose bridge touched
        the boundary between grid points.
        """
        boundary = self.kinds[segments] == 0
        if not boundary.any():
            return
        o, s = owners[boundary], segments[boundary]
        d0 = np.full(near.size, np.inf)
        d1 = np.full(near.size, np.inf)
        a, b = self.starts[s], self.ends[s]
        np.minimum.at(d0, o, _point_segment_distance(x[near][o], a, b))
        np.minimum.at(d1, o, _point_segment_distance(position[near][o], a, b))
        survivors = ~exited[near]
        chance = np.exp(-d0 * d1 / dt)
        touched = survivors & (rng.random(near.size) < chance)
        if touched.any():
            exited[near[touched]] = True
            fraction[near[touched]] = 0.5

    def describe(self):
        description = {'type': 'polygon', 'segments': int(self.boundary_count),
                       'walls': int(len(self.walls))}
        if self.source is not None:
            description.update(m=self.source.m, level=self.source.level,
                               orientation=self.source.orientation)
        return description


def build_domain(descriptor):
    """Domain from a JSON descriptor or a prefractal domain."""
    if isinstance(descriptor, Domain):
        return descriptor
    if isinstance(descriptor, PrefractalDomain):
        return PolygonDomain.from_prefractal(descriptor)
    kind = descriptor.get('type')
    if kind == 'interval':
        return Interval(descriptor.get('lower', 0.0), descriptor.get('upper', 1.0))
    if kind == 'half_line':
        return HalfLine()
    if kind == 'rectangle':
        return Rectangle(*descriptor.get('bounds', (0.0, 0.0, 1.0, 1.0)))
    if kind == 'disk':
        return Disk(descriptor.get('center', (0.0, 0.0)),
                    descriptor.get('radius', 1.0))
    if kind == 'polygon':
        vertices = np.asarray(descriptor['vertices'], dtype=float)
        walls = np.asarray(descriptor.get('walls', []), dtype=float)
        return PolygonDomain(
            vertices[:, 0] + 1j * vertices[:, 1],
            (walls[..., 0] + 1j * walls[..., 1]).reshape(-1, 2)
            if walls.size else None)
    raise WalkDomainError({'domain': 'unknown domain type %r' % kind})
