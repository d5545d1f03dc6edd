from ..core.exceptions import DomainError, GeometryError


class KochDomainError(DomainError):
    default_detail = 'Invalid prefractal construction parameters'


class SelfIntersectionError(GeometryError):
    default_detail = 'Boundary polyline intersects itself'
    default_code = 'self_intersection'
