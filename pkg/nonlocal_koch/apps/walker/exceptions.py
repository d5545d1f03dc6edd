from ..core.exceptions import DomainError, GeometryError


class WalkDomainError(DomainError):
    default_detail = 'Invalid walk setup'


class UnreachableTargetError(GeometryError):
    default_detail = 'Every path was censored before reaching the target'
    default_code = 'unreachable_target'
