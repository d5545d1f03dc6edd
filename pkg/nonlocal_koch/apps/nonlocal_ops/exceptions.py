from ..core.exceptions import DomainError, NumericError, UnsupportedError


class OperatorDomainError(DomainError):
    default_detail = 'Invalid input for a nonlocal operator'


class QuadratureError(NumericError):
    default_detail = 'Quadrature did not reach the requested tolerance'
    default_code = 'quadrature_failed'


class OperatorUnsupported(UnsupportedError):
    default_detail = 'Operator is not available for this symbol kind'
