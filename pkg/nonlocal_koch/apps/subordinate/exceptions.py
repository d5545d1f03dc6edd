from ..core.exceptions import DomainError, HorizonError, NumericError


class PathDomainError(DomainError):
    default_detail = 'Invalid subordinator path parameters'


class PathHorizonError(HorizonError):
    default_detail = 'Level lies beyond the simulated path; extend the path'
    default_code = 'path_horizon'


class InversionError(NumericError):
    default_detail = 'Laplace inversion failed'
    default_code = 'inversion_failed'
