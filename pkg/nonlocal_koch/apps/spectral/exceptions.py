from ..core.exceptions import DomainError, NumericError, UnsupportedError


class SpectralDomainError(DomainError):
    default_detail = 'Invalid input for a spectral solver'


class RelaxationError(NumericError):
    default_detail = 'Relaxation function of a mode could not be computed'
    default_code = 'relaxation_failed'


class SpectralUnsupported(UnsupportedError):
    default_detail = 'Solver is not available for this symbol kind'
