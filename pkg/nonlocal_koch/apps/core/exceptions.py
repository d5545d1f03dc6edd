import logging

from rest_framework.exceptions import APIException, ValidationError

logger = logging.getLogger(__name__)


class DomainError(APIException):
    status_code = 400
    default_detail = 'Argument outside the domain of the operation'
    default_code = 'domain_error'


class NumericError(APIException):
    status_code = 500
    default_detail = 'Numerical method did not converge'
    default_code = 'numeric_error'


class HorizonError(APIException):
    status_code = 400
    default_detail = 'Requested time lies beyond the simulated horizon'
    default_code = 'horizon_error'


class GeometryError(APIException):
    status_code = 400
    default_detail = 'Invalid geometry'
    default_code = 'geometry_error'


class UnsupportedError(APIException):
    status_code = 400
    default_detail = 'Operation is not available for this symbol kind'
    default_code = 'unsupported'


def core_exception_handler(exc):
    """
    Render a domain exception as an `errors` payload.

    Exceptions we do not know about are re-raised so tracebacks stay
    visible.
    """
    handlers = {
        'ValidationError': _handle_validation_error,
        'DomainError': _handle_generic_error,
        'NumericError': _handle_generic_error,
        'HorizonError': _handle_generic_error,
        'GeometryError': _handle_generic_error,
        'UnsupportedError': _handle_generic_error,
    }
    for klass in type(exc).__mro__:
        if klass.__name__ in handlers:
            return handlers[klass.__name__](exc)
    raise exc


def _handle_validation_error(exc):
    return {'errors': exc.detail}


def _handle_generic_error(exc):
    logger.debug('%s: %s', type(exc).__name__, exc.detail)
    return {
        'errors': {
            'code': exc.default_code,
            'detail': exc.detail,
        }
    }


__all__ = [
    'DomainError', 'NumericError', 'HorizonError', 'GeometryError',
    'UnsupportedError', 'ValidationError', 'core_exception_handler',
]
