from ..core.exceptions import DomainError


class ConfigError(DomainError):
    default_detail = 'Invalid run configuration'
    default_code = 'config_error'


class ConfigParseError(ConfigError):
    default_detail = 'Run configuration is not valid JSON'
    default_code = 'config_parse_error'


class GridMismatchError(DomainError):
    default_detail = 'Monte Carlo and spectral grids do not match'
    default_code = 'grid_mismatch'


class OutputPathError(DomainError):
    default_detail = 'Output directory is not writable'
    default_code = 'unwritable_output'
