from ..core.exceptions import DomainError, UnsupportedError


class SymbolDomainError(DomainError):
    default_detail = 'Symbol parameter or argument outside its domain'
    default_code = 'symbol_domain'


class SymbolUnsupported(UnsupportedError):
    default_detail = 'Quantity not available for this symbol kind'
