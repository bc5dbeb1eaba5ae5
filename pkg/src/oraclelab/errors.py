"""Exception types shared across the lab."""


class OracleLabError(Exception):
    """Base class for all package errors."""


class WellFormednessError(OracleLabError):
    """A circuit violates a structural invariant (bad wire, bad opcode, ...)."""


class EncodingError(OracleLabError):
    """A bit string is not a valid canonical circuit encoding."""


class ArityError(OracleLabError):
    """An operation received an unacceptable number or shape of arguments."""


class SearchBudgetError(OracleLabError):
    """An exhaustive search would exceed the configured budget."""


class InstanceError(OracleLabError):
    """A learning instance violates its stated precondition."""


class GeometryError(OracleLabError):
    """A construction's geometry does not fit (e.g. class too large for the input space)."""


class ConfigError(OracleLabError):
    """A configuration record is invalid."""


class InternalInvariantError(OracleLabError):
    """A runtime certification that should be unconditionally true failed."""


class StalledError(OracleLabError):
    """The doubling-set (or step) search exhausted its budget without a certificate.

    Carries a diagnostic dict so callers can report whether the search was
    operating inside the regime where progress is guaranteed to exist.
    """

    def __init__(self, message: str, diagnostic: dict | None = None):
        super().__init__(message)
        self.diagnostic = diagnostic or {}
