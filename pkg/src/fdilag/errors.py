"""Exception hierarchy for the toolkit.

Every error belongs to one of three categories, which drive both the HTTP
status returned by the service and the CLI exit code:

* ``validation`` -- bad input data or arguments (exit 2, HTTP 422)
* ``numerical``  -- a computation could not be completed (exit 3, HTTP 500)
* ``network``    -- remote data retrieval failed (exit 4, HTTP 502)
"""

from __future__ import annotations


class ToolkitError(Exception):
    """Base class for all toolkit errors."""

    category = "validation"
    exit_code = 2


class DataValidationError(ToolkitError):
    category = "validation"
    exit_code = 2


class NumericalError(ToolkitError):
    category = "numerical"
    exit_code = 3


class NetworkError(ToolkitError):
    category = "network"
    exit_code = 4


# --- panel ingestion -------------------------------------------------------

class MissingColumnError(DataValidationError):
    pass


class NonNumericValueError(DataValidationError):
    pass


class DuplicateCountryYearError(DataValidationError):
    pass


class GapInsideWindowError(DataValidationError):
    pass


class UnmappedCountryError(DataValidationError):
    pass


class UnknownGroupLabelError(DataValidationError):
    pass


class ZeroVarianceSeriesError(DataValidationError):
    pass


# --- correlation -----------------------------------------------------------

class LengthMismatchError(DataValidationError):
    pass


class TooShortError(DataValidationError):
    pass


class ZeroVarianceError(DataValidationError):
    pass


class LagTooLargeError(DataValidationError):
    pass


class TooFewPairsError(DataValidationError):
    pass


# --- ranking and fitting ---------------------------------------------------

class EmptyInputError(DataValidationError):
    pass


class DomainError(DataValidationError):
    """Rank argument outside 1..N."""


class EmptyClusterError(DataValidationError):
    pass


class SingularJacobianError(NumericalError):
    pass


class NoConvergenceError(NumericalError):
    pass


class DegenerateDataError(NumericalError):
    pass


# --- remote retrieval ------------------------------------------------------

class HttpError(NetworkError):
    def __init__(self, status_code: int, message: str):
        super().__init__(f"HTTP {status_code}: {message}")
        self.status_code = status_code


class PaginationInconsistencyError(NetworkError):
    pass


class RateLimitedError(NetworkError):
    pass


class SchemaMismatchError(NetworkError):
    pass
