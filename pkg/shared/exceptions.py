"""
Custom exceptions and exception handling for the application.

Provides consistent error handling across all modules.
"""

import logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_USAGE = 2
EXIT_TIMEOUT = 3


class BaseApplicationException(Exception):
    """Base exception for all application-specific exceptions."""

    default_message = "An application error occurred"
    default_code = "application_error"
    exit_code = EXIT_USAGE

    def __init__(self, message=None, code=None, exit_code=None):
        self.message = message or self.default_message
        self.code = code or self.default_code
        if exit_code is not None:
            self.exit_code = exit_code
        super().__init__(self.message)


class ValidationException(BaseApplicationException):
    """Raised when validation fails."""

    default_message = "Validation failed"
    default_code = "validation_error"


class NotFoundException(BaseApplicationException):
    """Raised when a requested resource is not found."""

    default_message = "Resource not found"
    default_code = "not_found"


class ConflictException(BaseApplicationException):
    """Raised when options conflict with each other or with the input."""

    default_message = "Conflicting options"
    default_code = "conflict"


class NetworkValidationError(ValidationException):
    """Raised when a candidate network violates one or more network axioms."""

    default_message = "Network violates the network axioms"
    default_code = "invalid_network"

    def __init__(self, violations, message=None):
        self.violations = list(violations)
        if message is None:
            message = "; ".join(str(v) for v in self.violations) or self.default_message
        super().__init__(message)


class NetworkFileError(ValidationException):
    """Raised when a network file cannot be parsed or fails its schema."""

    default_message = "Malformed network file"
    default_code = "network_file"

    def __init__(self, message=None, diagnostics=None):
        self.diagnostics = list(diagnostics or [])
        super().__init__(message)


class AlphabetError(ValidationException):
    """Raised for illegal alphabet sizes or arithmetic on non-field alphabets."""

    default_message = "Invalid alphabet"
    default_code = "alphabet"


class ArityMismatchError(ValidationException):
    """Raised when a network code or codeword does not fit the network."""

    default_message = "Arity mismatch between code and network"
    default_code = "arity_mismatch"


class OuterCodeError(ValidationException):
    """Raised when an outer code is empty, has repeated or mis-sized codewords."""

    default_message = "Invalid outer code"
    default_code = "outer_code"


class CertificateFormatError(ValidationException):
    """Raised when a certificate file is malformed."""

    default_message = "Malformed certificate"
    default_code = "certificate_format"


class ModelSizeError(ValidationException):
    """Raised when a model would exceed the configured table-size guard."""

    default_message = "Model exceeds the configured size limit"
    default_code = "model_too_large"


class OracleTooLargeError(ValidationException):
    """Raised when the brute-force oracle would exceed its check budget."""

    default_message = "Instance too large for the brute-force oracle"
    default_code = "oracle_too_large"


class InternalConsistencyError(BaseApplicationException):
    """Raised when a result fails its own re-check. Always an internal bug."""

    default_message = "Internal consistency check failed"
    default_code = "internal_error"
    exit_code = 70


class BoundViolationError(InternalConsistencyError):
    """Raised when a result exceeds the min-cut bound."""

    default_message = "Result exceeds the min-cut bound"
    default_code = "bound_violation"


def handle_cli_exception(exc):
    """
    Translate an application exception into a diagnostic and an exit code.

    Provides a consistent error format across all subcommands.

    Returns:
        Tuple of (list of diagnostic lines, exit code)
    """
    if isinstance(exc, BaseApplicationException):
        logger.error(f"{exc.__class__.__name__}: {exc.message}")
        lines = [f"error[{exc.code}]: {exc.message}"]
        for item in getattr(exc, 'violations', []):
            lines.append(f"  - {item}")
        for item in getattr(exc, 'diagnostics', []):
            lines.append(f"  - {item}")
        return lines, exc.exit_code

    logger.exception("Unhandled exception occurred", exc_info=exc)
    return [f"error[internal_error]: {exc}"], 70
