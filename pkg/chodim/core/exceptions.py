#!/usr/bin/env python3
"""
Custom exception classes for chodim
"""

from typing import Any, Dict, List, Optional


class ChodimBaseException(Exception):
    """Base exception class for chodim"""

    exit_code: int = 6

    def __init__(self, message: str, error_code: Optional[str] = None, details: Optional[Dict[str, Any]] = None):
        self.message = message
        self.error_code = error_code
        self.details = details or {}
        super().__init__(self.message)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "success": False,
            "message": self.message,
            "error_code": self.error_code,
            "details": self.details,
        }


class ConfigurationError(ChodimBaseException):
    """Raised when a run configuration or setting is invalid"""

    exit_code = 1

    def __init__(self, message: str, field_errors: Optional[Dict[str, str]] = None):
        super().__init__(message, "CONFIGURATION_ERROR", {"field_errors": field_errors or {}})
        self.field_errors = field_errors or {}


class DimensionMismatchError(ChodimBaseException):
    """Raised when operator, frame and form dimensions disagree"""

    def __init__(self, message: str, expected: Optional[int] = None, actual: Optional[int] = None):
        super().__init__(message, "DIMENSION_MISMATCH", {"expected": expected, "actual": actual})
        self.expected = expected
        self.actual = actual


class DegenerateFrameError(ChodimBaseException):
    """Raised when a frame spans fewer than d dimensions"""

    def __init__(self, wedge_norm: float, tolerance: float):
        super().__init__(
            f"Frame is degenerate: wedge norm {wedge_norm:.3e} <= {tolerance:.1e}",
            "DEGENERATE_FRAME",
            {"wedge_norm": wedge_norm, "tolerance": tolerance},
        )
        self.wedge_norm = wedge_norm


class BlowUpError(ChodimBaseException):
    """Raised when an integration produces non-finite or runaway values"""

    exit_code = 4

    def __init__(self, time: float, message: str = "Numerical blow-up", norm: Optional[float] = None):
        super().__init__(f"{message} at t={time:.6g}", "NUMERICAL_BLOWUP", {"time": time, "norm": norm})
        self.time = time
        self.norm = norm


class MetricInvalidError(ChodimBaseException):
    """Raised when a time-dependent metric fails to be positive definite"""

    exit_code = 3

    def __init__(self, message: str, lambda_min: Optional[float] = None, time: Optional[float] = None):
        super().__init__(message, "METRIC_INVALID", {"lambda_min": lambda_min, "time": time})
        self.lambda_min = lambda_min
        self.time = time


class HypothesisValidationError(ChodimBaseException):
    """Raised when a sampled splitting hypothesis is violated"""

    exit_code = 3

    def __init__(self, message: str, witness: Any = None, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, "HYPOTHESIS_FAILED", details)
        self.witness = witness


class BoundViolationError(ChodimBaseException):
    """Raised when a measured volume exceeds a bound it must satisfy"""

    exit_code = 3

    def __init__(self, failed_checks: List[str], report: Any = None):
        super().__init__(
            f"Dimension report fails: {', '.join(failed_checks)}", "BOUND_VIOLATED", {"failed_checks": failed_checks}
        )
        self.failed_checks = failed_checks
        self.report = report


class InternalError(ChodimBaseException):
    """Raised for failures that no configuration change can fix"""

    exit_code = 6

    def __init__(self, message: str = "An unexpected error occurred", details: Optional[Dict[str, Any]] = None):
        super().__init__(message, "INTERNAL_ERROR", details)


class InconclusiveError(ChodimBaseException):
    """Raised when no tested dimension contracts volumes"""

    exit_code = 2

    def __init__(self, message: str, report: Any = None):
        super().__init__(message, "INCONCLUSIVE")
        self.report = report


class ResidualCheckError(ChodimBaseException):
    """Raised when a residual suite exceeds its threshold"""

    exit_code = 5

    def __init__(self, suite: str, residual: float, threshold: float):
        super().__init__(
            f"{suite} residual {residual:.3e} exceeds threshold {threshold:.1e}",
            "RESIDUAL_CHECK_FAILED",
            {"suite": suite, "residual": residual, "threshold": threshold},
        )
        self.suite = suite
        self.residual = residual
        self.threshold = threshold


class InsufficientSamplesError(ChodimBaseException):
    """Raised when a series is too short for the requested operation"""

    exit_code = 1

    def __init__(self, required: int, actual: int):
        super().__init__(
            f"At least {required} samples required, got {actual}",
            "INSUFFICIENT_SAMPLES",
            {"required": required, "actual": actual},
        )
