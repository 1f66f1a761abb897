# exceptions.py - Custom exceptions for the Lie extension toolkit
from typing import Optional, Dict, Any


class LieExtensionException(Exception):
    """Base exception for the toolkit"""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}


class StructuralError(LieExtensionException):
    """Exception raised when an array or vector has the wrong shape"""

    def __init__(self, what: str, expected: Any, actual: Any, details: Optional[Dict[str, Any]] = None):
        message = f"Shape mismatch for {what}: expected {expected}, got {actual}"
        super().__init__(message, details)
        self.what = what
        self.expected = expected
        self.actual = actual


class ContractViolationError(LieExtensionException):
    """Exception raised when an operation's precondition does not hold"""

    def __init__(self, operation: str, reason: str, details: Optional[Dict[str, Any]] = None):
        message = f"{operation}: {reason}"
        super().__init__(message, details)
        self.operation = operation
        self.reason = reason


class NumericalFailureError(LieExtensionException):
    """Exception raised when a residual exceeds its tolerance where exactness is expected"""

    def __init__(self, quantity: str, residual: float, tolerance: float, details: Optional[Dict[str, Any]] = None):
        message = f"Numerical failure for {quantity}: residual {residual:.3e} exceeds tolerance {tolerance:.3e}"
        super().__init__(message, details)
        self.quantity = quantity
        self.residual = residual
        self.tolerance = tolerance


class ManifestException(LieExtensionException):
    """Base exception for manifest loading"""
    pass


class ManifestFormatError(ManifestException):
    """Exception raised when a manifest cannot be read or parsed"""

    def __init__(self, path: str, error: str, details: Optional[Dict[str, Any]] = None):
        message = f"Invalid manifest {path}: {error}"
        super().__init__(message, details)
        self.path = path
        self.error = error


class ManifestReferenceError(ManifestException):
    """Exception raised when a named entry cannot be resolved"""

    def __init__(self, kind: str, name: str, details: Optional[Dict[str, Any]] = None):
        message = f"Unresolved {kind} reference '{name}'"
        super().__init__(message, details)
        self.kind = kind
        self.name = name


class ConfigurationException(LieExtensionException):
    """Exception raised when configuration is invalid"""

    def __init__(self, config_key: str, error: str, details: Optional[Dict[str, Any]] = None):
        message = f"Configuration error for '{config_key}': {error}"
        super().__init__(message, details)
        self.config_key = config_key
        self.error = error
