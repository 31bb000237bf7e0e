"""
Custom exceptions for nanoctl
"""

from typing import Any, Dict, List, Optional


class NanoCtlError(Exception):
    """Base exception for nanoctl"""

    def __init__(
        self,
        message: str,
        code: str = "UNKNOWN",
        details: Optional[Dict[str, Any]] = None,
    ):
        self.message = message
        self.code = code
        self.details = details or {}
        super().__init__(self.message)


class ConfigurationError(NanoCtlError):
    """Configuration file errors"""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, "CONFIG_ERROR", details)


class ValidationError(NanoCtlError):
    """Violated preconditions on domain inputs"""

    def __init__(self, message: str, errors: Optional[List[Dict[str, Any]]] = None):
        self.errors = errors or []
        super().__init__(message, "VALIDATION_ERROR", {"errors": self.errors})


class SnapshotFormatError(NanoCtlError):
    """Malformed tumour snapshot or oxygen sidecar file"""

    def __init__(self, message: str, line: int = 0, details: Optional[Dict[str, Any]] = None):
        details = details or {}
        self.line = line
        if line:
            details["line"] = line
        super().__init__(message, "SNAPSHOT_FORMAT_ERROR", details)


class ScenarioError(NanoCtlError):
    """Scenario extraction or scenario file errors"""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, "SCENARIO_ERROR", details)


class SimulationError(NanoCtlError):
    """Tissue or tumour simulation failures"""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, "SIMULATION_ERROR", details)


class EvaluationError(NanoCtlError):
    """Fitness evaluation failures, carrying the evaluation context"""

    def __init__(
        self,
        message: str,
        generation: Optional[int] = None,
        individual: Optional[int] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        details = details or {}
        if generation is not None:
            details["generation"] = generation
        if individual is not None:
            details["individual"] = individual
        super().__init__(message, "EVALUATION_ERROR", details)
