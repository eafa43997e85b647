"""
Exception hierarchy for the cyclotomic / SLV toolkit.

Precondition failures are ordinary input errors and map to CLI exit code 1.
Falsification errors signal an outcome that a proven statement rules out
and map to exit code 2.
"""

from typing import Any, Dict, Optional


class CycloSlvError(Exception):
    """Base class for all toolkit errors"""


class PreconditionError(CycloSlvError, ValueError):
    """An operation was called outside its documented domain"""


class ScaleGuardError(PreconditionError):
    """A configured size ceiling would be exceeded"""

    def __init__(self, what: str, value: int, limit: int):
        self.what = what
        self.value = value
        self.limit = limit
        super().__init__(f"{what} = {value} exceeds the configured limit {limit}")


class FalsificationError(CycloSlvError, RuntimeError):
    """A computed instance contradicts a statement that must hold"""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        self.details = details or {}
        super().__init__(message)


class DivisibilityError(PreconditionError):
    """A required cyclotomic divisibility Phi_s | A does not hold"""

    def __init__(self, s: int, message: Optional[str] = None):
        self.s = s
        super().__init__(message or f"Phi_{s} does not divide the multiset")


class CoprimalityError(PreconditionError):
    """A required coprimality between a prime and |A| does not hold"""
