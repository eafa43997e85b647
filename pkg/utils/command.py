"""
Operation execution utilities.
Runs a library operation with logging and maps its outcome to a CLI exit code.
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional

from cyclo_slv.exceptions import CycloSlvError, FalsificationError
from utils.constants import EXIT_FALSIFICATION, EXIT_OK, EXIT_PRECONDITION

logger = logging.getLogger(__name__)


@dataclass
class OperationResult:
    """
    Outcome of a single operation.

    Attributes:
        exit_code: 0 on success, 1 on a precondition violation, 2 on a falsification event
        value: Return value of the operation, None on failure
        error: Machine-readable error object on failure
    """
    exit_code: int
    value: Any = None
    error: Optional[Dict[str, Any]] = None

    @property
    def ok(self) -> bool:
        return self.exit_code == EXIT_OK


def error_payload(error: Exception) -> Dict[str, Any]:
    payload = {"error": type(error).__name__, "message": str(error)}
    if isinstance(error, FalsificationError) and error.details:
        payload["details"] = error.details
    return payload


class OperationRunner:
    """
    Executes Python operations and translates library exceptions into exit codes.
    """

    def __init__(self, context: Optional[Dict[str, Any]] = None):
        """
        Initialize the runner.

        Args:
            context: Values logged with every failure (subcommand, seed, ...)
        """
        self.context = context or {}

    def run(
        self,
        operation: Callable[..., Any],
        args: List[Any],
        kwargs: Dict[str, Any],
        description: str
    ) -> OperationResult:
        """
        Execute a Python function with proper logging and error handling.

        Args:
            operation: Python function to execute
            args: Positional arguments for the function
            kwargs: Keyword arguments for the function
            description: Description of the operation for logging

        Returns:
            OperationResult carrying the exit code and either the value or the error payload
        """
        logger.info(f"Running {description}...")

        try:
            value = operation(*args, **kwargs)
        except FalsificationError as e:
            logger.critical(f"{description}: falsification event: {e} {self.context}")
            return OperationResult(EXIT_FALSIFICATION, error=error_payload(e))
        except CycloSlvError as e:
            logger.error(f"{description} failed: {e}")
            return OperationResult(EXIT_PRECONDITION, error=error_payload(e))

        logger.info(f"{description} completed successfully")
        return OperationResult(EXIT_OK, value=value)
