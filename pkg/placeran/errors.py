from __future__ import annotations

from typing import Any, Optional, Sequence


class PlaceranError(Exception):
    """Base class for every error placeran reports to its caller

    Each error knows the process exit code the command line uses for it, and
    can render itself as a flat dictionary for the single-line JSON written
    to stderr.

    Args:
        message: Human readable description of the failure.
        details: Extra structured fields copied into `to_dict`.
    """

    exit_code = 1

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict[str, Any]:
        return {"error": type(self).__name__, "message": self.message, **self.details}


class ConfigError(PlaceranError):
    """Bad command line, configuration file or environment value"""


class CatalogError(PlaceranError):
    """Malformed or inconsistent DRC catalog"""


class TopologyError(PlaceranError):
    """Malformed topology file or a topology that cannot be planned"""


class ScenarioError(PlaceranError):
    """Invalid scenario specification or parameter table"""


class InfeasibleInstanceError(PlaceranError):
    """No placement satisfies the constraints"""

    exit_code = 2

    def __init__(self, message: str, rus: Sequence[str] = ()):
        super().__init__(message, rus=list(rus))
        self.rus = list(rus)


class BudgetExceededError(PlaceranError):
    """A stage stopped on its budget while a certified optimum was required"""

    exit_code = 3

    def __init__(self, message: str, stage: int, bound: Optional[int] = None):
        super().__init__(message, stage=stage, bound=bound)
        self.stage = stage
        self.bound = bound


class BruteForceGuardError(PlaceranError):
    """The oracle refuses instances whose candidate product is too large"""

    def __init__(self, product: int, limit: int):
        super().__init__(
            f"candidate product {product} exceeds the oracle guard {limit}",
            product=product,
            limit=limit,
        )
        self.product = product
        self.limit = limit


class LpSyntaxError(PlaceranError):
    """Syntax error found while reading an LP file"""

    def __init__(self, message: str, filename: str, line: int, column: int):
        super().__init__(
            f"Syntax Error = [{filename}:{line}:{column}] {message}",
            filename=filename,
            line=line,
            column=column,
        )
        self.filename = filename
        self.line = line
        self.column = column
