from typing import Any, Optional


class SkyrmeError(Exception):
    """Base class for every error raised by the simulator."""


class DomainError(SkyrmeError, ValueError):
    pass


class ContractError(SkyrmeError, ValueError):
    pass


class ConfigError(SkyrmeError):
    pass


class UndefinedRatioError(SkyrmeError):
    pass


class QuadratureError(SkyrmeError):
    """Adaptive quadrature ran out of panels before meeting its tolerance.

    `best_estimate` holds the finest estimate that was computed (an array for
    batched calls), `error` the last difference between refinement levels.
    """

    def __init__(self, message: str, *, best_estimate: Any = None, error: Any = None,
                 rows: Optional[Any] = None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error = error
        self.rows = rows


class BlowupSuspected(SkyrmeError):
    def __init__(self, message: str, *, index: int = -1, r: float = float("nan"),
                 t: float = float("nan")):
        super().__init__(message)
        self.index = index
        self.r = r
        self.t = t
