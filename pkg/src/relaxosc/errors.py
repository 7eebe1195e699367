"""Exception types. Every failure carries a stable machine-readable ``code``."""

from __future__ import annotations


class OscillatorError(Exception):
    code = "ERROR"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details

    def __str__(self) -> str:
        return f"{self.code}: {self.args[0]}"


class ValidationError(OscillatorError, ValueError):
    code = "INVALID_CONFIG"

    def __init__(self, violations):
        self.violations = list(violations)
        msg = "; ".join(f"{v.code} ({v.field}={v.value!r}): {v.message}" for v in self.violations)
        super().__init__(msg or "invalid configuration")
        if self.violations:
            self.code = self.violations[0].code


class CrossOverError(OscillatorError, ValueError):
    code = "CROSS_OVER"


class NegativePeriodError(OscillatorError, ValueError):
    code = "NEGATIVE_PERIOD"


class NegativeEstimateError(OscillatorError, ValueError):
    code = "NEGATIVE_ESTIMATE"


class NoConvergenceError(OscillatorError, RuntimeError):
    code = "NO_CONVERGENCE"


class SlewLimitedError(OscillatorError, ValueError):
    """Raised when a period sits on the slew branch and carries no R_x information."""

    code = "SLEW_LIMITED"


class NoOscillationError(OscillatorError, RuntimeError):
    code = "NO_OSCILLATION"


class SolverFailureError(OscillatorError, RuntimeError):
    code = "SOLVER_FAILURE"


class InsufficientCyclesError(OscillatorError, ValueError):
    code = "INSUFFICIENT_CYCLES"


class MisorderedEdgesError(OscillatorError, ValueError):
    code = "MISORDERED_EDGES"


class TimerOverflowError(OscillatorError, ValueError):
    code = "TIMER_OVERFLOW"


class InsufficientSamplesError(OscillatorError, ValueError):
    code = "INSUFFICIENT_SAMPLES"


class EmptyCatalogError(OscillatorError, ValueError):
    code = "EMPTY_CATALOG"


class GridCapError(OscillatorError, ValueError):
    code = "GRID_CAP_EXCEEDED"


class ConfigParseError(OscillatorError, ValueError):
    code = "CONFIG_PARSE"
