"""Exception and warning types used across the package."""


class KinresError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameterError(KinresError, ValueError):
    """A physical parameter or argument is outside its allowed domain."""


class DataFormatError(KinresError, ValueError):
    """A data file violates its format contract."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        prefix = ""
        if path is not None:
            prefix += f"{path}: "
        if line is not None:
            prefix += f"line {line}: "
        super().__init__(prefix + message)


class CalibrationError(KinresError, RuntimeError):
    """Baseline calibration is impossible on the given trace."""


class NoResonanceError(KinresError, RuntimeError):
    """No resonance dip found in the trace."""


class FitDivergenceError(KinresError, RuntimeError):
    """The optimizer hit non-finite residuals and could not recover.

    Carries the last set of parameters that produced a finite residual,
    together with the corresponding cost, for post-mortem inspection.
    """

    def __init__(self, message, last_params=None, last_cost=None):
        self.last_params = last_params
        self.last_cost = last_cost
        super().__init__(message)


class OverlapWarning(UserWarning):
    """Multiplexed resonators are closer than the separation heuristic."""


class CalibrationWarning(UserWarning):
    """Baseline calibration ran on a trace that violates a soft precondition."""


class IllConditionedWarning(UserWarning):
    """The data cannot constrain all requested fit parameters."""


class ExtrapolationWarning(UserWarning):
    """A value was requested outside the range the model was built on."""
