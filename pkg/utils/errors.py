"""
Errors Module
Exception hierarchy shared by the numeric library, the cache and the harness
"""


class MomentLabError(Exception):
    """Base class for every error raised by moment-lab"""


class DomainError(MomentLabError, ValueError):
    """An argument violates an operation's precondition"""


class StripError(DomainError):
    """The shift alpha lies outside the strip a formula is valid in"""


class PoleError(MomentLabError, ArithmeticError):
    """Evaluation hit a pole of Gamma or zeta"""


class ConvergenceError(MomentLabError, ArithmeticError):
    """A quadrature, continued fraction or series failed to converge"""


class ExtrapolationError(MomentLabError, ArithmeticError):
    """Symmetric alpha -> 0 extrapolation did not settle"""

    def __init__(self, message: str, gap: float):
        super().__init__(message)
        self.gap = gap


class LValueAccuracyError(MomentLabError):
    """An L-value record is not accurate enough to enter a moment"""

    def __init__(self, d: int, abs_error: float, threshold: float):
        super().__init__(
            f"L-value for d={d} has abs_error {abs_error:.3e} above {threshold:.1e}"
        )
        self.d = d
        self.abs_error = abs_error
        self.threshold = threshold


class DegenerateFitError(MomentLabError, ValueError):
    """Not enough distinct points for a log-log regression"""


class ConfigError(MomentLabError, ValueError):
    """Experiment configuration could not be parsed"""
