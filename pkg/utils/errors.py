"""
Exception hierarchy shared by every eoattn package.

Each error carries the process exit code the CLI maps it to:
1 for user/config/data errors, 2 for numerical failures.
"""


class EoAttnError(Exception):
    """Base class for all eoattn errors"""

    exit_code = 1


class UserError(EoAttnError):
    """Bad input, bad config or bad file"""

    exit_code = 1


class NumericalError(EoAttnError):
    """A numerical routine failed to produce a usable result"""

    exit_code = 2


# ---------------------------------------------------------
# mzm-core
# ---------------------------------------------------------
class NonConvergenceError(NumericalError):
    """Transfer fit hit its iteration cap with the residual above tolerance"""

    def __init__(self, message: str, residual_norm: float = float('nan'), iterations: int = 0):
        super().__init__(message)
        self.residual_norm = residual_norm
        self.iterations = iterations


class DegenerateDataError(UserError, ValueError):
    pass


class WindowOutOfRangeError(UserError, ValueError):
    pass


class DegenerateRangeError(UserError, ValueError):
    pass


# ---------------------------------------------------------
# eo-activations
# ---------------------------------------------------------
class EmptyInputError(UserError, ValueError):
    pass


class MissingRngError(UserError, ValueError):
    """Noise was requested but no random source was supplied"""


class DegenerateDomainError(UserError, ValueError):
    pass


# ---------------------------------------------------------
# nn-kernel
# ---------------------------------------------------------
class ShapeMismatchError(UserError, ValueError):
    pass


class IndexOutOfRangeError(UserError, IndexError):
    pass


class DivergenceError(NumericalError):
    """Training loss became non-finite"""

    def __init__(self, message: str, step: int = -1, loss: float = float('nan')):
        super().__init__(message)
        self.step = step
        self.loss = loss


# ---------------------------------------------------------
# hw-perf
# ---------------------------------------------------------
class UnsupportedNError(UserError, ValueError):
    pass


# ---------------------------------------------------------
# sigproc
# ---------------------------------------------------------
class NonIntegralSpsError(UserError, ValueError):
    pass


class CutoffAboveNyquistError(UserError, ValueError):
    pass


class ZeroFactorError(UserError, ValueError):
    pass


class EmptyWindowError(UserError, ValueError):
    pass


class LengthMismatchError(UserError, ValueError):
    pass


class ZeroReferenceError(UserError, ValueError):
    pass


class ParseError(UserError, ValueError):
    """A text file could not be parsed; `line` is 1-based when known"""

    def __init__(self, message: str, path: str = '', line: int = 0):
        location = f"{path}:{line}: " if path and line else (f"{path}: " if path else "")
        super().__init__(f"{location}{message}")
        self.path = path
        self.line = line


class NonUniformSamplingError(UserError, ValueError):
    pass


# ---------------------------------------------------------
# cli
# ---------------------------------------------------------
class ConfigError(UserError, ValueError):
    pass


class FigureError(UserError, ValueError):
    pass


__all__ = [
    'EoAttnError', 'UserError', 'NumericalError',
    'NonConvergenceError', 'DegenerateDataError', 'WindowOutOfRangeError', 'DegenerateRangeError',
    'EmptyInputError', 'MissingRngError', 'DegenerateDomainError',
    'ShapeMismatchError', 'IndexOutOfRangeError', 'DivergenceError',
    'UnsupportedNError',
    'NonIntegralSpsError', 'CutoffAboveNyquistError', 'ZeroFactorError', 'EmptyWindowError',
    'LengthMismatchError', 'ZeroReferenceError', 'ParseError', 'NonUniformSamplingError',
    'ConfigError', 'FigureError',
]
