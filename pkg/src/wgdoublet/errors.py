"""Exception hierarchy. Numerical failures carry diagnostics for partial reports."""


class WgDoubletError(Exception):
    pass


class NonFinite(WgDoubletError, ValueError):
    pass


class SmallnessViolation(WgDoubletError, ValueError):
    pass


class NonNormalized(WgDoubletError, ValueError):
    pass


class ConfigError(WgDoubletError, ValueError):
    """Invalid configuration; ``key`` is the dotted path of the offending entry."""

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)


class FormatError(WgDoubletError, ValueError):
    """Malformed input file; ``line`` is 1-based, or None for whole-file problems."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class NumericalFailure(WgDoubletError, RuntimeError):
    def __init__(self, message, diagnostics=None):
        self.diagnostics = dict(diagnostics or {})
        super().__init__(message)


class NonFiniteResidual(NumericalFailure):
    pass


class SingularNormalMatrix(NumericalFailure):
    def __init__(self, message, index=None, diagnostics=None):
        self.index = index
        super().__init__(message, diagnostics)


class ConvergenceFailure(NumericalFailure):
    pass


class DegenerateInit(NumericalFailure):
    pass


class InsufficientSpan(NumericalFailure):
    pass


class TooFewUsableRows(NumericalFailure):
    pass
