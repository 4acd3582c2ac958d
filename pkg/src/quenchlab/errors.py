"""Exception hierarchy for quenchlab."""


class QuenchlabError(Exception):
    """Base class for every error raised by the package."""


class InvalidParameters(QuenchlabError, ValueError):
    pass


class BetaOutsideWindow(QuenchlabError, ValueError):
    pass


class RegimeNotApplicable(QuenchlabError, ValueError):
    pass


class DegenerateConstant(QuenchlabError, ValueError):
    pass


class SingularSystem(QuenchlabError, ValueError):
    pass


class CflViolation(QuenchlabError):
    def __init__(self, dt, dt_max):
        super().__init__(f"dt={dt:.6g} exceeds the stability limit {dt_max:.6g}")
        self.dt = dt
        self.dt_max = dt_max


class NewtonDivergence(QuenchlabError):
    pass


class MaxStepsExceeded(QuenchlabError):
    pass


class MonotonicityViolation(QuenchlabError):
    def __init__(self, t, x, gap):
        super().__init__(f"ordering violated at t={t:.6g}, x={x:.6g} by {gap:.3e}")
        self.t = t
        self.x = x
        self.gap = gap


class InsufficientSeries(QuenchlabError, ValueError):
    pass


SeriesTooShort = InsufficientSeries


class NotApplicable(QuenchlabError, ValueError):
    pass


class GridMismatch(QuenchlabError, ValueError):
    pass


class ParseError(QuenchlabError, ValueError):
    def __init__(self, line, reason):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class ValidationError(QuenchlabError, ValueError):
    def __init__(self, key, reason):
        super().__init__(f"{key}: {reason}")
        self.key = key
        self.reason = reason


class NoData(QuenchlabError):
    pass
