"""Exception hierarchy shared by every module of the package."""


class CQEDError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(CQEDError, ValueError):
    pass


class NotPositive(CQEDError, ValueError):
    """A block density operator has an eigenvalue below the negative tolerance."""


class ZeroTrace(CQEDError, ValueError):
    pass


class NotDensityOperator(CQEDError, ValueError):
    pass


class PoleCollision(CQEDError, ValueError):
    """An eigenvalue sits on (or within the guard of) a continuum grid energy."""


class ZeroCoupling(CQEDError, ValueError):
    pass


class ZeroProbabilityBranch(CQEDError, ValueError):
    """Conditioning on an outcome whose probability is (numerically) zero."""


class AssumptionViolated(CQEDError, ValueError):
    """The negligible discrete cross-transition assumption does not hold."""


class ProbabilityOutOfRange(CQEDError, ValueError):
    """A raw probability left [0, 1] by more than the numerical tolerance."""


class ConvergenceFailure(CQEDError, RuntimeError):
    pass


class ConfigError(CQEDError, ValueError):
    pass
