class KnotToolkitError(Exception):
    """Base class for every error raised by the toolkit."""


class NotPIntegralError(KnotToolkitError, ValueError):
    pass


class DimensionMismatchError(KnotToolkitError, ValueError):
    pass


class NotASubLatticeError(KnotToolkitError, ValueError):
    pass


class InconsistentParametersError(KnotToolkitError, ValueError):
    pass


class ConstructionUndefinedError(KnotToolkitError, ValueError):
    pass


class ActionUndefinedError(KnotToolkitError, ValueError):
    pass


class UnknownNameError(KnotToolkitError, ValueError):
    pass


class ConfigError(KnotToolkitError, ValueError):
    pass


class OracleBudgetError(KnotToolkitError, RuntimeError):
    pass


class DepthInsufficientError(KnotToolkitError, RuntimeError):
    pass
