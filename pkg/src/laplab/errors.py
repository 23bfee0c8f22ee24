"""Exception hierarchy."""


class LapLabError(Exception):
    """Base class for all laplab errors."""


class OutOfRangeError(LapLabError, ValueError):
    """A tabulated quantity was queried outside its table."""


class DomainError(LapLabError, ValueError):
    """Spectral parameter or argument outside the admissible domain."""


class NumericalAccuracyError(LapLabError, ArithmeticError):
    """A numerical tolerance could not be met."""


class ResonanceError(NumericalAccuracyError):
    """Wronskian too small: spectral parameter too close to an eigenvalue."""


class PlanError(LapLabError, ValueError):
    """An experiment plan violates one of its invariants."""


class ConfigError(LapLabError, ValueError):
    """A configuration file could not be parsed or validated."""
