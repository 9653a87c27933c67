"""Exception types raised across the package."""


class ConeMetricError(Exception):
    """Base class for all package errors."""


class InvalidDivisor(ConeMetricError, ValueError):
    pass


class TwoIntegers(ConeMetricError):
    """Exactly two cone orders are integers; no metric of any class exists."""


class PoleHit(ConeMetricError, ZeroDivisionError):
    pass


class DegenerateDerivative(ConeMetricError):
    pass


class StepUnderflow(ConeMetricError, RuntimeError):
    pass


class PathTooClose(ConeMetricError, ValueError):
    pass


class NotUnitarizable(ConeMetricError):
    pass


class NoInvariantForm(NotUnitarizable):
    """No positive definite form is preserved by the monodromy."""


class ReducibleInput(ConeMetricError):
    pass


class Indeterminate(ConeMetricError):
    pass


class NoSolution(ConeMetricError):
    """No certified root set.

    ``proven`` is True when nonexistence follows from an exact argument and
    False when a numerical search merely came up empty.
    """

    def __init__(self, message, proven=False):
        super().__init__(message)
        self.proven = proven


class IntegrationObstruction(ConeMetricError):
    pass


class ParityError(ConeMetricError, ValueError):
    pass


class SingularityTooClose(ConeMetricError, ValueError):
    pass


class FitDiverged(ConeMetricError):
    pass


class ConditionViolated(ConeMetricError):
    pass


class NonUnitaryMonodromy(ConeMetricError):
    pass
