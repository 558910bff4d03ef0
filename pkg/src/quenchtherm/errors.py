"""Exception hierarchy shared by all modules."""


class QuenchError(Exception):
    """Base class for errors raised by quenchtherm."""


class DomainError(QuenchError, ValueError):
    """An argument lies outside the domain of the operation."""


class UnstableModeError(DomainError):
    """The minus normal mode is not oscillatory (Omega^2 + 2K <= 0)."""


class NotThermalError(DomainError):
    """A reduced state is not on the thermal curve within tolerance."""


class SingularJacobianError(QuenchError, ArithmeticError):
    """The thermalization Jacobian is (numerically) singular.

    Attributes
    ----------
    condition : float
        Condition number of the offending matrix.
    """

    def __init__(self, message, condition=float("inf")):
        super().__init__(message)
        self.condition = condition
