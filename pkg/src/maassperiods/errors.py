"""Exception hierarchy shared by all modules."""


class MaassPeriodsError(Exception):
    """Base class."""


class FieldMismatchError(MaassPeriodsError, ValueError):
    """Operands live in different quadratic fields."""


class RationalInputError(MaassPeriodsError, ValueError):
    """A quadratic irrational was required but a rational was given."""


class RangeError(MaassPeriodsError, ValueError):
    """Argument outside the box where accuracy is guaranteed."""


class GammaPoleError(MaassPeriodsError, ValueError):
    """Evaluation requested at a pole of a Gamma factor."""


class ReductionError(MaassPeriodsError, ArithmeticError):
    """Fundamental-domain reduction did not terminate within the step cap."""


class ConvergenceError(MaassPeriodsError, RuntimeError):
    """A numerical procedure failed to reach its tolerance."""


class NoRootError(ConvergenceError):
    """No sign change of the solver mismatch inside the bracket."""


class IllConditionedError(ConvergenceError):
    """Collocation system too ill-conditioned to trust."""


class DomainError(MaassPeriodsError, ValueError):
    """Route requested outside its domain of validity."""


class PoleError(MaassPeriodsError, ArithmeticError):
    """Evaluation requested on the pole lattice; carries the pole datum."""

    def __init__(self, message, pole=None):
        super().__init__(message)
        self.pole = pole


class SchemaError(MaassPeriodsError, ValueError):
    """Malformed coefficient or configuration file."""


class HeckeGateError(MaassPeriodsError, ValueError):
    """Coefficients violate the Hecke relations beyond tolerance."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals or {}
