"""Exception hierarchy shared by all modules."""


class BergkitError(Exception):
    """Base class for every error raised by this package."""


class DomainError(BergkitError):
    """A point lies outside the domain an operation requires."""


class UnsupportedReductionError(BergkitError):
    """A radial reduction was requested for a non-Reinhardt domain or non-radial weight."""


class IntegrabilityError(BergkitError):
    """A weighted moment integral diverges."""


class QuadratureError(BergkitError):
    """A quadrature rule is empty or cannot integrate what was asked of it."""


class InfeasibleConstraintError(BergkitError):
    """Linear constraints admit no solution."""


class NotPositiveSemidefiniteError(BergkitError):
    """A Gram matrix has a negative pivot beyond tolerance."""


class DegenerateSystemError(BergkitError):
    """Every basis index was dropped, or a kernel/minimum integral is nonpositive."""


class PositivityError(BergkitError):
    """A weight took a nonpositive value."""


class BindingError(BergkitError):
    """A tabulated weight was used with a rule it is not bound to."""


class NotStrictlyPSHError(BergkitError):
    """A complex Hessian is not positive definite."""


class MismatchedWeightsError(BergkitError):
    """Weights do not transform as required by a biholomorphism."""


class IterationFailure(BergkitError):
    """A dynamical iteration broke down; ``step`` records where."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class ConfigError(BergkitError):
    """Configuration validation failed; ``errors`` lists every problem found."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
