"""Exception types shared across the package."""


class JetStructureError(ValueError):
    """Jets with mismatched dimension/degree, or an index outside the table."""


class SingularJetError(ArithmeticError):
    """Inverse, log or fractional power of a jet whose constant term vanishes."""


class SingularMatrixError(ArithmeticError):
    """Jet-valued matrix with no usable pivot."""


class DomainError(ValueError):
    """A point lies outside the domain a provider or map is defined on."""


class PositivityError(ArithmeticError):
    """A metric that must be positive definite failed Cholesky."""


class ConsistencyError(RuntimeError):
    """Two independent computational routes disagree beyond tolerance."""


class ConvergenceError(RuntimeError):
    """An iterative solver did not converge."""


class PseudoconvexityError(ValueError):
    """Levi form is not positive definite on the complex tangent space."""
