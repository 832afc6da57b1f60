"""Exception hierarchy shared by every module of the package."""


class SchroederError(Exception):
    """Base class for all errors raised by this package."""


class DomainExceeded(SchroederError):
    """Evaluation requested beyond the certified domain of a map."""


class NotExpanding(SchroederError):
    """A map failed an expansion or monotonicity check."""


class NoBracket(SchroederError):
    """Root finding could not bracket a solution (value outside image)."""


class LengthMismatch(SchroederError):
    """Jet sequences of incompatible length."""


class InsufficientJets(SchroederError):
    """Jet data of too low order for the requested reduction."""


class DomainError(SchroederError):
    """Argument outside the admissible domain (e.g. x <= 0)."""


class QuadratureFail(SchroederError):
    """Adaptive quadrature did not reach the requested tolerance."""


class BlowUp(SchroederError):
    """Flow requested past the finite escape time of the generator."""


class NoConvergence(SchroederError):
    """An iteration limit was reached before the tolerance was met."""


class DecayViolation(SchroederError):
    """Fourier coefficients violate the declared decay profile."""


class DegreeOverflow(SchroederError):
    """Requested Jordan-chain length exceeds the layer cap."""


class NonResonantRequest(SchroederError):
    """Hyperbolic solution requested at a non-resonant eigenvalue."""


class MixedComponent(SchroederError):
    """Group operation between elements over different component data."""


class CentralizerNotFlow(SchroederError):
    """Operation requires a flow-generated transverse holonomy."""


class BoundaryMismatch(SchroederError):
    """Boundary classes of a candidate fiber pair disagree."""

    def __init__(self, class_a, class_b, distance=None):
        super().__init__(
            f"boundary classes disagree: {class_a} vs {class_b}"
            + (f" (distance {distance:.3e})" if distance is not None else "")
        )
        self.class_a = class_a
        self.class_b = class_b
        self.distance = distance


class StepTooSmall(SchroederError):
    """Finite differences lost all significant digits."""


class ConfigError(SchroederError):
    """Invalid run configuration (CLI exit code 2)."""


class NumericalFailure(SchroederError):
    """A verification verdict failed or a numeric routine gave up (CLI exit code 3)."""
