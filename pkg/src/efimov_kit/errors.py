"""Exception types shared across the toolkit."""


class EfimovKitError(Exception):
    """Base class for all toolkit errors."""


class RhoTooSmall(EfimovKitError):
    """Hyperradius below rho_c = 2 r0 sqrt(mu); the two-region split is invalid."""


class ScatteringLengthNearZero(EfimovKitError):
    """|a| too small for the 1 - r/a normalization to make sense."""


class NoConvergence(EfimovKitError):
    """An iterative solver failed to reach its tolerance."""


class NoBoundState(EfimovKitError):
    """The potential supports no s-wave bound state."""


class NoRootInBracket(EfimovKitError):
    """Root finding could not bracket a solution on the requested branch."""


class PoleAt(EfimovKitError):
    """Evaluation requested at (or too close to) a pole of the channel function."""

    def __init__(self, nu):
        self.nu = nu
        super().__init__(f"channel function has a pole at nu = {nu}")


class PoleCollision(EfimovKitError):
    """A root lies within the safety standoff of a pole; refine the bracket."""


class NodeAtMatch(EfimovKitError):
    """u and u' both vanish at the matching radius (cannot happen for regular solutions)."""


class StepTooLarge(EfimovKitError):
    """Finite-difference step failed the Richardson accuracy check."""


class ZeroInput(EfimovKitError):
    """An input that must be nonzero was zero."""
