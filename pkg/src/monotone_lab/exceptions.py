"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input violates a documented invariant.

    ``invariant`` names the violated rule (e.g. ``"DensityMatrix.trace"``) so
    callers such as the CLI can report it verbatim.
    """

    def __init__(self, invariant, message=""):
        self.invariant = invariant
        super().__init__(f"{invariant}: {message}" if message else invariant)


class CapabilityError(RuntimeError):
    """The request is well-formed but outside what the library can compute."""
