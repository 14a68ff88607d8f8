"""Exception types raised by the library."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class NoKeyError(ValueError):
    """No secret key is extractable for the requested parameters."""


class InfeasibleError(ValueError):
    """The requested attack cannot be realised with the given parameters."""


class CharacterisationError(ValueError):
    """The source-characterisation overlap combination does not exceed 1."""


class DegenerateAmplitudeError(ValueError):
    """A coin-state branch has zero amplitude and cannot be inverted."""


class ConvergenceError(RuntimeError):
    """An iterative routine did not converge."""
