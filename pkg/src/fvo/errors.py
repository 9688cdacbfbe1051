"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class OvercriticalCouplingError(DomainError):
    """The Coulomb strength exceeds the angular barrier (zeta**2 < lambda**2)."""


class PoleError(DomainError):
    """A series parameter hits a pole (e.g. nonpositive integer b in 1F1)."""


class ConvergenceError(RuntimeError):
    """An iterative or series evaluation did not converge.

    Carries whatever trace the failing routine could provide so callers can
    report it.
    """

    def __init__(self, message, *, terms_used=None, trace=None):
        super().__init__(message)
        self.terms_used = terms_used
        self.trace = list(trace) if trace is not None else []
