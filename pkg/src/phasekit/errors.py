"""Exception hierarchy shared by all phasekit modules."""


class PhasekitError(Exception):
    """Base class for every error raised by phasekit."""


class InvalidArgumentError(PhasekitError, ValueError):
    pass


class DomainError(PhasekitError, ValueError):
    """A point lies outside the interval on which a function is defined."""


class ConvergenceError(PhasekitError):
    pass


class SingularSystemError(PhasekitError):
    pass


class TurningPointError(PhasekitError):
    """Eigenvalues of the coefficient matrix (nearly) coalesce.

    ``location`` is the best available estimate of where this happens.
    """

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class RefinementError(PhasekitError):
    """Adaptive subdivision hit its depth limit.

    ``intervals`` lists the offending subintervals.
    """

    def __init__(self, message, intervals=()):
        super().__init__(message)
        self.intervals = list(intervals)


class StiffnessError(PhasekitError):
    """The adaptive ODE solver could not make progress on a minimal panel."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class SeedError(PhasekitError):
    """The Levin solve on the seed subinterval of the local method failed."""


class PropagationError(PhasekitError):
    """Propagating a Riccati branch across the interval failed."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class ConditioningError(PhasekitError):
    """A linear combination of basis functions cannot be formed reliably.

    ``cond`` carries the condition estimate when one is available.
    """

    def __init__(self, message, cond=None):
        super().__init__(message)
        self.cond = cond
