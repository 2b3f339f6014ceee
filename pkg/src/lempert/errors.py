"""Exception types shared across the package."""


class DomainViolation(ValueError):
    """A point fails a domain membership precondition.

    Carries the offending gauge value so reports can quote it.
    """

    def __init__(self, message, gauge=None):
        super().__init__(message)
        self.gauge = gauge


class BranchAmbiguityError(ValueError):
    """A continuation path passes too close to a branch locus to pick a root."""
