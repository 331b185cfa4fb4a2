"""Exception hierarchy shared by every fgwkit module."""


class FGWError(Exception):
    """Base class for all errors raised by fgwkit."""


class DimensionMismatch(FGWError, ValueError):
    pass


class InvalidHistogram(FGWError, ValueError):
    pass


class InvalidStructuredObject(FGWError, ValueError):
    """Raised when a structured object violates a hard invariant.

    ``violations`` holds the :class:`~fgwkit.core.Violation` records that
    triggered the error.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        msg = "; ".join(str(v) for v in self.violations)
        super().__init__(msg or "invalid structured object")


class InvalidParameter(FGWError, ValueError):
    pass


class InfeasibleMarginals(FGWError, ValueError):
    pass


class NonFiniteCost(FGWError, ValueError):
    pass


class MarginalMismatch(FGWError, ValueError):
    pass


class IncompatibleQ(FGWError, ValueError):
    pass


class DisconnectedGraph(FGWError, ValueError):
    """Raised when a graph has more than one connected component.

    ``components`` lists the node indices of each component.
    """

    def __init__(self, components):
        self.components = [list(map(int, c)) for c in components]
        super().__init__(
            f"graph has {len(self.components)} connected components: "
            + ", ".join(str(c) for c in self.components[:5])
            + (" ..." if len(self.components) > 5 else "")
        )


class EmptyCandidateSet(FGWError, ValueError):
    pass


class NonSymmetricInput(FGWError, ValueError):
    pass


class StructureWarning(UserWarning):
    """Emitted when a structure matrix is not a metric (triangle inequality fails)."""
