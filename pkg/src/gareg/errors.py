"""Exception types shared across the package."""


class GaregError(Exception):
    """Base class for all package errors."""


class RankDeficient(GaregError):
    """Design matrix is numerically rank-deficient at the working tolerance."""


class NonConverged(GaregError):
    """Iterative fit did not converge within the iteration budget."""


class Infeasible(GaregError):
    """Inputs violate a structural precondition (empty data, bad knots, ...)."""


class InfeasibleProblem(GaregError):
    """No feasible chromosome could be sampled within the restart budget."""


class TooLarge(GaregError):
    """Exhaustive enumeration would exceed the combinatorial guard."""
