"""Exception types shared across the package."""


class PlatekitError(Exception):
    """Base class for all package-specific errors."""


class DomainError(PlatekitError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class UnsupportedOrderError(DomainError):
    """Bessel order outside the implemented family."""


class DiscriminantError(DomainError):
    """lambda < -alpha^2/4: the quadratic splitting has no real factors."""


class RegimeError(DomainError):
    """lambda inside a guard band where the formulas degenerate."""


class NotAnEigenvalueError(PlatekitError):
    """A profile/eigenfunction was requested at a non-eigenvalue."""


class DegeneratePairError(PlatekitError, ValueError):
    """Robin pair with sigma_1 = sigma_2; the pair eigenfunction vanishes."""


class BranchJumpError(PlatekitError):
    """Discontinuity detected while tracing a Robin branch over beta."""


class InsufficientSpectrumError(PlatekitError):
    """Supplied Dirichlet spectrum too short to certify the requested count."""


class SelfIntersectionError(PlatekitError, ValueError):
    """Boundary curve crosses itself."""


class SourcePlacementError(PlatekitError):
    """MFS source points could not be placed outside the domain."""


class DegenerateShapeError(PlatekitError, ValueError):
    """Fourier boundary with vanishing speed or otherwise unusable."""


class OrientationError(PlatekitError, ValueError):
    """Signed area is not positive; the curve is traversed clockwise."""


class DegenerateEigenvalueError(PlatekitError):
    """Eigenvalue too close to degenerate for a one-sided derivative."""


class NoSignChangeError(PlatekitError):
    """Bisection indicator has the same value at both interval ends."""


class SolverError(PlatekitError):
    """A root finder or eigenvalue search failed to converge."""
