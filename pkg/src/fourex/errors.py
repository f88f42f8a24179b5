"""Exception types shared across the package."""


class FourexError(Exception):
    """Base class for all package-specific errors."""


class DomainError(FourexError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class TleOne(DomainError):
    """The extension parameter T must exceed 1."""


class Infeasible(FourexError):
    """No admissible sample count m satisfies the integrality of L = 2Tm."""


class DimensionMismatch(FourexError, ValueError):
    """Vector length does not match the configuration."""


class TooLarge(FourexError):
    """Dense construction refused: the matrix exceeds the oracle budget."""


class IndexOutOfRange(FourexError, IndexError):
    """Requested eigenvalue indices fall outside the spectrum."""


class ConvergenceFailure(FourexError):
    """Inverse iteration failed to converge within the sweep budget."""


class WindowOverflow(FourexError):
    """The plunge window cannot be validated; N is too small for tau."""


class MappingMismatch(FourexError):
    """Computed singular values are not monotone across the plunge window.

    Signals an index-direction error between the tridiagonal spectrum and
    the singular spectrum.
    """


class RankDeficientSketch(FourexError):
    """The sketched least-squares residual exceeded its bound.

    Carries the candidate solution so the caller can decide whether to
    retry or to salvage it; see ``coefficients`` and ``projected_residual``.
    """

    def __init__(self, message, coefficients=None, projected_residual=None):
        super().__init__(message)
        self.coefficients = coefficients
        self.projected_residual = projected_residual


class SketchFailure(FourexError):
    """The randomized sketch failed outright even after a retry."""


class NotConverged(FourexError):
    """The extension has not converged at this N; increase N.

    The completed solve is attached as ``report`` so sweeps can record the
    achieved error and continue.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class QuadratureWarning(UserWarning):
    """Moment quadrature is estimated to be less accurate than tau."""
