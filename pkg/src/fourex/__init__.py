"""Fourier extension approximation of non-periodic functions.

Fits a Fourier series that is periodic on [-T, T], T > 1, to equispaced
samples on [-1, 1], where the normal equations are exponentially
ill-conditioned but only on a plunge region of O(log N) singular
values.  Two fast solvers work directly in that region (an explicit
projection on prolate-type sequences and an implicit randomized
sketch), both O(N log^2 N); a dense TSVD solver serves as the
reference.
"""

from ._kernels import name as kernel_backend
from .approx import (
    ABS,
    RUNGE,
    SQUARE,
    FitResult,
    SweepRecord,
    TestFunction,
    by_name,
    convergence_sweep,
    evaluate,
    evaluate_grid,
    fit,
    oscillatory,
    sample,
    sup_error,
)
from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    DomainError,
    FourexError,
    IndexOutOfRange,
    Infeasible,
    MappingMismatch,
    NotConverged,
    QuadratureWarning,
    RankDeficientSketch,
    SketchFailure,
    TleOne,
    TooLarge,
    WindowOverflow,
)
from .operator import (
    Coefficients,
    SampleVector,
    apply_A,
    apply_A_adjoint,
    apply_gram_continuous,
    apply_P,
    dense_A,
    dense_lowpass,
    gram_continuous,
    gram_discrete,
    values_of,
)
from .params import (
    DEFAULT_TAU,
    ProblemConfig,
    as_ratio,
    extension_constant,
    optimal_T,
    resolution_bound,
    resolve,
)
from .plunge import (
    PlungeBasis,
    PlungeWindow,
    Sketch,
    Triplet,
    implicit_plunge_solve,
    pdpss_triplets,
    plunge_window,
    random_sketch,
)
from .solver import (
    SolveReport,
    alpha_complete,
    continuous_moments,
    residual,
    solve_continuous,
    solve_explicit,
    solve_implicit,
    solve_tsvd_dense,
)
from .tridiagonal import (
    EigenSelection,
    SymTridiag,
    build_commuting,
    build_commuting_continuous,
    eig_range,
)

__version__ = "0.1.0"

__all__ = [
    "ABS",
    "Coefficients",
    "ConvergenceFailure",
    "DEFAULT_TAU",
    "DimensionMismatch",
    "DomainError",
    "EigenSelection",
    "FitResult",
    "FourexError",
    "IndexOutOfRange",
    "Infeasible",
    "MappingMismatch",
    "NotConverged",
    "PlungeBasis",
    "PlungeWindow",
    "ProblemConfig",
    "QuadratureWarning",
    "RUNGE",
    "RankDeficientSketch",
    "SQUARE",
    "SampleVector",
    "Sketch",
    "SketchFailure",
    "SolveReport",
    "SweepRecord",
    "SymTridiag",
    "TestFunction",
    "TleOne",
    "TooLarge",
    "Triplet",
    "WindowOverflow",
    "alpha_complete",
    "apply_A",
    "apply_A_adjoint",
    "apply_P",
    "apply_gram_continuous",
    "as_ratio",
    "build_commuting",
    "build_commuting_continuous",
    "by_name",
    "continuous_moments",
    "convergence_sweep",
    "dense_A",
    "dense_lowpass",
    "eig_range",
    "evaluate",
    "evaluate_grid",
    "extension_constant",
    "fit",
    "gram_continuous",
    "gram_discrete",
    "implicit_plunge_solve",
    "kernel_backend",
    "optimal_T",
    "oscillatory",
    "pdpss_triplets",
    "plunge_window",
    "random_sketch",
    "resolution_bound",
    "resolve",
    "residual",
    "sample",
    "solve_continuous",
    "solve_explicit",
    "solve_implicit",
    "solve_tsvd_dense",
    "sup_error",
    "values_of",
]
