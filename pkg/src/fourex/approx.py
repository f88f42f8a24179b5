"""High-level fitting: test functions, sampling, evaluation, sweeps.

The corpus covers the standard difficulty ladder: a polynomial (square),
an analytic function with complex-plane poles near the domain (runge),
a function with a kink (abs), and band-limited oscillations of chosen
frequency.  Anything else enters through sample files on the CLI side.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.fft

from .errors import DomainError, NotConverged
from .operator import SampleVector, values_of
from .params import DEFAULT_TAU, resolve
from .solver import SolveReport, solve_explicit, solve_implicit, solve_tsvd_dense


@dataclass(frozen=True)
class TestFunction:
    """A named real-valued target, callable on arrays anywhere on the line."""

    name: str
    fn: callable

    def __call__(self, x):
        return self.fn(np.asarray(x, dtype=np.float64))


SQUARE = TestFunction("square", lambda x: x * x)
RUNGE = TestFunction("runge", lambda x: 1.0 / (1.1 - x * x))
ABS = TestFunction("abs", np.abs)


def oscillatory(omega):
    """sin(omega*x), named "sin:<omega>"."""
    w = float(omega)
    return TestFunction(f"sin:{w:g}", lambda x: np.sin(w * x))


def by_name(name):
    """Look up a test function: square, runge, abs, or sin:<omega>."""
    fixed = {"square": SQUARE, "runge": RUNGE, "abs": ABS}
    if name in fixed:
        return fixed[name]
    if name.startswith("sin:"):
        try:
            return oscillatory(float(name[4:]))
        except ValueError:
            pass
    raise DomainError(
        f"unknown test function {name!r}; expected square, runge, abs or sin:<omega>"
    )


def sample(f, config):
    """Weighted samples b_l = f(l/m)/sqrt(m) on the equispaced grid."""
    l = np.arange(-config.m, config.m + 1)
    return SampleVector(values=np.asarray(f(l / config.m)) / math.sqrt(config.m))


def evaluate(x, points):
    """Values of the extension sum_k x_k phi_k at arbitrary points.

    phi_k(t) = (2T)^{-1/2} exp(i pi k t/T).  Direct summation, O(PN),
    chunked to bound memory; see evaluate_grid for the fast equispaced
    path.  Returns a complex array (real targets leave an O(tau)
    imaginary part).
    """
    T = float(x.T)
    vals = np.asarray(values_of(x), dtype=np.complex128)
    n = vals.shape[0] // 2
    pts = np.atleast_1d(np.asarray(points, dtype=np.float64))
    k = np.arange(-n, n + 1)
    scale = 1.0 / math.sqrt(2.0 * T)
    out = np.empty(pts.shape, dtype=np.complex128)
    step = max(1, 1_000_000 // max(vals.shape[0], 1))
    for i in range(0, pts.shape[0], step):
        seg = pts[i : i + step]
        out[i : i + step] = (np.exp(1j * np.pi * np.outer(seg, k) / T) @ vals) * scale
    return out


def evaluate_grid(x, config, factor=10):
    """Values at the refined grid l/(factor*m), l = -factor*m..factor*m.

    One zero-padded DFT of length factor*L replaces the direct sum: at
    these points the basis collapses to DFT columns, exactly as in the
    operator application.
    """
    factor = int(factor)
    if factor < 1:
        raise DomainError(f"need factor >= 1, got {factor}")
    vals = np.asarray(values_of(x), dtype=np.complex128)
    LF = factor * config.L
    spec = np.zeros(LF, dtype=np.complex128)
    spec[np.arange(-config.n, config.n + 1) % LF] = vals
    y = scipy.fft.ifft(spec) * LF
    rows = np.arange(-factor * config.m, factor * config.m + 1) % LF
    return y[rows] / math.sqrt(2.0 * float(config.T))


def sup_error(f, x, config, factor=10):
    """Max pointwise error of the fit on a factor-times-denser grid.

    The grid includes the endpoints; only the real part of the
    evaluation is compared.
    """
    grid = np.arange(-factor * config.m, factor * config.m + 1) / (factor * config.m)
    approx = evaluate_grid(x, config, factor).real
    return float(np.max(np.abs(np.asarray(f(grid), dtype=np.float64) - approx)))


@dataclass(frozen=True)
class FitResult:
    report: SolveReport
    sup_error: float
    grid_factor: int


_SOLVERS = ("explicit", "implicit", "dense")


def _solve(config, b, method, tau, seed):
    if method == "explicit":
        return solve_explicit(config, b, tau)
    if method == "implicit":
        return solve_implicit(config, b, tau, seed=seed)
    if method == "dense":
        return solve_tsvd_dense(config, b, tau)
    raise DomainError(f"method must be one of {_SOLVERS}, got {method!r}")


def fit(f, T, n, gamma=2.0, tau=DEFAULT_TAU, method="explicit", seed=0, grid_factor=10):
    """Resolve a configuration, sample f, solve, and measure the error."""
    config = resolve(T, n, gamma, tau)
    report = _solve(config, sample(f, config), method, config.tau, seed)
    return FitResult(
        report=report,
        sup_error=sup_error(f, report.coefficients, config, grid_factor),
        grid_factor=grid_factor,
    )


@dataclass(frozen=True)
class SweepRecord:
    """One experiment row; `converged` is False when the solver reported
    NotConverged and the recorded numbers come from its attached report."""

    method: str
    T: Fraction
    gamma: float
    N: int
    M: int
    L: int
    tau: float
    sup_error: float
    residual: float
    plunge_size: int
    wall_seconds: float
    converged: bool = True


def convergence_sweep(
    f,
    T,
    gamma,
    N_list,
    method="explicit",
    tau=DEFAULT_TAU,
    seed=0,
    jobs=1,
    grid_factor=10,
):
    """Fit f at each target N and record the error/residual/time rows.

    Targets are mapped to the nearest representable size N = 2(N//2)+1.
    Per-point NotConverged is recorded (converged=False) and the sweep
    continues.  Implicit solves draw an independent seed per point so
    results do not depend on `jobs`; rows come back in input order.
    """
    targets = list(N_list)

    def point(i, N_target):
        config = resolve(T, N_target // 2, gamma, tau)
        b = sample(f, config)
        point_seed = int(np.random.SeedSequence([seed, i]).generate_state(1)[0])
        converged = True
        try:
            report = _solve(config, b, method, config.tau, point_seed)
        except NotConverged as err:
            report = err.report
            converged = False
        return SweepRecord(
            method=report.method,
            T=config.T,
            gamma=gamma,
            N=config.N,
            M=config.M,
            L=config.L,
            tau=config.tau,
            sup_error=sup_error(f, report.coefficients, config, grid_factor),
            residual=report.residual_l2,
            plunge_size=report.plunge_size,
            wall_seconds=report.wall_seconds,
            converged=converged,
        )

    if jobs > 1 and len(targets) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(point, i, N) for i, N in enumerate(targets)]
            return [fut.result() for fut in futures]
    return [point(i, N) for i, N in enumerate(targets)]
