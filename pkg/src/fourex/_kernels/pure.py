"""NumPy fallback for the tridiagonal eigen-kernels.

Implements the same bisection arithmetic as the compiled backend, in
lockstep across the requested indices (each index's bisection history
is independent of the others, so results are bitwise identical to the
compiled per-index loops).  Inverse iteration leans on LAPACK's banded
solver for the per-sweep solves.
"""

import numpy as np
from numpy.linalg import LinAlgError
from scipy.linalg import solve_banded

_EPS = float(np.finfo(np.float64).eps)


def negcounts(d, e2, shifts, pivmin):
    """Sturm counts: number of eigenvalues strictly below each shift."""
    x = np.asarray(shifts, dtype=np.float64)
    q = d[0] - x
    q[np.abs(q) < pivmin] = -pivmin
    cnt = (q < 0).astype(np.int64)
    for i in range(1, d.shape[0]):
        q = d[i] - x - e2[i - 1] / q
        q[np.abs(q) < pivmin] = -pivmin
        cnt += q < 0
    return cnt


def bisect_range(d, e2, ilo, ihi, gl, gu, pivmin, atol):
    """Eigenvalues ranked ilo..ihi (0-based, ascending) by bisection."""
    idx = np.arange(ilo, ihi + 1, dtype=np.int64)
    pad = 2.0 * _EPS * max(abs(gl), abs(gu), 1.0) + 2.0 * pivmin
    lo = np.full(idx.shape, gl - pad)
    hi = np.full(idx.shape, gu + pad)
    active = np.ones(idx.shape, dtype=bool)
    for _ in range(128):
        if not active.any():
            break
        mid = 0.5 * (lo + hi)
        cnt = negcounts(d, e2, mid, pivmin)
        raise_lo = active & (cnt <= idx)
        drop_hi = active & (cnt > idx)
        lo[raise_lo] = mid[raise_lo]
        hi[drop_hi] = mid[drop_hi]
        width_ok = (hi - lo) <= 2.0 * _EPS * np.maximum(np.abs(lo), np.abs(hi)) + atol
        active &= ~width_ok
    return 0.5 * (lo + hi)


def tridiag_residual(d, e, theta, v):
    """2-norm of (T - theta I) v."""
    r = (d - theta) * v
    r[:-1] += e * v[1:]
    r[1:] += e * v[:-1]
    return float(np.linalg.norm(r))


def eigvec(d, e, theta, start, prior, min_sweeps, max_sweeps, rtol, pivmin):
    """One eigenvector by inverse iteration from the given start vector.

    prior is a (P, c) orthonormal block of already-computed vectors in
    the same eigenvalue cluster; every sweep re-orthogonalizes against
    it (two classical Gram-Schmidt passes).  Returns (v, sweeps, ok).
    """
    P = d.shape[0]
    ab = np.zeros((3, P))
    ab[0, 1:] = e
    ab[2, :-1] = e
    shift = 0.0
    ab[1, :] = d - theta
    v = start / np.linalg.norm(start)
    ortho = prior is not None and prior.shape[1] > 0
    for sweep in range(1, max_sweeps + 1):
        try:
            w = solve_banded((1, 1), ab, v)
        except LinAlgError:
            # theta hit an exact eigenvalue of the factorization; nudge it
            shift = 2.0 * shift + pivmin + _EPS * max(abs(theta), 1.0)
            ab[1, :] = d - (theta + shift)
            w = solve_banded((1, 1), ab, v)
        if ortho:
            w -= prior @ (prior.T @ w)
            w -= prior @ (prior.T @ w)
        nrm = float(np.linalg.norm(w))
        if not np.isfinite(nrm) or nrm == 0.0:
            return v, sweep, False
        v = w / nrm
        if sweep >= min_sweeps and tridiag_residual(d, e, theta, v) <= rtol:
            return v, sweep, True
    return v, max_sweeps, False
