"""Commuting tridiagonal matrices and selected eigenpairs.

A'A and AA' each share their eigenvectors with a symmetric tridiagonal
matrix, so individual P-DPSS vectors cost O(P) instead of a dense
eigendecomposition.  Eigenpairs are computed by Sturm-count bisection
plus inverse iteration, selected by index range.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConvergenceFailure, DomainError, IndexOutOfRange

_EPS = float(np.finfo(np.float64).eps)


@dataclass(frozen=True)
class SymTridiag:
    """Symmetric tridiagonal matrix: diag (length P) and offdiag (P-1)."""

    diag: np.ndarray
    offdiag: np.ndarray

    @property
    def size(self):
        return self.diag.shape[0]

    def to_dense(self):
        """Dense ndarray, for oracle-scale checks."""
        out = np.diag(self.diag)
        if self.size > 1:
            out += np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)
        return out

    def matvec(self, v):
        r = self.diag * v
        if self.size > 1:
            r[:-1] += self.offdiag * v[1:]
            r[1:] += self.offdiag * v[:-1]
        return r


@dataclass(frozen=True)
class EigenSelection:
    """Contiguous slice of an ascending tridiagonal eigendecomposition.

    values[j] is the eigenvalue ranked (index_lo + j) in the full
    ascending spectrum; vectors[:, j] its unit eigenvector.
    """

    values: np.ndarray
    vectors: np.ndarray
    index_lo: int
    index_hi: int


def build_commuting(P, Q, L):
    """Size-P tridiagonal commuting with the FE Gram matrices.

    Entries: b_k = sin(pi k/L) sin(pi (P-k)/L) for k = 1..P-1 and
    c_k = -cos(pi (2k+1-P)/L) cos(pi Q/L) for k = 0..P-1.

    Convention (pinned by the commutation tests): the size-N companion
    (P=N, Q=M) commutes with A'A; the size-M companion (P=M, Q=N)
    commutes with AA'.
    """
    if not 1 <= P <= L:
        raise DomainError(f"need 1 <= P <= L, got P={P}, L={L}")
    if not 1 <= Q <= L:
        raise DomainError(f"need 1 <= Q <= L, got Q={Q}, L={L}")
    k = np.arange(1, P)
    b = np.sin(np.pi * k / L) * np.sin(np.pi * (P - k) / L)
    k = np.arange(P)
    c = -np.cos(np.pi * (2 * k + 1 - P) / L) * np.cos(np.pi * Q / L)
    return SymTridiag(diag=c, offdiag=b)


def build_commuting_continuous(N, T):
    """Size-N tridiagonal commuting with the continuous Grammian.

    cbar_i = ((N-1)/2 - i)^2 cos(pi/T), bbar_i = i(N-i)/2; the m -> inf
    limit (after scaling and a constant diagonal shift) of
    build_commuting(N, M, L).
    """
    if N < 1:
        raise DomainError(f"need N >= 1, got {N}")
    T = float(T)
    i = np.arange(N)
    c = ((N - 1) / 2.0 - i) ** 2 * math.cos(math.pi / T)
    i = np.arange(1, N)
    b = i * (N - i) / 2.0
    return SymTridiag(diag=c, offdiag=b)


def _canonical_sign(v):
    """Flip v so its largest-magnitude entry is positive (deterministic)."""
    i = int(np.argmax(np.abs(v)))
    if v[i] < 0:
        np.negative(v, out=v)
    return v


def eig_range(T, index_lo, index_hi, backend=None):
    """Eigenpairs of a SymTridiag ranked index_lo..index_hi (ascending).

    Eigenvalues come from Sturm-count bisection, eigenvectors from
    inverse iteration started at a seeded random vector (seed derived
    from the matrix size and the eigenvalue index, for reproducibility).
    Vectors whose eigenvalues lie within 1e-10*||T|| of each other are
    re-orthogonalized as a cluster.  Cost O(k P) for k selected pairs.

    Parameters
    ----------
    T : SymTridiag
    index_lo, index_hi : int
        0-based positions in the full ascending spectrum, inclusive.
    backend : str, optional
        'compiled' or 'pure'; default is the active backend.

    Returns
    -------
    EigenSelection

    Raises
    ------
    IndexOutOfRange
        If the requested indices fall outside [0, P).
    ConvergenceFailure
        If inverse iteration exceeds 40 sweeps for some vector.
    """
    impl = _kernels.get(backend)
    d = np.ascontiguousarray(T.diag, dtype=np.float64)
    e = np.ascontiguousarray(T.offdiag, dtype=np.float64)
    P = d.shape[0]
    if not 0 <= index_lo <= index_hi < P:
        raise IndexOutOfRange(f"indices [{index_lo}, {index_hi}] outside spectrum of size {P}")
    if P == 1:
        return EigenSelection(
            values=d.copy(), vectors=np.ones((1, 1)), index_lo=0, index_hi=0
        )

    r = np.zeros(P)
    r[:-1] += np.abs(e)
    r[1:] += np.abs(e)
    gl = float((d - r).min())
    gu = float((d + r).max())
    scale = max(abs(gl), abs(gu), 1e-30)
    e2 = e * e
    pivmin = 1e-300 * max(1.0, float(e2.max()))
    atol = 2.0 * _EPS * scale

    # one extra index on each side gives gap information at the edges
    blo = max(index_lo - 1, 0)
    bhi = min(index_hi + 1, P - 1)
    ext = impl.bisect_range(d, e2, blo, bhi, gl, gu, pivmin, atol)
    off = index_lo - blo
    vals = np.array(ext[off : off + (index_hi - index_lo + 1)])

    gap_left = np.full(vals.shape, np.inf)
    gap_right = np.full(vals.shape, np.inf)
    inner = np.diff(vals)
    gap_left[1:] = inner
    gap_right[:-1] = inner
    if index_lo > 0:
        gap_left[0] = vals[0] - ext[0]
    if index_hi < P - 1:
        gap_right[-1] = ext[-1] - vals[-1]

    ctol = 1e-10 * scale
    rtol = 1e-13 * scale
    # sweeps needed so contamination (theta error / gap)^s reaches ~1e-14;
    # clustered directions are orthogonalized explicitly instead
    delta = 4.0 * _EPS * scale
    geff = np.maximum(np.minimum(gap_left, gap_right), ctol)
    ratio = np.maximum(geff / delta, 10.0)
    min_sweeps = np.maximum(2, np.ceil(14.0 / np.log10(ratio)).astype(int))

    k = vals.shape[0]
    vectors = np.empty((P, k), order="F")
    start_cluster = 0
    empty = np.zeros((P, 0))
    for j in range(k):
        if j > 0 and vals[j] - vals[j - 1] > ctol:
            start_cluster = j
        prior = (
            np.ascontiguousarray(vectors[:, start_cluster:j])
            if j > start_cluster
            else empty
        )
        rng = np.random.default_rng(np.random.SeedSequence([P, index_lo + j]))
        start = rng.standard_normal(P)
        v, sweeps, ok = impl.eigvec(
            d, e, float(vals[j]), start, prior, int(min_sweeps[j]), 40, rtol, pivmin
        )
        if not ok:
            raise ConvergenceFailure(
                f"inverse iteration for eigenvalue index {index_lo + j} "
                f"did not reach residual {rtol:.2e} in 40 sweeps"
            )
        vectors[:, j] = _canonical_sign(np.asarray(v))
    return EigenSelection(
        values=vals, vectors=vectors, index_lo=index_lo, index_hi=index_hi
    )
