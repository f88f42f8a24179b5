"""The plunge region: locating it, and working inside it.

The singular values of A cluster exponentially near 1 and near 0; only
a band of O(log N) in between (the plunge region) is genuinely
ill-conditioned.  This module finds that band in the sigma-descending
index order, computes its singular triplets from the commuting
tridiagonals (explicit approach), or solves the plunge-projected system
against a random sketch (implicit approach).
"""

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import MappingMismatch, RankDeficientSketch, WindowOverflow
from .operator import Coefficients, _apply_A_arr, _apply_At_arr, values_of
from .tridiagonal import build_commuting, eig_range

# sigma smaller than this sits at the dense-SVD noise floor, where
# ordering is not meaningful
SIGMA_NOISE_FLOOR = 1e-13


@dataclass(frozen=True)
class PlungeWindow:
    """Index window [lo, hi] in the sigma-descending spectrum.

    I_alpha = [0, lo), I_beta = [lo, hi], I_gamma = (hi, min(N, M)).
    center = N*M/L, where the sigma ~ 1/sqrt(2) crossover sits.
    """

    lo: int
    hi: int
    center: float
    tau: float

    @property
    def size(self):
        return self.hi - self.lo + 1


class Triplet(NamedTuple):
    sigma: float
    u: np.ndarray
    v: np.ndarray
    phase: complex


@dataclass(frozen=True)
class PlungeBasis:
    """Singular triplets of the plunge window, sigma-descending.

    u and v are real (eigenvectors of the commuting tridiagonals); the
    complex unit phase carries A's phase so that A v = phase*sigma*u.
    """

    triplets: list

    @property
    def sigmas(self):
        return np.array([t.sigma for t in self.triplets])


@dataclass(frozen=True)
class Sketch:
    """Random sketch W (N x R), entries i.i.d. uniform on [-1, 1]."""

    W: np.ndarray
    R: int
    seed: int = field(repr=False, default=0)


def _triplet_block(config, lo, hi):
    """(U, V, s) for sigma-descending indices lo..hi.

    By the monotone correspondence, sigma-descending position i maps to
    ascending tridiagonal index P-1-i on both sides.  Columns are
    returned in sigma-descending order; s = u'(Av) is complex.
    """
    N, M, L = config.N, config.M, config.L
    TU = build_commuting(M, N, L)
    TV = build_commuting(N, M, L)
    selU = eig_range(TU, M - 1 - hi, M - 1 - lo)
    selV = eig_range(TV, N - 1 - hi, N - 1 - lo)
    U = selU.vectors[:, ::-1]
    V = selV.vectors[:, ::-1]
    # sign convention: largest-magnitude entry of v positive (eig_range
    # already canonicalizes; re-assert so the contract is local)
    flips = np.where(V[np.argmax(np.abs(V), axis=0), np.arange(V.shape[1])] < 0, -1.0, 1.0)
    V = V * flips
    AV = _apply_A_arr(config, V)
    s = np.einsum("lk,lk->k", U, AV)
    return U, V, s


def _v_side_block(config, lo, hi):
    """V-side eigenpairs plus sigma estimates for descending lo..hi.

    sigma is measured as ||A v||_2, which agrees with |u'(A v)| up to
    the matvec noise floor; deferring the M-side eigenvectors halves
    the validation cost since that matrix is gamma times larger.
    Returns (V, AV, vals, sigma), columns sigma-descending.
    """
    N, M, L = config.N, config.M, config.L
    sel = eig_range(build_commuting(N, M, L), N - 1 - hi, N - 1 - lo)
    V = sel.vectors[:, ::-1]
    vals = sel.values[::-1]
    flips = np.where(V[np.argmax(np.abs(V), axis=0), np.arange(V.shape[1])] < 0, -1.0, 1.0)
    V = V * flips
    AV = _apply_A_arr(config, V)
    return V, AV, vals, np.linalg.norm(AV, axis=0)


def _extended_v_block(config, lo, hi, new_lo, new_hi, block):
    """Extend a V-side block from [lo, hi] to [new_lo, new_hi].

    Eigenpairs at distinct indices are computed independently, so
    gluing a freshly computed strip onto the block reproduces the
    whole-range result bitwise, except when the seam falls inside an
    eigenvalue cluster (tighter than the solver's clustering width,
    scaled 10x for safety); then the whole range is recomputed so the
    cluster is re-orthogonalized as one group.
    """
    V, AV, vals, sigma = block
    parts = []
    if new_lo < lo:
        strip = _v_side_block(config, new_lo, lo - 1)
        seam = strip[2][-1] - vals[0]
        if seam <= 1e-9 * max(1.0, abs(strip[2][-1]), abs(vals[0])):
            return _v_side_block(config, new_lo, new_hi)
        parts.append(strip)
    parts.append((V, AV, vals, sigma))
    if new_hi > hi:
        strip = _v_side_block(config, hi + 1, new_hi)
        seam = vals[-1] - strip[2][0]
        if seam <= 1e-9 * max(1.0, abs(vals[-1]), abs(strip[2][0])):
            return _v_side_block(config, new_lo, new_hi)
        parts.append(strip)
    return tuple(
        np.concatenate([p[i] for p in parts], axis=-1) for i in range(4)
    )


def _window_and_block(config, tau=None):
    """Validated, tightened window plus its triplet block.

    The formula window [center - 3 ln N, center + 6 ln N] is widened (up
    to 3 retries of 2 ln N each) until it covers the plunge, then
    tightened to the minimal bracket: lo at the last sigma >= 1-tau, hi
    one index past the first sigma <= tau (sigma estimates at the tau
    crossing carry ~1e-15 of matvec noise, so a single sub-tau sentinel
    guards against a misclassified boundary).  Edges clipped to the
    spectrum count as covered.

    Validation and tightening read sigma off the V side alone; the
    M-side eigenvectors are computed once, for the final window, and
    the complex s = u'(A v) of the returned block comes from them.
    """
    if tau is None:
        tau = config.tau
    N, M, L = config.N, config.M, config.L
    S = min(N, M)
    center = N * M / L
    lnN = math.log(N)
    lo = max(int(math.floor(center - 3.0 * lnN)), 0)
    hi = min(int(math.ceil(center + 6.0 * lnN)), S - 1)

    block = _v_side_block(config, lo, hi)
    widen = int(math.ceil(2.0 * lnN))
    for _ in range(4):
        sigma = block[3]
        need_left = sigma[0] < 1.0 - tau and lo > 0
        need_right = sigma[-1] > tau and hi < S - 1
        if not (need_left or need_right):
            covered = np.flatnonzero(sigma >= 1.0 - tau)
            lo_t = lo + int(covered[-1]) if covered.size else lo
            covered = np.flatnonzero(sigma <= tau)
            hi_t = min(lo + int(covered[0]) + 1, hi) if covered.size else hi
            if lo_t > hi_t:
                lo_t, hi_t = lo, hi
            # keep the crossover index inside the window (safety clamp;
            # a plunge always brackets its own center)
            lo_t = min(lo_t, max(int(math.floor(center)), 0))
            hi_t = max(hi_t, min(int(math.ceil(center)), S - 1))
            window = PlungeWindow(lo=lo_t, hi=hi_t, center=center, tau=tau)
            sel = slice(lo_t - lo, hi_t - lo + 1)
            selU = eig_range(build_commuting(M, N, L), M - 1 - hi_t, M - 1 - lo_t)
            U = selU.vectors[:, ::-1]
            s = np.einsum("lk,lk->k", U, block[1][:, sel])
            return window, (U, block[0][:, sel], s)
        new_lo, new_hi = lo, hi
        if need_left:
            new_lo = max(lo - widen, 0)
        if need_right:
            new_hi = min(hi + widen, S - 1)
        block = _extended_v_block(config, lo, hi, new_lo, new_hi, block)
        lo, hi = new_lo, new_hi
    raise WindowOverflow(
        f"plunge window failed validation after 3 retries (N={N}, tau={tau}); "
        "N is too small for this tau"
    )


def plunge_window(config, tau=None):
    """Locate and validate the plunge window for this configuration.

    Returns a PlungeWindow in sigma-descending indexing whose edges
    satisfy sigma_lo >= 1-tau and sigma_hi <= tau (or sit on a spectrum
    boundary).

    Raises
    ------
    WindowOverflow
        If validation keeps failing after 3 widening retries.
    """
    window, _ = _window_and_block(config, tau)
    return window


def pdpss_triplets(config, window):
    """Singular triplets (sigma, u, v, phase) across the given window.

    u comes from build_commuting(M, N, L), v from build_commuting(N, M, L),
    eigenpairs selected by the monotone index map; s = u'(Av) yields
    sigma = |s| and the unit phase.

    Raises
    ------
    MappingMismatch
        If sigma is not strictly decreasing across the window (above
        the noise floor), signalling an index-direction error.
    """
    U, V, s = _triplet_block(config, window.lo, window.hi)
    return _basis_from_block(U, V, s)


def _assert_descending(sigma):
    """MappingMismatch unless sigma is decreasing where that is meaningful.

    Ties and sub-noise wiggles are legitimate where sigma clusters at 1
    to machine precision, and ordering is noise below the floor; the
    transition in between is exponential, hence strictly ordered.  A
    genuine index-direction error scrambles sigma at O(1).
    """
    above = sigma > SIGMA_NOISE_FLOOR
    mid = above & (sigma < 1.0 - SIGMA_NOISE_FLOOR)
    if np.any(np.diff(sigma[above]) > SIGMA_NOISE_FLOOR) or np.any(
        np.diff(sigma[mid]) >= 0
    ):
        raise MappingMismatch(
            "singular values are not decreasing across the window"
        )


def _basis_from_block(U, V, s):
    sigma = np.abs(s)
    _assert_descending(sigma)
    phase = np.where(sigma > 0, s / np.where(sigma > 0, sigma, 1.0), 1.0 + 0j)
    triplets = [
        Triplet(sigma=float(sigma[i]), u=U[:, i], v=V[:, i], phase=complex(phase[i]))
        for i in range(sigma.shape[0])
    ]
    return PlungeBasis(triplets=triplets)


def random_sketch(config, C=9.0, D=10, seed=0):
    """Random N x R sketch with R = round(C ln N) + D, clipped to [1, N].

    Deterministic given seed; entries i.i.d. uniform on [-1, 1].
    """
    N = config.N
    R = int(np.rint(C * math.log(N))) + int(D)
    R = max(1, min(R, N))
    rng = np.random.default_rng(seed)
    W = rng.uniform(-1.0, 1.0, size=(N, R))
    return Sketch(W=W, R=R, seed=seed)


def implicit_plunge_solve(config, b, sketch, tau=None):
    """Solve the plunge-projected system P A x = P b through the sketch.

    Forms PAW (M x R) with batched fast applications, solves the dense
    least-squares problem by orthogonal factorization, and returns
    x_W = W y.  The projected residual is guaranteed <= 10 tau ||b||
    when the window assumption holds.

    Raises
    ------
    RankDeficientSketch
        If the projected residual exceeds the bound; the exception
        carries the candidate coefficients so the caller's retry policy
        can salvage them.
    """
    if tau is None:
        tau = config.tau
    barr = np.asarray(values_of(b), dtype=np.complex128)
    nb = float(np.linalg.norm(barr))
    if nb == 0.0:
        return Coefficients(values=np.zeros(config.N, dtype=np.complex128), T=config.T)

    W = sketch.W
    AW = _apply_A_arr(config, W)
    PAW = _apply_A_arr(config, _apply_At_arr(config, AW)) - AW
    Pb = _apply_A_arr(config, _apply_At_arr(config, barr)) - barr

    y, _, rank, _ = scipy.linalg.lstsq(PAW, Pb, lapack_driver="gelsy")
    x = W @ y
    if not np.all(np.isfinite(x)) or rank == 0:
        raise RankDeficientSketch(
            f"projected least-squares degenerated (rank={rank})",
            coefficients=None,
            projected_residual=float("inf"),
        )
    projres = float(np.linalg.norm(PAW @ y - Pb))
    coeffs = Coefficients(values=x, T=config.T)
    if projres > 10.0 * tau * nb:
        raise RankDeficientSketch(
            f"projected residual {projres:.3e} exceeds bound "
            f"{10.0 * tau * nb:.3e}",
            coefficients=coeffs,
            projected_residual=projres,
        )
    return coeffs
