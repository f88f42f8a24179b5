"""Matrix-free application of the FE matrix A and its relatives.

The discrete FE matrix has entries A_{l,k} = (2Tm)^{-1/2} e^{i pi k l/(Tm)}
for rows l = -m..m and columns k = -n..n, i.e. a subblock of a scaled
L x L DFT with L = 2Tm.  Both A and A' are applied with one FFT of
length L; L is an arbitrary integer, so the transform layer must handle
mixed-radix and prime lengths (scipy.fft does, via Bluestein's algorithm
where needed).

Dense constructors are provided for oracle testing only and refuse to
build anything above a fixed budget.
"""

import threading
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.fft
from scipy.linalg import circulant, toeplitz

from .errors import DimensionMismatch, TooLarge

DENSE_BUDGET = 4 * 10**6

# index arrays keyed by (n, m, L): concurrent reads are safe, insertion
# is serialized
_grid_cache = {}
_grid_lock = threading.Lock()


@dataclass
class SampleVector:
    """Sample-space vector of length M, indexed l = -m..m.

    norm_included records whether the 1/sqrt(m) data weight has been
    applied (it is, for anything produced by `approx.sample` or by A).
    """

    values: np.ndarray
    norm_included: bool = True


@dataclass
class Coefficients:
    """Coefficient-space vector of length N, indexed k = -n..n.

    Carries T so the basis is evaluable without the originating config.
    """

    values: np.ndarray
    T: Fraction = field(default_factory=lambda: Fraction(2))


def values_of(x):
    """Underlying ndarray of a SampleVector/Coefficients or array-like."""
    return np.asarray(getattr(x, "values", x))


def _grids(config):
    """DFT bins of the N coefficients and of the M sample rows."""
    key = (config.n, config.m, config.L)
    hit = _grid_cache.get(key)
    if hit is None:
        L = config.L
        bins = np.arange(-config.n, config.n + 1) % L
        rows = np.arange(-config.m, config.m + 1) % L
        with _grid_lock:
            hit = _grid_cache.setdefault(key, (bins, rows))
    return hit


def _apply_A_arr(config, c):
    """A @ c for c of shape (N,) or (N, k); returns (M,) or (M, k)."""
    c = np.asarray(c)
    if c.shape[0] != config.N:
        raise DimensionMismatch(f"expected {config.N} coefficients, got {c.shape[0]}")
    bins, rows = _grids(config)
    spec = np.zeros((config.L,) + c.shape[1:], dtype=np.complex128)
    spec[bins] = c
    y = scipy.fft.ifft(spec, axis=0)
    return y[rows] * np.sqrt(config.L)


def _apply_At_arr(config, y):
    """A' @ y for y of shape (M,) or (M, k); returns (N,) or (N, k)."""
    y = np.asarray(y)
    if y.shape[0] != config.M:
        raise DimensionMismatch(f"expected {config.M} samples, got {y.shape[0]}")
    bins, rows = _grids(config)
    emb = np.zeros((config.L,) + y.shape[1:], dtype=np.complex128)
    emb[rows] = y
    Y = scipy.fft.fft(emb, axis=0)
    return Y[bins] / np.sqrt(config.L)


def apply_A(config, c):
    """Apply the FE matrix: (Ac)_l = (2Tm)^{-1/2} sum_k c_k e^{i pi k l/(Tm)}.

    Computed by zero-embedding c into a length-L spectrum, one inverse
    DFT, and selecting the M centered outputs.

    Parameters
    ----------
    config : ProblemConfig
    c : Coefficients or array of length N

    Returns
    -------
    SampleVector
    """
    return SampleVector(values=_apply_A_arr(config, values_of(c)))


def apply_A_adjoint(config, y):
    """Apply the conjugate transpose A' via one forward DFT of length L."""
    return Coefficients(values=_apply_At_arr(config, values_of(y)), T=config.T)


def apply_P(config, y):
    """Apply P = AA' - I, which annihilates both ends of the spectrum.

    Left singular vectors with sigma ~ 1 or sigma ~ 0 are damped to O(tau);
    only the plunge region survives with O(1) weight.
    """
    v = values_of(y)
    return SampleVector(values=_apply_A_arr(config, _apply_At_arr(config, v)) - v)


def dense_A(config):
    """Entry-wise A as an M x N complex matrix.  Oracle use only.

    Raises
    ------
    TooLarge
        If N*M exceeds the oracle budget of 4e6 entries.
    """
    if config.N * config.M > DENSE_BUDGET:
        raise TooLarge(f"dense A with N*M = {config.N * config.M} exceeds {DENSE_BUDGET}")
    k = np.arange(-config.n, config.n + 1)
    l = np.arange(-config.m, config.m + 1)
    return np.exp(2j * np.pi * np.outer(l, k) / config.L) / np.sqrt(config.L)


def gram_discrete(config):
    """A'A as a real symmetric Toeplitz N x N matrix, in closed form.

    Entries depend only on delta = p - q:
    (1/L) sin(M pi delta/L) / sin(pi delta/L), with diagonal M/L.
    """
    delta = np.arange(1, config.N)
    col = np.empty(config.N)
    col[0] = config.M / config.L
    col[1:] = np.sin(config.M * np.pi * delta / config.L) / (
        config.L * np.sin(np.pi * delta / config.L)
    )
    return toeplitz(col)


def dense_lowpass(N_band, L):
    """The L x L circulant low-pass filter B with band width N_band.

    B_{p,l} = (1/L) sin((p-l) N_band pi/L) / sin((p-l) pi/L), diagonal
    N_band/L.  Idempotent: it is the projection onto the N_band lowest
    DFT modes.  AA' = D_M B_N D_M' where D_M selects the M sample rows.
    """
    j = np.arange(1, L)
    col = np.empty(L)
    col[0] = N_band / L
    col[1:] = np.sin(N_band * np.pi * j / L) / (L * np.sin(np.pi * j / L))
    return circulant(col)


def gram_continuous(N, T):
    """Continuous-FE Grammian: Abar_{ij} = sin(pi(i-j)/T) / (pi(i-j)).

    Real symmetric Toeplitz with diagonal 1/T; the continuous analogue
    of gram_discrete (inner products of the basis over [-1, 1]).
    """
    T = float(T)
    delta = np.arange(1, N)
    col = np.empty(N)
    col[0] = 1.0 / T
    col[1:] = np.sin(np.pi * delta / T) / (np.pi * delta)
    return toeplitz(col)


_circ_cache = {}
_circ_lock = threading.Lock()


def _circ_kernel(N, T):
    """FFT of the circulant embedding of the continuous Grammian."""
    key = (N, float(T))
    hit = _circ_cache.get(key)
    if hit is None:
        K = scipy.fft.next_fast_len(2 * N - 1)
        col = gram_continuous(N, T)[:, 0]
        ext = np.zeros(K)
        ext[:N] = col
        ext[K - N + 1 :] = col[1:][::-1]
        with _circ_lock:
            hit = _circ_cache.setdefault(key, (K, scipy.fft.fft(ext)))
    return hit


def apply_gram_continuous(N, T, x):
    """gram_continuous(N, T) @ x in O(N log N) by circulant embedding."""
    x = values_of(x)
    if x.shape[0] != N:
        raise DimensionMismatch(f"expected length {N}, got {x.shape[0]}")
    K, kern = _circ_kernel(N, T)
    shape = (K,) + x.shape[1:]
    pad = np.zeros(shape, dtype=np.complex128)
    pad[:N] = x
    kern_shaped = kern.reshape((K,) + (1,) * (x.ndim - 1))
    out = scipy.fft.ifft(kern_shaped * scipy.fft.fft(pad, axis=0), axis=0)[:N]
    if np.isrealobj(x):
        return out.real
    return out
