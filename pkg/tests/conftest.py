"""Shared oracles and config grids for the test suite.

The dense operators here are rebuilt from their defining formulas with
plain numpy, independently of the library's own dense helpers, so the
fast paths are checked against a second implementation rather than
against themselves.
"""

import numpy as np
import pytest

from fourex import ProblemConfig, as_ratio

ORACLE_TS = ("11/10", "2", "19/5")


def oracle_A(config):
    """Dense M x N synthesis matrix straight from the definition.

    A[l, k] = (2Tm)^{-1/2} exp(i pi k l / (T m)), l = -m..m, k = -n..n.
    """
    T = float(config.T)
    l = np.arange(-config.m, config.m + 1)[:, None]
    k = np.arange(-config.n, config.n + 1)[None, :]
    return np.exp(1j * np.pi * k * l / (T * config.m)) / np.sqrt(2 * T * config.m)


def oracle_tsvd(A, b, tau):
    """Truncated-SVD solve and residual, keeping singular values > tau."""
    U, S, Vh = np.linalg.svd(A, full_matrices=False)
    keep = S > tau
    x = Vh.conj().T[:, keep] @ ((U[:, keep].conj().T @ b) / S[keep])
    return x, float(np.linalg.norm(A @ x - b))


def _m_step(T):
    """Smallest m stride keeping L = 2Tm an integer."""
    q = as_ratio(T).denominator
    return q if q % 2 else q // 2


def oracle_grid(max_N=41, max_M=123, Ts=ORACLE_TS):
    """Every valid config with N <= max_N, M <= max_M, T in Ts."""
    out = []
    for T in Ts:
        frac = as_ratio(T)
        step = _m_step(frac)
        for m in range(step, (max_M - 1) // 2 + 1, step):
            for n in range(1, min((max_N - 1) // 2, m) + 1):
                out.append(ProblemConfig(n=n, m=m, T=frac, gamma=m / n))
    return out


def correspondence_grid(max_N=21, Ts=ORACLE_TS):
    """Configs with N <= max_N and N <= M <= 3N, T in Ts."""
    out = []
    for T in Ts:
        frac = as_ratio(T)
        step = _m_step(frac)
        for n in range(1, (max_N - 1) // 2 + 1):
            for m in range(n, 3 * n + 2):
                if m % step:
                    continue
                out.append(ProblemConfig(n=n, m=m, T=frac, gamma=m / n))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
