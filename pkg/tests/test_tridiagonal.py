"""Commuting tridiagonal construction and the selected eigenpair solver."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import oracle_A

from fourex import (
    DomainError,
    IndexOutOfRange,
    ProblemConfig,
    SymTridiag,
    as_ratio,
    build_commuting,
    build_commuting_continuous,
    eig_range,
    gram_continuous,
    gram_discrete,
)
from fourex import _kernels

B1_358 = 0.2705980500730984921998616026831947100305

BACKENDS = ["pure"]
try:
    _kernels.get("compiled")
    BACKENDS.append("compiled")
except ImportError:
    pass


class TestBuildCommuting:
    def test_small_entries(self):
        T = build_commuting(3, 5, 8)
        assert T.offdiag[0] == pytest.approx(B1_358, rel=1e-14)
        assert T.diag[0] == pytest.approx(T.diag[2], abs=1e-15)

    def test_domain(self):
        with pytest.raises(DomainError):
            build_commuting(9, 5, 8)
        with pytest.raises(DomainError):
            build_commuting(3, 9, 8)

    def test_commutes_with_gram(self):
        cfg = ProblemConfig(n=2, m=4, T=as_ratio("2"), gamma=2.0)  # N=5, M=9
        G = gram_discrete(cfg)
        Td = build_commuting(cfg.N, cfg.M, cfg.L).to_dense()
        comm = np.linalg.norm(Td @ G - G @ Td) / np.linalg.norm(G)
        assert comm <= 1e-12

    def test_row_side_commutes_with_AAt(self):
        cfg = ProblemConfig(n=2, m=4, T=as_ratio("2"), gamma=2.0)
        A = oracle_A(cfg)
        AAt = (A @ A.conj().T).real
        Td = build_commuting(cfg.M, cfg.N, cfg.L).to_dense()
        comm = np.linalg.norm(Td @ AAt - AAt @ Td) / np.linalg.norm(AAt)
        assert comm <= 1e-12


class TestBuildCommutingContinuous:
    def test_diag_vanishes_at_T2(self):
        T = build_commuting_continuous(5, 2.0)
        assert np.allclose(T.diag, 0.0, atol=1e-15)
        assert T.offdiag[1] == pytest.approx(3.0, abs=1e-15)

    def test_commutes_with_continuous_gram(self):
        G = gram_continuous(9, 3.8)
        Td = build_commuting_continuous(9, 3.8).to_dense()
        comm = np.linalg.norm(Td @ G - G @ Td) / np.linalg.norm(G)
        assert comm <= 1e-12


class TestEigRange:
    @pytest.mark.parametrize("backend", BACKENDS)
    def test_two_by_two(self, backend):
        T = SymTridiag(diag=np.array([1.0, 1.0]), offdiag=np.array([0.5]))
        sel = eig_range(T, 0, 1, backend=backend)
        assert np.allclose(sel.values, [0.5, 1.5], atol=1e-14)

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_three_by_three(self, backend):
        T = SymTridiag(diag=np.zeros(3), offdiag=np.ones(2))
        sel = eig_range(T, 0, 2, backend=backend)
        assert np.allclose(sel.values, [-math.sqrt(2), 0.0, math.sqrt(2)], atol=1e-14)

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_against_dense_eigensolver(self, backend):
        T = build_commuting(5, 9, 16)
        sel = eig_range(T, 1, 3, backend=backend)
        vals, vecs = np.linalg.eigh(T.to_dense())
        assert np.max(np.abs(sel.values - vals[1:4])) <= 1e-12
        for j in range(3):
            cos = abs(np.dot(sel.vectors[:, j], vecs[:, 1 + j]))
            assert cos >= 1 - 1e-10

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_residual_and_orthogonality(self, backend):
        T = build_commuting(41, 81, 160)
        sel = eig_range(T, 10, 30, backend=backend)
        scale = np.max(np.abs(sel.values))
        for j in range(sel.values.size):
            r = T.matvec(sel.vectors[:, j]) - sel.values[j] * sel.vectors[:, j]
            assert np.linalg.norm(r) <= 1e-12 * max(scale, 1.0)
        gram = sel.vectors.T @ sel.vectors
        assert np.max(np.abs(gram - np.eye(21))) <= 1e-12

    def test_index_out_of_range(self):
        T = SymTridiag(diag=np.zeros(3), offdiag=np.ones(2))
        with pytest.raises(IndexOutOfRange):
            eig_range(T, 0, 3)
        with pytest.raises(IndexOutOfRange):
            eig_range(T, -1, 1)

    def test_size_one(self):
        T = SymTridiag(diag=np.array([4.0]), offdiag=np.zeros(0))
        sel = eig_range(T, 0, 0)
        assert sel.values[0] == 4.0 and sel.vectors[0, 0] == 1.0

    def test_deterministic(self):
        T = build_commuting(21, 41, 84)
        a = eig_range(T, 5, 12)
        b = eig_range(T, 5, 12)
        assert np.array_equal(a.values, b.values)
        assert np.array_equal(a.vectors, b.vectors)

    @pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled backend not built")
    def test_backends_agree_bitwise_on_values(self):
        for (P, Q, L) in [(5, 9, 16), (41, 81, 160), (201, 401, 800)]:
            T = build_commuting(P, Q, L)
            a = eig_range(T, 0, P - 1, backend="pure")
            b = eig_range(T, 0, P - 1, backend="compiled")
            assert np.array_equal(a.values, b.values)  # identical bisection
            # vectors agree to the iteration tolerance
            dots = np.abs(np.einsum("ij,ij->j", a.vectors, b.vectors))
            assert np.min(dots) >= 1 - 1e-9

    def test_centrosymmetric_eigenvectors(self):
        T = build_commuting(15, 29, 60)
        sel = eig_range(T, 0, 14)
        for j in range(15):
            v = sel.vectors[:, j]
            sym = min(np.linalg.norm(v - v[::-1]), np.linalg.norm(v + v[::-1]))
            assert sym <= 1e-8

    def test_eigenvalues_distinct(self):
        for (P, Q, L) in [(11, 21, 40), (21, 41, 84), (41, 121, 484)]:
            T = build_commuting(P, Q, L)
            vals = eig_range(T, 0, P - 1).values
            assert np.min(np.diff(vals)) > 0

    @given(st.integers(0, 2**32 - 1), st.integers(2, 40))
    @settings(max_examples=40, deadline=None)
    def test_random_matrices_match_dense(self, seed, P):
        r = np.random.default_rng(seed)
        T = SymTridiag(diag=r.standard_normal(P), offdiag=r.standard_normal(P - 1))
        sel = eig_range(T, 0, P - 1)
        vals = np.linalg.eigvalsh(T.to_dense())
        scale = np.max(np.abs(vals)) or 1.0
        assert np.max(np.abs(sel.values - vals)) <= 1e-12 * scale
        gram = sel.vectors.T @ sel.vectors
        assert np.max(np.abs(gram - np.eye(P))) <= 1e-9


class TestContinuousLimits:
    """Entries of the discrete companion converge to the continuous ones."""

    N = 9
    MS = (8, 16, 32, 64)

    def test_gram_entries_converge_monotonically(self):
        target = gram_continuous(self.N, 2.0)
        errs = []
        for m in self.MS:
            cfg = ProblemConfig(n=4, m=m, T=as_ratio("2"), gamma=m / 4)
            errs.append(np.max(np.abs(gram_discrete(cfg) - target)))
        assert all(b < a for a, b in zip(errs, errs[1:]))
        assert errs[-1] <= 1e-2

    def test_offdiag_converges_monotonically(self):
        cont = build_commuting_continuous(self.N, 2.0)
        errs = []
        for m in self.MS:
            L = 4 * m
            disc = build_commuting(self.N, 2 * m + 1, L)
            scaled = (L**2 / (2 * np.pi**2)) * disc.offdiag
            errs.append(np.max(np.abs(scaled - cont.offdiag)))
        assert all(b < a for a, b in zip(errs, errs[1:]))

    def test_diag_converges_monotonically(self):
        # limit form: c_k -> (2 pi^2/L^2) cbar_k - cos(pi/T); at T=2 the
        # right side vanishes, so the comparison stays unscaled
        cont = build_commuting_continuous(self.N, 2.0)
        errs = []
        for m in self.MS:
            L = 4 * m
            disc = build_commuting(self.N, 2 * m + 1, L)
            target = (2 * np.pi**2 / L**2) * cont.diag - math.cos(math.pi / 2.0)
            errs.append(np.max(np.abs(disc.diag - target)))
        assert all(b < a for a, b in zip(errs, errs[1:]))
        assert errs[-1] <= 2e-2
