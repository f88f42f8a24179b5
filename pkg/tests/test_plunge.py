"""Plunge window location, singular triplets, and the sketched solver."""

import math

import numpy as np
import pytest

from conftest import oracle_A

from fourex import (
    Coefficients,
    MappingMismatch,
    ProblemConfig,
    RankDeficientSketch,
    as_ratio,
    implicit_plunge_solve,
    pdpss_triplets,
    plunge_window,
    random_sketch,
    resolve,
)
from fourex.plunge import _assert_descending

CFG_SMALL = ProblemConfig(n=5, m=10, T=as_ratio("2"), gamma=2.0)  # N=11, M=21


def dense_sigmas(config):
    return np.linalg.svd(oracle_A(config), compute_uv=False)


class TestPlungeWindow:
    def test_large_window_location(self):
        cfg = resolve("2", 200, 2.0)  # N=401, M=801, L=1600
        w = plunge_window(cfg)
        assert w.center == pytest.approx(401 * 801 / 1600, abs=1e-12)
        assert w.lo <= 183 and w.hi >= 236
        s = dense_sigmas(cfg)
        assert s[w.lo] >= 1 - cfg.tau
        assert s[w.hi] <= cfg.tau

    def test_edges_bracket_the_plunge(self):
        for cfg in (CFG_SMALL, resolve("19/5", 20, 2.0)):
            w = plunge_window(cfg)
            s = dense_sigmas(cfg)
            rank = min(cfg.N, cfg.M)
            assert 0 <= w.lo <= w.hi < rank
            if w.lo > 0:
                assert s[w.lo] >= 1 - cfg.tau
            if w.hi < rank - 1:
                assert s[w.hi] <= cfg.tau

    def test_tiny_problem_uses_whole_spectrum(self):
        cfg = ProblemConfig(n=1, m=2, T=as_ratio("2"), gamma=2.0)
        w = plunge_window(cfg)
        assert (w.lo, w.hi) == (0, 2)
        assert w.size == 3

    def test_size_property(self):
        w = plunge_window(CFG_SMALL)
        assert w.size == w.hi - w.lo + 1


class TestPdpssTriplets:
    def test_triplet_identity(self):
        A = oracle_A(CFG_SMALL)
        w = plunge_window(CFG_SMALL)
        basis = pdpss_triplets(CFG_SMALL, w)
        assert len(basis.triplets) == w.size
        for t in basis.triplets:
            assert abs(abs(t.phase) - 1.0) <= 1e-13
            assert np.isrealobj(t.u) and np.isrealobj(t.v)
            assert np.linalg.norm(t.u) == pytest.approx(1.0, abs=1e-12)
            assert np.linalg.norm(t.v) == pytest.approx(1.0, abs=1e-12)
            r = A @ t.v - t.phase * t.sigma * t.u
            assert np.linalg.norm(r) <= 1e-9

    def test_sigmas_match_dense_svd(self):
        w = plunge_window(CFG_SMALL)
        basis = pdpss_triplets(CFG_SMALL, w)
        s = dense_sigmas(CFG_SMALL)[w.lo : w.hi + 1]
        assert np.max(np.abs(basis.sigmas - s)) <= 1e-10

    def test_sigmas_descend(self):
        cfg = resolve("11/10", 30, 2.0)
        w = plunge_window(cfg)
        sig = pdpss_triplets(cfg, w).sigmas
        mid = (sig > 1e-13) & (sig < 1 - 1e-13)
        assert np.all(np.diff(sig[mid]) < 0)

    def test_descending_guard(self):
        _assert_descending(np.array([1.0, 1.0, 0.7, 1e-3, 1e-16, 2e-16]))
        with pytest.raises(MappingMismatch):
            _assert_descending(np.array([1.0, 0.3, 0.9, 1e-16]))


class TestRandomSketch:
    def test_shape_and_determinism(self):
        cfg = resolve("2", 200, 2.0)  # N=401
        s1 = random_sketch(cfg, seed=7)
        s2 = random_sketch(cfg, seed=7)
        s3 = random_sketch(cfg, seed=8)
        assert s1.R == round(9.0 * math.log(401)) + 10 == 64
        assert s1.W.shape == (401, 64)
        assert np.array_equal(s1.W, s2.W)
        assert not np.array_equal(s1.W, s3.W)

    def test_column_norms_near_expectation(self):
        cfg = resolve("2", 200, 2.0)
        W = random_sketch(cfg, seed=0).W
        norms = np.linalg.norm(W, axis=0)
        expect = math.sqrt(cfg.N / 3.0)
        assert np.all(np.abs(norms / expect - 1.0) <= 0.2)

    def test_R_clipped(self):
        assert random_sketch(CFG_SMALL, C=0.0, D=0).R == 1
        assert random_sketch(CFG_SMALL, C=50.0, D=10).R == CFG_SMALL.N


class TestImplicitPlungeSolve:
    def test_zero_rhs(self):
        sk = random_sketch(CFG_SMALL)
        out = implicit_plunge_solve(CFG_SMALL, np.zeros(21), sk)
        assert isinstance(out, Coefficients)
        assert np.all(out.values == 0)

    def test_consistent_rhs_meets_projected_bound(self, rng):
        # b in the image of A: the solve must succeed, which certifies
        # projected residual <= 10 tau ||b|| by construction
        A = oracle_A(CFG_SMALL)
        sk = random_sketch(CFG_SMALL, seed=3)
        for _ in range(5):
            b = A @ (rng.standard_normal(11) + 1j * rng.standard_normal(11))
            out = implicit_plunge_solve(CFG_SMALL, b, sk)
            assert out.values.shape == (11,)
            assert np.all(np.isfinite(out.values))

    def test_deterministic(self, rng):
        A = oracle_A(CFG_SMALL)
        b = A @ rng.standard_normal(11)
        sk = random_sketch(CFG_SMALL, seed=5)
        x1 = implicit_plunge_solve(CFG_SMALL, b, sk).values
        x2 = implicit_plunge_solve(CFG_SMALL, b, sk).values
        assert np.array_equal(x1, x2)

    def test_starved_sketch_reports_candidate(self, rng):
        # R=1 cannot span the plunge subspace for a generic rhs; the
        # failure must still carry the candidate coefficients
        sk = random_sketch(CFG_SMALL, C=0.0, D=1, seed=2)
        b = rng.standard_normal(21) + 1j * rng.standard_normal(21)
        with pytest.raises(RankDeficientSketch) as exc:
            implicit_plunge_solve(CFG_SMALL, b, sk)
        err = exc.value
        assert err.projected_residual > 10 * CFG_SMALL.tau * np.linalg.norm(b)
        assert isinstance(err.coefficients, Coefficients)
        assert err.coefficients.values.shape == (11,)
