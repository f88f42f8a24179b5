"""Discrete solvers (dense, explicit, implicit) and the continuous path."""

import warnings

import numpy as np
import pytest

from conftest import oracle_A, oracle_tsvd

from fourex import (
    Coefficients,
    DimensionMismatch,
    DomainError,
    NotConverged,
    ProblemConfig,
    QuadratureWarning,
    TleOne,
    alpha_complete,
    apply_gram_continuous,
    as_ratio,
    continuous_moments,
    gram_continuous,
    resolve,
    residual,
    solve_continuous,
    solve_explicit,
    solve_implicit,
    solve_tsvd_dense,
    values_of,
)
from fourex.approx import ABS, RUNGE, SQUARE, sample
from fourex.solver import _continuous_window_and_basis

CFG = ProblemConfig(n=5, m=10, T=as_ratio("2"), gamma=2.0)  # N=11, M=21
TAU = CFG.tau


def image_rhs(rng, config):
    A = oracle_A(config)
    x = rng.standard_normal(config.N) + 1j * rng.standard_normal(config.N)
    return A, A @ x


class TestAlphaComplete:
    def test_zero_stays_zero(self):
        out = alpha_complete(CFG, np.zeros(21), np.zeros(11, dtype=complex))
        assert np.all(values_of(out) == 0)

    def test_fixed_point_of_a_solution(self, rng):
        A, b = image_rhs(rng, CFG)
        nb = np.linalg.norm(b)
        dense = solve_tsvd_dense(CFG, b)
        out = alpha_complete(CFG, b, dense.coefficients)
        change = np.linalg.norm(A @ (values_of(out) - dense.coefficients.values))
        assert change <= 50 * TAU * nb
        assert residual(CFG, out, b) <= 50 * TAU * nb

    def test_completes_a_plunge_only_solution(self, rng):
        # keep only the modes with sigma strictly inside (tau, 1-tau);
        # one completion must recover full accuracy
        A, b = image_rhs(rng, CFG)
        nb = np.linalg.norm(b)
        U, S, Vh = np.linalg.svd(A, full_matrices=False)
        beta = (S > TAU) & (S < 1 - TAU)
        w = (U.conj().T @ b)[beta] / S[beta]
        x_beta = Vh.conj().T[:, beta] @ w
        out = alpha_complete(CFG, b, x_beta)
        assert residual(CFG, out, b) <= 50 * TAU * nb

    def test_single_application_is_not_a_solver(self, rng):
        # from zero it fills only the near-unit modes; the plunge part
        # stays unsolved, so the residual remains O(1)
        _, b = image_rhs(rng, CFG)
        out = alpha_complete(CFG, b, np.zeros(11, dtype=complex))
        assert residual(CFG, out, b) > 1e-3 * np.linalg.norm(b)


class TestSolveExplicit:
    def test_zero_rhs(self):
        rep = solve_explicit(CFG, np.zeros(21))
        assert rep.residual_l2 == 0.0
        assert np.all(rep.coefficients.values == 0)

    def test_matches_dense_on_image_rhs(self, rng):
        A, b = image_rhs(rng, CFG)
        nb = np.linalg.norm(b)
        rep = solve_explicit(CFG, b)
        dense = solve_tsvd_dense(CFG, b)
        assert rep.residual_l2 <= 50 * TAU * nb
        gap = np.linalg.norm(A @ (rep.coefficients.values - dense.coefficients.values))
        assert gap <= 50 * TAU * nb

    def test_plunge_projections_match_dense(self, rng):
        A, b = image_rhs(rng, CFG)
        U, S, Vh = np.linalg.svd(A, full_matrices=False)
        beta = (S > TAU) & (S < 1 - TAU)
        w = (U.conj().T @ b)[beta] / S[beta]
        x = solve_explicit(CFG, b).coefficients.values
        proj = Vh[beta, :].conj() @ x
        assert np.max(np.abs(proj - w)) <= 1e-9 * np.linalg.norm(b)

    def test_deterministic(self, rng):
        _, b = image_rhs(rng, CFG)
        x1 = solve_explicit(CFG, b).coefficients.values
        x2 = solve_explicit(CFG, b).coefficients.values
        assert np.array_equal(x1, x2)

    def test_report_fields(self, rng):
        _, b = image_rhs(rng, CFG)
        rep = solve_explicit(CFG, b)
        assert rep.method == "explicit"
        assert rep.plunge_size >= 1
        assert rep.wall_seconds >= 0.0
        assert rep.coefficient_norm == pytest.approx(
            np.linalg.norm(rep.coefficients.values)
        )

    def test_norm_safety(self, rng):
        for _ in range(5):
            _, b = image_rhs(rng, CFG)
            rep = solve_explicit(CFG, b)
            assert rep.coefficient_norm <= (1.0 / TAU) * np.linalg.norm(b)

    def test_not_converged_carries_report(self):
        cfg = resolve("2", 20, 2.0)
        b = sample(RUNGE, cfg)
        with pytest.raises(NotConverged) as exc:
            solve_explicit(cfg, b)
        rep = exc.value.report
        assert rep.method == "explicit"
        assert rep.coefficients.values.shape == (41,)
        assert 1e-8 < rep.residual_l2 < 1e-3

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            solve_explicit(CFG, np.zeros(20))


class TestSolveImplicit:
    def test_zero_rhs(self):
        rep = solve_implicit(CFG, np.zeros(21))
        assert rep.residual_l2 == 0.0
        assert np.all(rep.coefficients.values == 0)

    def test_deterministic_given_seed(self, rng):
        _, b = image_rhs(rng, CFG)
        x1 = solve_implicit(CFG, b, seed=4).coefficients.values
        x2 = solve_implicit(CFG, b, seed=4).coefficients.values
        assert np.array_equal(x1, x2)

    def test_accuracy_tracks_dense(self, rng):
        cfg = ProblemConfig(n=17, m=35, T=as_ratio("2"), gamma=35 / 17)
        A, b = image_rhs(rng, cfg)
        nb = np.linalg.norm(b)
        dense = solve_tsvd_dense(cfg, b)
        for method in (solve_explicit, solve_implicit):
            rep = method(cfg, b)
            assert rep.residual_l2 <= 10 * dense.residual_l2 + 1e-12 * nb

    def test_report_sketch_width(self, rng):
        _, b = image_rhs(rng, CFG)
        rep = solve_implicit(CFG, b)
        assert rep.method == "implicit"
        assert rep.plunge_size == CFG.N  # R clipped to N on a tiny problem


class TestSolveTsvdDense:
    def test_basis_column_rhs(self):
        e0 = np.zeros(11)
        e0[5] = 1.0
        A = oracle_A(CFG)
        b = A @ e0
        rep = solve_tsvd_dense(CFG, b)
        assert rep.residual_l2 <= 1e-12 * np.linalg.norm(b)
        assert rep.method == "dense"

    def test_threshold_above_spectrum_returns_zero(self, rng):
        _, b = image_rhs(rng, CFG)
        rep = solve_tsvd_dense(CFG, b, tau=2.0)
        assert np.all(rep.coefficients.values == 0)
        assert rep.plunge_size == 0

    def test_agrees_with_oracle_tsvd(self, rng):
        A, b = image_rhs(rng, CFG)
        x, res = oracle_tsvd(A, b, TAU)
        rep = solve_tsvd_dense(CFG, b)
        assert np.linalg.norm(rep.coefficients.values - x) <= 1e-12
        assert rep.residual_l2 == pytest.approx(res, abs=1e-14)


class TestResidual:
    def test_zero_everything(self):
        assert residual(CFG, np.zeros(11, complex), np.zeros(21)) == 0.0

    def test_pure_rhs(self, rng):
        b = rng.standard_normal(21)
        assert residual(CFG, np.zeros(11, complex), b) == pytest.approx(
            np.linalg.norm(b)
        )

    def test_accepts_coefficients(self, rng):
        x = Coefficients(values=rng.standard_normal(11).astype(complex), T=CFG.T)
        A = oracle_A(CFG)
        b = rng.standard_normal(21)
        assert residual(CFG, x, b) == pytest.approx(
            np.linalg.norm(A @ x.values - b), abs=1e-12
        )


class TestContinuousMoments:
    def test_smooth_target_is_quiet(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            mo = continuous_moments(SQUARE, 21, 2.0)
        assert mo.shape == (21,)

    def test_kink_warns(self):
        with pytest.warns(QuadratureWarning):
            continuous_moments(ABS, 21, 2.0)

    def test_center_moment_is_the_mean(self):
        # k = 0 row integrates f/sqrt(2T)
        mo = continuous_moments(SQUARE, 9, 2.0)
        assert mo[4] == pytest.approx((2.0 / 3.0) / 2.0, abs=1e-13)

    def test_validation(self):
        with pytest.raises(DomainError):
            continuous_moments(SQUARE, 8, 2.0)
        with pytest.raises(DomainError):
            continuous_moments(SQUARE, 0, 2.0)


class TestSolveContinuous:
    def test_gram_image_rhs_both_methods(self):
        N, T = 21, 2.0
        e0 = np.zeros(N, dtype=complex)
        e0[N // 2] = 1.0
        b = apply_gram_continuous(N, T, e0)
        nb = np.linalg.norm(b)
        for method in ("explicit", "implicit"):
            rep = solve_continuous(N, T, b, method=method)
            assert rep.residual_l2 <= 1e-12 * nb
            assert rep.method == f"continuous-{method}"

    def test_window_eigenvalues_match_dense(self):
        w, psi, lam = _continuous_window_and_basis(9, 2.0, 1e-14)
        assert (w.lo, w.hi) == (0, 8)
        dense = np.linalg.eigvalsh(gram_continuous(9, 2.0))[::-1]
        assert np.max(np.abs(lam - dense[w.lo : w.hi + 1])) <= 1e-12

    def test_validation(self):
        b = np.zeros(9)
        with pytest.raises(TleOne):
            solve_continuous(9, 1.0, b)
        with pytest.raises(DomainError):
            solve_continuous(8, 2.0, b[:8])
        with pytest.raises(DimensionMismatch):
            solve_continuous(9, 2.0, np.zeros(7))
        with pytest.raises(DomainError):
            solve_continuous(9, 2.0, b, method="banana")
