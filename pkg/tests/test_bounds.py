"""Inequality and identity checkers with hand-built oracles, plus the sweeps."""

import math

import numpy as np
import pytest

from ssf_lab.bounds import (
    BoundReport,
    TestFunction,
    check_chain_rule,
    check_chn_lp_bound,
    check_invariance_principle,
    check_rank_bound,
    check_schatten_product,
    check_spectral_averaging,
    check_trace_formula,
    gaussian_test_function,
    polynomial_test_function,
    resolvent_scaling_study,
    standard_sweep,
    sweep_chain_rule,
    sweep_invariance,
    sweep_spectral_averaging,
)
from ssf_lab.model import (
    DiagonalPotential,
    DisorderSpec,
    SurfaceGeometry,
    SymmetricOperator,
    bulk_box,
)
from ssf_lab.spectral import MarginError


def op(diag_or_matrix):
    m = np.asarray(diag_or_matrix, dtype=float)
    if m.ndim == 1:
        m = np.diag(m)
    return SymmetricOperator(m)


class TestTestFunctions:
    def test_polynomial_and_derivative(self):
        phi = polynomial_test_function([0.0, 0.0, 1.0])
        assert phi.f(3.0) == 9.0
        assert phi.df(3.0) == 6.0
        assert phi.name == "poly[0.0, 0.0, 1.0]"
        assert phi.domain == (-math.inf, math.inf)

    def test_gaussian_derivative_matches_difference_quotient(self):
        phi = gaussian_test_function(0.3, 1.1)
        h = 1e-6
        for x in (-1.0, 0.0, 0.7, 2.5):
            numeric = (phi.f(x + h) - phi.f(x - h)) / (2.0 * h)
            assert abs(phi.df(x) - numeric) < 1e-8


class TestTraceFormula:
    def test_one_by_one_square(self):
        rep = check_trace_formula(op([0.0]), op([1.0]), polynomial_test_function([0.0, 0.0, 1.0]))
        assert rep.holds
        assert rep.context["trace_side"] == pytest.approx(1.0, abs=1e-14)
        assert rep.context["integral_side"] == pytest.approx(1.0, abs=1e-14)
        assert rep.lhs < 1e-12

    def test_linear_test_function_gives_trace_of_perturbation(self):
        # phi(x) = x: both sides equal tr(C)
        rng = np.random.default_rng(10)
        g = rng.standard_normal((5, 5))
        a = SymmetricOperator((g + g.T) / 2.0)
        c = op([0.7, 0.0, -0.2, 0.0, 0.0])
        rep = check_trace_formula(a, c, polynomial_test_function([0.0, 1.0]))
        assert rep.holds
        assert rep.context["trace_side"] == pytest.approx(0.5, abs=1e-10)

    def test_domain_must_cover_spectra(self):
        narrow = TestFunction("narrow", lambda x: x, lambda x: np.ones_like(x), (0.0, 0.5))
        with pytest.raises(ValueError):
            check_trace_formula(op([0.0]), op([1.0]), narrow)


class TestChnBound:
    def test_p_below_one_rejected(self):
        with pytest.raises(ValueError):
            check_chn_lp_bound(op([0.0]), op([1.0]), 0.5)

    def test_rank_one_diagonal_saturates_exactly(self):
        # diagonal integer base + dyadic rank-one bump: both sides reduce to
        # the same power of two, so the bound is an exact float equality
        a = op([0.0, 1.0, 2.0, 3.0])
        c = np.zeros((4, 4))
        c[0, 0] = 0.5
        c = SymmetricOperator(c)
        for p in (1.0, 2.0, 4.0):
            rep = check_chn_lp_bound(a, c, p)
            assert rep.holds
            assert rep.lhs == rep.rhs

    def test_strict_inequality_generic(self):
        rng = np.random.default_rng(11)
        g = rng.standard_normal((6, 6))
        a = SymmetricOperator((g + g.T) / 2.0)
        u = rng.standard_normal((6, 1))
        c = SymmetricOperator(u @ u.T)
        for p in (1.0, 2.0, 4.0):
            rep = check_chn_lp_bound(a, c, p)
            assert rep.holds
            assert rep.slack >= 0.0


class TestRankBound:
    def test_exact_integer_values(self):
        rng = np.random.default_rng(12)
        g = rng.standard_normal((7, 7))
        a = SymmetricOperator((g + g.T) / 2.0)
        u = rng.standard_normal((7, 2))
        c = SymmetricOperator(u @ u.T)
        rep = check_rank_bound(a, c)
        assert rep.holds
        assert rep.lhs == float(int(rep.lhs))
        assert rep.rhs == 2.0

    def test_positive_rank_one_saturates(self):
        rep = check_rank_bound(op([0.0, 1.0]), op([0.5, 0.0]))
        assert rep.lhs == 1.0 and rep.rhs == 1.0 and rep.holds


class TestInvariancePrinciple:
    def test_one_by_one_exact(self):
        rep = check_invariance_principle(op([0.0]), op([1.0]), shift=2.0, power=1)
        assert rep.holds
        assert rep.lhs == 0.0
        assert not rep.context["degenerate"]

    def test_sweep_is_exact_everywhere(self):
        reps = sweep_invariance(21, 50)
        assert len(reps) == 50
        assert all(r.lhs == 0.0 for r in reps)
        assert not any(r.context["degenerate"] for r in reps)


class TestChainRule:
    def test_mixed_sign_potential(self):
        box = bulk_box(1, 4)
        from ssf_lab.model import build_box_laplacian

        h0 = build_box_laplacian(box)
        v = DiagonalPotential(box, {(0,): 1.5, (2,): -0.7})
        rep = check_chain_rule(h0, v)
        assert rep.holds
        assert rep.lhs == 0.0
        assert rep.context["identity_gap"] == 0.0
        assert rep.context["min_gain"] >= 0.0
        assert rep.context["max_loss"] <= 0.0

    def test_sweep(self):
        reps = sweep_chain_rule(22, 25)
        assert len(reps) == 25
        assert all(r.holds for r in reps)
        assert all(r.context["min_gain"] >= 0.0 for r in reps)
        assert all(r.context["max_loss"] <= 0.0 for r in reps)


class TestSchattenProduct:
    def test_diagonal_hand_values(self):
        t1, t2 = np.diag([2.0, 0.0]), np.diag([3.0, 1.0])
        rep = check_schatten_product(t1, t2, 2.0, 2.0)
        assert rep.context["p"] == 1.0
        assert rep.lhs == pytest.approx(6.0, rel=1e-12)
        assert rep.rhs == pytest.approx(2.0 * math.sqrt(10.0), rel=1e-12)
        assert rep.holds

    def test_identity_pair_is_tight(self):
        eye = np.eye(3)
        rep = check_schatten_product(eye, eye, 1.0, 1.0)
        # 1/p = 2 so p = 1/2: |I|_{1/2} = 9 = |I|_1 * |I|_1
        assert rep.lhs == pytest.approx(9.0, rel=1e-12)
        assert rep.rhs == pytest.approx(9.0, rel=1e-12)

    def test_infinite_exponents(self):
        t = np.diag([2.0, 1.0])
        rep = check_schatten_product(t, t, math.inf, math.inf)
        assert rep.context["p"] == math.inf
        assert rep.lhs == pytest.approx(4.0, rel=1e-12)
        assert rep.rhs == pytest.approx(4.0, rel=1e-12)

    def test_exponent_validation(self):
        with pytest.raises(ValueError):
            check_schatten_product(np.eye(2), np.eye(2), 0.0, 1.0)

    def test_accepts_symmetric_operators(self):
        rep = check_schatten_product(op([1.0, 2.0]), op([0.5, 3.0]), 1.0, 2.0)
        assert rep.holds


class TestSpectralAveraging:
    def test_one_by_one_exact_half(self):
        a = op([0.0])
        v = DiagonalPotential(bulk_box(1, 1), {(0,): 1.0})
        rep = check_spectral_averaging(a, v, 0.0, 1.0, (-0.5, 0.5))
        assert rep.holds
        assert rep.context["exact_side"] == 0.5
        assert rep.context["quadrature_side"] == pytest.approx(0.5, abs=1e-12)

    def test_zero_potential(self):
        a = op([0.0, 1.0])
        v = DiagonalPotential(bulk_box(1, 2), {})
        rep = check_spectral_averaging(a, v, 0.0, 1.0, (-0.5, 0.5))
        assert rep.holds
        assert rep.context["exact_side"] == 0.0
        assert rep.context["quadrature_side"] == 0.0

    def test_endpoint_collision_takes_jitter_path(self):
        # the flat eigenvalue 0.3 sits exactly on the interval endpoint at
        # every node, forcing the jitter fallback; it carries no V-weight so
        # both sides still equal the sweep length 0.4
        a = op([0.0, 0.3])
        v = DiagonalPotential(bulk_box(1, 2), {(0,): 1.0})
        rep = check_spectral_averaging(a, v, 0.4, 0.8, (0.3, 1.0), n_nodes=128)
        assert rep.holds
        assert rep.context["jittered_nodes"] > 0
        assert rep.context["exact_side"] == pytest.approx(0.4, abs=1e-12)
        assert rep.context["quadrature_side"] == pytest.approx(0.4, abs=1e-6)

    def test_crossing_splits_panels(self):
        # eigenvalue s of A + sV crosses the upper endpoint inside the sweep
        a = op([0.0, 5.0])
        v = DiagonalPotential(bulk_box(1, 2), {(0,): 1.0})
        rep = check_spectral_averaging(a, v, 0.0, 1.0, (-0.25, 0.5))
        assert rep.holds
        assert rep.context["panels"] >= 2
        # shift is the indicator of [eig in (alpha_minus, alpha_plus)] region:
        # integral over I counts s in [0, 0.5) crossing, area 0.5
        assert rep.context["exact_side"] == pytest.approx(0.5, abs=1e-12)

    def test_negative_potential_rejected(self):
        v = DiagonalPotential(bulk_box(1, 2), {(0,): -1.0})
        with pytest.raises(ValueError):
            check_spectral_averaging(op([0.0, 1.0]), v, 0.0, 1.0, (0.0, 1.0))

    def test_bad_sweep_interval_rejected(self):
        v = DiagonalPotential(bulk_box(1, 1), {(0,): 1.0})
        with pytest.raises(ValueError):
            check_spectral_averaging(op([0.0]), v, 1.0, 0.0, (0.0, 1.0))
        with pytest.raises(ValueError):
            check_spectral_averaging(op([0.0]), v, 0.0, 1.0, (1.0, 1.0))

    def test_sweep(self):
        reps = sweep_spectral_averaging(23, 8)
        assert len(reps) == 8
        assert all(r.holds for r in reps)


class TestScalingStudy:
    def geoms(self, sizes=(2, 3, 4)):
        return [SurfaceGeometry(2, 1, L, W=1, P=1) for L in sizes]

    def test_zero_potential_gives_zero_norms(self):
        study = resolvent_scaling_study(
            self.geoms(), DisorderSpec.point_mass(0.0), 1.0, 1, 10.0, 2, 31
        )
        assert all(r.mean_qnorm_p == 0.0 for r in study.rows)
        assert math.isnan(study.fit_slope)

    def test_point_mass_norms_increase_with_window(self):
        study = resolvent_scaling_study(
            self.geoms((2, 3, 4, 5)), DisorderSpec.point_mass(0.8), 1.0, 1, 10.0, 1, 32
        )
        means = [r.mean_qnorm_p for r in study.rows]
        assert all(a < b for a, b in zip(means, means[1:]))
        assert all(r.constant > 0 for r in study.rows)

    def test_margin_violation_raises(self):
        with pytest.raises(MarginError):
            resolvent_scaling_study(
                self.geoms((2,)), DisorderSpec.point_mass(0.0), 1.0, 1, 0.0, 1, 33
            )

    def test_worker_invariance(self):
        kwargs = dict(p=1.0, k=1, c=10.0, realizations=4, master_seed=34)
        s1 = resolvent_scaling_study(self.geoms(), DisorderSpec.uniform(0, 1), **kwargs, workers=1)
        s4 = resolvent_scaling_study(self.geoms(), DisorderSpec.uniform(0, 1), **kwargs, workers=4)
        assert s1 == s4


class TestSweeps:
    def test_standard_sweep_shape_and_families(self):
        reps = standard_sweep(24, instances=2, averaging_instances=1)
        assert len(reps) == 2 + 6 + 2 + 2 + 2 + 2 + 1
        names = {r.name for r in reps}
        assert names == {
            "trace_formula",
            "chn_lp",
            "rank_bound",
            "invariance_principle",
            "chain_rule",
            "schatten_product",
            "spectral_averaging",
        }
        assert all(isinstance(r, BoundReport) for r in reps)
        assert all(r.holds for r in reps)

    def test_sweep_deterministic_and_worker_invariant(self):
        a = standard_sweep(25, instances=3, averaging_instances=2, workers=1)
        b = standard_sweep(25, instances=3, averaging_instances=2, workers=4)
        assert len(a) == len(b)
        for ra, rb in zip(a, b):
            assert (ra.name, ra.lhs, ra.rhs, ra.holds, ra.slack) == (
                rb.name,
                rb.lhs,
                rb.rhs,
                rb.holds,
                rb.slack,
            )
            assert ra.context == rb.context

    def test_seed_changes_instances(self):
        a = standard_sweep(26, instances=2, averaging_instances=1)
        b = standard_sweep(27, instances=2, averaging_instances=1)
        assert any(ra.lhs != rb.lhs for ra, rb in zip(a, b))
