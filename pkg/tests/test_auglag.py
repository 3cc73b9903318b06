"""Augmented Lagrangian values/gradients against finite differences and
closed-form saddle identities."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conic_alm.auglag import (dual_gap_lower_bound, eval_L_dual, eval_L_ineq,
                              eval_L_primal, grad_L_dual_y, grad_L_ineq_x,
                              grad_L_primal_X, grad_L_primal_w, primal_objective)
from conic_alm.inner import minimize_auglag
from conic_alm.model import DualPoint, apply_A, svm_instance
from conic_alm.symcone import frob, inner, symmetrize

from conftest import random_sym
from oracles import fd_grad_sym, fd_grad_vec


def rand_dual(rng, p, scale=1.0):
    return DualPoint(y=rng.standard_normal(p.m) * scale,
                     Z=random_sym(rng, p.n, scale))


class TestPrimalValue:
    def test_saddle_value_toy(self, toy):
        w_star = toy.w_star
        for r in (0.5, 1.0, 2.0, 7.3):
            val = eval_L_primal(toy.problem, toy.x_star, w_star, r)
            assert val == pytest.approx(toy.p_star, abs=1e-12)

    def test_saddle_value_certified(self, certified5):
        for r in (0.5, 1.0, 4.0):
            val = eval_L_primal(certified5.problem, certified5.x_star,
                                certified5.w_star, r)
            assert val == pytest.approx(certified5.p_star, abs=1e-8)

    def test_zero_multipliers_psd_point(self, rng, certified5):
        # with w = 0 and X PSD, the cone term drops and only the affine
        # quadratic remains
        p = certified5.problem
        X = symmetrize(certified5.x_star + 0.1 * np.eye(p.n))
        w0 = DualPoint(y=np.zeros(p.m), Z=np.zeros((p.n, p.n)))
        expected = inner(p.C, X) + 0.5 * float(np.sum((p.b - apply_A(p, X)) ** 2))
        assert eval_L_primal(p, X, w0, 1.0) == pytest.approx(expected, abs=1e-10)

    def test_rejects_bad_r(self, toy):
        with pytest.raises(ValueError):
            eval_L_primal(toy.problem, toy.x_star, toy.w_star, 0.0)

    def test_convexity_in_X(self, rng, certified5):
        p = certified5.problem
        for _ in range(200):
            w = rand_dual(rng, p)
            r = float(rng.uniform(0.3, 4.0))
            X1 = random_sym(rng, p.n)
            X2 = random_sym(rng, p.n)
            v1 = eval_L_primal(p, X1, w, r)
            v2 = eval_L_primal(p, X2, w, r)
            for theta in (0.25, 0.5, 0.75):
                Xm = symmetrize(theta * X1 + (1 - theta) * X2)
                assert eval_L_primal(p, Xm, w, r) <= theta * v1 + (1 - theta) * v2 + 1e-9


class TestPrimalGradients:
    def test_gradient_zero_at_saddle_toy(self, toy):
        g = grad_L_primal_X(toy.problem, toy.x_star, toy.w_star, 1.0)
        assert frob(g) <= 1e-12

    def test_inactive_cone_branch(self, rng, certified5):
        # X strictly PD with Z = 0 and small r: projection term vanishes
        p = certified5.problem
        X = symmetrize(np.eye(p.n) * 2.0)
        y = rng.standard_normal(p.m) * 0.1
        w = DualPoint(y=y, Z=np.zeros((p.n, p.n)))
        r = 0.01
        from conic_alm.model import apply_Astar
        expected = p.C - apply_Astar(p, y + r * (p.b - apply_A(p, X)))
        assert_allclose(grad_L_primal_X(p, X, w, r), expected, atol=1e-12)

    def test_grad_X_finite_differences(self, rng, certified5):
        p = certified5.problem
        for _ in range(100):
            X = random_sym(rng, p.n)
            w = rand_dual(rng, p)
            r = float(rng.uniform(0.3, 3.0))
            g = grad_L_primal_X(p, X, w, r)
            fd = fd_grad_sym(lambda M: eval_L_primal(p, symmetrize(M), w, r), X)
            assert frob(g - fd) <= 1e-5 * (1.0 + frob(fd))

    def test_grad_w_formulas(self, rng, certified5):
        p = certified5.problem
        X = random_sym(rng, p.n)
        w = rand_dual(rng, p)
        gy, gZ = grad_L_primal_w(p, X, w, 1.5)
        assert_allclose(gy, p.b - apply_A(p, X), atol=1e-12)
        # gZ = (proj_psd(Z - rX) - Z) / r
        from conic_alm.symcone import project_psd
        assert_allclose(gZ, (project_psd(symmetrize(w.Z - 1.5 * X)) - w.Z) / 1.5,
                        atol=1e-12)

    def test_grad_y_zero_at_feasible_point(self, certified5):
        gy, _ = grad_L_primal_w(certified5.problem, certified5.x_star,
                                certified5.w_star, 2.0)
        assert np.linalg.norm(gy) <= 1e-12

    def test_grad_Z_zero_projection_branch(self, rng, certified5):
        # Z = rX with X PSD: proj_psd(Z - rX) = 0, so grad_Z = -Z / r
        p = certified5.problem
        r = 2.0
        X = symmetrize(np.eye(p.n) + 0.1 * random_sym(rng, p.n))
        from conic_alm.symcone import project_psd
        X = project_psd(X)
        w = DualPoint(y=np.zeros(p.m), Z=symmetrize(r * X))
        _, gZ = grad_L_primal_w(p, X, w, r)
        assert_allclose(gZ, -w.Z / r, atol=1e-10)

    def test_grad_w_finite_differences(self, rng, certified5):
        p = certified5.problem
        for _ in range(100):
            X = random_sym(rng, p.n)
            w = rand_dual(rng, p)
            r = float(rng.uniform(0.3, 3.0))
            gy, gZ = grad_L_primal_w(p, X, w, r)
            fd_y = fd_grad_vec(lambda v: eval_L_primal(p, X, DualPoint(y=v, Z=w.Z), r), w.y)
            fd_Z = fd_grad_sym(lambda M: eval_L_primal(p, X, DualPoint(y=w.y, Z=symmetrize(M)), r), w.Z)
            assert np.linalg.norm(gy - fd_y) <= 1e-5 * (1.0 + np.linalg.norm(fd_y))
            assert frob(gZ - fd_Z) <= 1e-5 * (1.0 + frob(fd_Z))


class TestDualForm:
    def test_saddle_value(self, certified5):
        for r in (0.5, 1.0, 4.0):
            val = eval_L_dual(certified5.problem, certified5.y_star,
                              certified5.x_star, r)
            assert val == pytest.approx(-certified5.p_star, abs=1e-8)

    def test_inactive_projection(self, toy):
        # X = 0 and C - A*(y) strictly PD: the projection term vanishes
        y = np.array([-0.5, -0.5])
        val = eval_L_dual(toy.problem, y, np.zeros((2, 2)), 1.0)
        assert val == pytest.approx(-float(toy.problem.b @ y), abs=1e-12)

    def test_grad_finite_differences(self, rng, certified5):
        p = certified5.problem
        for _ in range(100):
            y = rng.standard_normal(p.m)
            X = random_sym(rng, p.n)
            r = float(rng.uniform(0.3, 3.0))
            g = grad_L_dual_y(p, y, X, r)
            fd = fd_grad_vec(lambda v: eval_L_dual(p, v, X, r), y)
            assert np.linalg.norm(g - fd) <= 1e-5 * (1.0 + np.linalg.norm(fd))


class TestIneqForm:
    def test_inactive_constraints(self, rng):
        q = svm_instance(rng.standard_normal((4, 2)), np.array([1.0, -1.0, 1.0, -1.0]),
                         lam=1.0)
        # push t so high that every constraint is strictly inactive with z = 0
        x = np.concatenate([np.zeros(2), 50.0 * np.ones(4)])
        z = np.zeros(8)
        assert eval_L_ineq(q, x, z, 1.0) == pytest.approx(q.objective(x), abs=1e-12)

    def test_svm_toy_stationary_at_optimum(self):
        q = svm_instance(np.array([[1.0]]), np.array([1.0]), lam=1.0)
        x_opt = np.array([-1.0, 0.0])
        z_opt = np.array([1.0, 0.0])
        # with the analytic multiplier the augmented gradient vanishes at the
        # optimum for any r
        for r in (0.5, 2.0):
            g = grad_L_ineq_x(q, x_opt, z_opt, r)
            assert np.linalg.norm(g) <= 1e-12

    def test_grad_finite_differences(self, rng):
        q = svm_instance(rng.standard_normal((5, 3)), rng.choice([-1.0, 1.0], 5),
                         lam=0.7)
        for _ in range(100):
            x = rng.standard_normal(q.dim)
            z = np.abs(rng.standard_normal(q.n_constraints))
            r = float(rng.uniform(0.3, 3.0))
            g = grad_L_ineq_x(q, x, z, r)
            fd = fd_grad_vec(lambda v: eval_L_ineq(q, v, z, r), x)
            assert np.linalg.norm(g - fd) <= 1e-5 * (1.0 + np.linalg.norm(fd))


class TestMoreauEnvelopeOrdering:
    def test_envelope_nondecreasing_in_r(self, certified5):
        # min_X L_r(X, w) is the Moreau envelope of the concave dual function
        # evaluated at w; it tightens (is nondecreasing) as r grows
        p = certified5.problem
        rng = np.random.default_rng(3)
        w = DualPoint(y=certified5.y_star + 0.3 * rng.standard_normal(p.m),
                      Z=certified5.z_star)
        values = []
        for r in (0.5, 1.0, 2.0, 4.0):
            obj = primal_objective(p, w, r)
            res = minimize_auglag(obj, certified5.x_star, tol=1e-10,
                                  max_iter=20000, diameter_bound=50.0)
            values.append(res.value)
        assert all(values[i + 1] >= values[i] - 1e-7 for i in range(len(values) - 1))


class TestDualGapLowerBound:
    def test_exact_solution_gives_p_star(self, certified5):
        p = certified5.problem
        bound = dual_gap_lower_bound(p, certified5.w_star, certified5.x_star, 1.0)
        assert bound == pytest.approx(certified5.p_star, abs=1e-8)
        val = eval_L_primal(p, certified5.x_star, certified5.w_star, 1.0)
        assert val - bound == pytest.approx(0.0, abs=1e-8)

    def test_high_accuracy_solve_bound_tight(self, certified5, rng):
        p = certified5.problem
        w = rand_dual(rng, p, scale=0.3)
        obj = primal_objective(p, w, 1.0)
        res = minimize_auglag(obj, np.zeros((p.n, p.n)), tol=1e-11,
                              max_iter=30000, diameter_bound=50.0)
        bound = dual_gap_lower_bound(p, w, symmetrize(res.minimizer), 1.0)
        # bound <= min L <= value at minimizer estimate
        assert bound <= res.value + 1e-12
        assert res.value - bound <= 1e-6

    def test_fallback_monotone_in_grad_norm(self, certified5):
        p = certified5.problem
        w = certified5.w_star
        X1 = certified5.x_star + 0.1 * np.eye(p.n)
        X2 = certified5.x_star + 0.5 * np.eye(p.n)
        b1 = dual_gap_lower_bound(p, w, X1, 1.0, diameter_bound=10.0)
        b2 = dual_gap_lower_bound(p, w, X2, 1.0, diameter_bound=10.0)
        v1 = eval_L_primal(p, X1, w, 1.0)
        v2 = eval_L_primal(p, X2, w, 1.0)
        # slack grows with the gradient norm
        assert v2 - b2 >= v1 - b1

    def test_bound_below_min(self, certified5, rng):
        # the returned value never exceeds a high-accuracy estimate of min L
        p = certified5.problem
        w = rand_dual(rng, p, scale=0.2)
        obj = primal_objective(p, w, 1.0)
        ref = minimize_auglag(obj, np.zeros((p.n, p.n)), tol=1e-11,
                              max_iter=30000, diameter_bound=50.0)
        for scale in (0.0, 0.05, 0.3):
            X_trial = symmetrize(ref.minimizer + scale * np.eye(p.n))
            bound = dual_gap_lower_bound(p, w, X_trial, 1.0)
            assert bound <= ref.value + 1e-10
