"""Cone geometry kernels: examples with independent oracles, then properties."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conic_alm.symcone import (dist_psd, dist_to_face, eig_sym, exact_penalty,
                               face_basis, frob, inner, moreau_split,
                               penalty_subgrad, project_psd, symmetrize)

from conftest import random_sym
from oracles import brute_force_face_dist, eig2x2, project_psd_2x2


class TestEigSym:
    def test_diagonal(self):
        dec = eig_sym(np.diag([3.0, 1.0]))
        assert_allclose(dec.eigenvalues, [3.0, 1.0])
        assert_allclose(dec.eigenvectors, np.eye(2))

    def test_offdiagonal_matches_closed_form(self):
        X = np.array([[0.0, 1.0], [1.0, 0.0]])
        dec = eig_sym(X)
        lam, Q = eig2x2(X)
        assert_allclose(dec.eigenvalues, lam, atol=1e-14)
        s = 1.0 / np.sqrt(2.0)
        assert_allclose(dec.eigenvectors, [[s, s], [s, -s]], atol=1e-14)
        assert_allclose(np.abs(dec.eigenvectors), np.abs(Q), atol=1e-14)

    def test_identity_any_n(self):
        for n in (1, 2, 5):
            dec = eig_sym(np.eye(n))
            assert_allclose(dec.eigenvalues, np.ones(n))
            assert_allclose(dec.eigenvectors, np.eye(n), atol=1e-12)

    def test_rejects_nonfinite(self):
        X = np.full((2, 2), np.nan)
        with pytest.raises(ValueError):
            eig_sym(X)

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            eig_sym(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_invariants_random(self, rng):
        for _ in range(200):
            n = int(rng.integers(1, 9))
            X = random_sym(rng, n, scale=float(rng.uniform(0.1, 10)))
            dec = eig_sym(X)
            scale = 1e-10 * (1.0 + frob(X))
            assert frob(dec.reconstruct() - X) <= scale
            assert frob(dec.eigenvectors.T @ dec.eigenvectors - np.eye(n)) <= 1e-10
            assert np.all(np.diff(dec.eigenvalues) <= 1e-12)

    def test_deterministic_on_repeated_eigenvalues(self, rng):
        for _ in range(50):
            n = int(rng.integers(2, 6))
            X = random_sym(rng, n)
            X = X + X  # arbitrary; determinism must hold for any input
            d1 = eig_sym(X)
            d2 = eig_sym(X.copy())
            assert np.array_equal(d1.eigenvectors, d2.eigenvectors)
        # a matrix with a genuine multiple eigenvalue
        dec = eig_sym(np.diag([2.0, 2.0, 1.0]))
        assert_allclose(dec.eigenvectors, np.eye(3), atol=1e-12)


class TestProjectPsd:
    def test_diagonal_clipping(self):
        assert_allclose(project_psd(np.diag([2.0, -3.0])), np.diag([2.0, 0.0]))

    def test_offdiagonal_frozen_value(self):
        # computed with the closed-form 2x2 oracle
        X = np.array([[0.0, 1.0], [1.0, 0.0]])
        assert_allclose(project_psd(X), [[0.5, 0.5], [0.5, 0.5]], atol=1e-14)
        assert_allclose(project_psd_2x2(X), [[0.5, 0.5], [0.5, 0.5]], atol=1e-14)

    def test_psd_fixed_point(self):
        X = np.array([[1.0, 1.0], [1.0, 1.0]])
        assert_allclose(project_psd(X), X, atol=1e-14)

    def test_idempotence_population(self, rng):
        for _ in range(1000):
            n = int(rng.integers(2, 11))
            X = random_sym(rng, n, scale=float(rng.uniform(0.5, 5)))
            P = project_psd(X)
            assert frob(project_psd(P) - P) <= 1e-10 * (1.0 + frob(X))
            assert np.linalg.eigvalsh(P)[0] >= -1e-10 * (1.0 + frob(X))


class TestDistPsd:
    def test_examples(self):
        assert dist_psd(np.diag([1.0, -2.0])) == pytest.approx(2.0)
        assert dist_psd(np.eye(3)) == 0.0
        assert dist_psd(np.array([[0.0, 1.0], [1.0, 0.0]])) == pytest.approx(1.0)

    def test_matches_projection_residual(self, rng):
        for _ in range(100):
            n = int(rng.integers(2, 8))
            X = random_sym(rng, n)
            assert dist_psd(X) == pytest.approx(frob(X - project_psd(X)), abs=1e-11)


class TestExactPenalty:
    def test_examples(self):
        assert exact_penalty(np.eye(2), 4.0) == 0.0
        assert exact_penalty(-np.eye(2), 4.0) == pytest.approx(4.0)
        # penalized dual of the toy instance at y = 0: lambda_max(-C) = 0
        C = np.array([[1.0, -1.0], [-1.0, 1.0]])
        assert exact_penalty(C, 4.0) == 0.0

    def test_rejects_bad_rho(self):
        with pytest.raises(ValueError):
            exact_penalty(np.eye(2), 0.0)
        with pytest.raises(ValueError):
            exact_penalty(np.eye(2), -1.0)

    def test_dominated_by_distance(self, rng):
        for _ in range(500):
            n = int(rng.integers(2, 9))
            X = random_sym(rng, n, scale=float(rng.uniform(0.5, 4)))
            assert exact_penalty(X, 1.0) <= dist_psd(X) + 1e-12


class TestPenaltySubgrad:
    def test_positive_definite_gives_zero(self):
        assert_allclose(penalty_subgrad(np.eye(2), 3.0), np.zeros((2, 2)))

    def test_boundary_gives_zero(self):
        assert_allclose(penalty_subgrad(np.diag([0.0, 1.0]), 3.0), np.zeros((2, 2)))

    def test_negative_definite_rank_one(self):
        G = penalty_subgrad(-np.eye(2), 2.0)
        # -rho * p p' for a unit eigenvector p of the smallest eigenvalue
        assert np.trace(G) == pytest.approx(-2.0)
        lam = np.linalg.eigvalsh(G)
        assert_allclose(lam, [-2.0, 0.0], atol=1e-12)

    def test_subgradient_inequality_population(self, rng):
        rho = 1.7

        def l(M):
            return exact_penalty(M, rho)

        for _ in range(20):
            n = int(rng.integers(2, 6))
            X = random_sym(rng, n, scale=2.0)
            G = penalty_subgrad(X, rho)
            lX = l(X)
            for _ in range(200):
                Y = random_sym(rng, n, scale=2.0)
                assert l(Y) >= lX + inner(G, Y - X) - 1e-8


class TestFaceBasis:
    def test_rank_one_diag(self):
        face = face_basis(np.diag([1.0, 0.0]))
        assert face.rank == 1
        assert_allclose(np.abs(face.p1[:, 0]), [1.0, 0.0])
        assert_allclose(np.abs(face.p2[:, 0]), [0.0, 1.0])
        assert face.lambda1_min == pytest.approx(1.0)

    def test_toy_dual_solution(self, toy):
        face = face_basis(toy.z_star)
        assert face.rank == 1
        s = 1.0 / np.sqrt(2.0)
        assert_allclose(np.abs(face.p1[:, 0]), [s, s], atol=1e-12)
        assert face.lambda1_min == pytest.approx(2.0)

    def test_zero_matrix(self):
        face = face_basis(np.zeros((3, 3)))
        assert face.rank == 0
        assert_allclose(face.p2, np.eye(3), atol=1e-12)
        assert face.lambda1_min == 0.0

    def test_rejects_indefinite(self):
        with pytest.raises(ValueError):
            face_basis(np.diag([1.0, -1.0]))

    def test_orthonormal_split(self, rng):
        for _ in range(50):
            n = int(rng.integers(2, 7))
            r = int(rng.integers(0, n + 1))
            Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
            d = np.concatenate([rng.uniform(0.5, 2.0, r), np.zeros(n - r)])
            Z = symmetrize((Q * d) @ Q.T)
            face = face_basis(Z)
            assert face.rank == r
            P = np.hstack([face.p1, face.p2])
            assert frob(P.T @ P - np.eye(n)) <= 1e-10
            if r:
                assert frob(Z @ face.p2) <= 1e-8 * (1.0 + frob(Z))


class TestDistToFace:
    def test_identity_against_rank_one_face(self):
        face = face_basis(np.diag([1.0, 0.0]))
        assert dist_to_face(np.eye(2), face) == pytest.approx(1.0)

    def test_toy_solution_in_face(self, toy):
        face = face_basis(toy.z_star)
        assert dist_to_face(toy.x_star, face) == pytest.approx(0.0, abs=1e-12)

    def test_zero_matrix(self, toy):
        face = face_basis(toy.z_star)
        assert dist_to_face(np.zeros((2, 2)), face) == pytest.approx(0.0, abs=1e-12)

    def test_rank_zero_face_equals_dist_psd(self, rng):
        face = face_basis(np.zeros((3, 3)))
        for _ in range(20):
            X = random_sym(rng, 3)
            assert dist_to_face(X, face) == pytest.approx(dist_psd(X), abs=1e-12)

    def test_against_brute_force_grid(self, rng):
        grid = np.linspace(0.0, 4.0, 81)
        resolution = 4.0 / 80
        for _ in range(10):
            n = 3
            Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
            d = np.array([rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0), 0.0])
            Z = symmetrize((Q * d) @ Q.T)
            face = face_basis(Z)
            X = project_psd(random_sym(rng, n))
            exact = dist_to_face(X, face)
            brute = brute_force_face_dist(X, face.p2, grid)
            assert exact <= brute + 1e-9
            assert brute - exact <= 2 * resolution


class TestMoreauSplit:
    def test_diagonal(self):
        P, N = moreau_split(np.diag([1.0, -2.0]))
        assert_allclose(P, np.diag([1.0, 0.0]), atol=1e-14)
        assert_allclose(N, np.diag([0.0, 2.0]), atol=1e-14)

    def test_psd_input(self):
        X = np.array([[2.0, 1.0], [1.0, 2.0]])
        P, N = moreau_split(X)
        assert_allclose(P, X, atol=1e-12)
        assert_allclose(N, np.zeros((2, 2)), atol=1e-12)

    def test_offdiagonal_reconstruction(self):
        X = np.array([[0.0, 1.0], [1.0, 0.0]])
        P, N = moreau_split(X)
        assert frob(P - project_psd(X)) <= 1e-12
        assert frob(X - (P - N)) <= 1e-12
        assert abs(inner(P, N)) <= 1e-12

    def test_identity_population(self, rng):
        for _ in range(1000):
            n = int(rng.integers(2, 11))
            X = random_sym(rng, n, scale=float(rng.uniform(0.5, 5)))
            P, N = moreau_split(X)
            tol = 1e-8 * (1.0 + frob(X) ** 2)
            assert frob(X - (P - N)) <= tol
            assert abs(inner(P, N)) <= tol
            assert np.linalg.eigvalsh(P)[0] >= -1e-10 * (1.0 + frob(X))
            assert np.linalg.eigvalsh(N)[0] >= -1e-10 * (1.0 + frob(X))
