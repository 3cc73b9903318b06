"""Augmented Lagrangian values and gradients for the three problem forms.

Primal form (variable X, multipliers w = (y, Z), penalty r):

    L_r(X, w) = <C, X> + (||y + r(b - A(X))||^2 + ||proj_psd(Z - rX)||^2
                          - ||y||^2 - ||Z||^2) / (2r)

Dual form (variable y, multiplier X):

    L_r(y, X) = <-b, y> + (||proj_psd(X - r(C - A*(y)))||^2 - ||X||^2) / (2r)

Inequality form (variable x, multipliers z >= 0, constraint map g = Gx + h):

    L_r(x, z) = f(x) + (||max(z + r g(x), 0)||^2 - ||z||^2) / (2r)

All three are convex and continuously differentiable in the primal variable;
the multiplier gradients recover the classical dual update rules. The
``*_objective`` factories bundle value and gradient into one callable for the
inner solver so the eigendecomposition is shared between them.
"""

import numpy as np

from .model import apply_A, apply_Astar
from .symcone import check_symmetric, frob, inner, symmetrize


def _check_r(r):
    if r <= 0:
        raise ValueError("penalty parameter r must be positive")


def _psd_part(M):
    """Projection onto the PSD cone (raw decomposition; called in hot loops)."""
    lam, Q = np.linalg.eigh(M)
    return (Q * np.maximum(lam, 0.0)) @ Q.T


def _primal_pieces(p, X, w, r):
    u = w.y + r * (p.b - apply_A(p, X))
    P = _psd_part(symmetrize(w.Z - r * X))
    return u, P


def eval_L_primal(p, X, w, r):
    """Value of the primal-form augmented Lagrangian at (X, w)."""
    _check_r(r)
    X = check_symmetric(X, name="X")
    u, P = _primal_pieces(p, X, w, r)
    quad = float(u @ u) + inner(P, P) - float(w.y @ w.y) - inner(w.Z, w.Z)
    return inner(p.C, X) + quad / (2.0 * r)


def grad_L_primal_X(p, X, w, r):
    """Gradient of L_r in X: C - A*(y + r(b - A(X))) - proj_psd(Z - rX)."""
    _check_r(r)
    X = check_symmetric(X, name="X")
    u, P = _primal_pieces(p, X, w, r)
    return symmetrize(p.C - apply_Astar(p, u) - P)


def grad_L_primal_w(p, X, w, r):
    """Gradients of L_r in (y, Z): (b - A(X), (proj_psd(Z - rX) - Z) / r)."""
    _check_r(r)
    X = check_symmetric(X, name="X")
    _, P = _primal_pieces(p, X, w, r)
    gy = p.b - apply_A(p, X)
    gZ = (P - w.Z) / r
    return gy, gZ


def primal_objective(p, w, r):
    """Callable X -> (L_r(X, w), grad_X L_r) sharing one eigendecomposition."""
    _check_r(r)
    mats, C, b, y, Z = p.constraint_mats, p.C, p.b, w.y, w.Z
    offset = float(y @ y) + inner(Z, Z)

    def value_and_grad(X):
        u = y + r * (b - np.tensordot(mats, X, axes=([1, 2], [0, 1])))
        lam, Q = np.linalg.eigh(Z - r * X)
        pos = np.maximum(lam, 0.0)
        P = (Q * pos) @ Q.T
        val = float(np.tensordot(C, X, axes=2)) \
            + (float(u @ u) + float(pos @ pos) - offset) / (2.0 * r)
        grad = C - np.tensordot(u, mats, axes=(0, 0)) - P
        return val, grad

    return value_and_grad


def eval_L_dual(p, y, X, r):
    """Value of the dual-form augmented Lagrangian at (y, X)."""
    _check_r(r)
    P = _psd_part(symmetrize(X - r * (p.C - apply_Astar(p, y))))
    return -float(p.b @ y) + (inner(P, P) - inner(X, X)) / (2.0 * r)


def grad_L_dual_y(p, y, X, r):
    """Gradient in y: -b + A(proj_psd(X - r(C - A*(y))))."""
    _check_r(r)
    P = _psd_part(symmetrize(X - r * (p.C - apply_Astar(p, y))))
    return -p.b + apply_A(p, P)


def dual_objective(p, X, r):
    """Callable y -> (L_r(y, X), grad_y L_r) for the dual-form subproblem."""
    _check_r(r)
    mats, C, b = p.constraint_mats, p.C, p.b
    XX = inner(X, X)

    def value_and_grad(y):
        M = X - r * (C - np.tensordot(y, mats, axes=(0, 0)))
        lam, Q = np.linalg.eigh(M)
        pos = np.maximum(lam, 0.0)
        P = (Q * pos) @ Q.T
        val = -float(b @ y) + (float(pos @ pos) - XX) / (2.0 * r)
        grad = -b + np.tensordot(mats, P, axes=([1, 2], [0, 1]))
        return val, grad

    return value_and_grad


def eval_L_ineq(q, x, z, r):
    """Value of the inequality-form augmented Lagrangian at (x, z)."""
    _check_r(r)
    pos = np.maximum(z + r * q.constraints(x), 0.0)
    return q.objective(x) + (float(pos @ pos) - float(z @ z)) / (2.0 * r)


def grad_L_ineq_x(q, x, z, r):
    """Gradient in x: grad f(x) + G' max(z + r g(x), 0)."""
    _check_r(r)
    pos = np.maximum(z + r * q.constraints(x), 0.0)
    return q.objective_grad(x) + q.G.T @ pos


def ineq_objective(q, z, r):
    """Callable x -> (L_r(x, z), grad_x L_r) for the inequality subproblem."""
    _check_r(r)
    zz = float(z @ z)

    def value_and_grad(x):
        pos = np.maximum(z + r * q.constraints(x), 0.0)
        val = q.objective(x) + (float(pos @ pos) - zz) / (2.0 * r)
        grad = q.objective_grad(x) + q.G.T @ pos
        return val, grad

    return value_and_grad


def default_diameter(p, X):
    """Heuristic bound on the distance from X to the subproblem minimizer."""
    return 2.0 * (1.0 + frob(np.asarray(X)) + float(np.linalg.norm(p.b)) + frob(p.C))


def dual_gap_lower_bound(p, w, X_trial, r, diameter_bound=None, feas_tol=1e-11):
    """Certified lower bound on min_X L_r(X, w).

    Forms the candidate dual point u = (y + r(b - A(X)), proj_psd(Z - rX)).
    Its violation of the dual affine identity C - A*(u_y) - u_Z = 0 equals
    grad_X L_r(X_trial, w); when that is negligible the Moreau-envelope value
    g0(u) - ||u - w||^2 / (2r) is returned (a true lower bound since the
    envelope is a maximum over dual points). Otherwise falls back to the
    convexity bound L_r(X_trial, w) - ||grad|| * diameter_bound, valid
    whenever the subproblem minimizer lies within diameter_bound of X_trial.
    """
    _check_r(r)
    X_trial = check_symmetric(X_trial, name="X_trial")
    if diameter_bound is None:
        diameter_bound = default_diameter(p, X_trial)
    u_y = w.y + r * (p.b - apply_A(p, X_trial))
    u_Z = _psd_part(symmetrize(w.Z - r * X_trial))
    residual = symmetrize(p.C - apply_Astar(p, u_y) - u_Z)
    res_norm = frob(residual)
    if res_norm <= feas_tol * (1.0 + frob(p.C)):
        g0 = float(p.b @ u_y)
        dy = u_y - w.y
        dZ = u_Z - w.Z
        return g0 - (float(dy @ dy) + inner(dZ, dZ)) / (2.0 * r)
    return eval_L_primal(p, X_trial, w, r) - res_norm * diameter_bound
