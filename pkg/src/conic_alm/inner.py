"""Certified approximate minimization of smooth convex subproblems.

Gradient descent with Barzilai-Borwein step initialization and a backtracking
line search that guarantees monotone descent. The optimality certificate is
the convexity bound

    L(x) - min L <= ||grad L(x)|| * D

valid whenever the minimizer lies within distance D of x; D is supplied by
the caller (``diameter_bound``). The certified gap feeds the two inexactness
acceptance tests used by the outer loops: criterion A compares it against
eps_k^2 / (2 r_k) and criterion B against delta_k^2 ||w step||^2 / (2 r_k).
Both checks are conservative because the certificate overestimates the true
gap.
"""

from dataclasses import dataclass

import numpy as np


class InnerSolveError(RuntimeError):
    """The subproblem produced non-finite values; diagnostics in the message."""


@dataclass(frozen=True)
class InnerResult:
    """Outcome of one subproblem solve.

    ``gap_upper_bound`` is the certified bound ||grad|| * diameter_bound on
    the suboptimality of ``minimizer``; ``converged`` says whether it reached
    the requested tolerance.
    """

    minimizer: np.ndarray
    gap_upper_bound: float
    grad_norm: float
    iterations: int
    converged: bool
    value: float


def _norm(v):
    return float(np.sqrt(np.vdot(v, v).real))


def minimize_auglag(value_and_grad, start, tol, max_iter=10000, diameter_bound=None,
                    stall_patience=200, armijo=1e-4, history=None):
    """Minimize a smooth convex objective until the certified gap is <= tol.

    ``value_and_grad(point) -> (value, gradient)`` with gradient shaped like
    the point (works for vectors and symmetric matrices alike). Descent is
    enforced every step by halving the trial step; the next step length is
    re-initialized from the Barzilai-Borwein spectral estimate. Exits early
    (converged=False) when the gradient norm stops improving, which happens
    once the tolerance sits below the floating-point floor of the problem.
    ``history``, when given a list, receives the accepted objective values.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if diameter_bound is None or diameter_bound <= 0:
        raise ValueError("diameter_bound must be positive")
    x = np.array(start, dtype=float)
    fx, g = value_and_grad(x)
    if history is not None:
        history.append(fx)
    if not np.isfinite(fx) or not np.all(np.isfinite(g)):
        raise InnerSolveError(f"objective returned non-finite values at the start point "
                              f"(value={fx!r})")
    step = 1.0
    best = (_norm(g), x.copy(), fx)
    stall_ref = np.inf
    stall = 0
    f_ref = fx
    since_descent = 0
    it = 0
    while it < max_iter:
        gn = _norm(g)
        if gn < best[0]:
            best = (gn, x.copy(), fx)
        if gn * diameter_bound <= tol:
            break
        if gn < stall_ref * (1.0 - 1e-4):
            stall_ref = gn
            stall = 0
        else:
            stall += 1
            if stall > stall_patience:
                break
        # Value-resolution floor: no resolvable descent for a whole window
        # means further certification progress is not measurable.
        if f_ref - fx > 1e-14 * (1.0 + abs(f_ref)):
            f_ref = fx
            since_descent = 0
        else:
            since_descent += 1
            if since_descent > 25:
                break
        t = step
        x_new = x - t * g
        f_new, g_new = value_and_grad(x_new)
        backtracks = 0
        while not (np.isfinite(f_new) and f_new <= fx - armijo * t * gn * gn) \
                and backtracks < 60:
            t *= 0.5
            x_new = x - t * g
            f_new, g_new = value_and_grad(x_new)
            backtracks += 1
        if not np.isfinite(f_new) or not np.all(np.isfinite(g_new)):
            raise InnerSolveError(f"objective returned non-finite values at iteration {it} "
                                  f"(value={f_new!r})")
        if f_new > fx:
            # Line search exhausted without descent: the value floor.
            break
        s = x_new - x
        dg = g_new - g
        sy = float(np.vdot(s, dg).real)
        ss = float(np.vdot(s, s).real)
        meaningful = ss > (1e-13 * (1.0 + _norm(x))) ** 2
        if sy > 0 and meaningful and np.isfinite(sy):
            # spectral step from the last meaningful move; otherwise keep the
            # previous estimate so a sub-ulp move cannot freeze the step
            step = ss / sy
        x, fx, g = x_new, f_new, g_new
        if history is not None:
            history.append(fx)
        it += 1
    gn, x, fx = best if best[0] < _norm(g) else (_norm(g), x, fx)
    gap = gn * diameter_bound
    return InnerResult(minimizer=x, gap_upper_bound=gap, grad_norm=gn,
                       iterations=it, converged=bool(gap <= tol), value=fx)


def check_criterion_A(result, eps_k, r_k):
    """Summable-inexactness test: certified gap <= eps_k^2 / (2 r_k)."""
    if eps_k < 0 or r_k <= 0:
        raise ValueError("need eps_k >= 0 and r_k > 0")
    return result.gap_upper_bound <= eps_k * eps_k / (2.0 * r_k)


def check_criterion_B(result, delta_k, r_k, w_step_norm):
    """Relative inexactness test: certified gap <= delta_k^2 ||w step||^2 / (2 r_k)."""
    if delta_k < 0 or r_k <= 0 or w_step_norm < 0:
        raise ValueError("need delta_k >= 0, r_k > 0, and w_step_norm >= 0")
    return result.gap_upper_bound <= delta_k * delta_k * w_step_norm * w_step_norm / (2.0 * r_k)
