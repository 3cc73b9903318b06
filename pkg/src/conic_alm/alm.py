"""Outer augmented Lagrangian drivers and the generic inexact proximal loop.

Three drivers share the same skeleton: approximately minimize the augmented
Lagrangian in the primal variable with a certified gap, test the two
inexactness criteria against the tentative multiplier step, tighten and
re-solve if needed, then apply the multiplier update

    primal form:      y+ = y + r (b - A(X)),   Z+ = proj_psd(Z - r X)
    dual form:        X+ = proj_psd(X - r (C - A*(y+)))
    inequality form:  z+ = max(z + r g(x+), 0)

The penalty sequence grows geometrically up to a finite cap. When the
criteria cannot be certified (their targets eventually sink below the
floating-point floor of the subproblem) the driver keeps the best iterate,
flags the record, and warns once at the end of the run.

Also here: a generic inexact proximal point loop used to cross-check the
correspondence between multiplier updates and proximal steps on the dual
function, the per-iteration verifier of that correspondence, and a
least-squares estimator of empirical linear convergence rates.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import auglag
from .inner import check_criterion_A, check_criterion_B, minimize_auglag
from .model import (DualPoint, KnownSolutionInstance, apply_A, apply_Astar,
                    ineq_residuals, kkt_residuals)
from .symcone import dist_psd, frob, project_psd, symmetrize

# Below this threshold a certification target is considered unreachable in
# double precision and tightening rounds stop.
_TARGET_FLOOR = 1e-16


@dataclass(frozen=True)
class AlmConfig:
    """Outer-loop parameters shared by all three drivers.

    The penalty grows as r_{k+1} = min(r_growth * r_k, r_max), keeping the
    sequence bounded; eps_k = eps0 * decay^k and delta_k = delta0 * decay^k
    are the (summable) inexactness schedules.
    """

    r0: float = 1.0
    r_growth: float = 1.25
    r_max: float = 100.0
    eps0: float = 1.0
    delta0: float = 0.5
    decay: float = 0.7
    max_outer: int = 500
    stop_eps3: float = 1e-8
    inner_max_iter: int = 10000
    inner_budget: int = 4000
    certify_rounds: int = 8

    def __post_init__(self):
        if self.r0 <= 0 or self.r_growth < 1 or self.r_max < self.r0:
            raise ValueError("need r0 > 0, r_growth >= 1, r_max >= r0")
        if not 0 < self.decay < 1:
            raise ValueError("decay must lie in (0, 1)")
        if self.stop_eps3 <= 0 or self.max_outer < 1:
            raise ValueError("need stop_eps3 > 0 and max_outer >= 1")

    def penalty(self, k):
        return min(self.r0 * self.r_growth ** k, self.r_max)

    def eps(self, k):
        return self.eps0 * self.decay ** k

    def delta(self, k):
        return self.delta0 * self.decay ** k


@dataclass(frozen=True)
class IterationRecord:
    """One accepted outer iteration of an SDP-form driver.

    Stores the post-update iterates, the inexactness bookkeeping, and (when a
    certified instance is attached) distances to the known solution before
    and after the multiplier step.
    """

    k: int
    X: np.ndarray
    y: np.ndarray
    Z: np.ndarray
    r: float
    eps_k: float
    delta_k: float
    inner_iterations: int
    gap_certificate: float
    grad_norm: float
    certified: bool
    step_norm: float
    value: float
    residuals: object
    dist_x: float | None = None
    dist_w: float | None = None
    dist_w_before: float | None = None


@dataclass(frozen=True)
class IneqIterationRecord:
    """One accepted outer iteration of the inequality-form driver."""

    k: int
    x: np.ndarray
    z: np.ndarray
    r: float
    eps_k: float
    delta_k: float
    inner_iterations: int
    gap_certificate: float
    grad_norm: float
    certified: bool
    step_norm: float
    value: float
    residuals: object
    dist_x: float | None = None


@dataclass
class AlmTrace:
    """Append-only run record for one driver invocation."""

    form: str
    problem_name: str
    config: AlmConfig
    records: list = field(default_factory=list)
    converged: bool = False
    warnings: list = field(default_factory=list)
    start_point: object = None

    def series(self, key):
        """Extract a per-iteration series; looks up residual fields too."""
        out = []
        for rec in self.records:
            if hasattr(rec, key):
                out.append(getattr(rec, key))
            else:
                out.append(getattr(rec.residuals, key))
        return np.array([np.nan if v is None else v for v in out])

    @property
    def final(self):
        return self.records[-1]


def _certified_subsolve(objective, x_start, r, eps_k, delta_k, step_norm_of, cfg,
                        diameter_of):
    """Solve one subproblem until both criteria hold or the floor is reached.

    ``step_norm_of(minimizer)`` measures the tentative multiplier step used by
    criterion B; tightening re-solves warm-started from the current iterate.
    Returns (InnerResult, certified flag, total inner iterations).
    """
    target = eps_k * eps_k / (2.0 * r)
    total_iters = 0
    x = x_start
    result = None
    for _ in range(cfg.certify_rounds):
        remaining = max(cfg.inner_budget - total_iters, 50)
        result = minimize_auglag(objective, x, tol=max(target, _TARGET_FLOOR),
                                 max_iter=min(cfg.inner_max_iter, remaining),
                                 diameter_bound=diameter_of(x))
        total_iters += result.iterations
        x = result.minimizer
        step = step_norm_of(x)
        ok_a = check_criterion_A(result, eps_k, r)
        ok_b = check_criterion_B(result, delta_k, r, step)
        if ok_a and ok_b:
            return result, True, total_iters
        if not result.converged or total_iters >= cfg.inner_budget:
            break
        tightened = min(eps_k * eps_k, delta_k * delta_k * step * step) / (2.0 * r)
        if tightened <= _TARGET_FLOOR:
            break
        target = 0.5 * tightened
    return result, False, total_iters


def _warn_uncertified(trace):
    n_bad = sum(1 for rec in trace.records if not rec.certified)
    if n_bad:
        msg = (f"{trace.form} run on {trace.problem_name!r}: {n_bad} of "
               f"{len(trace.records)} outer iterations accepted without certified "
               "inexactness criteria (targets below the attainable gap)")
        trace.warnings.append(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=3)


def solve_primal_alm(p, w0, cfg=None, oracle=None, X0=None):
    """Inexact ALM on the primal SDP; multipliers w = (y, Z) with Z kept PSD.

    ``oracle`` may be a KnownSolutionInstance for the same problem, in which
    case distance-to-solution columns are filled in. Terminates when the KKT
    residual eps3 drops below ``cfg.stop_eps3`` or after ``cfg.max_outer``
    iterations.
    """
    cfg = cfg or AlmConfig()
    if isinstance(p, KnownSolutionInstance):
        oracle = p if oracle is None else oracle
        p = p.problem
    if dist_psd(w0.Z) > 1e-9 * (1.0 + frob(w0.Z)):
        raise ValueError("initial Z must be positive semidefinite")
    y, Z = w0.y.copy(), w0.Z.copy()
    X = np.zeros((p.n, p.n)) if X0 is None else symmetrize(X0)
    trace = AlmTrace(form="primal", problem_name=p.name, config=cfg, start_point=w0)
    for k in range(cfg.max_outer):
        r = cfg.penalty(k)
        eps_k, delta_k = cfg.eps(k), cfg.delta(k)
        w = DualPoint(y=y, Z=Z)
        objective = auglag.primal_objective(p, w, r)

        def w_step(Xc, y=y, Z=Z, r=r):
            y_new = y + r * (p.b - apply_A(p, Xc))
            Z_new = project_psd(symmetrize(Z - r * Xc))
            return float(np.sqrt(np.sum((y_new - y) ** 2) + np.sum((Z_new - Z) ** 2)))

        result, certified, iters = _certified_subsolve(
            objective, X, r, eps_k, delta_k, w_step, cfg,
            diameter_of=lambda Xc: auglag.default_diameter(p, Xc))
        X = symmetrize(result.minimizer)
        y_new = y + r * (p.b - apply_A(p, X))
        Z_new = project_psd(symmetrize(Z - r * X))
        step = float(np.sqrt(np.sum((y_new - y) ** 2) + np.sum((Z_new - Z) ** 2)))
        track_x = oracle is not None and oracle.primal_unique
        track_w = oracle is not None and oracle.dual_unique
        dist_w_before = oracle.dist_dual(w) if track_w else None
        y, Z = y_new, Z_new
        w_after = DualPoint(y=y, Z=Z)
        res = kkt_residuals(p, X, w_after,
                            p_star=oracle.p_star if oracle else None,
                            d_star=oracle.p_star if oracle else None)
        trace.records.append(IterationRecord(
            k=k, X=X.copy(), y=y.copy(), Z=Z.copy(), r=r, eps_k=eps_k, delta_k=delta_k,
            inner_iterations=iters, gap_certificate=result.gap_upper_bound,
            grad_norm=result.grad_norm, certified=certified, step_norm=step,
            value=result.value, residuals=res,
            dist_x=oracle.dist_primal(X) if track_x else None,
            dist_w=oracle.dist_dual(w_after) if track_w else None,
            dist_w_before=dist_w_before))
        if res.eps3 <= cfg.stop_eps3:
            trace.converged = True
            break
    _warn_uncertified(trace)
    return trace


def solve_dual_alm(p, X0, cfg=None, oracle=None, y0=None):
    """Inexact ALM on the dual SDP; the multiplier X is kept PSD.

    Iterates (y_k, X_k); the slack Z_k = C - A*(y_k) is affine-feasible by
    construction, so the recorded eta3 residual is always zero.
    """
    cfg = cfg or AlmConfig()
    if isinstance(p, KnownSolutionInstance):
        oracle = p if oracle is None else oracle
        p = p.problem
    X0 = symmetrize(X0)
    if dist_psd(X0) > 1e-9 * (1.0 + frob(X0)):
        raise ValueError("initial X must be positive semidefinite")
    X = X0.copy()
    y = np.zeros(p.m) if y0 is None else np.asarray(y0, dtype=float).copy()
    trace = AlmTrace(form="dual", problem_name=p.name, config=cfg, start_point=X0)
    scale = 2.0 * (1.0 + float(np.linalg.norm(p.b)) + frob(p.C))
    for k in range(cfg.max_outer):
        r = cfg.penalty(k)
        eps_k, delta_k = cfg.eps(k), cfg.delta(k)
        objective = auglag.dual_objective(p, X, r)

        def x_step(yc, X=X, r=r):
            X_new = project_psd(symmetrize(X - r * (p.C - apply_Astar(p, yc))))
            return frob(X_new - X)

        result, certified, iters = _certified_subsolve(
            objective, y, r, eps_k, delta_k, x_step, cfg,
            diameter_of=lambda yc: scale + 2.0 * float(np.linalg.norm(yc)))
        y = result.minimizer
        X_new = project_psd(symmetrize(X - r * (p.C - apply_Astar(p, y))))
        step = frob(X_new - X)
        track_x = oracle is not None and oracle.primal_unique
        track_w = oracle is not None and oracle.dual_unique
        dist_x_before = oracle.dist_primal(X) if track_x else None
        X = X_new
        Z = symmetrize(p.C - apply_Astar(p, y))
        w_after = DualPoint(y=y, Z=Z)
        res = kkt_residuals(p, X, w_after,
                            p_star=oracle.p_star if oracle else None,
                            d_star=oracle.p_star if oracle else None)
        trace.records.append(IterationRecord(
            k=k, X=X.copy(), y=y.copy(), Z=Z.copy(), r=r, eps_k=eps_k, delta_k=delta_k,
            inner_iterations=iters, gap_certificate=result.gap_upper_bound,
            grad_norm=result.grad_norm, certified=certified, step_norm=step,
            value=result.value, residuals=res,
            dist_x=oracle.dist_primal(X) if track_x else None,
            dist_w=oracle.dist_dual(w_after) if track_w else None,
            dist_w_before=dist_x_before))
        if res.eps3 <= cfg.stop_eps3:
            trace.converged = True
            break
    _warn_uncertified(trace)
    return trace


def solve_ineq_alm(q, z0, cfg=None, x_star=None, f_star=None, x0=None):
    """Inexact ALM on a convex QP with affine inequality constraints."""
    cfg = cfg or AlmConfig()
    z = np.asarray(z0, dtype=float).copy()
    if z.shape != (q.n_constraints,) or np.any(z < 0):
        raise ValueError("z0 must be a nonnegative vector, one entry per constraint")
    x = np.zeros(q.dim) if x0 is None else np.asarray(x0, dtype=float).copy()
    trace = AlmTrace(form="ineq", problem_name=q.name, config=cfg, start_point=z.copy())
    scale = 2.0 * (1.0 + float(np.linalg.norm(q.c)) + float(np.linalg.norm(q.h)))
    for k in range(cfg.max_outer):
        r = cfg.penalty(k)
        eps_k, delta_k = cfg.eps(k), cfg.delta(k)
        objective = auglag.ineq_objective(q, z, r)

        def z_step(xc, z=z, r=r):
            z_new = np.maximum(z + r * q.constraints(xc), 0.0)
            return float(np.linalg.norm(z_new - z))

        result, certified, iters = _certified_subsolve(
            objective, x, r, eps_k, delta_k, z_step, cfg,
            diameter_of=lambda xc: scale + 2.0 * float(np.linalg.norm(xc)))
        x = result.minimizer
        z_new = np.maximum(z + r * q.constraints(x), 0.0)
        step = float(np.linalg.norm(z_new - z))
        z = z_new
        res = ineq_residuals(q, x, z, f_star=f_star)
        trace.records.append(IneqIterationRecord(
            k=k, x=x.copy(), z=z.copy(), r=r, eps_k=eps_k, delta_k=delta_k,
            inner_iterations=iters, gap_certificate=result.gap_upper_bound,
            grad_norm=result.grad_norm, certified=certified, step_norm=step,
            value=result.value, residuals=res,
            dist_x=float(np.linalg.norm(x - x_star)) if x_star is not None else None))
        if res.eps3 <= cfg.stop_eps3:
            trace.converged = True
            break
    _warn_uncertified(trace)
    return trace


@dataclass(frozen=True)
class PpmRecord:
    """One inexact proximal step: iterate, declared error, and criteria flags."""

    k: int
    x: np.ndarray
    c: float
    eps_k: float
    delta_k: float
    prox_error: float
    step_norm: float
    criterion_a: bool
    criterion_b: bool


def ppm(prox_oracle, x0, c_seq, eps_seq=None, delta_seq=None, max_iter=100,
        stop_step=0.0):
    """Generic inexact proximal point loop.

    ``prox_oracle(x, c) -> (x_next, error_bound)`` evaluates the proximal map
    of the underlying function with step c, declaring a bound on its own
    error. ``c_seq``/``eps_seq``/``delta_seq`` are callables of the iteration
    index (constants are promoted). Stops when the step norm falls below
    ``stop_step``. Returns the list of PpmRecord.
    """
    def as_fn(v, default):
        if v is None:
            return default
        return v if callable(v) else (lambda k, v=v: v)

    c_fn = as_fn(c_seq, lambda k: 1.0)
    eps_fn = as_fn(eps_seq, lambda k: 1.0 * 0.7 ** k)
    delta_fn = as_fn(delta_seq, lambda k: 0.5 * 0.7 ** k)
    x = np.array(x0, dtype=float)
    records = []
    for k in range(max_iter):
        c = float(c_fn(k))
        if c <= 0:
            raise ValueError("proximal steps must be positive")
        x_next, err = prox_oracle(x, c)
        x_next = np.asarray(x_next, dtype=float)
        step = float(np.linalg.norm(x_next - x))
        eps_k, delta_k = float(eps_fn(k)), float(delta_fn(k))
        records.append(PpmRecord(k=k, x=x_next.copy(), c=c, eps_k=eps_k,
                                 delta_k=delta_k, prox_error=float(err),
                                 step_norm=step,
                                 criterion_a=bool(err <= eps_k),
                                 criterion_b=bool(err <= delta_k * step)))
        x = x_next
        if step <= stop_step:
            break
    return records


@dataclass(frozen=True)
class LinkRow:
    """Per-iteration data of the multiplier/proximal correspondence check."""

    k: int
    lhs: float
    bound: float
    ok: bool


@dataclass(frozen=True)
class LinkReport:
    rows: tuple
    violations: tuple

    @property
    def ok(self):
        return len(self.violations) == 0


def verify_ppm_alm_link(p, trace, prox_accuracy=1e-10, tighten=0.1,
                        inner_max_iter=20000):
    """Check ||w_{k+1} - prox(w_k)||^2 / (2 r_k) against the certified gap.

    The reference proximal point is the exact multiplier update at the exact
    subproblem minimizer; it is approximated by re-solving each subproblem
    ``tighten`` times tighter than the recorded certificate (warm-started at
    the recorded iterate). The tolerance composes the recorded certificate,
    the reference solve's own certificate, and ``prox_accuracy`` slack:
    lhs <= (sqrt(gap_k) + sqrt(gap_ref))^2 + prox_accuracy.
    """
    if isinstance(p, KnownSolutionInstance):
        p = p.problem
    if trace.form != "primal":
        raise ValueError("the correspondence check expects a primal-form trace")
    rows = []
    w_prev = trace.start_point
    for rec in trace.records:
        r = rec.r
        objective = auglag.primal_objective(p, w_prev, r)
        tol_ref = max(rec.gap_certificate * tighten, 1e-15)
        ref = minimize_auglag(objective, rec.X, tol=tol_ref, max_iter=inner_max_iter,
                              diameter_bound=auglag.default_diameter(p, rec.X))
        X_ref = symmetrize(ref.minimizer)
        y_prox = w_prev.y + r * (p.b - apply_A(p, X_ref))
        Z_prox = project_psd(symmetrize(w_prev.Z - r * X_ref))
        dy = rec.y - y_prox
        dZ = rec.Z - Z_prox
        lhs = (float(dy @ dy) + float(np.sum(dZ * dZ))) / (2.0 * r)
        root = np.sqrt(rec.gap_certificate) + np.sqrt(ref.gap_upper_bound)
        bound = root * root + prox_accuracy
        rows.append(LinkRow(k=rec.k, lhs=lhs, bound=float(bound), ok=bool(lhs <= bound)))
        w_prev = DualPoint(y=rec.y, Z=rec.Z)
    violations = tuple(row for row in rows if not row.ok)
    return LinkReport(rows=tuple(rows), violations=violations)


@dataclass(frozen=True)
class RateFit:
    """Least-squares geometric rate over the trailing window of a series."""

    rate_q: float
    r_squared: float
    n_points: int


def fit_linear_rate(series, tail_fraction=0.5):
    """Fit log(series) ~ slope * k on the trailing window; rate_q = exp(slope)."""
    s = np.asarray(series, dtype=float)
    if not 0 < tail_fraction <= 1:
        raise ValueError("tail_fraction must lie in (0, 1]")
    if np.any(~np.isfinite(s)) or np.any(s <= 0):
        raise ValueError("series must be positive and finite")
    start = int(np.floor(len(s) * (1.0 - tail_fraction)))
    tail = s[start:]
    if tail.size < 3:
        raise ValueError("need at least 3 points in the fit window")
    ks = np.arange(tail.size, dtype=float)
    logs = np.log(tail)
    design = np.column_stack([ks, np.ones_like(ks)])
    coef, residual, _, _ = np.linalg.lstsq(design, logs, rcond=None)
    ss_tot = float(np.sum((logs - logs.mean()) ** 2))
    ss_res = float(residual[0]) if residual.size else 0.0
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return RateFit(rate_q=float(np.exp(coef[0])), r_squared=float(r2),
                   n_points=int(tail.size))


def truncate_at_floor(series, floor):
    """Keep the leading run of entries strictly above ``floor``."""
    s = np.asarray(series, dtype=float)
    below = np.nonzero(s <= floor)[0]
    if below.size == 0:
        return s
    return s[: int(below[0])]


def pre_floor_window(series, scale=0.0):
    """Leading stretch of a residual series above its double-precision floor.

    Distance-type series bottom out around sqrt(machine epsilon) times the
    solution scale (the augmented Lagrangian value is evaluated through a
    cancellation of order ``scale``^2). The cut is the larger of 1e-9 and
    1e-7 (1 + scale); when the series bottoms out below 1e-5 the trailing
    plateau within 3x of its minimum is dropped as well.
    """
    s = np.asarray(series, dtype=float)
    cut = max(1e-9, 1e-7 * (1.0 + scale))
    if s.size and float(s.min()) < 1e-5:
        cut = max(cut, 3.0 * float(s.min()))
    return truncate_at_floor(s, cut)
