"""Numerical verifiers for the structural properties behind the solver.

Each verifier samples a region around a certified solution and checks an
inequality that is supposed to hold there: quadratic growth and error bounds
of the primal and dual problems (with either the cone indicator or the
eigenvalue exact penalty in the objective), the growth inequality of the
penalty/indicator pair with its explicit constant, the preimage identity tying
the penalty subdifferential to a face of the cone, the block trace bound, the
rank-sum strict complementarity test, and the equivalence of the penalized
and cone-constrained problems above the trace threshold.

Verifiers report counts and extremal ratios instead of asserting; tests and
the command line decide what counts as failure. All sampling is seeded.
"""

from dataclasses import dataclass

import numpy as np

from .model import apply_A, apply_Astar, inner as _inner
from .symcone import (check_symmetric, dist_psd, dist_to_face, eig_sym, exact_penalty,
                      face_basis, frob, project_psd, symmetrize)


@dataclass(frozen=True)
class GrowthReport:
    """Outcome of a sampled growth/error-bound check.

    ``min_ratio`` is the smallest (left-hand side) / (squared distance)
    over points with squared distance above 1e-12; it is the empirical growth
    constant. ``violated`` lists sample indices whose left-hand side came out
    negative beyond rounding, which a valid inequality never produces.
    """

    sampled_points: int
    min_ratio: float
    violated: tuple
    params: dict


def _default_gamma(inst):
    return 2.0 * (1.0 + float(np.linalg.norm(inst.y_star)) + frob(inst.x_star))


def _gram_solve(p):
    V = p.constraint_mats.reshape(p.m, -1)
    gram = V @ V.T

    def solve(rhs):
        return np.linalg.solve(gram, rhs)

    return solve


def _project_affine(p, X, solve):
    """Least-squares correction of X onto the primal affine set A(X) = b."""
    return symmetrize(X - apply_Astar(p, solve(apply_A(p, X) - p.b)))


def _sym_noise(rng, n, sigma):
    return symmetrize(rng.standard_normal((n, n))) * sigma


def _ratio_report(lhs_list, dist2_list, params):
    lhs = np.asarray(lhs_list)
    dist2 = np.asarray(dist2_list)
    scale = 1.0 + np.abs(lhs) + dist2
    violated = tuple(int(i) for i in np.nonzero(lhs < -1e-10 * scale)[0])
    mask = dist2 > 1e-12
    ratios = lhs[mask] / dist2[mask]
    min_ratio = float(ratios.min()) if ratios.size else float("inf")
    return GrowthReport(sampled_points=int(lhs.size), min_ratio=min_ratio,
                        violated=violated, params=params)


def verify_qg_primal(inst, gamma=None, ball_radius=1.0, samples=2000,
                     use_penalty=False, rho=None, seed=0):
    """Sampled quadratic growth of the primal objective around x_star.

    Checks f(X) - p* + gamma ||A(X) - b|| >= kappa dist(X, solution)^2 on
    perturbations of x_star corrected back onto the affine set. With the
    indicator objective the samples are additionally projected onto the PSD
    cone (the inequality is vacuous off the cone); with ``use_penalty`` the
    objective gains rho * max(0, lambda_max(-X)) and rho must exceed
    tr(z_star).
    """
    p = inst.problem
    if not inst.primal_unique:
        raise ValueError("growth checks need an instance with a unique primal "
                         "solution (distance to the solution set is measured "
                         "against x_star)")
    if gamma is None:
        gamma = _default_gamma(inst)
    if use_penalty:
        if rho is None or rho <= float(np.trace(inst.z_star)) + 1e-9:
            raise ValueError("penalty variant needs rho > tr(z_star)")
    if ball_radius <= 0:
        raise ValueError("ball_radius must be positive")
    rng = np.random.default_rng(seed)
    solve = _gram_solve(p)
    sigma = ball_radius / 3.0
    lhs_list, dist2_list = [], []
    kept = 0
    while kept < samples:
        X = inst.x_star + _sym_noise(rng, p.n, sigma)
        X = _project_affine(p, X, solve)
        if not use_penalty:
            X = project_psd(X)
        if frob(X - inst.x_star) > ball_radius:
            continue
        kept += 1
        value = _inner(p.C, X)
        if use_penalty:
            value += exact_penalty(X, rho)
        lhs = value - inst.p_star + gamma * float(np.linalg.norm(apply_A(p, X) - p.b))
        lhs_list.append(lhs)
        dist2_list.append(frob(X - inst.x_star) ** 2)
    return _ratio_report(lhs_list, dist2_list,
                         dict(gamma=gamma, ball_radius=ball_radius,
                              use_penalty=use_penalty, rho=rho, seed=seed))


def verify_eb_primal(inst, gamma=None, alpha=None, ball_radius=1.0, samples=2000,
                     seed=0):
    """Sampled three-term error bound of the primal problem around x_star.

    Checks <C, X> - p* + gamma ||A(X) - b|| + alpha dist(X, PSD) >= kappa
    dist(X, solution)^2 on unconstrained perturbations (no projections).
    """
    p = inst.problem
    if not inst.primal_unique:
        raise ValueError("growth checks need an instance with a unique primal "
                         "solution")
    if gamma is None:
        gamma = _default_gamma(inst)
    if alpha is None:
        alpha = _default_gamma(inst)
    rng = np.random.default_rng(seed)
    sigma = ball_radius / 3.0
    lhs_list, dist2_list = [], []
    kept = 0
    while kept < samples:
        X = inst.x_star + _sym_noise(rng, p.n, sigma)
        if frob(X - inst.x_star) > ball_radius:
            continue
        kept += 1
        lhs = (_inner(p.C, X) - inst.p_star
               + gamma * float(np.linalg.norm(apply_A(p, X) - p.b))
               + alpha * dist_psd(X))
        lhs_list.append(lhs)
        dist2_list.append(frob(X - inst.x_star) ** 2)
    return _ratio_report(lhs_list, dist2_list,
                         dict(gamma=gamma, alpha=alpha, ball_radius=ball_radius,
                              seed=seed))


def verify_qg_dual(inst, gamma=None, ball_radius=1.0, samples=2000,
                   use_penalty=False, rho=None, seed=0, y_grid=None):
    """Sampled quadratic growth of the dual objective around (y_star, z_star).

    Mirror of :func:`verify_qg_primal`: checks -<b, y> + h(Z) + d* +
    gamma ||C - A*(y) - Z|| >= kappa dist((y, Z), solution)^2 on
    perturbations corrected onto the dual affine set, with Z projected onto
    the cone in the indicator variant. ``use_penalty`` takes h(Z) =
    rho max(0, lambda_max(-Z)) and requires rho > tr(x_star).

    With ``y_grid`` the check runs on the affine slice Z = C - A*(y) over the
    given grid of y values (outer product of the grid with itself for m = 2);
    on the slice the pair is determined by y, so the distance is measured in
    y alone. This is the regime of the penalized-dual growth plot for the
    2x2 toy instance.
    """
    p = inst.problem
    if not inst.dual_unique:
        raise ValueError("dual growth checks need an instance with a unique "
                         "dual solution")
    if gamma is None:
        gamma = 2.0 * (1.0 + float(np.linalg.norm(inst.y_star)) + frob(inst.z_star))
    if use_penalty:
        if rho is None or rho <= float(np.trace(inst.x_star)) + 1e-9:
            raise ValueError("penalty variant needs rho > tr(x_star)")
    d_star = inst.p_star
    lhs_list, dist2_list = [], []

    def dual_value(y, Z):
        value = -float(p.b @ y)
        if use_penalty:
            value += exact_penalty(Z, rho)
        return value

    if y_grid is not None:
        if p.m != 2:
            raise ValueError("y_grid sampling needs a problem with m = 2")
        for y1 in y_grid:
            for y2 in y_grid:
                y = np.array([float(y1), float(y2)])
                Z = symmetrize(p.C - apply_Astar(p, y))
                if not use_penalty and dist_psd(Z) > 1e-9 * (1.0 + frob(Z)):
                    continue
                lhs_list.append(dual_value(y, Z) + d_star)
                dist2_list.append(float(np.sum((y - inst.y_star) ** 2)))
        return _ratio_report(lhs_list, dist2_list,
                             dict(gamma=gamma, use_penalty=use_penalty, rho=rho,
                                  grid_points=len(y_grid)))

    rng = np.random.default_rng(seed)
    V = p.constraint_mats.reshape(p.m, -1)
    gram = V @ V.T
    lhs_mat = np.eye(p.m) + gram
    sigma = ball_radius / 3.0
    kept = 0
    while kept < samples:
        y = inst.y_star + rng.standard_normal(p.m) * sigma
        Z = inst.z_star + _sym_noise(rng, p.n, sigma)
        # least-squares correction onto the dual affine set Z = C - A*(y)
        y = np.linalg.solve(lhs_mat, y + apply_A(p, p.C - Z))
        Z = symmetrize(p.C - apply_Astar(p, y))
        if not use_penalty:
            Z = project_psd(Z)
        dist2 = float(np.sum((y - inst.y_star) ** 2)) + frob(Z - inst.z_star) ** 2
        if np.sqrt(dist2) > ball_radius:
            continue
        kept += 1
        lhs = (dual_value(y, Z) + d_star
               + gamma * frob(p.C - apply_Astar(p, y) - Z))
        lhs_list.append(lhs)
        dist2_list.append(dist2)
    return _ratio_report(lhs_list, dist2_list,
                         dict(gamma=gamma, ball_radius=ball_radius,
                              use_penalty=use_penalty, rho=rho, seed=seed))


@dataclass(frozen=True)
class CurveRow:
    """One point of the no-sharp-growth curve of the 2x2 toy instance."""

    y1: float
    penalty_value: float
    closed_form: float
    dist_lower_bound: float
    ratio_upper_bound: float


def no_sharp_growth_curve(t_grid, rho=4.0):
    """Evaluate the toy instance's penalized dual along y2 = y1 / (y1 - 1).

    Along that curve the penalty term vanishes, the objective equals
    -y1^2 / (y1 - 1) in closed form, and the ratio (f - f*) / dist(y, S)
    tends to 0 as y1 -> 0, ruling out sharp (first-order) growth. Points must
    lie in [0, 1).
    """
    from .fixtures import toy_rank1_instance

    inst = toy_rank1_instance()
    p = inst.problem
    rows = []
    for t in np.asarray(t_grid, dtype=float):
        if not 0.0 <= t < 1.0:
            raise ValueError(f"curve parameter {t} outside [0, 1)")
        y = np.array([t, t / (t - 1.0)]) if t > 0 else np.array([0.0, 0.0])
        value = -float(p.b @ y) + exact_penalty(symmetrize(p.C - apply_Astar(p, y)), rho)
        closed = -t * t / (t - 1.0) if t > 0 else 0.0
        dist_lb = abs(t / (t - 1.0)) if t > 0 else 0.0
        ratio = value / dist_lb if dist_lb > 0 else 0.0
        rows.append(CurveRow(y1=float(t), penalty_value=value, closed_form=closed,
                             dist_lower_bound=dist_lb, ratio_upper_bound=ratio))
    return rows


@dataclass(frozen=True)
class PreimageReport:
    """Counts from the two-sided penalty-subdifferential preimage check."""

    face_points: int
    face_failures: int
    off_face_points: int
    off_face_detected: int

    @property
    def ok(self):
        return self.face_failures == 0 and self.off_face_detected == self.off_face_points


def verify_penalty_preimage(zbar, rho, samples=50, probes=100, seed=0,
                            slack=1e-8):
    """Sampled check that the penalty preimage of -zbar is the face of zbar.

    For X on the face {p2 B p2' : B PSD}, -zbar must satisfy the subgradient
    inequality l(Y) >= l(X) + <-zbar, Y - X> at every probe Y; for PSD X off
    the face (distance > 0.1) some probe must violate it. Probes combine
    random directions with the face projection of X, which witnesses the
    violation whenever <zbar, X> > 0. Requires tr(zbar) < rho.
    """
    zbar = check_symmetric(zbar, name="zbar")
    if float(np.trace(zbar)) >= rho:
        raise ValueError("the preimage identity needs tr(zbar) < rho")
    n = zbar.shape[0]
    face = face_basis(zbar)
    rng = np.random.default_rng(seed)

    def l(M):
        return exact_penalty(M, rho) if rho > 0 else 0.0

    def holds(X, Y):
        return l(Y) >= l(X) + _inner(-zbar, Y - X) - slack

    def probe_points(X):
        pts = []
        for _ in range(probes):
            pts.append(X + _sym_noise(rng, n, 1.0))
        if face.p2.shape[1]:
            B = symmetrize(face.p2.T @ X @ face.p2)
            pts.append(symmetrize(face.p2 @ project_psd(B) @ face.p2.T))
        pts.append(np.zeros((n, n)))
        return pts

    face_failures = 0
    k = face.p2.shape[1]
    for _ in range(samples):
        if k:
            R = rng.standard_normal((k, k))
            X = symmetrize(face.p2 @ (R @ R.T) @ face.p2.T)
        else:
            X = np.zeros((n, n))
        if not all(holds(X, Y) for Y in probe_points(X)):
            face_failures += 1

    off_detected = 0
    off_points = 0
    r = face.p1.shape[1]
    if r:
        while off_points < samples:
            R = rng.standard_normal((n, n))
            X = symmetrize(R @ R.T)
            if dist_to_face(X, face) <= 0.1:
                continue
            off_points += 1
            if not all(holds(X, Y) for Y in probe_points(X)):
                off_detected += 1
    return PreimageReport(face_points=samples, face_failures=face_failures,
                          off_face_points=off_points, off_face_detected=off_detected)


def verify_growth_lemma(xbar, zbar, mu, samples=10000, seed=0, penalty_rho=None):
    """Growth against squared face distance with the explicit proof constant.

    For complementary PSD xbar, zbar checks <zbar, X> >= kappa *
    dist(X, face(zbar))^2 over PSD samples in the ball of radius mu around
    xbar, with the explicit constant kappa = lambda_min(positive spectrum of
    zbar) / (3 mu + 2 ||xbar||).

    With ``penalty_rho`` (> tr(zbar)) the penalty-function variant is checked
    instead, on unprojected samples in the ball:

        rho max(0, lambda_max(-X)) >= <-zbar, X> + kappa_p dist(X, face)^2

    with the explicit constant kappa_p = rho / (n mu) when zbar = 0, else
    kappa_p = min((rho - tr(zbar)) / (2 n mu), kappa / 2).
    """
    xbar = check_symmetric(xbar, name="xbar")
    zbar = check_symmetric(zbar, name="zbar")
    scale = 1.0 + frob(xbar) * frob(zbar)
    if dist_psd(xbar) > 1e-9 * scale or dist_psd(zbar) > 1e-9 * scale:
        raise ValueError("xbar and zbar must be positive semidefinite")
    if abs(_inner(xbar, zbar)) > 1e-10 * scale:
        raise ValueError("xbar and zbar must be complementary (<xbar, zbar> = 0)")
    if mu <= 0:
        raise ValueError("mu must be positive")
    n = xbar.shape[0]
    face = face_basis(zbar)
    kappa = face.lambda1_min / (3.0 * mu + 2.0 * frob(xbar))
    if penalty_rho is not None:
        if penalty_rho <= float(np.trace(zbar)):
            raise ValueError("penalty variant needs penalty_rho > tr(zbar)")
        if face.rank == 0:
            kappa_used = penalty_rho / (n * mu)
        else:
            delta = penalty_rho - float(np.trace(zbar))
            kappa_used = min(delta / (2.0 * n * mu), kappa / 2.0)
    else:
        kappa_used = kappa
    rng = np.random.default_rng(seed)
    tol = 1e-10 * scale * (1.0 + mu) ** 2
    lhs_list, dist2_list, violated = [], [], []
    for i in range(samples):
        X = xbar + _sym_noise(rng, n, mu / 3.0)
        if penalty_rho is None:
            X = project_psd(X)
            lhs = _inner(zbar, X)
        else:
            if frob(X - xbar) > mu:
                X = xbar + (X - xbar) * (mu / frob(X - xbar))
            lhs = exact_penalty(X, penalty_rho) + _inner(zbar, X)
        d2 = dist_to_face(X, face) ** 2
        lhs_list.append(lhs)
        dist2_list.append(d2)
        if lhs + tol < kappa_used * d2:
            violated.append(i)
    mask = np.asarray(dist2_list) > 1e-12
    ratios = np.asarray(lhs_list)[mask] / np.asarray(dist2_list)[mask]
    min_ratio = float(ratios.min()) if ratios.size else float("inf")
    return GrowthReport(sampled_points=samples, min_ratio=min_ratio,
                        violated=tuple(violated),
                        params=dict(kappa=kappa_used, mu=mu, seed=seed,
                                    penalty_rho=penalty_rho))


def check_trace_bound(samples=10000, n_range=(2, 8), seed=0):
    """Random-split check of ||D||_op tr(A) >= ||B||^2 for PSD blocks.

    Draws PSD matrices M = R R', splits them as [[A, B], [B', D]] at a random
    position, and counts violations beyond 1e-10 (1 + ||M||^2).
    """
    rng = np.random.default_rng(seed)
    lo, hi = n_range
    violated = []
    for i in range(samples):
        n = int(rng.integers(lo, hi + 1))
        R = rng.standard_normal((n, n))
        M = symmetrize(R @ R.T)
        s = int(rng.integers(1, n))
        A = M[:s, :s]
        B = M[:s, s:]
        D = M[s:, s:]
        lhs = float(np.linalg.eigvalsh(symmetrize(D))[-1]) * float(np.trace(A))
        rhs = float(np.sum(B * B))
        if lhs < rhs - 1e-10 * (1.0 + frob(M) ** 2):
            violated.append(i)
    return GrowthReport(sampled_points=samples, min_ratio=float("nan"),
                        violated=tuple(violated),
                        params=dict(n_range=n_range, seed=seed))


@dataclass(frozen=True)
class ComplementarityReport:
    rank_x: int
    rank_z: int
    n: int

    @property
    def holds(self):
        return self.rank_x + self.rank_z == self.n


def check_strict_complementarity(x, z, tol=1e-8):
    """Rank-sum strict complementarity test for a complementary PSD pair."""
    x = check_symmetric(x, name="x")
    z = check_symmetric(z, name="z")
    scale = 1.0 + frob(x) + frob(z)
    if dist_psd(x) > tol * scale or dist_psd(z) > tol * scale:
        raise ValueError("x and z must be PSD within tolerance")
    if abs(_inner(x, z)) > tol * scale:
        raise ValueError("x and z must satisfy <x, z> = 0 within tolerance")

    def num_rank(M):
        lam = eig_sym(M).eigenvalues
        top = max(float(lam[0]), 0.0)
        if top == 0.0:
            return 0
        return int(np.count_nonzero(lam > tol * top))

    return ComplementarityReport(rank_x=num_rank(x), rank_z=num_rank(z),
                                 n=x.shape[0])


def _project_capped_simplex(v, beta):
    """Projection onto {g >= 0, sum(g) <= beta}."""
    w = np.maximum(v, 0.0)
    if w.sum() <= beta:
        return w
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - beta
    ks = np.arange(1, v.size + 1)
    cond = u - css / ks > 0
    k = int(np.nonzero(cond)[0][-1]) + 1
    theta = css[k - 1] / k
    return np.maximum(v - theta, 0.0)


def _prox_spectral_penalty(V, tau, rho):
    """Proximal map of tau * rho * max(0, lambda_max(-.)) via eigenvalues."""
    dec = eig_sym(V)
    shift = _project_capped_simplex(-dec.eigenvalues, tau * rho)
    lam = dec.eigenvalues + shift
    return symmetrize((dec.eigenvectors * lam) @ dec.eigenvectors.T)


def minimize_penalized_affine(p, rho, tau=1.0, tol=1e-12, max_iter=50000,
                              stop_below=None):
    """Minimize <C, X> + rho max(0, lambda_max(-X)) over the affine set A(X) = b.

    Douglas-Rachford splitting between the linear-plus-affine-indicator part
    (prox: shifted affine projection) and the spectral penalty (prox: capped
    simplex shift of the eigenvalues). Both proximal maps are exact, so the
    nonsmooth penalty needs no smoothing. ``stop_below`` aborts early once the
    value sinks under it (the under-penalized problem can be unbounded, and
    detecting the drop is all a negative control needs). Returns
    (minimizer, value).
    """
    solve = _gram_solve(p)
    s = _project_affine(p, np.zeros((p.n, p.n)), solve)
    x = s
    for it in range(max_iter):
        x = _project_affine(p, s - tau * p.C, solve)
        z = _prox_spectral_penalty(symmetrize(2.0 * x - s), tau, rho)
        gap = frob(z - x)
        s = symmetrize(s + z - x)
        if gap <= tol * (1.0 + frob(x)):
            break
        if stop_below is not None and it % 50 == 0:
            if _inner(p.C, x) + exact_penalty(x, rho) < stop_below:
                break
    x = _project_affine(p, s - tau * p.C, solve)
    value = _inner(p.C, x) + exact_penalty(x, rho)
    return x, value


@dataclass(frozen=True)
class EquivalenceReport:
    """Penalized-problem minimizer versus the certified solution.

    ``dist_to_solution``/``value_gap`` refer to the valid penalty (rho above
    the trace threshold); the ``subthreshold_*`` fields record what happened
    with rho cut below the threshold, where the penalized problem must be
    detectably different (value strictly below the optimum or minimizer off
    the solution set).
    """

    rho: float
    dist_to_solution: float
    value_gap: float
    subthreshold_rho: float | None
    subthreshold_dist: float | None
    subthreshold_value_gap: float | None

    @property
    def equivalent(self):
        return self.dist_to_solution <= 1e-5 and abs(self.value_gap) <= 1e-7

    @property
    def subthreshold_detected(self):
        if self.subthreshold_rho is None:
            return None
        return (self.subthreshold_value_gap < -1e-6
                or self.subthreshold_dist > 1e-3)


def exact_penalty_equivalence(inst, rho, check_subthreshold=True, tol=1e-12,
                              max_iter=50000):
    """Verify the penalized problem reproduces the solution iff rho is large.

    With rho > tr(z_star) the affine-constrained penalized minimizer must
    coincide with x_star and its value with p_star; with rho halved below the
    threshold the minimum must drop below p_star or move away, which is the
    detectable failure mode of an under-sized penalty.
    """
    threshold = float(np.trace(inst.z_star))
    if rho <= threshold:
        raise ValueError(f"need rho > tr(z_star) = {threshold:.6g}")
    if not inst.primal_unique:
        raise ValueError("the equivalence check compares the penalized "
                         "minimizer against x_star and needs a unique primal "
                         "solution")
    p = inst.problem
    x_hat, value = minimize_penalized_affine(p, rho, tol=tol, max_iter=max_iter)
    dist = frob(x_hat - inst.x_star)
    gap = value - inst.p_star
    sub_rho = sub_dist = sub_gap = None
    if check_subthreshold and threshold > 0:
        sub_rho = threshold / 2.0
        floor = inst.p_star - 0.01 * (1.0 + abs(inst.p_star))
        x_sub, v_sub = minimize_penalized_affine(p, sub_rho, tol=tol,
                                                 max_iter=max_iter,
                                                 stop_below=floor)
        sub_dist = frob(x_sub - inst.x_star)
        sub_gap = v_sub - inst.p_star
    return EquivalenceReport(rho=rho, dist_to_solution=dist, value_gap=gap,
                             subthreshold_rho=sub_rho, subthreshold_dist=sub_dist,
                             subthreshold_value_gap=sub_gap)
