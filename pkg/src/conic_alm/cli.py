"""Command-line entry points: solve, verify, and bench.

``solve`` runs one ALM driver on a builtin or SDPA-file instance and writes
``trace.csv`` (one row per outer iteration) plus ``summary.json`` (final
residuals, fitted rates, wall time, and the reproducibility manifest).
``verify`` runs one of the property verifiers and writes ``report.json``.
``bench`` sweeps the initial penalty over a list of values, writing one trace
per value and a side-by-side CSV of the KKT residual series.

Exit codes: 0 on success/convergence, 2 when the run stopped before reaching
the residual threshold (partial outputs are still written), 3 on input
errors. The environment variable ``CONIC_ALM_THREADS`` caps how many bench
configurations run concurrently.

Traces are deterministic: a summary manifest (instance, config, seed) pins
the run, and repeated runs produce byte-identical ``trace.csv``. The CSV
starts with a versioned comment line, then a header row; floats carry 17
significant digits.
"""

import argparse
import json
import os
import sys
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import fixtures, theory
from .alm import AlmConfig, fit_linear_rate, solve_dual_alm, solve_ineq_alm, \
    solve_primal_alm, truncate_at_floor, verify_ppm_alm_link
from .model import IneqProblem, KnownSolutionInstance, zero_dual
from .sdpa import SdpaFormatError, sdpa_read

ARTIFACT_VERSION = "0.1.0"
TRACE_SCHEMA = "conic-alm-trace-v1"
SUMMARY_SCHEMA = 1

EXIT_OK = 0
EXIT_NOT_CONVERGED = 2
EXIT_INPUT_ERROR = 3

_SDP_COLUMNS = ["k", "eps1", "eps2", "eta1", "eta2", "eta3", "eta4", "eta5", "eps3",
                "r_k", "eps_k", "delta_k", "dist_x", "dist_w", "inner_iterations",
                "gap_certificate", "certified"]
_INEQ_COLUMNS = ["k", "feasibility", "dual_feasibility", "stationarity",
                 "complementarity", "cost_gap", "eps3", "r_k", "eps_k", "delta_k",
                 "dist_x", "inner_iterations", "gap_certificate", "certified"]


class InputError(Exception):
    """Bad command-line input; maps to exit code 3."""


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def _trace_rows(trace):
    rows = []
    for rec in trace.records:
        res = rec.residuals
        if trace.form == "ineq":
            rows.append([rec.k, res.feasibility, res.dual_feasibility,
                         res.stationarity, res.complementarity, res.cost_gap,
                         res.eps3, rec.r, rec.eps_k, rec.delta_k, rec.dist_x,
                         rec.inner_iterations, rec.gap_certificate, rec.certified])
        else:
            rows.append([rec.k, res.eps1, res.eps2, res.eta1, res.eta2, res.eta3,
                         res.eta4, res.eta5, res.eps3, rec.r, rec.eps_k, rec.delta_k,
                         rec.dist_x, rec.dist_w, rec.inner_iterations,
                         rec.gap_certificate, rec.certified])
    return rows


def write_trace_csv(trace, path):
    columns = _INEQ_COLUMNS if trace.form == "ineq" else _SDP_COLUMNS
    lines = [f"# {TRACE_SCHEMA} form={trace.form}", ",".join(columns)]
    for row in _trace_rows(trace):
        lines.append(",".join(_fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def _fit_or_none(series, floor=1e-12):
    series = np.asarray([s for s in series if np.isfinite(s)], dtype=float)
    series = truncate_at_floor(series, floor)
    series = series[series > 0]
    try:
        fit = fit_linear_rate(series, tail_fraction=0.5)
    except ValueError:
        return None
    return {"rate_q": fit.rate_q, "r_squared": fit.r_squared,
            "n_points": fit.n_points}


def write_summary(trace, path, manifest, wall_time):
    final = trace.final.residuals
    if trace.form == "ineq":
        residuals = {"feasibility": final.feasibility,
                     "dual_feasibility": final.dual_feasibility,
                     "stationarity": final.stationarity,
                     "complementarity": final.complementarity,
                     "cost_gap": final.cost_gap, "eps3": final.eps3}
    else:
        residuals = {"eps1": final.eps1, "eps2": final.eps2, "eta1": final.eta1,
                     "eta2": final.eta2, "eta3": final.eta3, "eta4": final.eta4,
                     "eta5": final.eta5, "eps3": final.eps3}
    rates = {"eps3": _fit_or_none(trace.series("eps3"))}
    dist_w = trace.series("dist_w") if trace.form != "ineq" else np.array([])
    if dist_w.size and np.all(np.isfinite(dist_w)):
        rates["dist_w"] = _fit_or_none(dist_w, floor=1e-9)
    summary = {
        "schema_version": SUMMARY_SCHEMA,
        "trace_schema": TRACE_SCHEMA,
        "manifest": manifest,
        "outer_iterations": len(trace.records),
        "converged": trace.converged,
        "final_residuals": residuals,
        "fitted_rates": rates,
        "warnings": list(trace.warnings),
        "wall_time_sec": wall_time,
    }
    Path(path).write_text(json.dumps(summary, indent=2, default=float) + "\n")


def _config_from_args(args):
    return AlmConfig(r0=args.r0, r_growth=args.r_growth, r_max=args.r_max,
                     eps0=args.eps0, delta0=args.delta0, decay=args.decay,
                     max_outer=args.max_outer, stop_eps3=args.stop_eps3)


def _load_instance(args):
    if getattr(args, "sdpa", None):
        path = Path(args.sdpa)
        if not path.exists():
            raise InputError(f"SDPA file not found: {path}")
        try:
            return sdpa_read(path)
        except (SdpaFormatError, ValueError) as exc:
            raise InputError(f"failed to parse {path}: {exc}") from exc
    name = getattr(args, "builtin", None)
    if not name:
        raise InputError("provide either --builtin NAME or --sdpa FILE")
    try:
        return fixtures.load_builtin(name, n=args.n, m=args.m,
                                     rank_x=args.rank_x, seed=args.seed)
    except KeyError as exc:
        raise InputError(str(exc)) from exc


def _run_solver(instance, form, cfg):
    if isinstance(instance, IneqProblem):
        if form != "ineq":
            raise InputError("this instance is a QP with inequalities; use --form ineq")
        return solve_ineq_alm(instance, np.zeros(instance.n_constraints), cfg)
    problem = instance.problem if isinstance(instance, KnownSolutionInstance) else instance
    if form == "primal":
        return solve_primal_alm(instance, zero_dual(problem), cfg)
    if form == "dual":
        return solve_dual_alm(instance, np.zeros((problem.n, problem.n)), cfg)
    raise InputError(f"--form {form} does not apply to an SDP instance")


def cmd_solve(args):
    instance = _load_instance(args)
    cfg = _config_from_args(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {
        "command": "solve",
        "instance": args.sdpa or args.builtin,
        "form": args.form,
        "config": asdict(cfg),
        "seed": args.seed,
        "synth_params": {"n": args.n, "m": args.m, "rank_x": args.rank_x},
        "artifact_version": ARTIFACT_VERSION,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    start = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        trace = _run_solver(instance, args.form, cfg)
    wall = time.perf_counter() - start
    write_trace_csv(trace, out / "trace.csv")
    write_summary(trace, out / "summary.json", manifest, wall)
    final = trace.final.residuals.eps3
    print(f"{trace.problem_name}: {len(trace.records)} outer iterations, "
          f"eps3 = {final:.3e}, converged = {trace.converged}")
    return EXIT_OK if trace.converged else EXIT_NOT_CONVERGED


def _require_certified(instance, what):
    if not isinstance(instance, KnownSolutionInstance):
        raise InputError(f"{what} needs an instance with a certified solution "
                         "(example-d1 or synth)")
    return instance


def cmd_verify(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    name = args.verifier
    report = {}
    ok = False
    if name == "trace-bound":
        rep = theory.check_trace_bound(samples=args.samples, seed=args.seed)
        ok = len(rep.violated) == 0
        report = {"violations": len(rep.violated), "samples": rep.sampled_points}
    elif name == "no-sharp-growth":
        grid = np.linspace(0.0, 0.9, args.grid_points)
        rows = theory.no_sharp_growth_curve(grid, rho=args.rho or 4.0)
        errs = [abs(r.penalty_value - r.closed_form) for r in rows]
        ok = max(errs) <= 1e-10
        report = {"max_closed_form_error": max(errs),
                  "ratios": [r.ratio_upper_bound for r in rows]}
    else:
        instance = _load_instance(args)
        if name == "growth-lemma":
            inst = _require_certified(instance, name)
            rep = theory.verify_growth_lemma(inst.x_star, inst.z_star, mu=args.mu,
                                             samples=args.samples, seed=args.seed)
            ok = len(rep.violated) == 0
            report = {"kappa": rep.params["kappa"], "min_ratio": rep.min_ratio,
                      "violations": len(rep.violated), "samples": rep.sampled_points}
        elif name in ("qg-primal", "eb-primal", "qg-dual"):
            inst = _require_certified(instance, name)
            kwargs = dict(samples=args.samples, seed=args.seed,
                          ball_radius=args.radius)
            if name == "qg-primal":
                rep = theory.verify_qg_primal(inst, gamma=args.gamma,
                                              use_penalty=args.penalty,
                                              rho=args.rho, **kwargs)
            elif name == "eb-primal":
                rep = theory.verify_eb_primal(inst, gamma=args.gamma,
                                              alpha=args.alpha, **kwargs)
            else:
                y_grid = fixtures.GRIDS.get(args.grid) if args.grid else None
                if args.grid and y_grid is None:
                    raise InputError(f"unknown grid {args.grid!r}")
                rep = theory.verify_qg_dual(inst, gamma=args.gamma,
                                            use_penalty=args.penalty,
                                            rho=args.rho, y_grid=y_grid, **kwargs)
            ok = len(rep.violated) == 0
            report = {"min_ratio": rep.min_ratio, "violations": len(rep.violated),
                      "samples": rep.sampled_points, "params": rep.params}
        elif name == "penalty-preimage":
            inst = _require_certified(instance, name)
            rho = args.rho or float(np.trace(inst.z_star)) + 1.0
            rep = theory.verify_penalty_preimage(inst.z_star, rho,
                                                 samples=args.samples // 100 or 20,
                                                 seed=args.seed)
            ok = rep.ok
            report = asdict(rep)
        elif name == "exact-penalty":
            inst = _require_certified(instance, name)
            rho = args.rho or 1.1 * float(np.trace(inst.z_star)) + 0.1
            rep = theory.exact_penalty_equivalence(inst, rho)
            ok = rep.equivalent and rep.subthreshold_detected in (True, None)
            report = asdict(rep)
        elif name == "strict-complementarity":
            inst = _require_certified(instance, name)
            rep = theory.check_strict_complementarity(inst.x_star, inst.z_star)
            ok = rep.holds
            report = {"rank_x": rep.rank_x, "rank_z": rep.rank_z, "n": rep.n,
                      "holds": rep.holds}
        elif name == "ppm-alm-link":
            inst = _require_certified(instance, name)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                trace = solve_primal_alm(inst, zero_dual(inst.problem),
                                         AlmConfig(max_outer=args.max_outer))
            rep = verify_ppm_alm_link(inst.problem, trace)
            ok = rep.ok
            report = {"iterations": len(rep.rows), "violations": len(rep.violations)}
        else:
            raise InputError(f"unknown verifier {name!r}")
    report["verifier"] = name
    report["ok"] = ok
    Path(out / "report.json").write_text(json.dumps(report, indent=2, default=float) + "\n")
    print(f"{name}: {'ok' if ok else 'VIOLATIONS FOUND'}")
    return EXIT_OK if ok else EXIT_NOT_CONVERGED


def cmd_bench(args):
    instance = _load_instance(args)
    try:
        r_values = [float(tok) for tok in args.r_list.split(",") if tok]
    except ValueError as exc:
        raise InputError(f"bad --r-list: {exc}") from exc
    if not r_values:
        raise InputError("--r-list must contain at least one value")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    def run_one(r0):
        cfg = AlmConfig(r0=r0, r_growth=args.r_growth, r_max=max(args.r_max, r0),
                        max_outer=args.max_outer, stop_eps3=args.stop_eps3)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return r0, _run_solver(instance, args.form, cfg)

    max_threads = int(os.environ.get("CONIC_ALM_THREADS", "1") or "1")
    traces = {}
    if max_threads > 1 and len(r_values) > 1:
        with ThreadPoolExecutor(max_workers=min(max_threads, len(r_values))) as pool:
            for r0, trace in pool.map(run_one, r_values):
                traces[r0] = trace
    else:
        for r0 in r_values:
            r0, trace = run_one(r0)
            traces[r0] = trace
    all_ok = True
    for r0, trace in traces.items():
        write_trace_csv(trace, out / f"trace-r{_fmt(r0)}.csv")
        all_ok = all_ok and trace.converged
    n_rows = max(len(t.records) for t in traces.values())
    header = ["k"] + [f"eps3_r{_fmt(r0)}" for r0 in r_values]
    lines = [f"# {TRACE_SCHEMA} comparison", ",".join(header)]
    for k in range(n_rows):
        row = [str(k)]
        for r0 in r_values:
            recs = traces[r0].records
            row.append(_fmt(recs[k].residuals.eps3) if k < len(recs) else "")
        lines.append(",".join(row))
    (out / "comparison.csv").write_text("\n".join(lines) + "\n")
    for r0 in r_values:
        t = traces[r0]
        print(f"r0={r0:g}: {len(t.records)} iterations, eps3={t.final.residuals.eps3:.3e}")
    return EXIT_OK if all_ok else EXIT_NOT_CONVERGED


def _add_instance_args(sub):
    sub.add_argument("--builtin", help="builtin instance name "
                     f"({', '.join(fixtures.SDP_BUILTINS + fixtures.INEQ_BUILTINS)})")
    sub.add_argument("--sdpa", help="path to an SDPA-subset file")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--n", type=int, default=5, help="synth: matrix dimension")
    sub.add_argument("--m", type=int, default=6, help="synth: constraint count")
    sub.add_argument("--rank-x", type=int, default=2, dest="rank_x",
                     help="synth: rank of the primal solution")


def _add_config_args(sub):
    sub.add_argument("--r0", type=float, default=1.0)
    sub.add_argument("--r-growth", type=float, default=1.25, dest="r_growth")
    sub.add_argument("--r-max", type=float, default=100.0, dest="r_max")
    sub.add_argument("--eps0", type=float, default=1.0)
    sub.add_argument("--delta0", type=float, default=0.5)
    sub.add_argument("--decay", type=float, default=0.7)
    sub.add_argument("--max-outer", type=int, default=500, dest="max_outer")
    sub.add_argument("--stop-eps3", type=float, default=1e-8, dest="stop_eps3")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="conic-alm",
        description="Inexact augmented Lagrangian solvers and property verifiers "
                    "for semidefinite programs.")
    subs = parser.add_subparsers(dest="command", required=True)

    solve = subs.add_parser("solve", help="run one ALM driver and write trace files")
    _add_instance_args(solve)
    _add_config_args(solve)
    solve.add_argument("--form", choices=["primal", "dual", "ineq"], default="primal")
    solve.add_argument("--out", default=".")

    verify = subs.add_parser("verify", help="run a property verifier")
    verify.add_argument("verifier", choices=[
        "growth-lemma", "trace-bound", "qg-primal", "eb-primal", "qg-dual",
        "penalty-preimage", "exact-penalty", "strict-complementarity",
        "no-sharp-growth", "ppm-alm-link"])
    _add_instance_args(verify)
    verify.add_argument("--samples", type=int, default=2000)
    verify.add_argument("--mu", type=float, default=1.0)
    verify.add_argument("--gamma", type=float, default=None)
    verify.add_argument("--alpha", type=float, default=None)
    verify.add_argument("--radius", type=float, default=1.0)
    verify.add_argument("--rho", type=float, default=None)
    verify.add_argument("--penalty", action="store_true",
                        help="use the exact-penalty objective variant")
    verify.add_argument("--grid", default=None, help="named grid (e.g. fig-d1)")
    verify.add_argument("--grid-points", type=int, default=10, dest="grid_points")
    verify.add_argument("--max-outer", type=int, default=60, dest="max_outer")
    verify.add_argument("--out", default=".")

    bench = subs.add_parser("bench", help="sweep the initial penalty parameter")
    _add_instance_args(bench)
    bench.add_argument("--form", choices=["primal", "dual", "ineq"], default="primal")
    bench.add_argument("--r-list", required=True, dest="r_list",
                       help="comma-separated penalty values, e.g. 1,5,10")
    bench.add_argument("--r-growth", type=float, default=1.0, dest="r_growth")
    bench.add_argument("--r-max", type=float, default=100.0, dest="r_max")
    bench.add_argument("--max-outer", type=int, default=500, dest="max_outer")
    bench.add_argument("--stop-eps3", type=float, default=1e-5, dest="stop_eps3")
    bench.add_argument("--out", default=".")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"solve": cmd_solve, "verify": cmd_verify, "bench": cmd_bench}
    try:
        return handlers[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (SdpaFormatError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
