"""
Command-line front end.

Temperatures are given as E_g*beta (``--beta-eg``) or as k_B*T/E_g
(``--temperature``).  Run records are JSON on stdout, trajectories are CSV.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 domain error.
"""

from __future__ import annotations

import argparse
import math
import re
import sys

from . import __version__, kernels, sds, solver, verify
from .dynamics import DEFAULT_SAMPLES, Schedule, Stage, evolve_schedule
from .errors import DomainError, NotThermalError, SingularJacobianError
from .protocol import execute_and_verify, heat_cool_plan, thermal_target
from .records import RunRecord, to_plain, write_trajectory_csv
from .state import default_tolerance, effective_beta, is_thermal, thermality_residual

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3
SDS_MATCH = 1e-12
SUGGEST_TOL = 0.012


class UsageError(Exception):
    pass


_LOG = re.compile(r"^(?:log|ln)\s*\(?\s*([0-9.eE+-]+)\s*\)?$")


def parse_real(text: str) -> float:
    """Float, ``pi``, or ``log N`` / ``log(N)`` (natural log)."""
    s = text.strip().lower()
    if s in ("pi", "π"):
        return math.pi
    m = _LOG.match(s)
    try:
        return math.log(float(m.group(1))) if m else float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a real number: {text!r}") from None


def parse_index(text: str) -> sds.SdsIndex:
    try:
        return sds.SdsIndex.parse(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def parse_params(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected w,k,tau; got {text!r}")
    return tuple(parse_real(p) for p in parts)


def _beta(args) -> float:
    if args.temperature is not None:
        if not args.temperature > 0:
            raise DomainError(f"temperature must be positive, got {args.temperature!r}")
        return 1.0 / args.temperature
    if args.beta_eg is None:
        raise UsageError("one of --beta-eg or --temperature is required")
    return args.beta_eg


def _emit(record: RunRecord) -> None:
    sys.stdout.write(record.to_json())
    sys.stdout.write("\n")


def _approx_rows(front):
    return [
        {
            "l": a.index.l,
            "n": a.index.n,
            "beta_eg": a.beta_eg,
            "rel_error_percent": a.rel_error_percent,
            "tau_tilde": a.tau,
        }
        for a in front
    ]


def _param_dict(sp) -> dict:
    return {"omega_prime": sp.omega_prime, "coupling": sp.coupling, "tau_tilde": sp.tau}


def cmd_tune(args) -> int:
    beta = _beta(args)
    if not beta > 0:
        raise DomainError(f"beta_eg must be positive, got {beta!r}")
    params = {"beta_eg": beta, "mode": args.mode}
    if args.mode == "sds-exact":
        hit = sds.approx_search(beta, SDS_MATCH / beta, limit=1)
        if not hit:
            tol = args.rel_tol or SUGGEST_TOL
            sugg = _approx_rows(sds.approx_search(beta, tol, tau_max=args.tau_max, limit=10))
            _emit(RunRecord("tune", params, {
                "error": "beta_eg is not on the special discrete set",
                "suggestion_rel_tol": tol,
                "suggestions": sugg,
            }))
            head = f"; nearest: {sugg[0]['l']},{sugg[0]['n']}" if sugg else ""
            print(f"error: beta_eg = {beta!r} is not an SDS temperature{head}", file=sys.stderr)
            return EXIT_DOMAIN
        idx = hit[0].index
        twin = sds.degeneracy_map(idx)
        sp, st = sds.sds_params(idx), sds.sds_params(twin)
        outputs = {
            "index": str(idx),
            "beta_eg": sp.beta_eg,
            "parameters": _param_dict(sp),
            "twin_index": str(twin),
            "twin_parameters": _param_dict(st),
            "u_thermal_over_eg": sp.u_thermal,
        }
    elif args.mode == "envelope":
        outputs = {}
        for branch in sds.Branch:
            w, k = sds.envelope_params(beta, branch)
            outputs[branch.value] = {"omega_prime": w, "coupling": k}
    else:
        if args.params is not None:
            seed = solver.ParameterVector(*args.params)
            rep = solver.newton_solve(beta, seed, args.tol, args.max_iter)
        elif args.index is not None:
            rep = solver.newton_solve(beta, solver.ParameterVector.from_index(args.index), args.tol, args.max_iter)
        else:
            rep = solver.tune_newton(beta, args.tol, args.max_iter)
        params.update(tol=args.tol, max_iter=args.max_iter)
        res = solver.residual(rep.solution, beta)
        outputs = to_plain(rep)
        outputs["residual"] = res
        _emit(RunRecord("tune", params, outputs))
        if not rep.converged:
            print(f"newton did not converge: {rep.message} (residual {rep.residual_norm:.3g})", file=sys.stderr)
            return EXIT_FAIL
        return EXIT_OK
    _emit(RunRecord("tune", params, outputs))
    return EXIT_OK


def cmd_approx(args) -> int:
    beta = _beta(args)
    front = sds.approx_search(beta, args.rel_tol, tau_max=args.tau_max, limit=args.limit)
    rows = _approx_rows(front)
    if args.format == "record":
        params = {"beta_eg": beta, "rel_tol": args.rel_tol, "tau_max": args.tau_max, "limit": args.limit}
        _emit(RunRecord("approx", params, {"rows": rows}))
    elif args.format == "csv":
        cols = ("l", "n", "beta_eg", "rel_error_percent", "tau_tilde")
        print(",".join(cols))
        for r in rows:
            print(",".join(repr(r[c]) for c in cols))
    else:
        print(f"{'l':>6} {'n':>6} {'beta_eg':>12} {'rel_error_percent':>18} {'tau_tilde':>12}")
        for r in rows:
            print(f"{r['l']:>6} {r['n']:>6} {r['beta_eg']:>12.6g} {r['rel_error_percent']:>18.6g} {r['tau_tilde']:>12.6g}")
    return EXIT_OK


def _write_csv(traj, path, extra=None) -> None:
    if path is None or path == "-":
        write_trajectory_csv(traj, sys.stdout, extra)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        write_trajectory_csv(traj, fh, extra)


def _r_plain(r) -> dict:
    return {"X": r.x, "Y": r.y, "Z": r.z}


def _final_summary(traj, tol) -> dict:
    r = traj.final_r
    out = {
        "final_R": _r_plain(r),
        "final_U_over_Eg": float(traj.energy[-1] / (0.5 * traj.base_omega)),
        "final_thermality_residual": list(thermality_residual(r)),
        "final_is_thermal": is_thermal(r, tol),
        "rows": len(traj),
    }
    try:
        out["final_beta_eg"] = 0.5 * effective_beta(r, traj.base_omega, tol) * traj.base_omega
    except NotThermalError:
        out["final_beta_eg"] = None
    return out


def cmd_evolve(args) -> int:
    if args.index is not None:
        sp = sds.sds_params(args.index)
        stage = Stage.from_tilde(sp.omega_prime, sp.coupling, sp.tau)
        params = {"index": str(args.index)}
    else:
        w, k, tau = args.params
        stage = Stage.from_tilde(w, k, tau)
        params = {"omega_prime": w, "coupling": k, "tau_tilde": tau}
    params.update(samples=args.samples, tail_periods=args.tail)
    traj = evolve_schedule(Schedule([stage]), args.samples, args.tail)
    outputs = _final_summary(traj, default_tolerance())
    if args.index is not None:
        outputs["expected_beta_eg"] = sp.beta_eg
    if args.format == "record":
        if args.out:
            _write_csv(traj, args.out)
            outputs["csv"] = args.out
        _emit(RunRecord("evolve", params, outputs))
        return EXIT_OK
    _write_csv(traj, args.out)
    if args.out:
        outputs["csv"] = args.out
        _emit(RunRecord("evolve", params, outputs))
    return EXIT_OK


def cmd_sequence(args) -> int:
    plan = heat_cool_plan(args.idx_i, args.idx_f, args.gap)
    tol = default_tolerance()
    rep = execute_and_verify(plan, tol, args.samples)
    traj = rep.trajectory
    labels = [""] * len(traj)
    for c in rep.checkpoints:
        labels[traj.index_of(c.checkpoint.time)] = c.checkpoint.label
    checks = [
        {
            "label": c.checkpoint.label,
            "time": c.checkpoint.time,
            "expected": _r_plain(c.checkpoint.expected),
            "observed": _r_plain(c.observed),
            "error": c.error,
            "passed": c.passed,
        }
        for c in rep.checkpoints
    ]
    params = {"idx_i": str(args.idx_i), "idx_f": str(args.idx_f), "gap_periods": args.gap, "samples": args.samples, "tol": tol}
    outputs = _final_summary(traj, tol)
    outputs.update(checkpoints=checks, passed=rep.passed, expected_final_beta_eg=plan.expected_final_beta_eg)
    outputs["expected_final_R"] = _r_plain(thermal_target(plan.expected_final_beta_eg))
    if args.format == "csv" or args.out:
        _write_csv(traj, args.out, {"checkpoint": labels})
    if args.format == "record" or args.out:
        if args.out:
            outputs["csv"] = args.out
        _emit(RunRecord("sequence", params, outputs))
    for c in checks:
        print(f"{'PASS' if c['passed'] else 'FAIL'} {c['label']} error={c['error']:.3g}", file=sys.stderr)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_verify(args) -> int:
    results = verify.run(args.scope)
    ok = all(c.passed for checks in results.values() for c in checks)
    if args.format == "record":
        outputs = {name: [to_plain(c) for c in checks] for name, checks in results.items()}
        outputs["passed"] = ok
        _emit(RunRecord("verify", {"scope": args.scope, "backend": kernels.BACKEND}, outputs))
    else:
        for name, checks in results.items():
            for c in checks:
                print(f"{'PASS' if c.passed else 'FAIL'} [{name}] {c.name}" + (f" ({c.detail})" if c.detail else ""))
        print("all checks passed" if ok else "some checks FAILED")
    return EXIT_OK if ok else EXIT_FAIL


def _add_temperature(p) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--beta-eg", type=parse_real, help="E_g*beta; accepts pi and log N")
    g.add_argument("--temperature", type=parse_real, help="k_B*T/E_g (reciprocal of --beta-eg)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quenchtherm", description="Thermalizing quench protocols for coupled oscillators.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tune", help="active-phase parameters for a target temperature")
    _add_temperature(p)
    p.add_argument("--mode", choices=("sds-exact", "envelope", "newton"), default="sds-exact")
    p.add_argument("--index", type=parse_index, help="newton seed as an SDS index l,n")
    p.add_argument("--params", type=parse_params, help="newton seed w,k,tau")
    p.add_argument("--rel-tol", type=float, help=f"tolerance for off-SDS suggestions (default {SUGGEST_TOL})")
    p.add_argument("--tau-max", type=float)
    p.add_argument("--tol", type=float, default=1e-10, help="newton residual tolerance")
    p.add_argument("--max-iter", type=int, default=50)
    p.add_argument("--format", choices=("record",), default="record")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("approx", help="SDS approximations to a temperature (Pareto front)")
    _add_temperature(p)
    p.add_argument("--rel-tol", type=float, required=True)
    p.add_argument("--tau-max", type=float)
    p.add_argument("--limit", type=int, help="stop after this many rows")
    p.add_argument("--format", choices=("csv", "record"), help="default: human-readable table")
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("evolve", help="trajectory of a single quench")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--index", type=parse_index)
    g.add_argument("--params", type=parse_params, help="w,k,tau (dimensionless)")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--tail", type=float, default=0.0, help="free evolution after the quench, in natural periods")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--format", choices=("csv", "record"), default="csv")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("sequence", help="heat/cool between two SDS temperatures")
    p.add_argument("idx_i", type=parse_index)
    p.add_argument("idx_f", type=parse_index)
    p.add_argument("--gap", type=float, default=0.0, help="free evolution before the final stage, in natural periods")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--format", choices=("csv", "record"), default="csv")
    p.set_defaults(func=cmd_sequence)

    p = sub.add_parser("verify", help="run invariant suites")
    p.add_argument("scope", nargs="?", default="all", choices=("all",) + tuple(verify.SUITES))
    p.add_argument("--format", choices=("record",))
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "samples", 1) < 1:
        print("error: --samples must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, SingularJacobianError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
