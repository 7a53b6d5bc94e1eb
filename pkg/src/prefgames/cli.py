"""Command-line front end.

    prefgames classify INSTANCE
    prefgames solve-vi INSTANCE
    prefgames solve-qvi INSTANCE
    prefgames verify INSTANCE --point 0.25
    prefgames audit INSTANCE
    prefgames reproduce-paper

Exit codes: 0 when every verdict is as expected, 1 on verdict failures,
2 on usage, parse or resolution errors.  ``--out`` writes the machine
report (sorted-key JSON, 12 significant digits, no timings); standard
output carries the report in the ``--format`` of choice.
"""

import argparse
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .exceptions import ExpressionError, InstanceError, PrefGamesError
from .games import ConstantConstraint, cluster_representatives, is_equilibrium, is_maximal
from .instance import load_instance
from .preferences import Resolution, classify_sufficient_conditions, sample_domain
from .reformulation import ImplicationFailure, audit_assumptions, equilibrium_via_qvi, game_qvi, maximal_via_vi, preference_vi
from .reproduce import reproduce
from .vi_solvers import verify_solution

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
MAX_GRID_POINTS = 10**7
COMMANDS = ("classify", "solve-vi", "solve-qvi", "verify", "reproduce-paper", "audit")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# report rendering


def canonical(obj):
    """JSON-ready copy with floats at 12 significant digits."""
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return canonical(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        v = float(f"{v:.12g}")
        return 0.0 if v == 0 else v
    return obj


def render_machine(report):
    return json.dumps(canonical(report), sort_keys=True, indent=2) + "\n"


def _fmt(v):
    if isinstance(v, (list, tuple)):
        return "(" + ", ".join(_fmt(u) for u in v) + ")"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def render_human(report, elapsed=None):
    lines = [f"{report['command']}: {report['status'].upper()}"]
    inst = report.get("instance")
    if inst:
        lines.append(f"instance {inst['name']} ({inst['hash'][:12]})")
    for line in report.get("summary", []):
        lines.append(f"  {line}")
    if elapsed is not None:
        lines.append(f"elapsed {elapsed:.2f} s")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commands


def _parse_point(text, dim):
    try:
        vals = [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"--point: cannot parse {text!r}") from None
    if len(vals) != dim or not all(math.isfinite(v) for v in vals):
        raise UsageError(f"--point needs {dim} finite coordinates, got {text!r}")
    return np.array(vals)


def _check_grid(grid, dim):
    if grid < 2:
        raise UsageError("--grid must be at least 2")
    if grid ** dim > MAX_GRID_POINTS:
        raise UsageError(f"resolution infeasible: {grid}^{dim} grid points exceed {MAX_GRID_POINTS}")


def _single(inst, command):
    G = inst.game
    if G.n_players != 1 or not isinstance(G.players[0].constraint, ConstantConstraint):
        raise UsageError(f"{command} needs a single player with a constant constraint; use solve-qvi for games")
    p = G.players[0]
    return p.preference, p.constraint.region


def _verdict_dict(v):
    return v.to_dict()


def cmd_classify(inst, opts, res):
    G = inst.game
    pts = inst.parameters.get("points")
    pts = np.array(pts) if pts is not None else sample_domain(G.box, 11 if G.total_dim == 1 else 5)
    rows, failures = [], 0
    for x in pts:
        for i, p in enumerate(G.players):
            c = classify_sufficient_conditions(p.preference, G.block(x, i), G.rivals(x, i), res)
            row = {"player": p.name, "x": x}
            for key in ("open_valued", "internal_points", "lsc", "relation_lsc", "lower_midpoint", "upper_midpoint"):
                row[key] = _verdict_dict(c[key])
            row["implications"] = c["implications"]
            row["converse_failures"] = c["converse_failures"]
            ok = c["lower_midpoint"].holds and c["upper_midpoint"].holds
            failures += not ok
            rows.append(row)
    summary = [f"{len(rows)} point/player pairs; {failures} with a mid-point counterexample"]
    for r in rows:
        tags = [k for k in ("open_valued", "lsc", "relation_lsc", "lower_midpoint", "upper_midpoint")
                if not (r[k].get("holds") if "holds" in r[k] else r[k]["status"] == "verified-at-resolution")]
        if tags:
            summary.append(f"{r['player']} at {_fmt(r['x'].tolist())}: fails {', '.join(tags)}")
    return {"points": rows, "midpoint_failures": failures}, failures == 0, summary


def cmd_solve_vi(inst, opts, res):
    P, K = _single(inst, "solve-vi")
    _check_grid(opts.grid, P.own_dim)
    out = maximal_via_vi(P, K, opts.grid, opts.tol, res, audit_samples=inst.parameters.get("audit_samples", 9),
                         seed=opts.seed)
    lo, hi = K.bounding_box()
    reps = cluster_representatives(out.points, float(np.max(hi - lo)) / (opts.grid - 1))
    result = out.to_dict()
    result["representatives"] = reps
    summary = [f"{len(out.certificates)} verified grid points, representatives {[_fmt(r.tolist()) for r in reps]}",
               f"maximal: {all(r.maximal for r in out.reports) if out.reports else None}"]
    return result, out.status == "ok", summary


def cmd_solve_qvi(inst, opts, res):
    G = inst.game
    if G.total_dim <= 3:
        _check_grid(opts.grid, G.total_dim)
    out = equilibrium_via_qvi(G, opts.grid, opts.tol, res, audit_samples=inst.parameters.get("audit_samples", 5),
                              seed=opts.seed, starts=inst.parameters.get("starts", 10),
                              max_iters=opts.max_iters, trace=opts.trace)
    spacing = float(np.max(G.box.hi - G.box.lo)) / (opts.grid - 1)
    reps = cluster_representatives(out.points, spacing) if out.method == "grid" else out.points
    result = out.to_dict()
    result["representatives"] = reps
    summary = [f"method {out.method}: {len(out.certificates)} verified profiles, "
               f"representatives {[_fmt(r.tolist()) for r in reps]}",
               f"hypotheses verified: {out.audit['hypotheses_verified'] if out.audit else None}"]
    return result, out.status == "ok", summary


def cmd_verify(inst, opts, res):
    G = inst.game
    if opts.point is None:
        raise UsageError("verify needs --point")
    x = _parse_point(opts.point, G.total_dim)
    if G.n_players == 1 and isinstance(G.players[0].constraint, ConstantConstraint):
        P, K = _single(inst, "verify")
        cert = verify_solution(preference_vi(P, K), x, opts.tol)
        check = is_maximal(P, K, x, opts.tol).to_dict() if K.contains(x, opts.tol) else None
        kind = "maximal"
    else:
        cert = verify_solution(game_qvi(G), x, opts.tol)
        check = is_equilibrium(G, x, opts.tol).to_dict()
        kind = "equilibrium"
    summary = [f"verified: {cert.verified} (residual {cert.residual:.6g}, feasible {cert.feasible})"]
    if "witness_direction" in cert.details:
        summary.append(f"witness direction {_fmt(cert.details['witness_direction'])}")
    if check is not None:
        summary.append(f"{kind}: {check.get('maximal', check.get('verdict'))}")
    return {"certificate": cert.to_dict(), kind: check}, cert.verified, summary


def cmd_audit(inst, opts, res):
    rep = audit_assumptions(inst.game, inst.parameters.get("audit_samples", 5), res, opts.seed)
    summary = [f"constraints passed: {rep['constraints_passed']}", f"preferences passed: {rep['preferences_passed']}"]
    for pl in rep["players"]:
        bad = [k for k, v in pl["constraint"].items() if not v["passed"]]
        bad += [k for k in ("irreflexive", "lower_midpoint", "upper_midpoint") if not pl["preference"][k]["passed"]]
        if bad:
            summary.append(f"{pl['name']}: fails {', '.join(bad)}")
    return rep, rep["hypotheses_verified"], summary


def cmd_reproduce(opts, res):
    results, checks = reproduce(opts.grid, opts.tol, opts.seed, res)
    ok = all(c["match"] for c in checks)
    summary = [f"{'ok  ' if c['match'] else 'FAIL'} {c['name']}: {_fmt(c['observed'])}" for c in checks]
    return {"results": results, "checks": checks}, ok, summary


HANDLERS = {"classify": cmd_classify, "solve-vi": cmd_solve_vi, "solve-qvi": cmd_solve_qvi,
            "verify": cmd_verify, "audit": cmd_audit}


# ---------------------------------------------------------------------------
# entry point


def build_parser():
    ap = argparse.ArgumentParser(prog="prefgames", description="Maximal elements and equilibria of games with "
                                 "non-ordered preferences via variational reformulation.")
    ap.add_argument("--version", action="version", version=f"prefgames {__version__}")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("instance", nargs="?", help="instance file (not used by reproduce-paper)")
    ap.add_argument("--grid", type=int, help="grid points per axis")
    ap.add_argument("--tol", type=float, help="verification tolerance")
    ap.add_argument("--seed", type=int, help="master seed")
    ap.add_argument("--out", help="write the machine report to this path")
    ap.add_argument("--format", choices=("machine", "human"), default="human", help="standard output format")
    ap.add_argument("--max-iters", type=int, help="fixed-point iteration cap")
    ap.add_argument("--trace", action="store_true", help="include fixed-point iteration traces")
    ap.add_argument("--point", help="profile for verify, e.g. '0.25' or '0.5,0.5'")
    return ap


def _resolve(opts, params):
    opts.grid = opts.grid if opts.grid is not None else params.get("grid", 2001 if opts.command == "reproduce-paper" else 101)
    opts.tol = opts.tol if opts.tol is not None else params.get("tol", 1e-9)
    opts.seed = opts.seed if opts.seed is not None else params.get("seed", 0)
    opts.max_iters = opts.max_iters if opts.max_iters is not None else params.get("max_iters", 5000)
    if not (math.isfinite(opts.tol) and opts.tol >= 0):
        raise UsageError("--tol must be finite and non-negative")
    if opts.seed < 0:
        raise UsageError("--seed must be non-negative")
    if opts.max_iters < 1:
        raise UsageError("--max-iters must be positive")
    try:
        return Resolution(seed=opts.seed, **params.get("resolution", {}))
    except (ValueError, TypeError) as exc:
        raise UsageError(f"resolution infeasible: {exc}") from None


def run(argv=None, stdout=None, stderr=None):
    """Run the CLI; returns ``(exit_code, report)``."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ap = build_parser()
    try:
        opts = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), None
    t0 = time.perf_counter()
    inst = None
    try:
        if opts.command == "reproduce-paper":
            if opts.instance is not None:
                raise UsageError("reproduce-paper takes no instance file")
            res = _resolve(opts, {})
            result, ok, summary = cmd_reproduce(opts, res)
        else:
            if opts.instance is None:
                raise UsageError(f"{opts.command} needs an instance file")
            try:
                inst = load_instance(opts.instance)
            except OSError as exc:
                raise UsageError(f"cannot read {opts.instance}: {exc.strerror}") from None
            res = _resolve(opts, inst.parameters)
            result, ok, summary = HANDLERS[opts.command](inst, opts, res)
    except (UsageError, InstanceError, ExpressionError) as exc:
        print(f"prefgames: error: {exc}", file=stderr)
        return EXIT_USAGE, None
    except ImplicationFailure as exc:
        print(f"prefgames: implication failure: {exc}", file=stderr)
        return EXIT_FAIL, None
    except PrefGamesError as exc:
        print(f"prefgames: error: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_USAGE, None
    report = {
        "tool": {"name": "prefgames", "version": __version__},
        "command": opts.command,
        "instance": None if inst is None else {"name": inst.game.name, "hash": inst.hash},
        "parameters": {"grid": opts.grid, "tol": opts.tol, "seed": opts.seed, "max_iters": opts.max_iters,
                       "trace": opts.trace},
        "resolution": res.to_dict(),
        "status": "ok" if ok else "fail",
        "result": result,
        "summary": summary,
    }
    machine = render_machine(report)
    if opts.out:
        with open(opts.out, "w", encoding="utf-8") as fh:
            fh.write(machine)
    elapsed = time.perf_counter() - t0
    stdout.write(machine if opts.format == "machine" else render_human(report, elapsed))
    return (EXIT_OK if ok else EXIT_FAIL), report


def main(argv=None):
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
