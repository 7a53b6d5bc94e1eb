"""Fixture suites for the two worked 1-D examples and the 1-D VI pipeline,
compared against the bundled table ``expected_results.json``.

Expected failure sets are stored as intervals; the comparison is made on
the sampled points that fall inside them.
"""

import json
from importlib import resources

import numpy as np

from . import fixtures
from .games import cluster_representatives
from .preferences import (
    Resolution,
    check_irreflexive,
    check_lower_midpoint,
    check_open_valued,
    check_relation_lsc,
    check_lsc,
    check_upper_midpoint,
    sample_domain,
)
from .reformulation import maximal_via_vi, preference_vi
from .vi_solvers import verify_solution

__all__ = ["example_3_1_table", "example_3_1_suite", "example_3_2_suite", "vi_pipeline_suite",
           "load_expected", "compare", "reproduce"]


def example_3_1_table(x):
    """Closed-form value of the first example as ``(lo, hi, lo_open, hi_open)``,
    ``None`` when empty."""
    if x < 0.5:
        return (x, 1.0, True, False)
    if x == 0.5:
        return None
    return (0.5, x, False, True)


def _matches_table(region, row, tol):
    if row is None:
        return region.is_empty
    if region.is_empty:
        return False
    lo, hi, lo_open, hi_open = row
    return (abs(region.lo[0] - lo) <= tol and abs(region.hi[0] - hi) <= tol
            and bool(region.lo_open[0]) == lo_open and bool(region.hi_open[0]) == hi_open)


def _in_interval(v, spec):
    if spec is None:
        return False
    (a, b), (ao, bo) = spec["interval"], spec.get("open", [False, False])
    return (v > a if ao else v >= a) and (v < b if bo else v <= b)


def _xs(points):
    return [float(p[0]) for p in points]


def example_3_1_suite(res=None, n_table=1000, n_points=51):
    """Induced-map table, mid-point verdicts, openness and the relation's
    lower semicontinuity for the first example."""
    res = res or Resolution()
    P = fixtures.example_3_1()
    U = fixtures.example_3_1_from_utility()
    xs = np.linspace(0.0, 1.0, n_table)
    mismatches = [float(x) for x in xs
                  if not (_matches_table(U([x]), example_3_1_table(x), 1e-9)
                          and _matches_table(P([x]), example_3_1_table(x), 1e-9))]
    pts = sample_domain(P.domain, n_points)
    rel = check_relation_lsc(P, [1.0], None, res)
    return {
        "table_points": int(n_table),
        "table_mismatches": mismatches,
        "sampled_points": int(n_points),
        "lower_midpoint_failures": _xs(x for x in pts if not check_lower_midpoint(P, x, None, res).holds),
        "upper_midpoint_failures": _xs(x for x in pts if not check_upper_midpoint(P, x, None, res).holds),
        "open_value_failures": _xs(x for x in pts if not check_open_valued(P, x, None, res).holds),
        "irreflexivity_failures": _xs(check_irreflexive(P, pts)),
        "relation_lsc_at_1": {"holds": rel.holds, "counterexample": rel.counterexample},
    }


def example_3_2_suite(res=None, n_points=51):
    """Lower semicontinuity at 1/2, openness and mid-point verdicts for the
    second example."""
    res = res or Resolution()
    P = fixtures.example_3_2()
    pts = sample_domain(P.domain, n_points)
    lsc = check_lsc(P, [0.5], None, res)
    return {
        "sampled_points": int(n_points),
        "lsc_at_half": {"holds": lsc.holds, "counterexample": lsc.counterexample},
        "open_value_failures": _xs(x for x in pts if not check_open_valued(P, x, None, res).holds),
        "upper_midpoint_failures": _xs(x for x in pts if not check_upper_midpoint(P, x, None, res).holds),
        "lower_midpoint_failures": _xs(x for x in pts if not check_lower_midpoint(P, x, None, res).holds),
        "irreflexivity_failures": _xs(check_irreflexive(P, pts)),
    }


def vi_pipeline_suite(grid=2001, tol=1e-9, seed=0, probe=0.25):
    """VI(F, [0, 1]) for the first example: verified cluster, maximality of
    its representative and the verdict at a non-solution ``probe``."""
    P = fixtures.example_3_1()
    K = P.domain
    out = maximal_via_vi(P, K, grid, tol, audit_samples=0, seed=seed)
    spacing = 1.0 / (grid - 1)
    reps = cluster_representatives(out.points, spacing)
    cert = verify_solution(preference_vi(P, K), [probe], tol)
    return {
        "grid": int(grid),
        "verified_points": _xs(out.points),
        "representatives": _xs(reps),
        "cluster_width": (float(out.points[-1][0] - out.points[0][0]) if out.points else None),
        "all_maximal": all(r.maximal for r in out.reports),
        "probe": {"x": probe, "verified": cert.verified, "residual": cert.residual,
                  "witness_direction": cert.details.get("witness_direction")},
    }


def load_expected():
    text = resources.files("prefgames").joinpath("expected_results.json").read_text(encoding="utf-8")
    return json.loads(text)


def _check(name, expected, observed, ok):
    return {"name": name, "expected": expected, "observed": observed, "match": bool(ok)}


def _failure_check(name, observed, sampled, spec):
    expected = [x for x in sampled if _in_interval(x, spec)]
    return _check(name, spec if spec is not None else [], observed, np.allclose(observed, expected) if
                  len(observed) == len(expected) else False)


def compare(results, expected):
    """One check record per expected entry."""
    checks = []
    e1, r1 = expected["example-3.1"], results["example-3.1"]
    s1 = [float(x) for x in np.linspace(0, 1, r1["sampled_points"])]
    checks.append(_check("example-3.1 table", e1["table_mismatches"], len(r1["table_mismatches"]),
                         len(r1["table_mismatches"]) == e1["table_mismatches"]))
    for key in ("lower_midpoint_failures", "upper_midpoint_failures", "open_value_failures", "irreflexivity_failures"):
        checks.append(_failure_check(f"example-3.1 {key}", r1[key], s1, e1[key]))
    checks.append(_check("example-3.1 relation lsc at 1", e1["relation_lsc_at_1"], r1["relation_lsc_at_1"]["holds"],
                         r1["relation_lsc_at_1"]["holds"] == e1["relation_lsc_at_1"]))

    e2, r2 = expected["example-3.2"], results["example-3.2"]
    s2 = [float(x) for x in np.linspace(0, 1, r2["sampled_points"])]
    checks.append(_check("example-3.2 lsc at 1/2", e2["lsc_at_half"], r2["lsc_at_half"]["holds"],
                         r2["lsc_at_half"]["holds"] == e2["lsc_at_half"]))
    for key in ("open_value_failures", "upper_midpoint_failures", "lower_midpoint_failures", "irreflexivity_failures"):
        checks.append(_failure_check(f"example-3.2 {key}", r2[key], s2, e2[key]))

    e3, r3 = expected["vi-pipeline"], results["vi-pipeline"]
    spacing = 1.0 / (r3["grid"] - 1)
    reps_ok = len(r3["representatives"]) == len(e3["representatives"]) and np.allclose(
        r3["representatives"], e3["representatives"], atol=spacing)
    checks.append(_check("vi-pipeline representatives", e3["representatives"], r3["representatives"], reps_ok))
    width = r3["cluster_width"]
    checks.append(_check("vi-pipeline cluster width (grid cells)", e3["max_cluster_cells"],
                         None if width is None else round(width / spacing, 6),
                         width is not None and width / spacing <= e3["max_cluster_cells"] + 1e-9))
    checks.append(_check("vi-pipeline maximal", e3["all_maximal"], r3["all_maximal"], r3["all_maximal"] == e3["all_maximal"]))
    checks.append(_check("vi-pipeline probe verified", e3["probe_verified"], r3["probe"]["verified"],
                         r3["probe"]["verified"] == e3["probe_verified"]))
    return checks


def reproduce(grid=2001, tol=1e-9, seed=0, res=None):
    """Run every suite and compare; returns ``(results, checks)``."""
    res = res or Resolution(seed=seed)
    results = {
        "example-3.1": example_3_1_suite(res),
        "example-3.2": example_3_2_suite(res),
        "vi-pipeline": vi_pipeline_suite(grid, tol, seed),
    }
    return results, compare(results, load_expected())
