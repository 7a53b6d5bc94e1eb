"""One test per acceptance criterion; the conftest summary hook prints a
PASS/FAIL line for each criterion number."""

import time

import numpy as np
import pytest

from prefgames import fixtures
from prefgames import convex_geometry as cg
from prefgames.cli import run
from prefgames.games import brute_force_equilibria, grid_axes, is_equilibrium, is_maximal
from prefgames.normal_cones import PROPERTIES, check_properties
from prefgames.preferences import (
    Resolution,
    check_lower_midpoint,
    check_lsc,
    check_open_valued,
    check_relation_lsc,
    check_upper_midpoint,
)
from prefgames.reformulation import (
    ImplicationFailure,
    audit_assumptions,
    equilibrium_via_qvi,
    game_qvi,
    maximal_via_vi,
    preference_vi,
)
from prefgames._rng import stage_rng
from prefgames.vi_solvers import solve_qvi_grid, solve_vi_grid, verify_solution

UNIT = cg.interval([0.0], [1.0])
RES = Resolution(m=64, eps_min=1e-4)
SAMPLED = np.linspace(0.0, 1.0, 51)


@pytest.fixture(scope="module")
def fleet():
    return fixtures.random_fleet(100, seed=0)


@pytest.fixture(scope="module")
def fleet_solutions(fleet):
    """Maximal-element pipeline over the whole fleet; failures recorded."""
    out = {}
    for f in fleet:
        try:
            out[f.name] = maximal_via_vi(f.preference, f.feasible, grid=f.grid, audit_samples=0)
        except ImplicationFailure as exc:
            out[f.name] = exc
    return out


def table_member(x, z, tol):
    """Closed-form membership of z in the Example 3.1 value at x."""
    if x < 0.5:
        return z - x > tol and z <= 1.0 + tol
    if x == 0.5:
        return False
    return z >= 0.5 - tol and x - z > tol


@pytest.mark.criterion(1)
def test_criterion_1_example_3_1_suite():
    t0 = time.perf_counter()
    tol = 1e-9
    maps = [fixtures.example_3_1(), fixtures.example_3_1_from_utility()]
    mismatches = 0
    for x in np.linspace(0.0, 1.0, 1000):
        probes = [0.0, 0.5, 1.0, x]
        for e in (x, 0.5, 1.0):
            probes += [e - 1e-6, e + 1e-6, e - 2e-9, e + 2e-9]
        probes = [z for z in probes if 0.0 <= z <= 1.0]
        for P in maps:
            v = P([x])
            for z in probes:
                mismatches += bool(v.contains([z], tol)) != table_member(x, z, tol)
    assert mismatches == 0

    P = maps[0]
    for x in SAMPLED:
        lo, up = check_lower_midpoint(P, [x], res=RES), check_upper_midpoint(P, [x], res=RES)
        assert lo.holds and up.holds, x
    v = check_relation_lsc(P, [1.0], res=RES)
    assert not v.holds and v.counterexample["escapes"]
    assert time.perf_counter() - t0 < 5.0


@pytest.mark.criterion(2)
def test_criterion_2_example_3_2_suite():
    t0 = time.perf_counter()
    P = fixtures.example_3_2()
    v = check_lsc(P, [0.5], res=RES)
    assert not v.holds and v.counterexample["escapes"]
    for x in SAMPLED[SAMPLED > 0.5]:
        assert not check_open_valued(P, [x]).holds, x
    for x in SAMPLED:
        assert check_upper_midpoint(P, [x], res=RES).holds, x
    assert time.perf_counter() - t0 < 5.0


@pytest.mark.criterion(3)
def test_criterion_3_property_fleet(fleet):
    t0 = time.perf_counter()
    rng = stage_rng(0, "acceptance-properties")
    totals = {name: {"checked": 0, "violations": []} for name in PROPERTIES}
    sequences = 0
    for f in fleet:
        dom = f.preference.domain
        pts = rng.uniform(dom.lo, dom.hi, size=(1, dom.dim))
        # 20 halvings take the sequence within ~1e-7 of its limit
        rep = check_properties(f.preference, PROPERTIES, pts, res=RES, n_sequences=12, steps=20, seed=0)
        for name in PROPERTIES:
            totals[name]["checked"] += rep[name]["checked"]
            totals[name]["violations"] += rep[name]["violations"]
        sequences += 12 * rep["cap_graph"]["checked"]
    for name in PROPERTIES:
        assert totals[name]["violations"] == [], name
        assert totals[name]["checked"] > 0, name
    assert sequences >= 1000
    assert time.perf_counter() - t0 < 60.0


@pytest.mark.criterion(4)
def test_criterion_4_maximal_pipeline(fleet, fleet_solutions):
    P = fixtures.example_3_1()
    out = solve_vi_grid(preference_vi(P, UNIT), grid=2001)
    pts = [float(p[0]) for p in out.points]
    assert pts == [0.5]
    assert max(pts) - min(pts) <= 1.0 / 2000
    assert is_maximal(P, UNIT, [0.5]).maximal
    assert len(fleet) >= 50
    failures = [name for name, r in fleet_solutions.items() if isinstance(r, ImplicationFailure)]
    assert failures == []
    # the pipeline's own check, repeated independently
    for f in fleet:
        for x in fleet_solutions[f.name].points:
            assert is_maximal(f.preference, f.feasible, x).maximal


@pytest.mark.criterion(5)
def test_criterion_5_equilibrium_pipeline():
    t0 = time.perf_counter()
    G = fixtures.quadratic_game()
    grid = 101
    out = solve_qvi_grid(game_qvi(G), grid)
    assert out.certificates
    for c in out.certificates:
        assert is_equilibrium(G, c.x).verdict

    axis = grid_axes(G.box, grid)[0]
    found = {tuple(np.round(p / (axis[1] - axis[0])).astype(int)) for p in brute_force_equilibria(G, grid)}
    band = {(i, j) for i in range(grid) for j in range(grid) if abs(i - j) <= 1}
    assert found == band

    M = fixtures.moving_constraint_game()
    res = equilibrium_via_qvi(M, grid=grid, audit_samples=0)
    assert res.certificates
    for c in res.certificates:
        assert c.feasible
        assert abs(c.x[0] - 0.5) <= 0.01 and abs(c.x[1] - 0.5) <= 0.01
    assert time.perf_counter() - t0 < 120.0


@pytest.mark.criterion(6)
def test_criterion_6_existence_on_compact_fleet(fleet, fleet_solutions):
    compact = [f for f in fleet if audit_assumptions(f.game, samples=3, include_preferences=False)["compact"]]
    assert compact
    empty = [f.name for f in compact if not fleet_solutions[f.name].certificates]
    assert empty == []


@pytest.mark.criterion(7)
def test_criterion_7_solver_soundness(fleet, fleet_solutions):
    checked = 0
    for f in fleet:
        prob = preference_vi(f.preference, f.feasible)
        for c in fleet_solutions[f.name].certificates:
            assert verify_solution(prob, c.x, tol=c.tol / 10).verified
            checked += 1
    G = fixtures.quadratic_game()
    for c in solve_qvi_grid(game_qvi(G), 21):
        assert verify_solution(game_qvi(G), c.x, tol=c.tol / 10).verified
        checked += 1
    assert checked > 0

    for f in fleet[:40]:
        prob = preference_vi(f.preference, f.feasible)
        parts = [[tuple(p) for p in solve_vi_grid(prob, f.grid, scale=lam).points] for lam in (0.1, 1.0, 10.0)]
        assert parts[0] == parts[1] == parts[2], f.name


@pytest.mark.criterion(8)
def test_criterion_8_reproduce_is_byte_identical(tmp_path):
    import io

    blobs = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        code, _ = run(["reproduce-paper", "--seed", "0", "--out", str(path)], stdout=io.StringIO())
        assert code == 0
        blobs.append(path.read_bytes())
    assert blobs[0] == blobs[1]
