import json

import numpy as np
import pytest

from prefgames import fixtures
from prefgames.exceptions import InstanceError
from prefgames.instance import dump_instance, game_to_document, load_instance, parse_instance

from conftest import INSTANCES

MINIMAL = {
    "version": 1,
    "name": "tiny",
    "players": [{"box": {"lo": [0], "hi": [1]}, "preference": {"kind": "builtin", "name": "example-3.1"}}],
}


def text(doc):
    return json.dumps(doc, indent=2)


@pytest.mark.parametrize("path", sorted(INSTANCES.glob("*.json")), ids=lambda p: p.stem)
def test_shipped_instances_parse(path):
    inst = load_instance(path)
    assert inst.game.n_players >= 1
    assert len(inst.hash) == 64


@pytest.mark.parametrize("game", [fixtures.quadratic_game(), fixtures.moving_constraint_game(),
                                  fixtures.single_player_game(fixtures.example_3_2()), fixtures.empty_game(2)],
                         ids=lambda g: g.name)
def test_round_trip_preserves_values(game):
    params = {"grid": 11, "seed": 3}
    inst = parse_instance(dump_instance(game, params))
    assert inst.parameters == params
    assert game_to_document(inst.game, params) == game_to_document(game, params)
    rng = np.random.default_rng(0)
    for _ in range(5):
        x = rng.uniform(game.box.lo, game.box.hi)
        for i, (a, b) in enumerate(zip(game.players, inst.game.players)):
            own, riv = game.block(x, i), game.rivals(x, i)
            assert a.preference(own, riv) == b.preference(own, riv)
            assert a.constraint(x) == b.constraint(x)


def test_hash_ignores_formatting_but_not_content():
    a = parse_instance(json.dumps(MINIMAL))
    b = parse_instance(json.dumps(MINIMAL, indent=4))
    assert a.hash == b.hash
    other = dict(MINIMAL, name="tiny2")
    assert parse_instance(json.dumps(other)).hash != a.hash


def test_unknown_field_names_path_and_line():
    doc = json.loads(json.dumps(MINIMAL))
    doc["players"][0]["preference"]["colour"] = "red"
    with pytest.raises(InstanceError) as info:
        parse_instance(text(doc))
    err = info.value
    assert "colour" in str(err)
    assert err.field == "players[0].preference.colour"
    assert err.line == text(doc).splitlines().index('        "colour": "red"') + 1


@pytest.mark.parametrize("bad", ["NaN", "Infinity", "-Infinity"])
def test_non_finite_numbers_rejected(bad):
    src = text(MINIMAL).replace('"hi": [\n          1\n        ]', f'"hi": [{bad}]')
    assert bad in src
    with pytest.raises(InstanceError):
        parse_instance(src)


def test_version_checked():
    with pytest.raises(InstanceError, match="version"):
        parse_instance(json.dumps(dict(MINIMAL, version=2)))
    missing = {k: v for k, v in MINIMAL.items() if k != "version"}
    with pytest.raises(InstanceError):
        parse_instance(json.dumps(missing))


def test_invalid_json_reports_line():
    with pytest.raises(InstanceError) as info:
        parse_instance('{\n "version": 1,\n "players": [,]\n}')
    assert info.value.line == 3


@pytest.mark.parametrize("mutate, field", [
    (lambda d: d["players"][0]["box"].update(lo=[2]), "players[0].box"),
    (lambda d: d.update(parameters={"grid": 1}), "parameters.grid"),
    (lambda d: d.update(parameters={"tol": -1.0}), "parameters.tol"),
    (lambda d: d["players"][0]["preference"].update(name="nope"), "players[0].preference.name"),
])
def test_invalid_values_name_their_field(mutate, field):
    doc = json.loads(json.dumps(MINIMAL))
    mutate(doc)
    with pytest.raises(InstanceError) as info:
        parse_instance(json.dumps(doc))
    assert info.value.field == field


def test_utility_instance_matches_fixture(instance_path):
    inst = load_instance(instance_path("example-3.1-utility"))
    P, Q = inst.game.players[0].preference, fixtures.example_3_1()
    for x in (0.1, 0.49, 0.6, 0.9):
        a, b = P([x]), Q([x])
        assert a.lo[0] == pytest.approx(b.lo[0], abs=1e-9) and a.hi[0] == pytest.approx(b.hi[0], abs=1e-9)


def test_caret_is_power_in_utility_game(instance_path):
    G = load_instance(instance_path("quadratic-utility-game")).game
    # best response to x2 = 0.3 is 0.3 for both players
    u = G.players[0].preference.utility
    assert u([0.3], [0.3]) == pytest.approx(0.0)
    assert u([0.5], [0.3]) == pytest.approx(-0.04)
