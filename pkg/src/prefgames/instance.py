"""Instance files: JSON documents describing a game (a single player with a
constant constraint is a maximal-element problem).

Layout::

    {
      "version": 1,
      "name": "example-3.1",
      "players": [
        {
          "name": "p1",
          "box": {"lo": [0], "hi": [1]},
          "constraint": {"kind": "constant", "region": {...}},
          "preference": {"kind": "builtin", "name": "example-3.1"}
        }
      ],
      "parameters": {"grid": 2001, "tol": 1e-9, "seed": 0}
    }

Constraints are ``constant`` (any region dict, default: the player's box)
or ``affine-box`` (``L``, ``l0``, ``U``, ``u0`` acting on the profile).
Preferences are ``builtin`` (registry name plus parameters), ``piecewise``
(a 1-D table with strictness flags), ``utility`` (an expression in the
profile coordinates ``x1 .. xN``; ``x`` is ``x1``) or ``lifted`` (a
non-parametric preference that ignores the rivals).

Unknown fields are rejected and every number must be finite; errors carry
the dotted field path and, when it can be located, the source line.
"""

import hashlib
import json
import math

import numpy as np

from . import convex_geometry as cg
from . import fixtures
from .exceptions import ExpressionError, InstanceError
from .expressions import parse_expression, profile_env
from .games import AffineBoxConstraint, ConstantConstraint, GameInstance, Player
from .preferences import Piece, Resolution, from_utility, piecewise_map

__all__ = ["Instance", "load_instance", "parse_instance", "dump_instance", "game_to_document",
           "instance_hash", "preference_from_spec", "FORMAT_VERSION"]

FORMAT_VERSION = 1

_TOP = {"version", "name", "players", "parameters"}
_PLAYER = {"name", "box", "constraint", "preference"}
_PARAMS = {"grid", "tol", "seed", "max_iters", "points", "resolution", "starts", "audit_samples"}
_RES = {"m", "eps_min", "n_w", "n_neighbors", "recheck_factor", "relative"}
_BUILTINS = {
    "example-3.1": set(),
    "example-3.2": set(),
    "example-3.1-utility": {"samples"},
    "increasing": set(),
    "empty": {"dim"},
    "singleton": {"value"},
    "single-peaked": {"peak"},
    "kinked-peak": {"peak", "jump", "slope"},
    "open-ball": {"peak"},
    "open-box": {"peak"},
    "tracking": set(),
}


class _Doc:
    """Source text plus helpers to locate fields for error messages."""

    def __init__(self, text):
        self.lines = text.splitlines()

    def line_of(self, key):
        if key is None:
            return None
        needle = f'"{key}"'
        for i, line in enumerate(self.lines, 1):
            if needle in line:
                return i
        return None

    def error(self, msg, path, key=None):
        return InstanceError(msg, path, self.line_of(key if key is not None else path.split(".")[-1].split("[")[0]))


def _check_keys(doc, obj, allowed, path, required=()):
    if not isinstance(obj, dict):
        raise doc.error("expected an object", path)
    for k in obj:
        if k not in allowed:
            raise doc.error(f"unknown field {k!r}", f"{path}.{k}" if path else k, k)
    for k in required:
        if k not in obj:
            raise doc.error(f"missing field {k!r}", f"{path}.{k}" if path else k, path.split(".")[-1] or None)


def _num(doc, v, path):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise doc.error("expected a finite number", path)
    return float(v)


def _vec(doc, v, path, dim=None):
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        v = [v]
    if not isinstance(v, list) or not v:
        raise doc.error("expected a non-empty list of numbers", path)
    out = np.array([_num(doc, x, f"{path}[{i}]") for i, x in enumerate(v)])
    if dim is not None and out.size != dim:
        raise doc.error(f"expected {dim} entries, got {out.size}", path)
    return out


def _mat(doc, v, path, rows, cols):
    if not isinstance(v, list) or len(v) != rows:
        raise doc.error(f"expected {rows} rows", path)
    return np.array([_vec(doc, r, f"{path}[{i}]", cols) for i, r in enumerate(v)])


def _int(doc, v, path, minimum=None):
    if isinstance(v, bool) or not isinstance(v, int):
        raise doc.error("expected an integer", path)
    if minimum is not None and v < minimum:
        raise doc.error(f"must be at least {minimum}", path)
    return v


def _bool(doc, v, path):
    if not isinstance(v, bool):
        raise doc.error("expected true or false", path)
    return v


# ---------------------------------------------------------------------------
# regions and constraints


def _region(doc, d, path, dim):
    kinds = {
        "empty": {"kind", "dim"},
        "interval": {"kind", "lo", "hi", "lo_open", "hi_open"},
        "hpolytope": {"kind", "A", "b", "strict"},
        "vpolytope": {"kind", "vertices"},
        "ball": {"kind", "center", "radius", "open"},
    }
    if not isinstance(d, dict) or d.get("kind") not in kinds:
        raise doc.error(f"region kind must be one of {sorted(kinds)}", f"{path}.kind", "kind")
    _check_keys(doc, d, kinds[d["kind"]], path)
    try:
        if d["kind"] == "interval":
            lo, hi = _vec(doc, d.get("lo"), f"{path}.lo", dim), _vec(doc, d.get("hi"), f"{path}.hi", dim)
            flags = []
            for k in ("lo_open", "hi_open"):
                raw = d.get(k, [False] * dim)
                raw = raw if isinstance(raw, list) else [raw] * dim
                if len(raw) != dim:
                    raise doc.error(f"expected {dim} flags", f"{path}.{k}")
                flags.append(np.array([_bool(doc, b, f"{path}.{k}") for b in raw]))
            return cg.interval(lo, hi, flags[0], flags[1])
        if d["kind"] == "empty":
            return cg.Empty(dim)
        if d["kind"] == "hpolytope":
            b = _vec(doc, d.get("b"), f"{path}.b")
            A = _mat(doc, d.get("A"), f"{path}.A", b.size, dim)
            strict = d.get("strict")
            if strict is not None:
                strict = [_bool(doc, s, f"{path}.strict") for s in strict]
            return cg.hpolytope(A, b, strict)
        if d["kind"] == "vpolytope":
            V = d.get("vertices")
            if not isinstance(V, list):
                raise doc.error("expected a list of vertices", f"{path}.vertices")
            return cg.VPolytope(_mat(doc, V, f"{path}.vertices", len(V), dim))
        c = _vec(doc, d.get("center"), f"{path}.center", dim)
        return cg.ball(c, _num(doc, d.get("radius"), f"{path}.radius"), _bool(doc, d.get("open", False), f"{path}.open"))
    except InstanceError:
        raise
    except (ValueError, TypeError) as exc:
        raise doc.error(str(exc), path) from None


def _constraint(doc, d, path, box, total):
    if d is None:
        return ConstantConstraint(box)
    if not isinstance(d, dict):
        raise doc.error("expected an object", path)
    kind = d.get("kind")
    if kind == "constant":
        _check_keys(doc, d, {"kind", "region"}, path, ("region",))
        return ConstantConstraint(_region(doc, d["region"], f"{path}.region", box.dim))
    if kind == "affine-box":
        _check_keys(doc, d, {"kind", "L", "l0", "U", "u0"}, path, ("L", "l0", "U", "u0"))
        n = box.dim
        return AffineBoxConstraint(box, _mat(doc, d["L"], f"{path}.L", n, total), _vec(doc, d["l0"], f"{path}.l0", n),
                                   _mat(doc, d["U"], f"{path}.U", n, total), _vec(doc, d["u0"], f"{path}.u0", n))
    raise doc.error("constraint kind must be 'constant' or 'affine-box'", f"{path}.kind", "kind")


# ---------------------------------------------------------------------------
# preferences


def _builtin(doc, d, path):
    name = d.get("name")
    if name not in _BUILTINS:
        raise doc.error(f"unknown builtin {name!r}; known: {sorted(_BUILTINS)}", f"{path}.name", "name")
    _check_keys(doc, d, {"kind", "name"} | _BUILTINS[name], path)
    f = fixtures
    if name == "example-3.1-utility":
        return f.example_3_1_from_utility(_int(doc, d.get("samples", 513), f"{path}.samples", 3))
    if name == "empty":
        return f.empty_map(_int(doc, d.get("dim", 1), f"{path}.dim", 1))
    if name == "singleton":
        value = _num(doc, d.get("value", 1.0), f"{path}.value")
        P = f.singleton_map(value)
        P.spec = {"kind": "builtin", "name": "singleton", "value": value}
        return P
    if name == "single-peaked":
        return f.single_peaked_map(_num(doc, d.get("peak"), f"{path}.peak"))
    if name == "kinked-peak":
        return f.kinked_peak_map(*(_num(doc, d.get(k), f"{path}.{k}") for k in ("peak", "jump", "slope")))
    if name in ("open-ball", "open-box"):
        peak = _vec(doc, d.get("peak"), f"{path}.peak")
        return (f.open_ball_map if name == "open-ball" else f.open_box_map)(peak)
    return {"example-3.1": f.example_3_1, "example-3.2": f.example_3_2, "increasing": f.increasing_utility_map,
            "tracking": f.tracking_map}[name]()


def _piecewise(doc, d, path):
    _check_keys(doc, d, {"kind", "domain", "pieces", "name"}, path, ("pieces",))
    dom = _vec(doc, d.get("domain", [0.0, 1.0]), f"{path}.domain", 2)
    rows = d["pieces"]
    if not isinstance(rows, list) or not rows:
        raise doc.error("expected a non-empty list of pieces", f"{path}.pieces")
    pieces = []
    for i, r in enumerate(rows):
        p = f"{path}.pieces[{i}]"
        _check_keys(doc, r, {"x", "x_open", "value"}, p, ("x", "value"))
        a, b = _vec(doc, r["x"], f"{p}.x", 2)
        ao, bo = [_bool(doc, v, f"{p}.x_open") for v in r.get("x_open", [False, False])]
        val = r["value"]
        if val == "empty":
            pieces.append(Piece(a, b, ao, bo, empty=True))
            continue
        _check_keys(doc, val, {"lo", "hi", "lo_open", "hi_open"}, f"{p}.value", ("lo", "hi"))
        bounds = []
        for k in ("lo", "hi"):
            v = val[k]
            if isinstance(v, str):
                try:
                    expr = parse_expression(v)
                except ExpressionError as exc:
                    raise doc.error(str(exc), f"{p}.value.{k}") from None
                if expr.variables - {"x", "x1"}:
                    raise doc.error("piecewise bounds may only use x", f"{p}.value.{k}")
                bounds.append(v)
            else:
                bounds.append(_num(doc, v, f"{p}.value.{k}"))
        pieces.append(Piece(a, b, ao, bo, bounds[0], bounds[1],
                            _bool(doc, val.get("lo_open", False), f"{p}.value.lo_open"),
                            _bool(doc, val.get("hi_open", False), f"{p}.value.hi_open")))
    return piecewise_map(pieces, (float(dom[0]), float(dom[1])), name=d.get("name", "piecewise"))


def _utility_map(doc, d, path, box, rival_box, offset, total):
    _check_keys(doc, d, {"kind", "expr", "samples", "domain"}, path, ("expr",))
    src = d["expr"]
    try:
        expr = parse_expression(src)
    except ExpressionError as exc:
        raise doc.error(str(exc), f"{path}.expr", "expr") from None
    if expr.max_index() > total:
        raise doc.error(f"expression uses x{expr.max_index()} but the profile has {total} coordinates",
                        f"{path}.expr", "expr")
    n = box.dim
    samples = _int(doc, d.get("samples", 513), f"{path}.samples", 3)

    def profile(z, y):
        Z = np.asarray(z, float)
        Z = Z.reshape(-1, n) if Z.ndim <= 1 and n > 1 else Z.reshape(-1, n) if Z.ndim == 2 else Z.reshape(-1, 1)
        k = Z.shape[0]
        out = np.empty((k, total))
        out[:, offset:offset + n] = Z
        if y is not None:
            yy = np.asarray(y, float)
            out[:, :offset] = yy[:offset]
            out[:, offset + n:] = yy[offset:]
        return out

    def u(z, y=None):
        X = profile(z, y)
        vals = np.broadcast_to(expr(profile_env(X)), (X.shape[0],))
        return vals if np.ndim(z) > (0 if n == 1 else 1) else float(vals[0])

    spec = {"kind": "utility", "expr": src, "samples": samples}
    try:
        return from_utility(u, box, rival_box, name=f"utility({src})", samples=samples, spec=spec)
    except (ValueError, ExpressionError) as exc:
        raise doc.error(str(exc), path) from None


def preference_from_spec(spec, box=None, rival_box=None, offset=0, total=None, _doc=None, path="preference"):
    """Build a preference map from its instance-file description."""
    doc = _doc or _Doc(json.dumps(spec, indent=1))
    if not isinstance(spec, dict):
        raise doc.error("expected an object", path)
    kind = spec.get("kind")
    total = total if total is not None else (box.dim if box is not None else 1) + (rival_box.dim if rival_box else 0)
    if kind == "builtin":
        P = _builtin(doc, spec, path)
    elif kind == "piecewise":
        P = _piecewise(doc, spec, path)
    elif kind == "utility":
        if box is None:
            raise doc.error("utility preferences need a box", path)
        return _utility_map(doc, spec, path, box, rival_box, offset, total)
    elif kind == "lifted":
        _check_keys(doc, spec, {"kind", "base"}, path, ("base",))
        P = preference_from_spec(spec["base"], box, None, 0, None, doc, f"{path}.base")
        if P.is_parametric:
            raise doc.error("a lifted preference must not be parametric", f"{path}.base")
    else:
        raise doc.error("preference kind must be builtin, piecewise, utility or lifted", f"{path}.kind", "kind")
    if rival_box is not None and not P.is_parametric:
        P = fixtures.lift_map(P, rival_box)
    if rival_box is None and P.is_parametric:
        raise doc.error(f"preference {P.name!r} needs rival players", path)
    if rival_box is not None and P.rival_dim != rival_box.dim:
        raise doc.error(f"preference expects {P.rival_dim} rival coordinates, the game has {rival_box.dim}", path)
    if box is not None and (P.own_dim != box.dim or np.any(P.domain.lo != box.lo) or np.any(P.domain.hi != box.hi)):
        raise doc.error("preference domain differs from the player's box", path)
    return P


# ---------------------------------------------------------------------------
# documents


class Instance:
    """A parsed instance: the game, solver parameters and the source hash."""

    def __init__(self, game, parameters, document, digest):
        self.game = game
        self.parameters = parameters
        self.document = document
        self.hash = digest

    @property
    def resolution(self):
        r = self.parameters.get("resolution", {})
        return Resolution(seed=self.parameters.get("seed", 0), **r)

    def __repr__(self):
        return f"Instance({self.game.name!r}, hash={self.hash[:12]})"


def instance_hash(document):
    canon = json.dumps(document, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def _parameters(doc, d, total):
    if d is None:
        return {}
    _check_keys(doc, d, _PARAMS, "parameters")
    out = {}
    if "grid" in d:
        out["grid"] = _int(doc, d["grid"], "parameters.grid", 2)
    if "tol" in d:
        out["tol"] = _num(doc, d["tol"], "parameters.tol")
        if out["tol"] < 0:
            raise doc.error("must be non-negative", "parameters.tol")
    if "seed" in d:
        out["seed"] = _int(doc, d["seed"], "parameters.seed", 0)
    if "max_iters" in d:
        out["max_iters"] = _int(doc, d["max_iters"], "parameters.max_iters", 1)
    if "starts" in d:
        out["starts"] = _int(doc, d["starts"], "parameters.starts", 1)
    if "audit_samples" in d:
        out["audit_samples"] = _int(doc, d["audit_samples"], "parameters.audit_samples", 2)
    if "points" in d:
        pts = d["points"]
        if not isinstance(pts, list) or not pts:
            raise doc.error("expected a non-empty list of profiles", "parameters.points")
        out["points"] = [_vec(doc, p, f"parameters.points[{i}]", total).tolist() for i, p in enumerate(pts)]
    if "resolution" in d:
        r = d["resolution"]
        _check_keys(doc, r, _RES, "parameters.resolution")
        res = {}
        for k in ("m", "n_w", "n_neighbors", "recheck_factor"):
            if k in r:
                res[k] = _int(doc, r[k], f"parameters.resolution.{k}", 1)
        if "eps_min" in r:
            res["eps_min"] = _num(doc, r["eps_min"], "parameters.resolution.eps_min")
            if res["eps_min"] <= 0:
                raise doc.error("must be positive", "parameters.resolution.eps_min")
        if "relative" in r:
            res["relative"] = _bool(doc, r["relative"], "parameters.resolution.relative")
        out["resolution"] = res
    return out


def parse_instance(text):
    """Parse instance JSON text; raises InstanceError with field and line."""
    doc = _Doc(text)
    try:
        data = json.loads(text, parse_constant=lambda c: (_ for _ in ()).throw(ValueError(f"{c} is not allowed")))
    except json.JSONDecodeError as exc:
        raise InstanceError(f"invalid JSON: {exc.msg}", None, exc.lineno) from None
    except ValueError as exc:
        raise InstanceError(str(exc)) from None
    _check_keys(doc, data, _TOP, "", ("version", "players"))
    if data["version"] != FORMAT_VERSION:
        raise doc.error(f"unsupported version {data['version']!r}; expected {FORMAT_VERSION}", "version")
    players_doc = data["players"]
    if not isinstance(players_doc, list) or not players_doc:
        raise doc.error("expected a non-empty list of players", "players")
    boxes = []
    for i, p in enumerate(players_doc):
        path = f"players[{i}]"
        _check_keys(doc, p, _PLAYER, path, ("box", "preference"))
        _check_keys(doc, p["box"], {"lo", "hi"}, f"{path}.box", ("lo", "hi"))
        lo = _vec(doc, p["box"]["lo"], f"{path}.box.lo")
        hi = _vec(doc, p["box"]["hi"], f"{path}.box.hi", lo.size)
        if np.any(lo > hi):
            raise doc.error("box has lo > hi", f"{path}.box")
        boxes.append(cg.IntervalProduct(lo, hi))
    dims = [b.dim for b in boxes]
    total = int(sum(dims))
    offsets = np.concatenate([[0], np.cumsum(dims)]).astype(int)
    players = []
    for i, p in enumerate(players_doc):
        path = f"players[{i}]"
        others = [b for j, b in enumerate(boxes) if j != i]
        rival = None if not others else cg.IntervalProduct(np.concatenate([b.lo for b in others]),
                                                            np.concatenate([b.hi for b in others]))
        P = preference_from_spec(p["preference"], boxes[i], rival, int(offsets[i]), total, doc, f"{path}.preference")
        K = _constraint(doc, p.get("constraint"), f"{path}.constraint", boxes[i], total)
        name = p.get("name", f"p{i + 1}")
        if not isinstance(name, str):
            raise doc.error("expected a string", f"{path}.name")
        players.append(Player(boxes[i], K, P, name))
    name = data.get("name", "instance")
    if not isinstance(name, str):
        raise doc.error("expected a string", "name")
    game = GameInstance(players, name=name)
    params = _parameters(doc, data.get("parameters"), total)
    return Instance(game, params, data, instance_hash(data))


def load_instance(path):
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def _pref_doc(P):
    spec = getattr(P, "spec", None)
    if spec is None:
        raise InstanceError(f"preference {P.name!r} has no exportable description")
    return spec


def game_to_document(G, parameters=None):
    """Instance document for a game whose preferences carry descriptions."""
    players = []
    for p in G.players:
        spec = _pref_doc(p.preference)
        if spec.get("kind") == "lifted":
            spec = spec["base"]
        players.append({"name": p.name, "box": {"lo": p.box.lo.tolist(), "hi": p.box.hi.tolist()},
                        "constraint": p.constraint.to_dict(), "preference": spec})
    doc = {"version": FORMAT_VERSION, "name": G.name, "players": players}
    if parameters:
        doc["parameters"] = parameters
    return doc


def dump_instance(G, parameters=None):
    return json.dumps(game_to_document(G, parameters), indent=2, sort_keys=True) + "\n"
