"""A small, safe arithmetic grammar for utility expressions.

Supported: numbers, the variables ``x`` and ``x1 .. xN``, unary and binary
``+ - * /``, powers (``**`` or ``^``), ``min``, ``max``, ``abs`` and single
comparisons ``< <= > >=`` which evaluate to 1.0 or 0.0.  The comparisons
make piecewise utilities expressible, e.g. ``(x < 0.5)*x + (x >= 0.5)*(2 - x)``.

Expressions compile to closures that broadcast over numpy arrays.
"""

import ast
import operator
import re

import numpy as np

from .exceptions import ExpressionError

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_CMPOPS = {
    ast.Lt: np.less,
    ast.LtE: np.less_equal,
    ast.Gt: np.greater,
    ast.GtE: np.greater_equal,
}
_VAR = re.compile(r"^x([1-9][0-9]*)?$")


def _fold(fn, args):
    out = args[0]
    for a in args[1:]:
        out = fn(out, a)
    return out


_FUNCS = {
    "min": lambda *a: _fold(np.minimum, a),
    "max": lambda *a: _fold(np.maximum, a),
    "abs": lambda a: np.abs(a),
}


class Expression:
    """Compiled expression; call with a mapping from variable name to value."""

    def __init__(self, source, fn, variables):
        self.source = source
        self._fn = fn
        self.variables = frozenset(variables)

    def __call__(self, env):
        missing = self.variables - set(env)
        if missing:
            raise ExpressionError(f"unbound variables {sorted(missing)}")
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = self._fn(env)
        return np.asarray(out, dtype=float)

    def max_index(self):
        """Largest ``k`` among variables ``xk`` (``x`` counts as 1)."""
        idx = [int(v[1:]) if len(v) > 1 else 1 for v in self.variables]
        return max(idx, default=0)

    def __repr__(self):
        return f"Expression({self.source!r})"


def _compile(node, names):
    if isinstance(node, ast.Expression):
        return _compile(node.body, names)
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise ExpressionError("only numeric literals are allowed", node.col_offset)
        val = float(node.value)
        return lambda env: val
    if isinstance(node, ast.Name):
        if not _VAR.match(node.id):
            raise ExpressionError(f"unknown name {node.id!r}", node.col_offset)
        names.add(node.id)
        key = node.id
        return lambda env: env[key]
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        inner = _compile(node.operand, names)
        if isinstance(node.op, ast.USub):
            return lambda env: -inner(env)
        return inner
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        op = _BINOPS[type(node.op)]
        left, right = _compile(node.left, names), _compile(node.right, names)
        return lambda env: op(left(env), right(env))
    if isinstance(node, ast.Compare):
        if len(node.ops) != 1 or type(node.ops[0]) not in _CMPOPS:
            raise ExpressionError("only single <, <=, >, >= comparisons are allowed", node.col_offset)
        op = _CMPOPS[type(node.ops[0])]
        left, right = _compile(node.left, names), _compile(node.comparators[0], names)
        return lambda env: op(left(env), right(env)).astype(float)
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCS or node.keywords:
            raise ExpressionError("only min, max and abs calls are allowed", node.col_offset)
        name = node.func.id
        if name == "abs" and len(node.args) != 1:
            raise ExpressionError("abs takes one argument", node.col_offset)
        if name != "abs" and len(node.args) < 2:
            raise ExpressionError(f"{name} takes at least two arguments", node.col_offset)
        fn = _FUNCS[name]
        args = [_compile(a, names) for a in node.args]
        return lambda env: fn(*(a(env) for a in args))
    col = getattr(node, "col_offset", None)
    raise ExpressionError(f"unsupported syntax {type(node).__name__}", col)


def parse_expression(source):
    """Parse ``source`` into an :class:`Expression`; raises ExpressionError."""
    if not isinstance(source, str) or not source.strip():
        raise ExpressionError("expression must be a non-empty string")
    try:
        # "^" is rewritten so it binds like "**" rather than like xor
        tree = ast.parse(source.strip().replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"syntax error: {exc.msg}", exc.offset) from None
    names = set()
    fn = _compile(tree, names)
    return Expression(source, fn, names)


def profile_env(profile):
    """Variable bindings for a profile array whose last axis is coordinates."""
    profile = np.asarray(profile, dtype=float)
    env = {f"x{i + 1}": profile[..., i] for i in range(profile.shape[-1])}
    env["x"] = profile[..., 0]
    return env
