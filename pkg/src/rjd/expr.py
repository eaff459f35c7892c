"""Small arithmetic expression interpreter for coefficient definitions.

Model files describe drift/diffusion coefficients and point maps either as
constants or as expressions in the single variable ``x``. The grammar is
deliberately tiny: ``+ - * / ^``, unary minus, numeric literals, and the
functions ``exp``, ``log``, ``abs``, ``min``, ``max``. Expressions compile to
numpy-vectorized callables so the same object serves scalar and batch
evaluation.
"""

from __future__ import annotations

import ast

import numpy as np

__all__ = ["ExpressionError", "compile_expression"]


class ExpressionError(ValueError):
    """Raised when an expression uses syntax outside the supported grammar."""


_BINOPS = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.true_divide,
    ast.Pow: np.power,
}

_UNARY = {ast.USub: np.negative, ast.UAdd: lambda v: v}

# min/max are n-ary: fold the elementwise reduction over the argument list.
_FUNCTIONS = {
    "exp": (np.exp, 1, 1),
    "log": (np.log, 1, 1),
    "abs": (np.abs, 1, 1),
    "min": (np.minimum, 2, None),
    "max": (np.maximum, 2, None),
}


def _check(node: ast.AST, source: str) -> None:
    if isinstance(node, ast.Expression):
        _check(node.body, source)
    elif isinstance(node, ast.BinOp):
        if type(node.op) not in _BINOPS:
            raise ExpressionError(f"unsupported operator in {source!r}")
        _check(node.left, source)
        _check(node.right, source)
    elif isinstance(node, ast.UnaryOp):
        if type(node.op) not in _UNARY:
            raise ExpressionError(f"unsupported unary operator in {source!r}")
        _check(node.operand, source)
    elif isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCTIONS:
            raise ExpressionError(f"unknown function in {source!r}")
        _, lo, hi = _FUNCTIONS[node.func.id]
        if len(node.args) < lo or (hi is not None and len(node.args) > hi):
            raise ExpressionError(
                f"wrong number of arguments for {node.func.id} in {source!r}"
            )
        if node.keywords:
            raise ExpressionError(f"keyword arguments not allowed in {source!r}")
        for arg in node.args:
            _check(arg, source)
    elif isinstance(node, ast.Name):
        if node.id != "x":
            raise ExpressionError(f"unknown variable {node.id!r} in {source!r}")
    elif isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)):
            raise ExpressionError(f"non-numeric literal in {source!r}")
    else:
        raise ExpressionError(f"unsupported syntax in {source!r}")


def _evaluate(node: ast.AST, x):
    if isinstance(node, ast.Expression):
        return _evaluate(node.body, x)
    if isinstance(node, ast.BinOp):
        return _BINOPS[type(node.op)](_evaluate(node.left, x), _evaluate(node.right, x))
    if isinstance(node, ast.UnaryOp):
        return _UNARY[type(node.op)](_evaluate(node.operand, x))
    if isinstance(node, ast.Call):
        fn = _FUNCTIONS[node.func.id][0]
        args = [_evaluate(a, x) for a in node.args]
        if len(args) == 1:
            return fn(args[0])
        out = args[0]
        for a in args[1:]:
            out = fn(out, a)
        return out
    if isinstance(node, ast.Name):
        return x
    if isinstance(node, ast.Constant):
        return node.value
    raise ExpressionError("unreachable node")  # guarded by _check


def compile_expression(body: str):
    """Compile a string expression into a vectorized function of ``x``.

    ``^`` denotes exponentiation. The returned callable accepts scalars or
    numpy arrays and always returns a float (scalar input) or float array.
    """
    source = body
    try:
        tree = ast.parse(body.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {source!r}: {exc.msg}") from exc
    _check(tree, source)

    def fn(x):
        out = _evaluate(tree, np.asarray(x, dtype=float))
        out = np.asarray(out, dtype=float)
        out = np.broadcast_to(out, np.shape(x)) if np.shape(x) else out
        return float(out) if out.ndim == 0 else np.array(out, dtype=float)

    fn.__doc__ = f"compiled expression: {source}"
    fn.expression = source
    return fn
