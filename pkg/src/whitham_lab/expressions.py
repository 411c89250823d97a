"""Closed-form expression parsing with exact first and second derivatives.

Symbols and initial profiles arrive as strings like ``"sqrt(tanh(xi)/xi)"``
or ``"cos(x) + 0.5*cos(2*x)"``.  They are parsed through a whitelisted
``ast`` subset (no eval) into callables that operate on numpy arrays.
Derivatives are propagated by second-order forward-mode dual numbers, so
p' and p'' are analytically exact, never finite differences.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

__all__ = ["ExpressionError", "parse_expression", "evaluate", "evaluate_with_derivatives"]


class ExpressionError(ValueError):
    """Raised for syntax outside the supported grammar or unknown names."""


ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class _Dual2:
    """Truncated Taylor jet (value, first, second derivative) at a point."""

    f: ArrayLike
    d1: ArrayLike
    d2: ArrayLike

    def __add__(self, other: "_Dual2") -> "_Dual2":
        return _Dual2(self.f + other.f, self.d1 + other.d1, self.d2 + other.d2)

    def __sub__(self, other: "_Dual2") -> "_Dual2":
        return _Dual2(self.f - other.f, self.d1 - other.d1, self.d2 - other.d2)

    def __neg__(self) -> "_Dual2":
        return _Dual2(-self.f, -self.d1, -self.d2)

    def __mul__(self, other: "_Dual2") -> "_Dual2":
        return _Dual2(
            self.f * other.f,
            self.d1 * other.f + self.f * other.d1,
            self.d2 * other.f + 2.0 * self.d1 * other.d1 + self.f * other.d2,
        )

    def __truediv__(self, other: "_Dual2") -> "_Dual2":
        return self * _inv(other)

    def __pow__(self, other: "_Dual2") -> "_Dual2":
        # Constant real exponent is the common, numerically clean case.
        if np.ndim(other.f) == 0 and np.all(other.d1 == 0) and np.all(other.d2 == 0):
            return _pow_const(self, float(other.f))
        return _exp(_log(self) * other)


def _const(c: float) -> _Dual2:
    # Scalar jet: broadcasting against array-valued jets happens inside the
    # arithmetic ops.  Keeping constants 0-dim is what lets __pow__ recognize
    # constant exponents and use exact power rules instead of exp(log(.)).
    return _Dual2(c, 0.0, 0.0)


def _inv(a: _Dual2) -> _Dual2:
    g = 1.0 / a.f
    return _Dual2(g, -a.d1 * g * g, (2.0 * a.d1 * a.d1 * g - a.d2) * g * g)


def _pow_const(a: _Dual2, c: float) -> _Dual2:
    if c == 0:
        return _const(1.0)
    if c == 1:
        return a
    if c == 2:
        return a * a
    f = a.f ** c
    fm1 = a.f ** (c - 1.0)
    fm2 = a.f ** (c - 2.0)
    return _Dual2(f, c * fm1 * a.d1, c * (c - 1.0) * fm2 * a.d1 * a.d1 + c * fm1 * a.d2)


def _chain(a: _Dual2, f: ArrayLike, df: ArrayLike, d2f: ArrayLike) -> _Dual2:
    return _Dual2(f, df * a.d1, d2f * a.d1 * a.d1 + df * a.d2)


def _exp(a: _Dual2) -> _Dual2:
    e = np.exp(a.f)
    return _chain(a, e, e, e)


def _log(a: _Dual2) -> _Dual2:
    g = 1.0 / a.f
    return _chain(a, np.log(a.f), g, -g * g)


def _sqrt(a: _Dual2) -> _Dual2:
    return _pow_const(a, 0.5)


def _tanh(a: _Dual2) -> _Dual2:
    t = np.tanh(a.f)
    s = 1.0 - t * t
    return _chain(a, t, s, -2.0 * t * s)


def _sin(a: _Dual2) -> _Dual2:
    s, c = np.sin(a.f), np.cos(a.f)
    return _chain(a, s, c, -s)


def _cos(a: _Dual2) -> _Dual2:
    s, c = np.sin(a.f), np.cos(a.f)
    return _chain(a, c, -s, -c)


def _cosh(a: _Dual2) -> _Dual2:
    s, c = np.sinh(a.f), np.cosh(a.f)
    return _chain(a, c, s, c)


def _sinh(a: _Dual2) -> _Dual2:
    s, c = np.sinh(a.f), np.cosh(a.f)
    return _chain(a, s, c, s)


def _abs(a: _Dual2) -> _Dual2:
    # Second derivative away from 0; the kink itself is the caller's problem
    # (|xi|^alpha symbols are flagged as not satisfying the local expansion).
    s = np.sign(a.f)
    return _chain(a, np.abs(a.f), s, np.zeros_like(s) if isinstance(s, np.ndarray) else 0.0)


# tanh(x)/x with a removable singularity at 0.  Kept as a primitive so that
# symbols like sqrt(tanh(xi)/xi) stay accurate through xi = 0: the quotient
# rule cancels catastrophically there, the series does not.
_TANHC_CUT = 0.05


def _tanhc_val(x: ArrayLike) -> ArrayLike:
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < _TANHC_CUT
    xs = np.where(small, 0.0, x)
    with np.errstate(invalid="ignore", divide="ignore"):
        direct = np.tanh(xs) / xs
    x2 = x * x
    series = 1.0 + x2 * (-1.0 / 3.0 + x2 * (2.0 / 15.0 + x2 * (-17.0 / 315.0 + x2 * (62.0 / 2835.0))))
    return np.where(small, series, direct)


def _tanhc(a: _Dual2) -> _Dual2:
    x = np.asarray(a.f, dtype=float)
    small = np.abs(x) < _TANHC_CUT
    xs = np.where(small, 1.0, x)
    t = np.tanh(xs)
    s = 1.0 - t * t
    with np.errstate(invalid="ignore", divide="ignore"):
        f_dir = t / xs
        d1_dir = s / xs - t / (xs * xs)
        d2_dir = -2.0 * s * t / xs - 2.0 * s / (xs * xs) + 2.0 * t / (xs * xs * xs)
    x2 = x * x
    f_ser = 1.0 + x2 * (-1.0 / 3.0 + x2 * (2.0 / 15.0 + x2 * (-17.0 / 315.0 + x2 * (62.0 / 2835.0))))
    d1_ser = x * (-2.0 / 3.0 + x2 * (8.0 / 15.0 + x2 * (-34.0 / 105.0 + x2 * (496.0 / 2835.0))))
    d2_ser = -2.0 / 3.0 + x2 * (8.0 / 5.0 + x2 * (-34.0 / 21.0 + x2 * (496.0 / 405.0)))
    f = np.where(small, f_ser, f_dir)
    df = np.where(small, d1_ser, d1_dir)
    d2f = np.where(small, d2_ser, d2_dir)
    return _chain(a, f, df, d2f)


_FUNCTIONS: dict[str, Callable[[_Dual2], _Dual2]] = {
    "sqrt": _sqrt,
    "tanh": _tanh,
    "tanhc": _tanhc,
    "abs": _abs,
    "exp": _exp,
    "log": _log,
    "sin": _sin,
    "cos": _cos,
    "sinh": _sinh,
    "cosh": _cosh,
}

_CONSTANTS = {"pi": math.pi, "e": math.e}

_BINOPS = {
    ast.Add: _Dual2.__add__,
    ast.Sub: _Dual2.__sub__,
    ast.Mult: _Dual2.__mul__,
    ast.Div: _Dual2.__truediv__,
    ast.Pow: _Dual2.__pow__,
}


def _compile_node(node: ast.AST, var: str) -> Callable[[_Dual2], _Dual2]:
    if isinstance(node, ast.Expression):
        return _compile_node(node.body, var)
    if isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)):
            raise ExpressionError(f"non-numeric constant {node.value!r}")
        c = float(node.value)
        return lambda x: _const(c)
    if isinstance(node, ast.Name):
        if node.id == var:
            return lambda x: x
        if node.id in _CONSTANTS:
            c = _CONSTANTS[node.id]
            return lambda x: _const(c)
        raise ExpressionError(f"unknown name {node.id!r} (variable is {var!r})")
    if isinstance(node, ast.UnaryOp):
        inner = _compile_node(node.operand, var)
        if isinstance(node.op, ast.USub):
            return lambda x: -inner(x)
        if isinstance(node.op, ast.UAdd):
            return inner
        raise ExpressionError(f"unsupported unary operator {type(node.op).__name__}")
    if isinstance(node, ast.BinOp):
        op = _BINOPS.get(type(node.op))
        if op is None:
            raise ExpressionError(f"unsupported operator {type(node.op).__name__}")
        left = _compile_node(node.left, var)
        right = _compile_node(node.right, var)
        return lambda x: op(left(x), right(x))
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.keywords or len(node.args) != 1:
            raise ExpressionError("only single-argument named function calls are allowed")
        fn = _FUNCTIONS.get(node.func.id)
        if fn is None:
            raise ExpressionError(f"unknown function {node.func.id!r}")
        arg = _compile_node(node.args[0], var)
        return lambda x: fn(arg(x))
    raise ExpressionError(f"unsupported syntax {type(node).__name__}")


def parse_expression(expr: str, var: str = "xi") -> Callable[[ArrayLike], ArrayLike]:
    """Compile ``expr`` into a vectorized callable of the single variable ``var``."""
    jet = parse_jet(expr, var)

    def fn(x: ArrayLike) -> ArrayLike:
        return jet(x)[0]

    return fn


def parse_jet(expr: str, var: str = "xi") -> Callable[[ArrayLike], tuple]:
    """Compile ``expr`` into a callable returning ``(f, f', f'')`` arrays."""
    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as err:
        raise ExpressionError(f"cannot parse {expr!r}: {err.msg}") from None
    compiled = _compile_node(tree, var)

    def jet(x: ArrayLike) -> tuple:
        xa = np.asarray(x, dtype=float)
        one = np.ones_like(xa)
        out = compiled(_Dual2(xa, one, np.zeros_like(xa)))
        f = np.broadcast_to(np.asarray(out.f, dtype=float), xa.shape)
        d1 = np.broadcast_to(np.asarray(out.d1, dtype=float), xa.shape)
        d2 = np.broadcast_to(np.asarray(out.d2, dtype=float), xa.shape)
        return np.array(f), np.array(d1), np.array(d2)

    return jet


def evaluate(expr: str, x: ArrayLike, var: str = "xi") -> np.ndarray:
    """One-shot evaluation of ``expr`` at ``x``."""
    return np.asarray(parse_expression(expr, var)(x))


def evaluate_with_derivatives(expr: str, x: ArrayLike, var: str = "xi") -> tuple:
    """One-shot jet evaluation, returning ``(f, f', f'')`` at ``x``."""
    return parse_jet(expr, var)(x)
