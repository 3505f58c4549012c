"""Compile-time expression folding.

Substitutes bound constants, equation index variables and upb/lwb markers,
then evaluates arithmetic over literals. Concatenation and comparisons are
left for the spreadsheet; table references are never folded.
"""

from __future__ import annotations

from . import ast
from .errors import DIVISION_BY_ZERO, CodegenError

Env = dict[str, int]


def fold(
    expr: ast.Expr,
    constants: dict[str, float | str],
    bounds: dict[str, tuple[int, int]],
    env: Env | None = None,
) -> ast.Expr:
    env = env or {}

    def go(e: ast.Expr) -> ast.Expr:
        if isinstance(e, (ast.Num, ast.Str, ast.CellRef, ast.CellRange)):
            return e
        if isinstance(e, ast.Name):
            if e.name in env:
                return ast.Num(float(env[e.name]))
            if e.name in constants:
                value = constants[e.name]
                return ast.Str(value) if isinstance(value, str) else ast.Num(value)
            return e
        if isinstance(e, ast.Bound):
            if e.type_name in bounds:
                lo, hi = bounds[e.type_name]
                return ast.Num(float(lo if e.kind == "lwb" else hi))
            return e
        if isinstance(e, ast.Neg):
            operand = go(e.operand)
            if isinstance(operand, ast.Num):
                return ast.Num(-operand.value)
            return ast.Neg(operand)
        if isinstance(e, ast.BinOp):
            left, right = go(e.left), go(e.right)
            if e.op in "+-*/" and isinstance(left, ast.Num) and isinstance(right, ast.Num):
                return ast.Num(_arith(e.op, left.value, right.value))
            return ast.BinOp(e.op, left, right)
        if isinstance(e, ast.Call):
            return ast.Call(e.name, tuple(go(a) for a in e.args))
        if isinstance(e, ast.TableRef):
            return ast.TableRef(e.table, tuple(_go_index(i) for i in e.indices))
        raise TypeError(f"cannot fold {e!r}")

    def _go_index(index: ast.IndexExpr) -> ast.IndexExpr:
        if isinstance(index, ast.ScalarIndex):
            return ast.ScalarIndex(go(index.expr))
        if isinstance(index, ast.RangeIndex):
            return ast.RangeIndex(go(index.lo), go(index.hi))
        return index

    return go(expr)


def _arith(op: str, a: float, b: float) -> float:
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if b == 0:
        raise CodegenError(DIVISION_BY_ZERO, "division by zero in a constant expression")
    return a / b


def as_number(expr: ast.Expr) -> float | None:
    return expr.value if isinstance(expr, ast.Num) else None


def as_literal(expr: ast.Expr) -> float | str | None:
    if isinstance(expr, (ast.Num, ast.Str)):
        return expr.value
    return None


def is_static(expr: ast.Expr) -> bool:
    """True when the expression folds at compile time once names are bound.

    The static set is literals, constants, index variables, upb/lwb and
    arithmetic. Function calls and table or cell references are runtime.
    """
    if isinstance(expr, (ast.Num, ast.Str, ast.Name, ast.Bound)):
        return True
    if isinstance(expr, ast.Neg):
        return is_static(expr.operand)
    if isinstance(expr, ast.BinOp):
        return is_static(expr.left) and is_static(expr.right)
    return False
