"""Rendering of expressions and programs back to source text.

The expression renderer is shared with the code generator, which uses the
`formula` style: uppercase function names and no whitespace, the shape all
compiled formulae take.
"""

from __future__ import annotations

from . import ast
from .cells import col_to_letters

_LEVEL_COMPARE = 1
_LEVEL_CONCAT = 2
_LEVEL_ADD = 3
_LEVEL_MUL = 4
_LEVEL_UNARY = 5
_LEVEL_ATOM = 6

_OP_LEVEL = {
    "=": _LEVEL_COMPARE,
    "<>": _LEVEL_COMPARE,
    "<": _LEVEL_COMPARE,
    ">": _LEVEL_COMPARE,
    "<=": _LEVEL_COMPARE,
    ">=": _LEVEL_COMPARE,
    "&": _LEVEL_CONCAT,
    "+": _LEVEL_ADD,
    "-": _LEVEL_ADD,
    "*": _LEVEL_MUL,
    "/": _LEVEL_MUL,
}


def render_number(value: float) -> str:
    """Minimal decimal rendering: no trailing .0, shortest round-trip otherwise."""
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def quote_text(value: str, quote: str = '"') -> str:
    return quote + value.replace(quote, quote * 2) + quote


def render_expr(expr: ast.Expr, formula: bool = False, sheet: str | None = None) -> str:
    """Render an expression. In formula style, cell refs on `sheet` stay bare."""
    return _render(expr, 0, formula, sheet)


def _render(expr: ast.Expr, min_level: int, formula: bool, sheet: str | None) -> str:
    text, level = _render_level(expr, formula, sheet)
    if level < min_level:
        return f"({text})"
    return text


def _render_level(expr: ast.Expr, formula: bool, sheet: str | None) -> tuple[str, int]:
    if isinstance(expr, ast.Num):
        level = _LEVEL_UNARY if expr.value < 0 else _LEVEL_ATOM
        return render_number(expr.value), level
    if isinstance(expr, ast.Str):
        return quote_text(expr.value), _LEVEL_ATOM
    if isinstance(expr, ast.Name):
        return expr.name, _LEVEL_ATOM
    if isinstance(expr, ast.Neg):
        return "-" + _render(expr.operand, _LEVEL_UNARY, formula, sheet), _LEVEL_UNARY
    if isinstance(expr, ast.BinOp):
        level = _OP_LEVEL[expr.op]
        left = _render(expr.left, level, formula, sheet)
        right = _render(expr.right, level + 1, formula, sheet)
        return f"{left}{expr.op}{right}", level
    if isinstance(expr, ast.Call):
        name = expr.name.upper() if formula else expr.name
        args = ",".join(_render(a, 0, formula, sheet) for a in expr.args)
        return f"{name}({args})", _LEVEL_ATOM
    if isinstance(expr, ast.Bound):
        return f"{expr.kind}({expr.type_name})", _LEVEL_ATOM
    if isinstance(expr, ast.TableRef):
        indices = ",".join(_render_index(i, formula, sheet) for i in expr.indices)
        return f"{expr.table}[{indices}]", _LEVEL_ATOM
    if isinstance(expr, ast.CellRef):
        return _render_cell(expr, sheet), _LEVEL_ATOM
    if isinstance(expr, ast.CellRange):
        # Qualify the start only; the end is implicitly on the same sheet.
        end_sheet = expr.start.sheet if expr.start.sheet is not None else sheet
        return f"{_render_cell(expr.start, sheet)}:{_render_cell(expr.end, end_sheet)}", _LEVEL_ATOM
    raise TypeError(f"cannot render {expr!r}")


def _render_cell(ref: ast.CellRef, sheet: str | None) -> str:
    a1 = f"{col_to_letters(ref.col)}{ref.row}"
    if ref.sheet is not None and ref.sheet != sheet:
        return f"{ref.sheet}!{a1}"
    return a1


def _render_index(index: ast.IndexExpr, formula: bool, sheet: str | None) -> str:
    if isinstance(index, ast.AllIndex):
        return "all"
    if isinstance(index, ast.RangeIndex):
        return f"{_render(index.lo, _LEVEL_CONCAT, formula, sheet)}:{_render(index.hi, _LEVEL_CONCAT, formula, sheet)}"
    return _render(index.expr, 0, formula, sheet)


# --------------------------------------------------------------------------
# Statement and program printing

def render_statement(stmt: ast.Statement) -> str:
    if isinstance(stmt, ast.ConstantDecl):
        if stmt.value is None:
            return f"constant {stmt.name}."
        return f"constant {stmt.name} = {_render_literal(stmt.value)}."
    if isinstance(stmt, ast.IndexTypeDecl):
        if stmt.lo is None:
            return f"type {stmt.name}."
        return f"type {stmt.name} = {render_expr(stmt.lo)}:{render_expr(stmt.hi)}."
    if isinstance(stmt, ast.TableDecl):
        dims = " ".join(stmt.dims)
        sep = f" {dims} " if dims else " "
        return f"table {stmt.name} :{sep}-> {stmt.elem_type}."
    if isinstance(stmt, ast.Equation):
        lhs = stmt.table
        if stmt.indices:
            lhs += "[" + ", ".join(_render_index_spec(i) for i in stmt.indices) + "]"
        return f"{lhs} = {render_expr(stmt.rhs)}."
    if isinstance(stmt, ast.LayoutDirective):
        groups = ", ".join(_render_group(g) for g in stmt.groups)
        return f"layout( {_atom(stmt.sheet)}, rows( {groups} ) )."
    if isinstance(stmt, ast.Place):
        return f"place( {stmt.table}, {_atom(stmt.sheet)}, {_atom(stmt.cell)}, {stmt.orientation} )."
    raise TypeError(f"cannot render {stmt!r}")


def _render_literal(value: float | str) -> str:
    if isinstance(value, str):
        return quote_text(value)
    return render_number(value)


def _render_index_spec(spec: ast.IndexSpec) -> str:
    if isinstance(spec, ast.LitIndex):
        return str(spec.value)
    if isinstance(spec, ast.VarIndex):
        return spec.name
    return f"{spec.name} {spec.op} {render_expr(spec.bound)}"


def _atom(text: str) -> str:
    return quote_text(text, "'")


def _render_group(group: tuple[ast.LayoutItem, ...]) -> str:
    if len(group) == 1 and isinstance(group[0], ast.Heading):
        return "heading"
    return "[ " + ", ".join(_render_item(i) for i in group) + " ]"


def _render_item(item: ast.LayoutItem) -> str:
    if isinstance(item, ast.Skip):
        return f"skip({item.rows},{item.cols})"
    if isinstance(item, ast.Label):
        return _atom(item.text)
    if isinstance(item, ast.Heading):
        return "heading"
    if item.options is not None:
        opts = ", ".join(_atom(o) for o in item.options)
        orientation = item.orientation or "y"
        return f"as( {item.table}, {orientation}, [{opts}] )"
    if item.orientation is not None:
        return f"{item.table} as {item.orientation}"
    return item.table


def render_program(program: ast.Program) -> str:
    """Canonical source for a program: one statement per line, no comments."""
    return "\n".join(render_statement(s) for s in program.statements) + ("\n" if program.statements else "")
