"""Expansion of checked programs into concrete formula grids.

Each equation is instantiated once per covered index tuple: the right-hand
side is rewritten with table references replaced by cell references and
constants by their values, then placed at the cell the left-hand side
denotes. References whose index depends on a runtime cell value compile
to OFFSET forms anchored at the referenced table's first cell.
"""

from __future__ import annotations

from . import ast
from .cells import CellAddr
from .errors import INDEX_OUT_OF_BOUNDS, CodegenError
from .fold import Env, as_number, fold
from .grid import Formula, FormulaGrid, LiteralNumber, LiteralText
from .layout import Placement, PlacementMap
from .pretty import render_expr
from .sema import CheckedProgram


def compile_grid(checked: CheckedProgram, pm: PlacementMap) -> FormulaGrid:
    grid = FormulaGrid()
    for placement in pm.placements.values():
        grid.add_region(placement.sheet, placement.rect())
    for addr, text in pm.labels:
        grid.set(addr, LiteralText(text))

    written: set[tuple[str, int, int]] = set()
    for eq, covered in zip(checked.program.equations, checked.coverage_sets):
        if covered is None:
            raise CodegenError("Unexpanded", f"equation for {eq.table!r} has unbound dimensions")
        decl = checked.symbols.tables[eq.table]
        specs = eq.indices if decl.dims else ()
        for tup in sorted(covered):
            env: Env = {}
            for spec, value in zip(specs, tup):
                if isinstance(spec, (ast.VarIndex, ast.GuardIndex)):
                    env[spec.name] = value
            target = pm.addr_of(eq.table, tup)
            key = (target.sheet, target.row, target.col)
            if key in written:
                raise CodegenError("DoubleWrite", f"cell {target} written twice")
            written.add(key)
            rewritten = rewrite(eq.rhs, env, checked, pm)
            if isinstance(rewritten, ast.Num):
                grid.set(target, LiteralNumber(rewritten.value))
            elif isinstance(rewritten, ast.Str):
                grid.set(target, LiteralText(rewritten.value))
            else:
                grid.set(target, Formula(render_expr(rewritten, formula=True, sheet=target.sheet), decl.elem_type))

    # Dropdown tables: validation on every cell, the first option as the
    # value of any cell no equation wrote.
    for placement in pm.placements.values():
        if placement.options is None:
            continue
        r1, c1, r2, c2 = placement.rect()
        for row in range(r1, r2 + 1):
            for col in range(c1, c2 + 1):
                addr = CellAddr(placement.sheet, row, col)
                grid.set_validation(addr, placement.options)
                if (placement.sheet, row, col) not in written:
                    grid.set(addr, LiteralText(placement.options[0]))
    return grid


def fold_constants(expr: ast.Expr, checked: CheckedProgram, env: Env | None = None) -> ast.Expr:
    """Evaluate arithmetic over literals; replace constants and upb/lwb."""
    return fold(expr, checked.symbols.const_values, checked.symbols.type_bounds, env)


def rewrite(expr: ast.Expr, env: Env, checked: CheckedProgram, pm: PlacementMap) -> ast.Expr:
    """Rewrite one right-hand side under concrete index-variable bindings."""

    def go(e: ast.Expr) -> ast.Expr:
        if isinstance(e, ast.TableRef):
            return _rewrite_table_ref(e, env, checked, pm, go)
        if isinstance(e, ast.Neg):
            operand = go(e.operand)
            if isinstance(operand, ast.Num):
                return ast.Num(-operand.value)
            return ast.Neg(operand)
        if isinstance(e, ast.BinOp):
            folded = fold_constants(ast.BinOp(e.op, go(e.left), go(e.right)), checked, env)
            return folded
        if isinstance(e, ast.Call):
            return ast.Call(e.name, tuple(go(a) for a in e.args))
        return fold_constants(e, checked, env)

    return go(expr)


def rewrite_reference(
    ref: ast.TableRef,
    env: Env,
    checked: CheckedProgram,
    pm: PlacementMap,
    sheet: str | None = None,
) -> str:
    """Render one table reference as formula text (cells or an OFFSET form)."""

    def go(e: ast.Expr) -> ast.Expr:
        return rewrite(e, env, checked, pm)

    return render_expr(_rewrite_table_ref(ref, env, checked, pm, go), formula=True, sheet=sheet)


def _rewrite_table_ref(
    ref: ast.TableRef,
    env: Env,
    checked: CheckedProgram,
    pm: PlacementMap,
    go,
) -> ast.Expr:
    placement = pm.placements.get(ref.table)
    if placement is None:
        raise CodegenError("Unplaced", f"table {ref.table!r} has no placement")

    indices = ref.indices
    if not placement.sizes and indices:  # zero-dim written as name[1]
        indices = ()

    # Per dimension: (offset_expr, extent_expr) in element units, where a
    # folded Num offset means the position is known at compile time.
    dims: list[tuple[ast.Expr, ast.Expr]] = []
    runtime = False
    for pos, index in enumerate(indices):
        lwb = placement.lwbs[pos]
        size = placement.sizes[pos]
        if isinstance(index, ast.AllIndex):
            dims.append((ast.Num(0.0), ast.Num(float(size))))
            continue
        if isinstance(index, ast.RangeIndex):
            lo = go(index.lo)
            hi = go(index.hi)
            _check_static_index(ref, lo, lwb, size)
            _check_static_index(ref, hi, lwb, size)
            if isinstance(lo, ast.Num) and isinstance(hi, ast.Num) and hi.value < lo.value:
                raise CodegenError(INDEX_OUT_OF_BOUNDS, f"empty range in reference to {ref.table!r}")
            dims.append((_minus(lo, lwb), _plus1(_sub_expr(hi, lo))))
            if not (isinstance(lo, ast.Num) and isinstance(hi, ast.Num)):
                runtime = True
            continue
        value = go(index.expr)
        _check_static_index(ref, value, lwb, size)
        dims.append((_minus(value, lwb), ast.Num(1.0)))
        if not isinstance(value, ast.Num):
            runtime = True

    row_off, col_off, height, width = _oriented(placement, dims)
    anchor = ast.CellRef(placement.sheet, placement.anchor_col, placement.anchor_row)

    if not runtime:
        r1 = placement.anchor_row + int(as_number(row_off) or 0)
        c1 = placement.anchor_col + int(as_number(col_off) or 0)
        h = int(as_number(height) or 1)
        w = int(as_number(width) or 1)
        start = ast.CellRef(placement.sheet, c1, r1)
        if h == 1 and w == 1:
            return start
        return ast.CellRange(start, ast.CellRef(placement.sheet, c1 + w - 1, r1 + h - 1))

    args: list[ast.Expr] = [anchor, row_off, col_off]
    if as_number(height) != 1.0 or as_number(width) != 1.0:
        args += [height, width]
    return ast.Call("offset", tuple(args))


def _oriented(
    placement: Placement, dims: list[tuple[ast.Expr, ast.Expr]]
) -> tuple[ast.Expr, ast.Expr, ast.Expr, ast.Expr]:
    zero, one = ast.Num(0.0), ast.Num(1.0)
    if not dims:
        return zero, zero, one, one
    if placement.orientation == "y":
        return dims[0][0], zero, dims[0][1], one
    if placement.orientation == "x":
        return zero, dims[0][0], one, dims[0][1]
    return dims[0][0], dims[1][0], dims[0][1], dims[1][1]


def _check_static_index(ref: ast.TableRef, value: ast.Expr, lwb: int, size: int) -> None:
    number = as_number(value)
    if number is None:
        return
    if number != int(number):
        raise CodegenError(INDEX_OUT_OF_BOUNDS, f"non-integer index {number} in reference to {ref.table!r}")
    if not lwb <= int(number) <= lwb + size - 1:
        raise CodegenError(
            INDEX_OUT_OF_BOUNDS,
            f"index {int(number)} outside {lwb}:{lwb + size - 1} in reference to {ref.table!r}",
        )


def _minus(expr: ast.Expr, k: int) -> ast.Expr:
    if isinstance(expr, ast.Num):
        return ast.Num(expr.value - k)
    if k == 0:
        return expr
    return ast.BinOp("-", expr, ast.Num(float(k)))


def _sub_expr(a: ast.Expr, b: ast.Expr) -> ast.Expr:
    if isinstance(a, ast.Num) and isinstance(b, ast.Num):
        return ast.Num(a.value - b.value)
    return ast.BinOp("-", a, b)


def _plus1(expr: ast.Expr) -> ast.Expr:
    if isinstance(expr, ast.Num):
        return ast.Num(expr.value + 1)
    return ast.BinOp("+", expr, ast.Num(1.0))
