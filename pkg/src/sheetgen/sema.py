"""Name resolution, type and dimension checking, and coverage analysis.

check() resolves every name, applies the element-type rules, expands
each equation's left-hand side into the concrete index tuples it covers,
and rejects programs where two equations write the same table element.
Uncovered elements are legal and compile to blank cells.

Table reads are typed `general`: a cell's content is dynamic, so the
declared element type constrains what may be assigned (text into a number
table is an error) and what literal text may appear in arithmetic, not
what a reference may evaluate to.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import ast
from .errors import (
    ARITY_MISMATCH,
    INDEX_OUT_OF_BOUNDS,
    NON_CONSTANT_GUARD,
    OVERLAPPING_EQUATIONS,
    TYPE_MISMATCH,
    UNBOUND_HOLE,
    UNKNOWN_NAME,
    SemaError,
    SemaFailure,
)
from .fold import as_number, fold, is_static

DUPLICATE_NAME = "DuplicateName"
BAD_BOUNDS = "BadBounds"

# Spreadsheet functions the backend can compile and the evaluator can run.
BUILTIN_ARITY: dict[str, tuple[int, int | None]] = {
    "if": (3, 3),
    "isna": (1, 1),
    "match": (3, 3),
    "and": (1, None),
    "offset": (3, 5),
    "count": (1, None),
    "sum": (1, None),
    "len": (1, 1),
    "floor": (2, 2),
    "rand": (0, 0),
}

STATIC_INDEX = "StaticIndex"
STATIC_RANGE = "StaticRange"
RUNTIME_INDEX = "RuntimeIndex"
RUNTIME_RANGE = "RuntimeRange"
ALL = "All"

NUMBER = "number"
TEXT = "text"
LOGICAL = "logical"
GENERAL = "general"


@dataclass
class Symbols:
    constants: dict[str, ast.ConstantDecl] = field(default_factory=dict)
    types: dict[str, ast.IndexTypeDecl] = field(default_factory=dict)
    tables: dict[str, ast.TableDecl] = field(default_factory=dict)
    const_values: dict[str, float | str] = field(default_factory=dict)  # bound constants
    type_bounds: dict[str, tuple[int, int]] = field(default_factory=dict)  # bound types


@dataclass
class CheckedProgram:
    program: ast.Program
    symbols: Symbols
    # Parallel to program.equations; None when the table's dims are unbound holes.
    coverage_sets: list[frozenset[tuple[int, ...]] | None]

    def table_bounds(self, table: str) -> list[tuple[int, int]]:
        decl = self.symbols.tables[table]
        return [self.symbols.type_bounds[d] for d in decl.dims]


def check(program: ast.Program, require_closed: bool = False) -> CheckedProgram:
    errors: list[SemaError] = []
    symbols = _build_symbols(program, errors)

    if require_closed:
        for const in symbols.constants.values():
            if const.name not in symbols.const_values:
                errors.append(
                    SemaError(UNBOUND_HOLE, f"constant {const.name!r} has no value", const.line, const.col)
                )
        for decl in symbols.types.values():
            if decl.lo is None:
                errors.append(
                    SemaError(UNBOUND_HOLE, f"type {decl.name!r} has no bounds", decl.line, decl.col)
                )

    for table in program.tables:
        for dim in table.dims:
            if dim not in symbols.types:
                errors.append(
                    SemaError(UNKNOWN_NAME, f"unknown index type {dim!r} in table {table.name!r}", table.line, table.col)
                )

    coverage_sets: list[frozenset[tuple[int, ...]] | None] = []
    for eq in program.equations:
        coverage_sets.append(_check_equation(eq, symbols, errors))

    _check_overlap(program, symbols, coverage_sets, errors)

    if errors:
        raise SemaFailure(errors)
    return CheckedProgram(program, symbols, coverage_sets)


def _build_symbols(program: ast.Program, errors: list[SemaError]) -> Symbols:
    # A hole declaration (`constant c.` / `type t.`) may be paired with one
    # binding declaration of the same name: that is how an instantiation
    # prelude closes a template's holes. Two bindings, or two holes, clash.
    symbols = Symbols()
    for const in program.constants:
        previous = symbols.constants.get(const.name)
        if previous is not None and (previous.value is None) == (const.value is None):
            errors.append(SemaError(DUPLICATE_NAME, f"constant {const.name!r} declared twice", const.line, const.col))
            continue
        if previous is None or const.value is not None:
            symbols.constants[const.name] = const
        if const.value is not None:
            symbols.const_values[const.name] = const.value
    for decl in program.index_types:
        previous = symbols.types.get(decl.name)
        if previous is not None and (previous.lo is None) == (decl.lo is None):
            errors.append(SemaError(DUPLICATE_NAME, f"type {decl.name!r} declared twice", decl.line, decl.col))
            continue
        if previous is None or decl.lo is not None:
            symbols.types[decl.name] = decl
        if decl.lo is not None and decl.hi is not None:
            bounds = _resolve_bounds(decl, symbols, errors)
            if bounds is not None:
                symbols.type_bounds[decl.name] = bounds
    for table in program.tables:
        if table.name in symbols.tables:
            errors.append(SemaError(DUPLICATE_NAME, f"table {table.name!r} declared twice", table.line, table.col))
            continue
        symbols.tables[table.name] = table
    return symbols


def _resolve_bounds(
    decl: ast.IndexTypeDecl, symbols: Symbols, errors: list[SemaError]
) -> tuple[int, int] | None:
    values = []
    for which, expr in (("lower", decl.lo), ("upper", decl.hi)):
        folded = fold(expr, symbols.const_values, {})
        value = as_number(folded)
        if value is None or value != int(value):
            errors.append(
                SemaError(
                    BAD_BOUNDS,
                    f"{which} bound of type {decl.name!r} must be an integer literal or bound integer constant",
                    decl.line,
                    decl.col,
                )
            )
            return None
        values.append(int(value))
    lo, hi = values
    if lo > hi:
        errors.append(SemaError(BAD_BOUNDS, f"type {decl.name!r} has reversed bounds {lo}:{hi}", decl.line, decl.col))
        return None
    return lo, hi


def _normalized_indices(
    eq: ast.Equation, decl: ast.TableDecl
) -> tuple[ast.IndexSpec, ...] | None:
    """Zero-dim tables accept an empty index list or the literal index 1."""
    if not decl.dims:
        if not eq.indices or eq.indices == (ast.LitIndex(1),):
            return ()
        return None
    if len(eq.indices) == len(decl.dims):
        return eq.indices
    return None


def _check_equation(
    eq: ast.Equation, symbols: Symbols, errors: list[SemaError]
) -> frozenset[tuple[int, ...]] | None:
    decl = symbols.tables.get(eq.table)
    if decl is None:
        errors.append(SemaError(UNKNOWN_NAME, f"unknown table {eq.table!r}", eq.line, eq.col))
        return None
    indices = _normalized_indices(eq, decl)
    if indices is None:
        errors.append(
            SemaError(
                ARITY_MISMATCH,
                f"table {eq.table!r} has {len(decl.dims)} dimension(s), equation indexes {len(eq.indices)}",
                eq.line,
                eq.col,
            )
        )
        return None

    env_vars: set[str] = set()
    for spec in indices:
        if isinstance(spec, (ast.VarIndex, ast.GuardIndex)):
            if spec.name in env_vars:
                errors.append(
                    SemaError(
                        DUPLICATE_NAME,
                        f"index variable {spec.name!r} used for two dimensions of {eq.table!r}",
                        eq.line,
                        eq.col,
                    )
                )
                return None
            env_vars.add(spec.name)
    for spec in indices:
        if isinstance(spec, ast.GuardIndex):
            if not is_static(spec.bound):
                errors.append(
                    SemaError(
                        NON_CONSTANT_GUARD,
                        f"guard on {spec.name!r} must be a compile-time constant expression",
                        eq.line,
                        eq.col,
                    )
                )

    before = len(errors)
    _check_expr(eq.rhs, env_vars, symbols, errors, eq)
    rhs_type = _expr_type(eq.rhs, env_vars, symbols)
    if rhs_type == TEXT and decl.elem_type == "number":
        errors.append(
            SemaError(
                TYPE_MISMATCH,
                f"text value assigned to number table {eq.table!r}",
                eq.line,
                eq.col,
            )
        )
    if len(errors) > before:
        return None

    if not all(d in symbols.type_bounds for d in decl.dims):
        return None  # dims are holes; coverage comes after binding
    try:
        return frozenset(coverage_of(indices, [symbols.type_bounds[d] for d in decl.dims], symbols, eq))
    except SemaFailure as fail:
        errors.extend(fail.errors)
        return None


def coverage(eq: ast.Equation, checked: CheckedProgram) -> frozenset[tuple[int, ...]]:
    """The concrete index tuples an equation defines."""
    decl = checked.symbols.tables[eq.table]
    indices = _normalized_indices(eq, decl)
    if indices is None:
        raise SemaFailure([SemaError(ARITY_MISMATCH, f"bad arity for table {eq.table!r}", eq.line, eq.col)])
    return frozenset(coverage_of(indices, checked.table_bounds(eq.table), checked.symbols, eq))


def coverage_of(
    indices: tuple[ast.IndexSpec, ...],
    bounds: list[tuple[int, int]],
    symbols: Symbols,
    eq: ast.Equation,
) -> set[tuple[int, ...]]:
    per_dim: list[list[int]] = []
    for spec, (lo, hi) in zip(indices, bounds):
        if isinstance(spec, ast.LitIndex):
            if not lo <= spec.value <= hi:
                raise SemaFailure(
                    [
                        SemaError(
                            INDEX_OUT_OF_BOUNDS,
                            f"index {spec.value} outside {lo}:{hi} in equation for {eq.table!r}",
                            eq.line,
                            eq.col,
                        )
                    ]
                )
            per_dim.append([spec.value])
        elif isinstance(spec, ast.VarIndex):
            per_dim.append(list(range(lo, hi + 1)))
        else:
            folded = fold(spec.bound, symbols.const_values, symbols.type_bounds)
            value = as_number(folded)
            if value is None:
                raise SemaFailure(
                    [
                        SemaError(
                            NON_CONSTANT_GUARD,
                            f"guard on {spec.name!r} does not fold to a number",
                            eq.line,
                            eq.col,
                        )
                    ]
                )
            per_dim.append([k for k in range(lo, hi + 1) if _compare(spec.op, k, value)])
    return set(itertools.product(*per_dim)) if per_dim else {()}


def _compare(op: str, a: float, b: float) -> bool:
    if op == ">":
        return a > b
    if op == "<":
        return a < b
    if op == ">=":
        return a >= b
    if op == "<=":
        return a <= b
    return a != b  # <>


def _check_overlap(
    program: ast.Program,
    symbols: Symbols,
    coverage_sets: list[frozenset[tuple[int, ...]] | None],
    errors: list[SemaError],
) -> None:
    claimed: dict[str, dict[tuple[int, ...], ast.Equation]] = {}
    for eq, covered in zip(program.equations, coverage_sets):
        if covered is None:
            continue
        table_claims = claimed.setdefault(eq.table, {})
        for tup in covered:
            other = table_claims.get(tup)
            if other is not None:
                where = f"[{', '.join(str(k) for k in tup)}]" if tup else ""
                errors.append(
                    SemaError(
                        OVERLAPPING_EQUATIONS,
                        f"{eq.table}{where} is defined by equations at line {other.line} and line {eq.line}",
                        eq.line,
                        eq.col,
                    )
                )
                break
            table_claims[tup] = eq


# --------------------------------------------------------------------------
# Expression checking

def _check_expr(
    expr: ast.Expr,
    env_vars: set[str],
    symbols: Symbols,
    errors: list[SemaError],
    eq: ast.Equation,
) -> None:
    def err(kind: str, message: str) -> None:
        errors.append(SemaError(kind, message, eq.line, eq.col))

    def go(e: ast.Expr) -> None:
        if isinstance(e, (ast.Num, ast.Str)):
            return
        if isinstance(e, ast.Name):
            if e.name not in env_vars and e.name not in symbols.constants:
                err(UNKNOWN_NAME, f"unknown name {e.name!r}")
            return
        if isinstance(e, ast.Bound):
            if e.type_name not in symbols.types:
                err(UNKNOWN_NAME, f"unknown index type {e.type_name!r}")
            return
        if isinstance(e, ast.Neg):
            go(e.operand)
            if _expr_type(e.operand, env_vars, symbols) == TEXT:
                err(TYPE_MISMATCH, "cannot negate text")
            return
        if isinstance(e, ast.BinOp):
            go(e.left)
            go(e.right)
            if e.op in "+-*/":
                for side in (e.left, e.right):
                    if _expr_type(side, env_vars, symbols) == TEXT:
                        err(TYPE_MISMATCH, f"text operand in arithmetic {e.op!r}")
            return
        if isinstance(e, ast.Call):
            arity = BUILTIN_ARITY.get(e.name)
            if arity is None:
                err(UNKNOWN_NAME, f"unknown function {e.name!r}")
            else:
                low, high = arity
                if len(e.args) < low or (high is not None and len(e.args) > high):
                    expected = str(low) if high == low else f"{low}..{high or 'n'}"
                    err(ARITY_MISMATCH, f"{e.name}() takes {expected} argument(s), got {len(e.args)}")
            for arg in e.args:
                go(arg)
            if e.name == "if" and e.args and _expr_type(e.args[0], env_vars, symbols) == TEXT:
                err(TYPE_MISMATCH, "if() condition cannot be text")
            return
        if isinstance(e, ast.TableRef):
            _check_table_ref(e)
            return
        raise TypeError(f"unexpected expression {e!r}")

    def _check_table_ref(ref: ast.TableRef) -> None:
        decl = symbols.tables.get(ref.table)
        if decl is None:
            err(UNKNOWN_NAME, f"unknown table {ref.table!r}")
            return
        indices = ref.indices
        if not decl.dims:
            # Zero-dim tables are written name[1]; normalize silently.
            if indices and indices != (ast.ScalarIndex(ast.Num(1.0)),):
                err(ARITY_MISMATCH, f"zero-dimension table {ref.table!r} is referenced as {ref.table}[1]")
                return
            indices = ()
        elif len(indices) != len(decl.dims):
            err(
                ARITY_MISMATCH,
                f"table {ref.table!r} has {len(decl.dims)} dimension(s), reference gives {len(indices)}",
            )
            return
        for dim_name, index in zip(decl.dims, indices):
            parts: list[ast.Expr] = []
            if isinstance(index, ast.ScalarIndex):
                parts = [index.expr]
            elif isinstance(index, ast.RangeIndex):
                parts = [index.lo, index.hi]
            for part in parts:
                go(part)
                if _expr_type(part, env_vars, symbols) == TEXT:
                    err(TYPE_MISMATCH, f"text used as an index of {ref.table!r}")
                    continue
                _check_static_bounds(part, dim_name)

    def _check_static_bounds(part: ast.Expr, dim_name: str) -> None:
        # Bounds of var-free static indices are checkable here; indices that
        # use equation variables are checked during expansion.
        if not is_static(part) or dim_name not in symbols.type_bounds:
            return
        if any(isinstance(spec, ast.Name) and spec.name in env_vars for spec in _names(part)):
            return
        folded = fold(part, symbols.const_values, symbols.type_bounds)
        value = as_number(folded)
        if value is None:
            return  # unbound constant; closure is checked separately
        lo, hi = symbols.type_bounds[dim_name]
        if not lo <= value <= hi:
            err(INDEX_OUT_OF_BOUNDS, f"index {int(value)} outside {lo}:{hi} ({dim_name})")

    go(expr)


def _names(expr: ast.Expr) -> list[ast.Name]:
    found: list[ast.Name] = []

    def walk(e: ast.Expr) -> None:
        if isinstance(e, ast.Name):
            found.append(e)
        elif isinstance(e, ast.Neg):
            walk(e.operand)
        elif isinstance(e, ast.BinOp):
            walk(e.left)
            walk(e.right)
        elif isinstance(e, ast.Call):
            for a in e.args:
                walk(a)

    walk(expr)
    return found


def _expr_type(expr: ast.Expr, env_vars: set[str], symbols: Symbols) -> str:
    if isinstance(expr, ast.Num):
        return NUMBER
    if isinstance(expr, ast.Str):
        return TEXT
    if isinstance(expr, ast.Name):
        if expr.name in env_vars:
            return NUMBER
        value = symbols.const_values.get(expr.name)
        if value is None:
            return GENERAL
        return TEXT if isinstance(value, str) else NUMBER
    if isinstance(expr, (ast.Bound, ast.Neg)):
        return NUMBER
    if isinstance(expr, ast.BinOp):
        if expr.op in "+-*/":
            return NUMBER
        if expr.op == "&":
            return TEXT
        return LOGICAL
    if isinstance(expr, ast.Call):
        if expr.name == "if":
            if len(expr.args) == 3:
                a = _expr_type(expr.args[1], env_vars, symbols)
                b = _expr_type(expr.args[2], env_vars, symbols)
                return a if a == b else GENERAL
            return GENERAL
        if expr.name in ("isna", "and"):
            return LOGICAL
        if expr.name == "offset":
            return GENERAL
        return NUMBER
    if isinstance(expr, ast.TableRef):
        return GENERAL
    return GENERAL


# --------------------------------------------------------------------------
# Index classification

def classify_index(index: ast.IndexExpr) -> str:
    """How a table-reference index compiles: fixed cells or an OFFSET form."""
    if isinstance(index, ast.AllIndex):
        return ALL
    if isinstance(index, ast.RangeIndex):
        return STATIC_RANGE if is_static(index.lo) and is_static(index.hi) else RUNTIME_RANGE
    return STATIC_INDEX if is_static(index.expr) else RUNTIME_INDEX
