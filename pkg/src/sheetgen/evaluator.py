"""Deterministic evaluation of formula grids.

The static dependency graph is built first: direct cell references and
ranges contribute their cells, and an OFFSET contributes every populated
cell of the placed rectangle containing its anchor (a conservative bound,
since the actual target depends on runtime values). Cells on static
dependency cycles evaluate to the CYCLE error; the rest are evaluated
exactly once in a deterministic topological order, which also fixes the
stream of RAND() draws for a given seed.
"""

from __future__ import annotations

import bisect
import math
import random
from dataclasses import dataclass, field

from . import ast
from .cells import MAX_COL, MAX_ROW, CellAddr
from .errors import SheetgenError
from .grid import Formula, FormulaGrid, LiteralNumber, LiteralText, Rect
from .parser import parse_formula
from .values import (
    CYCLE,
    DIV0,
    NA,
    NAME,
    REF,
    VALUE,
    CellError,
    Value,
    compare,
    is_error,
    logical,
    to_logical,
    to_number,
    to_text,
    wildcard_match,
)


class EvalError(SheetgenError):
    pass


@dataclass
class EvalConfig:
    seed: int = 0
    overrides: list[tuple[CellAddr, Value]] = field(default_factory=list)


@dataclass(frozen=True)
class RangeRef:
    sheet: str
    row1: int
    col1: int
    row2: int
    col2: int

    @property
    def height(self) -> int:
        return self.row2 - self.row1 + 1

    @property
    def width(self) -> int:
        return self.col2 - self.col1 + 1


ValueGrid = dict[str, dict[tuple[int, int], Value]]

Key = tuple[str, int, int]

# An argument to a builtin is a scalar value, or a list of cell values when
# the call site passed a range.
Arg = Value | list[Value]


def builtin(name: str, args: list[Arg]) -> Value:
    """Value-level dispatch over the closed function set.

    OFFSET and RAND need a grid and a generator and live in the evaluator;
    IF here is the eager value-level form (the evaluator's IF is lazy).
    """
    name = name.lower()
    if name == "if":
        if len(args) != 3:
            return CellError(VALUE, "if() takes 3 arguments")
        cond = to_logical(_scalar(args[0]))
        if is_error(cond):
            return cond
        return _scalar(args[1] if cond else args[2])
    if name == "isna":
        if len(args) != 1:
            return CellError(VALUE, "isna() takes 1 argument")
        v = _scalar(args[0])
        return logical(isinstance(v, CellError) and v.kind == NA)
    if name == "and":
        result = True
        for arg in args:
            v = to_logical(_scalar(arg))
            if is_error(v):
                return v
            result = result and v
        return logical(result)
    if name == "match":
        return _builtin_match(args)
    if name == "count":
        return float(sum(1 for v, _ in _iter_args(args) if isinstance(v, float)))
    if name == "sum":
        total = 0.0
        for v, from_range in _iter_args(args):
            if isinstance(v, CellError):
                return v
            if isinstance(v, str):
                if from_range:
                    continue  # text inside a range is ignored
                return CellError(VALUE, "text in sum()")
            if v is not None:
                total += v
        return total
    if name == "len":
        if len(args) != 1:
            return CellError(VALUE, "len() takes 1 argument")
        v = to_text(_scalar(args[0]))
        return v if is_error(v) else float(len(v))
    if name == "floor":
        if len(args) != 2:
            return CellError(VALUE, "floor() takes 2 arguments")
        x = to_number(_scalar(args[0]))
        s = to_number(_scalar(args[1]))
        if is_error(x):
            return x
        if is_error(s):
            return s
        if s == 0:
            return CellError(DIV0)
        # Largest multiple of s that is <= x; the multiples of s and -s
        # coincide, so the sign of s does not matter.
        step = abs(s)
        return math.floor(x / step) * step
    return CellError(NAME, f"unknown function {name}")


def _scalar(arg: Arg) -> Value:
    if isinstance(arg, list):
        if len(arg) == 1:
            return arg[0]
        return CellError(VALUE, "a range where a single value is needed")
    return arg


def _iter_args(args: list[Arg]):
    for arg in args:
        if isinstance(arg, list):
            for v in arg:
                yield v, True
        else:
            yield arg, False


def _builtin_match(args: list[Arg]) -> Value:
    if len(args) != 3:
        return CellError(VALUE, "match() takes 3 arguments")
    needle = _scalar(args[0])
    if is_error(needle):
        return needle
    match_type = to_number(_scalar(args[2]))
    if is_error(match_type):
        return match_type
    if match_type != 0:
        return CellError(VALUE, "only match type 0 is supported")
    haystack = args[1]
    if not isinstance(haystack, list):
        return CellError(VALUE, "match() needs a range")
    if isinstance(needle, str):
        if needle == "":
            return CellError(NA, "empty pattern")
        for pos, cell in enumerate(haystack, 1):
            if isinstance(cell, str) and wildcard_match(needle, cell):
                return float(pos)
        return CellError(NA)
    for pos, cell in enumerate(haystack, 1):
        if isinstance(cell, float) and cell == needle:
            return float(pos)
    return CellError(NA)


def evaluate(grid: FormulaGrid, cfg: EvalConfig, tie_break: str = "forward") -> ValueGrid:
    """Evaluate every populated cell. tie_break="reverse" flips the order in
    which independent cells are visited (a testing hook for order soundness).
    """
    return _Evaluator(grid, cfg, tie_break).run()


class _Evaluator:
    def __init__(self, grid: FormulaGrid, cfg: EvalConfig, tie_break: str):
        self.grid = grid
        self.cfg = cfg
        self.reverse = tie_break == "reverse"
        self.rng = random.Random(cfg.seed)
        self.values: dict[Key, Value] = {}
        self.formulas: dict[Key, ast.Expr] = {}
        self.conservative: set[Key] = set()  # OFFSET users lacking region info
        self.stack: list[Key] = []

        self.overrides: dict[Key, Value] = {
            (addr.sheet, addr.row, addr.col): value for addr, value in cfg.overrides
        }

    # -- plumbing ------------------------------------------------------------

    def content(self, key: Key):
        sheet, row, col = key
        return self.grid.sheets.get(sheet, {}).get((row, col))

    def populated_keys(self) -> list[Key]:
        keys = {
            (sheet, row, col)
            for sheet, cells in self.grid.sheets.items()
            for (row, col) in cells
        }
        keys.update(self.overrides)
        return sorted(keys)

    def run(self) -> ValueGrid:
        formula_keys: list[Key] = []
        for key in self.populated_keys():
            if key in self.overrides:
                self.values[key] = self.overrides[key]
                continue
            content = self.content(key)
            if isinstance(content, LiteralNumber):
                self.values[key] = content.value
            elif isinstance(content, LiteralText):
                self.values[key] = content.value
            elif isinstance(content, Formula):
                try:
                    self.formulas[key] = parse_formula(content.text)
                except SheetgenError as exc:
                    raise EvalError(f"cell {CellAddr(*key)}: bad formula: {exc}") from exc
                formula_keys.append(key)

        deps = {key: self._static_deps(key) for key in formula_keys}
        for key in _cycle_members(deps):
            note = "conservative" if key in self.conservative else ""
            self.values[key] = CellError(CYCLE, note)

        for key in _topo_order(deps, set(self.values), self.reverse):
            if key not in self.values:
                self._evaluate_cell(key)
        # Anything left (unreached because a dependency cycle upstream kept
        # its indegree positive) still gets a defined value.
        for key in formula_keys:
            if key not in self.values:
                self._evaluate_cell(key)

        out: ValueGrid = {}
        for (sheet, row, col), value in self.values.items():
            out.setdefault(sheet, {})[(row, col)] = value
        return out

    # -- static dependencies ---------------------------------------------

    def _static_deps(self, key: Key) -> set[Key]:
        sheet = key[0]
        deps: set[Key] = set()

        def region_cells(anchor_sheet: str, row: int, col: int) -> None:
            rect = self._anchor_region(anchor_sheet, row, col)
            if rect is None:
                self.conservative.add(key)
                rect = self._sheet_extent(anchor_sheet)
            if rect is None:
                deps.add((anchor_sheet, row, col))
                return
            r1, c1, r2, c2 = rect
            for (r, c) in self.grid.sheets.get(anchor_sheet, {}):
                if r1 <= r <= r2 and c1 <= c <= c2:
                    deps.add((anchor_sheet, r, c))

        def walk(e: ast.Expr) -> None:
            if isinstance(e, ast.CellRef):
                deps.add((e.sheet or sheet, e.row, e.col))
            elif isinstance(e, ast.CellRange):
                s = e.start.sheet or sheet
                r1, r2 = sorted((e.start.row, e.end.row))
                c1, c2 = sorted((e.start.col, e.end.col))
                for (r, c) in self.grid.sheets.get(s, {}):
                    if r1 <= r <= r2 and c1 <= c <= c2:
                        deps.add((s, r, c))
            elif isinstance(e, ast.Neg):
                walk(e.operand)
            elif isinstance(e, ast.BinOp):
                walk(e.left)
                walk(e.right)
            elif isinstance(e, ast.Call):
                for arg in e.args:
                    walk(arg)
                if e.name == "offset" and e.args:
                    anchor = e.args[0]
                    if isinstance(anchor, ast.CellRef):
                        region_cells(anchor.sheet or sheet, anchor.row, anchor.col)
                    elif isinstance(anchor, ast.CellRange):
                        region_cells(anchor.start.sheet or sheet, anchor.start.row, anchor.start.col)

        walk(self.formulas[key])
        # A self-dependency stays in: it is a one-cell static cycle.
        return {d for d in deps if d in self.formulas or d in self.values or self.content(d) is not None}

    def _anchor_region(self, sheet: str, row: int, col: int) -> Rect | None:
        best: Rect | None = None
        for rect in self.grid.regions.get(sheet, []):
            r1, c1, r2, c2 = rect
            if r1 <= row <= r2 and c1 <= col <= c2:
                if best is None or (r2 - r1) * (c2 - c1) < (best[2] - best[0]) * (best[3] - best[1]):
                    best = rect
        return best

    def _sheet_extent(self, sheet: str) -> Rect | None:
        cells = self.grid.sheets.get(sheet)
        if not cells:
            return None
        rows = [r for r, _ in cells]
        cols = [c for _, c in cells]
        return min(rows), min(cols), max(rows), max(cols)

    # -- evaluation --------------------------------------------------------

    def _evaluate_cell(self, key: Key) -> Value:
        if key in self.values:
            return self.values[key]
        if key in self.stack:
            return CellError(CYCLE, "runtime")
        self.stack.append(key)
        try:
            value = self._eval_scalar(self.formulas[key], key[0])
        finally:
            self.stack.pop()
        self.values[key] = value
        return value

    def read(self, key: Key) -> Value:
        if key in self.values:
            return self.values[key]
        content = self.content(key)
        if isinstance(content, LiteralNumber):
            return content.value
        if isinstance(content, LiteralText):
            return content.value
        if isinstance(content, Formula):
            return self._evaluate_cell(key)
        return None

    def _eval_scalar(self, e: ast.Expr, sheet: str) -> Value:
        v = self._eval(e, sheet)
        if isinstance(v, RangeRef):
            return self._deref(v)
        return v

    def _deref(self, ref: RangeRef) -> Value:
        if ref.height == 1 and ref.width == 1:
            return self.read((ref.sheet, ref.row1, ref.col1))
        return CellError(VALUE, "a range where a single value is needed")

    def _eval(self, e: ast.Expr, sheet: str) -> Value | RangeRef:
        if isinstance(e, ast.Num):
            return e.value
        if isinstance(e, ast.Str):
            return e.value
        if isinstance(e, ast.CellRef):
            return self.read((e.sheet or sheet, e.row, e.col))
        if isinstance(e, ast.CellRange):
            s = e.start.sheet or sheet
            r1, r2 = sorted((e.start.row, e.end.row))
            c1, c2 = sorted((e.start.col, e.end.col))
            return RangeRef(s, r1, c1, r2, c2)
        if isinstance(e, ast.Name):
            return CellError(NAME, f"unknown name {e.name!r}")
        if isinstance(e, ast.Neg):
            v = to_number(self._eval_scalar(e.operand, sheet))
            return v if is_error(v) else -v
        if isinstance(e, ast.BinOp):
            return self._binop(e, sheet)
        if isinstance(e, ast.Call):
            return self._call(e, sheet)
        return CellError(NAME, "unsupported expression")

    def _binop(self, e: ast.BinOp, sheet: str) -> Value:
        if e.op in ("=", "<>", "<", ">", "<=", ">="):
            return compare(e.op, self._eval_scalar(e.left, sheet), self._eval_scalar(e.right, sheet))
        left = self._eval_scalar(e.left, sheet)
        right = self._eval_scalar(e.right, sheet)
        if e.op == "&":
            a, b = to_text(left), to_text(right)
            if is_error(a):
                return a
            if is_error(b):
                return b
            return a + b
        a, b = to_number(left), to_number(right)
        if is_error(a):
            return a
        if is_error(b):
            return b
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if b == 0:
            return CellError(DIV0)
        return a / b

    # -- builtin functions ---------------------------------------------------

    def _call(self, e: ast.Call, sheet: str) -> Value | RangeRef:
        name = e.name
        if name == "if":
            # Lazy: only the taken branch is evaluated, so errors guarded
            # by the condition never fire.
            if len(e.args) != 3:
                return CellError(VALUE, "if() takes 3 arguments")
            cond = to_logical(self._eval_scalar(e.args[0], sheet))
            if is_error(cond):
                return cond
            return self._eval_scalar(e.args[1] if cond else e.args[2], sheet)
        if name == "rand":
            return self.rng.random()
        if name == "offset":
            return self._offset(e.args, sheet)
        args: list[Arg] = []
        for pos, arg in enumerate(e.args):
            # Reference arguments (cells, ranges, OFFSET results) pass as
            # cell lists, so a one-cell table still acts as a range.
            if isinstance(arg, (ast.CellRef, ast.CellRange)):
                v: Value | RangeRef = self._ref_arg(arg, sheet)
            else:
                v = self._eval(arg, sheet)
            if isinstance(v, RangeRef):
                if name == "match" and pos == 1 and v.height > 1 and v.width > 1:
                    return CellError(VALUE, "a one-dimensional range is needed")
                args.append(self._materialize(v))
            else:
                args.append(v)
        return builtin(name, args)

    def _materialize(self, ref: RangeRef) -> list[Value]:
        out: list[Value] = []
        for row in range(ref.row1, ref.row2 + 1):
            for col in range(ref.col1, ref.col2 + 1):
                out.append(self.read((ref.sheet, row, col)))
        return out

    def _ref_arg(self, e: ast.Expr, sheet: str) -> RangeRef | CellError:
        if isinstance(e, ast.CellRef):
            s = e.sheet or sheet
            return RangeRef(s, e.row, e.col, e.row, e.col)
        v = self._eval(e, sheet)
        if isinstance(v, RangeRef) or isinstance(v, CellError):
            return v
        return CellError(VALUE, "a cell or range reference is needed")

    def _offset(self, args: tuple[ast.Expr, ...], sheet: str) -> Value | RangeRef:
        if len(args) not in (3, 5):
            return CellError(VALUE, "offset() takes 3 or 5 arguments")
        base = self._ref_arg(args[0], sheet)
        if isinstance(base, CellError):
            return base
        rows = to_number(self._eval_scalar(args[1], sheet))
        cols = to_number(self._eval_scalar(args[2], sheet))
        if is_error(rows):
            return rows
        if is_error(cols):
            return cols
        height, width = float(base.height), float(base.width)
        if len(args) == 5:
            height = to_number(self._eval_scalar(args[3], sheet))
            width = to_number(self._eval_scalar(args[4], sheet))
            if is_error(height):
                return height
            if is_error(width):
                return width
        row1 = base.row1 + int(rows)
        col1 = base.col1 + int(cols)
        h, w = int(height), int(width)
        if h < 1 or w < 1:
            return CellError(REF, "empty offset extent")
        row2, col2 = row1 + h - 1, col1 + w - 1
        if row1 < 1 or col1 < 1 or row2 > MAX_ROW or col2 > MAX_COL:
            return CellError(REF, "offset target is outside the sheet")
        return RangeRef(base.sheet, row1, col1, row2, col2)


# --------------------------------------------------------------------------
# Graph utilities

def _cycle_members(deps: dict[Key, set[Key]]) -> set[Key]:
    """Keys on a static dependency cycle (members of a nontrivial SCC)."""
    index: dict[Key, int] = {}
    lowlink: dict[Key, int] = {}
    on_stack: set[Key] = set()
    stack: list[Key] = []
    members: set[Key] = set()
    counter = 0

    for start in deps:
        if start in index:
            continue
        work = [(start, iter(sorted(deps[start])))]
        index[start] = lowlink[start] = counter
        counter += 1
        stack.append(start)
        on_stack.add(start)
        while work:
            node, it = work[-1]
            advanced = False
            for child in it:
                if child not in deps:
                    continue
                if child not in index:
                    index[child] = lowlink[child] = counter
                    counter += 1
                    stack.append(child)
                    on_stack.add(child)
                    work.append((child, iter(sorted(deps[child]))))
                    advanced = True
                    break
                if child in on_stack:
                    lowlink[node] = min(lowlink[node], index[child])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
            if lowlink[node] == index[node]:
                component = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.append(member)
                    if member == node:
                        break
                if len(component) > 1 or node in deps[node]:
                    members.update(component)
    return members


def _topo_order(deps: dict[Key, set[Key]], resolved: set[Key], reverse: bool) -> list[Key]:
    """Deterministic topological order: ties broken by (sheet, row, col),
    or by the opposite order when reverse is set."""
    pending = {
        k: {d for d in v if d in deps and d not in resolved}
        for k, v in deps.items()
        if k not in resolved
    }
    dependents: dict[Key, set[Key]] = {}
    for key, kdeps in pending.items():
        for d in kdeps:
            dependents.setdefault(d, set()).add(key)

    ready = sorted(k for k, kdeps in pending.items() if not kdeps)
    order = []
    while ready:
        k = ready.pop() if reverse else ready.pop(0)
        order.append(k)
        for dependent in sorted(dependents.get(k, ())):
            remaining = pending[dependent]
            remaining.discard(k)
            if not remaining:
                bisect.insort(ready, dependent)
    return order
