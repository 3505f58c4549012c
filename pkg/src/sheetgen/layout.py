"""Assigns every table element an absolute sheet/cell address.

Grid layout: the row groups of a `layout(sheet, rows(...))` directive stack
vertically from row 1, items within a group run left to right from column
A, and a group's height is the height of its tallest item. A `heading`
group reserves one row and labels each table of the following group at
that table's anchor column. `place(...)` directives pin a table to an
absolute anchor instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import ast
from .cells import MAX_COL, MAX_ROW, CellAddr, parse_a1, valid_sheet_name
from .errors import INDEX_OUT_OF_BOUNDS, CodegenError, LayoutError
from .sema import CheckedProgram


@dataclass(frozen=True)
class Placement:
    table: str
    sheet: str
    anchor_row: int
    anchor_col: int
    orientation: str  # y | x | yx
    lwbs: tuple[int, ...]
    sizes: tuple[int, ...]
    options: tuple[str, ...] | None = None

    @property
    def height(self) -> int:
        return _extent(self.orientation, self.sizes)[0]

    @property
    def width(self) -> int:
        return _extent(self.orientation, self.sizes)[1]

    def rect(self) -> tuple[int, int, int, int]:
        """(row1, col1, row2, col2), inclusive."""
        return (
            self.anchor_row,
            self.anchor_col,
            self.anchor_row + self.height - 1,
            self.anchor_col + self.width - 1,
        )

    def addr(self, indices: tuple[int, ...]) -> CellAddr:
        for k, lwb, size in zip(indices, self.lwbs, self.sizes):
            if not lwb <= k <= lwb + size - 1:
                raise CodegenError(
                    INDEX_OUT_OF_BOUNDS,
                    f"{self.table}[{', '.join(map(str, indices))}] is outside the table's bounds",
                )
        if not indices:
            return CellAddr(self.sheet, self.anchor_row, self.anchor_col)
        if self.orientation == "y":
            return CellAddr(self.sheet, self.anchor_row + indices[0] - self.lwbs[0], self.anchor_col)
        if self.orientation == "x":
            return CellAddr(self.sheet, self.anchor_row, self.anchor_col + indices[0] - self.lwbs[0])
        return CellAddr(
            self.sheet,
            self.anchor_row + indices[0] - self.lwbs[0],
            self.anchor_col + indices[1] - self.lwbs[1],
        )


def _extent(orientation: str, sizes: tuple[int, ...]) -> tuple[int, int]:
    if not sizes:
        return 1, 1
    if orientation == "y":
        return sizes[0], 1
    if orientation == "x":
        return 1, sizes[0]
    return sizes[0], sizes[1]


@dataclass
class PlacementMap:
    placements: dict[str, Placement] = field(default_factory=dict)
    labels: list[tuple[CellAddr, str]] = field(default_factory=list)

    def addr_of(self, table: str, indices: tuple[int, ...]) -> CellAddr:
        return self.placements[table].addr(indices)


def default_orientation(arity: int) -> str:
    return "yx" if arity == 2 else "y"


def resolve_layout(checked: CheckedProgram) -> PlacementMap:
    program = checked.program
    symbols = checked.symbols
    pm = PlacementMap()
    rects: list[tuple[str, str, tuple[int, int, int, int]]] = []  # (what, sheet, rect)

    def table_shape(name: str, line: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        decl = symbols.tables.get(name)
        if decl is None:
            raise LayoutError(f"line {line}: layout places unknown table {name!r}")
        lwbs: list[int] = []
        sizes: list[int] = []
        for dim in decl.dims:
            bounds = symbols.type_bounds.get(dim)
            if bounds is None:
                raise LayoutError(f"line {line}: table {name!r} has unbound dimension type {dim!r}")
            lwbs.append(bounds[0])
            sizes.append(bounds[1] - bounds[0] + 1)
        return tuple(lwbs), tuple(sizes)

    def add_placement(placement: Placement, line: int) -> None:
        if placement.table in pm.placements:
            raise LayoutError(f"line {line}: table {placement.table!r} is placed twice")
        rect = placement.rect()
        if rect[2] > MAX_ROW or rect[3] > MAX_COL:
            raise LayoutError(f"line {line}: table {placement.table!r} extends past the sheet boundary")
        _check_collision(rects, placement.table, placement.sheet, rect, line)
        rects.append((placement.table, placement.sheet, rect))
        pm.placements[placement.table] = placement

    def orientation_for(name: str, requested: str | None, arity: int, line: int) -> str:
        orientation = requested or default_orientation(arity)
        if arity == 2 and orientation != "yx":
            raise LayoutError(f"line {line}: 2-dimension table {name!r} must be oriented yx")
        if arity < 2 and orientation == "yx":
            raise LayoutError(f"line {line}: orientation yx needs a 2-dimension table, {name!r} has {arity}")
        return orientation

    for directive in program.layouts:
        if isinstance(directive, ast.Place):
            if not valid_sheet_name(directive.sheet):
                raise LayoutError(f"line {directive.line}: invalid sheet name {directive.sheet!r}")
            try:
                anchor = parse_a1(directive.cell, directive.sheet)
            except ValueError as exc:
                raise LayoutError(f"line {directive.line}: {exc}") from exc
            lwbs, sizes = table_shape(directive.table, directive.line)
            orientation = orientation_for(directive.table, directive.orientation, len(sizes), directive.line)
            add_placement(
                Placement(directive.table, directive.sheet, anchor.row, anchor.col, orientation, lwbs, sizes),
                directive.line,
            )
            continue

        if not valid_sheet_name(directive.sheet):
            raise LayoutError(f"line {directive.line}: invalid sheet name {directive.sheet!r}")
        row = 1
        pending_heading: int | None = None
        for group in directive.groups:
            if len(group) == 1 and isinstance(group[0], ast.Heading):
                pending_heading = row
                row += 1
                continue
            if any(isinstance(item, ast.Heading) for item in group):
                raise LayoutError(f"line {directive.line}: 'heading' must be a row group of its own")
            col = 1
            height = 1
            for item in group:
                if isinstance(item, ast.Skip):
                    col += item.cols
                    height = max(height, item.rows)
                    continue
                if isinstance(item, ast.Label):
                    addr = CellAddr(directive.sheet, row, col)
                    _check_collision(rects, "label", directive.sheet, (row, col, row, col), directive.line)
                    rects.append(("label", directive.sheet, (row, col, row, col)))
                    pm.labels.append((addr, item.text))
                    col += 1
                    continue
                lwbs, sizes = table_shape(item.table, directive.line)
                orientation = orientation_for(item.table, item.orientation, len(sizes), directive.line)
                placement = Placement(
                    item.table, directive.sheet, row, col, orientation, lwbs, sizes, item.options
                )
                add_placement(placement, directive.line)
                if pending_heading is not None:
                    label_addr = CellAddr(directive.sheet, pending_heading, col)
                    _check_collision(
                        rects, "heading", directive.sheet,
                        (pending_heading, col, pending_heading, col), directive.line,
                    )
                    rects.append(("heading", directive.sheet, (pending_heading, col, pending_heading, col)))
                    pm.labels.append((label_addr, item.table))
                col += placement.width
                height = max(height, placement.height)
            pending_heading = None
            row += height

    missing = sorted(_referenced_tables(program) - set(pm.placements))
    if missing:
        raise LayoutError(f"tables referenced by equations but never placed: {', '.join(missing)}")
    return pm


def _check_collision(
    rects: list[tuple[str, str, tuple[int, int, int, int]]],
    what: str,
    sheet: str,
    rect: tuple[int, int, int, int],
    line: int,
) -> None:
    for other_name, other_sheet, other in rects:
        if other_sheet != sheet:
            continue
        if rect[0] <= other[2] and other[0] <= rect[2] and rect[1] <= other[3] and other[1] <= rect[3]:
            raise LayoutError(
                f"line {line}: {what!r} at rows {rect[0]}..{rect[2]} cols {rect[1]}..{rect[3]} "
                f"overlaps {other_name!r} on sheet {sheet!r}"
            )


def _referenced_tables(program: ast.Program) -> set[str]:
    names: set[str] = set()

    def walk(expr: ast.Expr) -> None:
        if isinstance(expr, ast.TableRef):
            names.add(expr.table)
            for index in expr.indices:
                if isinstance(index, ast.ScalarIndex):
                    walk(index.expr)
                elif isinstance(index, ast.RangeIndex):
                    walk(index.lo)
                    walk(index.hi)
        elif isinstance(expr, ast.Neg):
            walk(expr.operand)
        elif isinstance(expr, ast.BinOp):
            walk(expr.left)
            walk(expr.right)
        elif isinstance(expr, ast.Call):
            for arg in expr.args:
                walk(arg)

    for eq in program.equations:
        names.add(eq.table)
        walk(eq.rhs)
    return names


def addr_of(pm: PlacementMap, table: str, indices: tuple[int, ...]) -> CellAddr:
    return pm.addr_of(table, indices)
