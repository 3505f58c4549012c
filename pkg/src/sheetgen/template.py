"""Parameterized components: validation, prelude synthesis, instantiation.

A component is a program with holes: unbound constants, unbound index
types, and tables without placements. Its manifest describes one parameter
per hole. Instantiation validates the user's bindings, synthesizes a
prelude of constant definitions, index-type bounds and place directives,
appends it to the source, and runs the normal compile pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import ast
from .cells import CellAddr, parse_a1, valid_sheet_name
from .codegen import compile_grid
from .errors import (
    BAD_CELL_REF,
    BAD_VALUE,
    LENGTH_MISMATCH,
    MISSING_PARAM,
    RANGE_NOT_LINEAR,
    UNKNOWN_PARAM,
    ParamError,
    ParamFailure,
    SheetgenError,
    StageError,
)
from .grid import FormulaGrid
from .layout import resolve_layout
from .parser import parse_program
from .pretty import quote_text, render_number
from .sema import check

CONSTANT_TEXT = "constant-text"
CONSTANT_NUMBER = "constant-number"
CELL_RANGE = "cell-range"
SHEET_NAME = "sheet-name"

PARAM_KINDS = (CONSTANT_TEXT, CONSTANT_NUMBER, CELL_RANGE, SHEET_NAME)


@dataclass(frozen=True)
class ParamSpec:
    name: str
    kind: str
    label: str = ""
    binds_constant: str | None = None
    binds_table: str | None = None
    binds_index_type: str | None = None  # this range's length fixes the type's size


@dataclass(frozen=True)
class RangeBinding:
    sheet: str
    anchor: CellAddr
    orientation: str  # y | x
    length: int


NormalizedBindings = dict[str, "RangeBinding | float | str"]


@dataclass
class ComponentTemplate:
    id: str
    title: str
    summary: str
    source: str
    params: list[ParamSpec] = field(default_factory=list)
    example_bindings: dict[str, str] = field(default_factory=dict)
    example_inputs: dict[str, float | str] = field(default_factory=dict)

    def holes(self) -> tuple[set[str], set[str], set[str]]:
        """(unbound constants, unbound index types, unplaced tables)."""
        program = parse_program(self.source)
        constants = {c.name for c in program.constants if c.value is None}
        types = {t.name for t in program.index_types if t.lo is None}
        placed: set[str] = set()
        for directive in program.layouts:
            if isinstance(directive, ast.Place):
                placed.add(directive.table)
            else:
                for group in directive.groups:
                    for item in group:
                        if isinstance(item, ast.TableItem):
                            placed.add(item.table)
        tables = {t.name for t in program.tables} - placed
        return constants, types, tables


def parse_range_text(text: str) -> tuple[CellAddr, CellAddr]:
    """'Sheet1!A3:A15' or 'Sheet1!A3' (a single cell) into first/last."""
    text = text.strip()
    if "!" not in text:
        raise ValueError(f"range {text!r} needs a sheet prefix, like Sheet1!A3:A15")
    sheet, _, cells = text.partition("!")
    if not valid_sheet_name(sheet):
        raise ValueError(f"invalid sheet name {sheet!r}")
    first_text, _, last_text = cells.partition(":")
    first = parse_a1(first_text, sheet)
    last = parse_a1(last_text, sheet) if last_text else first
    return first, last


def infer_orientation(first: CellAddr, last: CellAddr) -> tuple[str, int]:
    """Same column is y, same row is x; anything else is not linear."""
    if first.col == last.col:
        return "y", last.row - first.row + 1
    if first.row == last.row:
        return "x", last.col - first.col + 1
    raise ValueError("range is neither a single row nor a single column")


def validate_params(template: ComponentTemplate, bindings: dict[str, str]) -> NormalizedBindings:
    errors: list[ParamError] = []
    known = {p.name for p in template.params}
    for name in sorted(bindings):
        if name not in known:
            errors.append(ParamError(name, UNKNOWN_PARAM, f"this component has no parameter {name!r}"))

    normalized: NormalizedBindings = {}
    for param in template.params:
        raw = bindings.get(param.name)
        if raw is None or raw == "":
            errors.append(ParamError(param.name, MISSING_PARAM, "a value is required"))
            continue
        if param.kind == CONSTANT_TEXT:
            normalized[param.name] = raw
        elif param.kind == CONSTANT_NUMBER:
            try:
                normalized[param.name] = float(raw)
            except ValueError:
                errors.append(ParamError(param.name, BAD_VALUE, f"{raw!r} is not a number"))
        elif param.kind == SHEET_NAME:
            if not valid_sheet_name(raw):
                errors.append(ParamError(param.name, BAD_VALUE, f"{raw!r} is not a valid sheet name"))
            else:
                normalized[param.name] = raw
        else:  # cell-range
            try:
                first, last = parse_range_text(raw)
            except ValueError as exc:
                errors.append(ParamError(param.name, BAD_CELL_REF, str(exc)))
                continue
            if first.row > last.row or first.col > last.col:
                errors.append(ParamError(param.name, BAD_CELL_REF, "first cell is after the last cell"))
                continue
            try:
                orientation, length = infer_orientation(first, last)
            except ValueError as exc:
                errors.append(ParamError(param.name, RANGE_NOT_LINEAR, str(exc)))
                continue
            normalized[param.name] = RangeBinding(first.sheet, first, orientation, length)

    # Ranges that bind the same index type must agree on length.
    by_type: dict[str, list[tuple[str, RangeBinding]]] = {}
    for param in template.params:
        binding = normalized.get(param.name)
        if param.binds_index_type and isinstance(binding, RangeBinding):
            by_type.setdefault(param.binds_index_type, []).append((param.name, binding))
    for group in by_type.values():
        first_name, first_binding = group[0]
        for name, binding in group[1:]:
            if binding.length != first_binding.length:
                errors.append(
                    ParamError(
                        name,
                        LENGTH_MISMATCH,
                        f"covers {binding.length} cells but {first_name!r} covers {first_binding.length}",
                    )
                )

    if errors:
        raise ParamFailure(errors)
    return normalized


def synthesize_prelude(template: ComponentTemplate, normalized: NormalizedBindings) -> str:
    """Statements that close the template's holes."""
    lines: list[str] = []
    types_done: set[str] = set()
    for param in template.params:
        binding = normalized[param.name]
        if param.binds_constant is not None:
            if isinstance(binding, float):
                lines.append(f"constant {param.binds_constant} = {render_number(binding)}.")
            else:
                lines.append(f"constant {param.binds_constant} = {quote_text(str(binding))}.")
        if isinstance(binding, RangeBinding):
            if param.binds_index_type and param.binds_index_type not in types_done:
                lines.append(f"type {param.binds_index_type} = 1:{binding.length}.")
                types_done.add(param.binds_index_type)
            if param.binds_table:
                lines.append(
                    f"place( {param.binds_table}, {quote_text(binding.sheet, chr(39))}, "
                    f"{quote_text(binding.anchor.a1(), chr(39))}, {binding.orientation} )."
                )
    return "".join(line + "\n" for line in lines)


def instantiate(template: ComponentTemplate, bindings: dict[str, str]) -> FormulaGrid:
    """validate, synthesize, parse, check, lay out, compile."""
    normalized = validate_params(template, bindings)
    prelude = synthesize_prelude(template, normalized)
    full_source = prelude + template.source

    def run(stage: str, fn):
        try:
            return fn()
        except SheetgenError as exc:
            raise StageError(stage, exc) from exc

    program = run("parse", lambda: parse_program(full_source))
    checked = run("check", lambda: check(program, require_closed=True))
    pm = run("layout", lambda: resolve_layout(checked))
    return run("compile", lambda: compile_grid(checked, pm))
