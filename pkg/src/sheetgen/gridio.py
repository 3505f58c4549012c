"""Serialization of formula grids and value grids.

The TSV format is the stable takeup contract: one record per line,
`sheet<TAB>cell<TAB>kind<TAB>payload`, sorted by sheet, row, column.
Kinds: F formula text (no leading '='), N decimal number, S raw text,
D pipe-separated dropdown options (the cell's value is the first option).
Tabs, newlines and backslashes in payloads are escaped \\t, \\n, \\\\.

The JSON format additionally carries element-type tags and the placed
rectangles the evaluator uses to bound OFFSET dependencies, and is
versioned with a top-level "version": 1.
"""

from __future__ import annotations

import json

from .cells import CellAddr, col_to_letters, parse_a1_ident
from .errors import FormatError
from .grid import Formula, FormulaGrid, LiteralNumber, LiteralText
from .pretty import render_number
from .values import Value, render_value
from .evaluator import ValueGrid

_KINDS = ("F", "N", "S", "D")

JSON_VERSION = 1


def _record(addr: CellAddr, content, validation) -> tuple[str, str, str]:
    if validation is not None:
        return "D", "|".join(validation), ""
    if isinstance(content, LiteralNumber):
        return "N", render_number(content.value), ""
    if isinstance(content, LiteralText):
        return "S", content.value, ""
    return "F", content.text, content.elem_type


def _escape(payload: str) -> str:
    return (
        payload.replace("\\", "\\\\")
        .replace("\t", "\\t")
        .replace("\n", "\\n")
        .replace("\r", "\\r")
    )


_UNESCAPES = {"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}


def _unescape(payload: str, line: int) -> str:
    out: list[str] = []
    i = 0
    while i < len(payload):
        ch = payload[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        if i + 1 >= len(payload):
            raise FormatError("dangling escape in payload", line)
        nxt = payload[i + 1]
        if nxt not in _UNESCAPES:
            raise FormatError(f"unknown escape \\{nxt}", line)
        out.append(_UNESCAPES[nxt])
        i += 2
    return "".join(out)


def emit_tsv(grid: FormulaGrid) -> str:
    lines = []
    for addr, content in grid.iter_cells():
        kind, payload, _ = _record(addr, content, grid.validation(addr))
        lines.append(f"{addr.sheet}\t{addr.a1()}\t{kind}\t{_escape(payload)}")
    return "".join(line + "\n" for line in lines)


def parse_tsv(text: str) -> FormulaGrid:
    grid = FormulaGrid()
    for lineno, line in enumerate(text.split("\n"), 1):
        line = line.removesuffix("\r")  # tolerate CRLF files; payload CRs are escaped
        if line == "":
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise FormatError(f"expected 4 tab-separated fields, got {len(fields)}", lineno)
        sheet, cell, kind, payload = fields
        parsed = parse_a1_ident(cell)
        if parsed is None:
            raise FormatError(f"bad cell reference {cell!r}", lineno)
        addr = CellAddr(sheet, parsed[1], parsed[0])
        if grid.get(addr) is not None:
            raise FormatError(f"cell {addr} appears twice", lineno)
        payload = _unescape(payload, lineno)
        if kind == "F":
            grid.set(addr, Formula(payload))
        elif kind == "N":
            try:
                grid.set(addr, LiteralNumber(float(payload)))
            except ValueError:
                raise FormatError(f"bad number {payload!r}", lineno) from None
        elif kind == "S":
            grid.set(addr, LiteralText(payload))
        elif kind == "D":
            options = tuple(payload.split("|")) if payload else ("",)
            grid.set(addr, LiteralText(options[0]))
            grid.set_validation(addr, options)
        else:
            raise FormatError(f"unknown record kind {kind!r}", lineno)
    return grid


# --------------------------------------------------------------------------
# JSON

def grid_to_obj(grid: FormulaGrid) -> dict:
    sheets = []
    cells_by_sheet: dict[str, list[dict]] = {}
    for addr, content in grid.iter_cells():
        kind, payload, elem_type = _record(addr, content, grid.validation(addr))
        cell: dict = {"ref": addr.a1(), "kind": kind, "payload": payload}
        if elem_type and elem_type != "general":
            cell["type"] = elem_type
        validation = grid.validation(addr)
        if validation is not None:
            cell["validation"] = list(validation)
        cells_by_sheet.setdefault(addr.sheet, []).append(cell)
    names = set(cells_by_sheet) | {s for s, rects in grid.regions.items() if rects}
    for name in sorted(names):
        sheet: dict = {"name": name, "cells": cells_by_sheet.get(name, [])}
        regions = grid.regions.get(name)
        if regions:
            sheet["regions"] = [_rect_to_a1(r) for r in sorted(regions)]
        sheets.append(sheet)
    return {"version": JSON_VERSION, "sheets": sheets}


def emit_json(grid: FormulaGrid) -> str:
    return json.dumps(grid_to_obj(grid), indent=2, ensure_ascii=False) + "\n"


def grid_from_obj(obj: dict) -> FormulaGrid:
    if not isinstance(obj, dict) or "sheets" not in obj:
        raise FormatError("expected an object with a 'sheets' array")
    if obj.get("version", JSON_VERSION) != JSON_VERSION:
        raise FormatError(f"unsupported grid version {obj.get('version')!r}")
    grid = FormulaGrid()
    for sheet in obj["sheets"]:
        name = sheet.get("name")
        if not isinstance(name, str):
            raise FormatError("sheet without a name")
        for cell in sheet.get("cells", []):
            ref = cell.get("ref", "")
            parsed = parse_a1_ident(ref)
            if parsed is None:
                raise FormatError(f"bad cell reference {ref!r} on sheet {name!r}")
            addr = CellAddr(name, parsed[1], parsed[0])
            if grid.get(addr) is not None:
                raise FormatError(f"cell {addr} appears twice")
            kind = cell.get("kind")
            payload = cell.get("payload", "")
            if kind == "F":
                grid.set(addr, Formula(payload, cell.get("type", "general")))
            elif kind == "N":
                try:
                    grid.set(addr, LiteralNumber(float(payload)))
                except (TypeError, ValueError):
                    raise FormatError(f"bad number {payload!r} at {addr}") from None
            elif kind == "S":
                grid.set(addr, LiteralText(payload))
            elif kind == "D":
                options = tuple(cell.get("validation") or payload.split("|"))
                grid.set(addr, LiteralText(options[0]))
                grid.set_validation(addr, options)
            else:
                raise FormatError(f"unknown record kind {kind!r} at {addr}")
        for region in sheet.get("regions", []):
            grid.add_region(name, _rect_from_a1(region))
    return grid


def parse_json(text: str) -> FormulaGrid:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"bad JSON: {exc}") from None
    return grid_from_obj(obj)


def _rect_to_a1(rect: tuple[int, int, int, int]) -> str:
    r1, c1, r2, c2 = rect
    return f"{col_to_letters(c1)}{r1}:{col_to_letters(c2)}{r2}"


def _rect_from_a1(text: str) -> tuple[int, int, int, int]:
    try:
        start, _, end = text.partition(":")
        s = parse_a1_ident(start)
        e = parse_a1_ident(end or start)
        assert s is not None and e is not None
        return s[1], s[0], e[1], e[0]
    except Exception:
        raise FormatError(f"bad region {text!r}") from None


# --------------------------------------------------------------------------
# Value grids

def emit_values_csv(values: ValueGrid) -> str:
    """Rectangular CSV per sheet. A single sheet emits bare rows; with
    several sheets each block is preceded by a `# sheet: NAME` line."""
    blocks = []
    for name in sorted(values):
        cells = values[name]
        if not cells:
            blocks.append((name, ""))
            continue
        max_row = max(r for r, _ in cells)
        max_col = max(c for _, c in cells)
        rows = []
        for row in range(1, max_row + 1):
            rows.append(",".join(_csv_cell(cells.get((row, col))) for col in range(1, max_col + 1)))
        blocks.append((name, "".join(r + "\n" for r in rows)))
    if len(blocks) == 1:
        return blocks[0][1]
    return "".join(f"# sheet: {name}\n{body}" for name, body in blocks)


def _csv_cell(value: Value | None) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return '"' + value.replace('"', '""') + '"'
    return render_value(value)


def values_to_obj(values: ValueGrid) -> dict:
    sheets = []
    for name in sorted(values):
        cells = []
        for (row, col) in sorted(values[name]):
            value = values[name][(row, col)]
            if value is None:
                continue
            ref = f"{col_to_letters(col)}{row}"
            if isinstance(value, float):
                cells.append({"ref": ref, "n": value})
            elif isinstance(value, str):
                cells.append({"ref": ref, "s": value})
            else:
                cells.append({"ref": ref, "e": str(value)})
        sheets.append({"name": name, "cells": cells})
    return {"version": JSON_VERSION, "sheets": sheets}


def emit_values_json(values: ValueGrid) -> str:
    return json.dumps(values_to_obj(values), indent=2, ensure_ascii=False) + "\n"
