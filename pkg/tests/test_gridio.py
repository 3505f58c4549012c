import json
import random

import pytest

from sheetgen.cells import CellAddr
from sheetgen.errors import FormatError
from sheetgen.evaluator import EvalConfig, evaluate
from sheetgen.grid import Formula, FormulaGrid, LiteralNumber, LiteralText
from sheetgen.gridio import (
    emit_json,
    emit_tsv,
    emit_values_csv,
    emit_values_json,
    parse_json,
    parse_tsv,
)
from sheetgen.template import instantiate

from conftest import FILTER_BINDINGS


def test_demo_tsv_first_line(demo_template):
    tsv = emit_tsv(instantiate(demo_template, {}))
    assert tsv.splitlines()[0] == "Demo\tA1\tN\t2"


def test_filter_tsv_first_working_cell(filter_template):
    tsv = emit_tsv(instantiate(filter_template, FILTER_BINDINGS))
    lines = [l for l in tsv.splitlines() if l.startswith("Sheet1\tB3\t")]
    assert lines == [
        'Sheet1\tB3\tF\tIF(ISNA(MATCH("X*",A3:A15,0)),-1,MATCH("X*",A3:A15,0))'
    ]


def test_empty_grid_serializations():
    grid = FormulaGrid()
    assert emit_tsv(grid) == ""
    assert json.loads(emit_json(grid))["sheets"] == []
    assert parse_tsv("") == FormulaGrid()


def test_tsv_round_trip_fixtures(filter_template, story_template, demo_template):
    for template, bindings in (
        (filter_template, FILTER_BINDINGS),
        (story_template, {}),
        (demo_template, {}),
    ):
        grid = instantiate(template, bindings)
        parsed = parse_tsv(emit_tsv(grid))
        # TSV carries neither element types nor regions; compare modulo both.
        assert _tsv_view(parsed) == _tsv_view(grid)
        # and byte determinism on the image
        assert emit_tsv(parsed) == emit_tsv(grid)


def _tsv_view(grid: FormulaGrid):
    cells = {}
    for addr, content in grid.iter_cells():
        if isinstance(content, Formula):
            content = Formula(content.text)
        cells[(addr.sheet, addr.row, addr.col)] = (content, grid.validation(addr))
    return cells


def test_json_round_trip_fixtures(filter_template, story_template, demo_template):
    for template, bindings in (
        (filter_template, FILTER_BINDINGS),
        (story_template, {}),
        (demo_template, {}),
    ):
        grid = instantiate(template, bindings)
        assert parse_json(emit_json(grid)) == grid


def test_tsv_records_sorted_and_deterministic(story_template):
    grid = instantiate(story_template, {})
    tsv = emit_tsv(grid)
    assert tsv == emit_tsv(grid)
    keys = []
    for line in tsv.splitlines():
        sheet, cell, _, _ = line.split("\t")
        addr = CellAddr(sheet, int("".join(filter(str.isdigit, cell))), 0)
        keys.append((sheet, addr.row))
    assert keys == sorted(keys)


def test_tsv_bad_kind():
    with pytest.raises(FormatError) as err:
        parse_tsv("S\tA1\tQ\tstuff\n")
    assert "Q" in str(err.value) and "line 1" in str(err.value)


def test_tsv_bad_field_count_and_cell():
    with pytest.raises(FormatError):
        parse_tsv("S\tA1\tN\n")
    with pytest.raises(FormatError):
        parse_tsv("S\tZZZZ\tN\t1\n")
    with pytest.raises(FormatError):
        parse_tsv("S\tA1\tN\tnot-a-number\n")


def test_tsv_duplicate_cell():
    with pytest.raises(FormatError) as err:
        parse_tsv("S\tA1\tN\t1\nS\tA1\tN\t2\n")
    assert "twice" in str(err.value)


def test_tsv_out_of_order_input_parses_to_same_grid():
    ordered = "S\tA1\tN\t1\nS\tB2\tS\thello\n"
    shuffled = "S\tB2\tS\thello\nS\tA1\tN\t1\n"
    assert parse_tsv(ordered) == parse_tsv(shuffled)


def test_payload_escaping_round_trip():
    grid = FormulaGrid()
    grid.set(CellAddr("S", 1, 1), LiteralText("tab\there\nand newline\\slash\rreturn"))
    tsv = emit_tsv(grid)
    assert "\t".join(tsv.split("\t")[:3]) == "S\tA1\tS"
    assert tsv.count("\n") == 1  # payload newline is escaped
    assert "\r" not in tsv
    assert parse_tsv(tsv) == grid


def test_crlf_input_tolerated():
    unix = "S\tA1\tN\t1\nS\tB2\tS\thello\n"
    dos = unix.replace("\n", "\r\n")
    assert parse_tsv(dos) == parse_tsv(unix)


def test_dropdown_round_trips_and_json_validation(story_template):
    grid = instantiate(story_template, {})
    tsv_lines = [l for l in emit_tsv(grid).splitlines() if "\tD\t" in l]
    assert tsv_lines == ["Spin\tB3\tD\tRecalculate"]

    obj = json.loads(emit_json(grid))
    spin = next(s for s in obj["sheets"] if s["name"] == "Spin")
    dropdown = next(c for c in spin["cells"] if c["ref"] == "B3")
    assert dropdown["kind"] == "D"
    assert dropdown["validation"] == ["Recalculate"]
    assert "regions" in spin


def random_grid(rng: random.Random, tsv_safe: bool) -> FormulaGrid:
    grid = FormulaGrid()
    sheets = ["Alpha", "Beta", "G1"][: rng.randint(1, 3)]
    for sheet in sheets:
        spots = [(r, c) for r in range(1, 41) for c in range(1, 13)]
        for row, col in rng.sample(spots, rng.randint(0, 14)):
            addr = CellAddr(sheet, row, col)
            kind = rng.choice("FNSD")
            if kind == "F":
                elem = "general" if tsv_safe else rng.choice(["general", "text", "number"])
                grid.set(addr, Formula(rng.choice(["A1*2", 'IF(B2>0,"y","n")', "SUM(C1:C9)"]), elem))
            elif kind == "N":
                grid.set(addr, LiteralNumber(round(rng.uniform(-1e4, 1e4), rng.randint(0, 4))))
            elif kind == "S":
                text = "".join(rng.choice('ab "x,\t\r\\n7') for _ in range(rng.randint(0, 9)))
                grid.set(addr, LiteralText(text))
            else:
                options = tuple(f"opt{i}" for i in range(rng.randint(1, 3)))
                grid.set(addr, LiteralText(options[0]))
                grid.set_validation(addr, options)
        if not tsv_safe and rng.random() < 0.5:
            r, c = rng.randint(1, 30), rng.randint(1, 8)
            grid.add_region(sheet, (r, c, r + rng.randint(0, 10), c + rng.randint(0, 3)))
    return grid


def test_fuzzed_round_trips():
    rng = random.Random(2024)
    for case in range(100):
        grid = random_grid(rng, tsv_safe=True)
        assert parse_tsv(emit_tsv(grid)) == grid, f"tsv case {case}"
        grid = random_grid(rng, tsv_safe=False)
        assert parse_json(emit_json(grid)) == grid, f"json case {case}"


def test_values_csv_demo_golden(demo_template):
    values = evaluate(instantiate(demo_template, {}), EvalConfig(seed=0))
    csv = emit_values_csv(values)
    rows = csv.splitlines()
    assert rows[3] == '620,"Sum of above numbers plus 600 = 620."'
    assert rows[0] == '2,"Two = 2."'


def test_values_csv_quoting_and_errors():
    values = {"S": {(1, 1): 'say "hi", ok', (1, 2): None, (2, 1): 1.5}}
    csv = emit_values_csv(values)
    assert csv.splitlines()[0] == '"say ""hi"", ok",'
    assert csv.splitlines()[1] == "1.5,"


def test_values_csv_multi_sheet_headers():
    values = {"B": {(1, 1): 1.0}, "A": {(1, 1): 2.0}}
    csv = emit_values_csv(values)
    assert csv.splitlines() == ["# sheet: A", "2", "# sheet: B", "1"]


def test_values_json(demo_template):
    values = evaluate(instantiate(demo_template, {}), EvalConfig(seed=0))
    obj = json.loads(emit_values_json(values))
    demo = obj["sheets"][0]
    assert {"ref": "A4", "n": 620.0} in demo["cells"]
    assert {"ref": "B1", "s": "Two = 2."} in demo["cells"]
