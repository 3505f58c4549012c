import pytest

from sheetgen import ast
from sheetgen.errors import SemaFailure
from sheetgen.parser import parse_expression, parse_program
from sheetgen.sema import (
    ALL,
    RUNTIME_INDEX,
    RUNTIME_RANGE,
    STATIC_INDEX,
    STATIC_RANGE,
    CheckedProgram,
    check,
    classify_index,
    coverage,
)


def check_errors(source, require_closed=False):
    with pytest.raises(SemaFailure) as err:
        check(parse_program(source), require_closed)
    return err.value.errors


def kinds(errors):
    return sorted(e.kind for e in errors)


def test_demo_fixture_checks_clean(demo_template):
    checked = check(parse_program(demo_template.source), require_closed=True)
    assert isinstance(checked, CheckedProgram)
    assert all(c is not None for c in checked.coverage_sets)


def test_filter_fixture_open_then_closed(filter_template):
    prog = parse_program(filter_template.source)
    checked = check(prog)  # holes are fine when closure is not required
    assert checked.coverage_sets == [None, None, None]

    errors = check_errors(filter_template.source, require_closed=True)
    assert kinds(errors) == ["UnboundHole", "UnboundHole"]
    messages = " ".join(e.message for e in errors)
    assert "pattern" in messages and "elements_base" in messages


def test_story_fixture_checks_clean(story_template):
    checked = check(parse_program(story_template.source), require_closed=True)
    node_decl = checked.symbols.tables["out_edges"]
    assert node_decl.dims == ("node_base", "out_edges_base")


def test_overlapping_equations():
    errors = check_errors("type span = 1:4. table t : span -> general. t[1] = 0. t[i] = 1.")
    assert kinds(errors) == ["OverlappingEquations"]


def test_disjoint_guard_and_literal_are_fine():
    checked = check(parse_program(
        "type span = 1:4. table t : span -> general. t[1] = 0. t[i > 1] = 1."
    ))
    assert checked.coverage_sets[0] == frozenset({(1,)})
    assert checked.coverage_sets[1] == frozenset({(2,), (3,), (4,)})


def test_coverage_examples():
    prog = parse_program(
        "type elements_base = 1:13. table the_index : elements_base -> text."
        "the_index[1] = 0. the_index[i > 1] = 1."
    )
    checked = check(prog)
    assert coverage(prog.equations[0], checked) == frozenset({(1,)})
    assert coverage(prog.equations[1], checked) == frozenset({(k,) for k in range(2, 14)})


def test_empty_guard_coverage_is_legal():
    prog = parse_program("type story_base = 0:99. table t : story_base -> general. t[i > 99] = 1.")
    checked = check(prog)
    assert checked.coverage_sets[0] == frozenset()


def test_guard_with_upb_folds():
    prog = parse_program("type s = 1:5. table t : s -> general. t[i < upb(s)] = 1.")
    checked = check(prog)
    assert checked.coverage_sets[0] == frozenset({(1,), (2,), (3,), (4,)})


def test_non_constant_guard():
    errors = check_errors(
        "type s = 1:5. table t : s -> general. table u : s -> general. t[i > u[1]] = 1."
    )
    assert "NonConstantGuard" in kinds(errors)


def test_unknown_names():
    errors = check_errors("t[1] = 1.")
    assert kinds(errors) == ["UnknownName"]
    errors = check_errors("type s = 1:2. table t : s -> general. t[i] = nope.")
    assert kinds(errors) == ["UnknownName"]
    errors = check_errors("type s = 1:2. table t : s -> general. t[i] = frobnicate(1).")
    assert kinds(errors) == ["UnknownName"]


def test_arity_mismatches():
    errors = check_errors("type s = 1:2. table t : s -> general. t[1, 2] = 1.")
    assert kinds(errors) == ["ArityMismatch"]
    errors = check_errors(
        "type s = 1:2. table t : s -> general. table u : s -> general. t[i] = u[1, 2]."
    )
    assert kinds(errors) == ["ArityMismatch"]
    errors = check_errors("type s = 1:2. table t : s -> general. t[i] = len().")
    assert kinds(errors) == ["ArityMismatch"]


def test_type_mismatches():
    errors = check_errors('type s = 1:2. table t : s -> general. t[i] = "abc" + 1.')
    assert kinds(errors) == ["TypeMismatch"]
    errors = check_errors('type s = 1:2. table t : s -> number. t[i] = "abc" & "d".')
    assert kinds(errors) == ["TypeMismatch"]
    errors = check_errors('type s = 1:2. table t : s -> general. t[i] = if("abc", 1, 2).')
    assert kinds(errors) == ["TypeMismatch"]
    errors = check_errors(
        'type s = 1:2. table t : s -> general. table u : s -> general. t[i] = u["a" & "b"].'
    )
    assert "TypeMismatch" in kinds(errors)


def test_number_into_text_table_is_allowed():
    # Cell contents are dynamic; a text-typed table may receive numbers
    # (the filter fixture's working column does exactly this).
    checked = check(parse_program("type s = 1:2. table t : s -> text. t[i] = -1."))
    assert checked.coverage_sets[0] is not None


def test_index_out_of_bounds_literal():
    errors = check_errors("type s = 1:4. table t : s -> general. t[7] = 1.")
    assert kinds(errors) == ["IndexOutOfBounds"]
    errors = check_errors(
        "type s = 1:4. table t : s -> general. table u : s -> general. t[1] = u[9]."
    )
    assert kinds(errors) == ["IndexOutOfBounds"]


def test_duplicate_names():
    errors = check_errors("constant a = 1. constant a = 2.")
    assert kinds(errors) == ["DuplicateName"]
    errors = check_errors("type s = 1:2. table m : s s -> general. m[i, i] = 1.")
    assert kinds(errors) == ["DuplicateName"]


def test_hole_and_binding_merge_in_either_order():
    # an instantiation prelude may precede or follow the hole declaration
    for source in (
        'constant pattern. constant pattern = "X*". type s = 1:2. table t : s -> text. t[i] = pattern.',
        'constant pattern = "X*". constant pattern. type s = 1:2. table t : s -> text. t[i] = pattern.',
        "type s. type s = 1:2. table t : s -> text. t[i] = 1.",
    ):
        checked = check(parse_program(source), require_closed=True)
        assert checked.symbols.type_bounds["s"] == (1, 2)


def test_bad_bounds():
    errors = check_errors("type s = 4:1.")
    assert kinds(errors) == ["BadBounds"]
    errors = check_errors("type s = 1:x.")
    assert kinds(errors) == ["BadBounds"]


def test_bounds_from_constants():
    checked = check(parse_program("constant n = 5. type s = 1:n. table t : s -> general."))
    assert checked.symbols.type_bounds["s"] == (1, 5)


def test_zero_dim_equation_forms():
    checked = check(parse_program("table go : -> general. go = 1."))
    assert checked.coverage_sets[0] == frozenset({()})
    checked = check(parse_program("table go : -> general. go[1] = 1."))
    assert checked.coverage_sets[0] == frozenset({()})


def test_check_is_deterministic_and_idempotent(story_template):
    prog = parse_program(story_template.source)
    a = check(prog, require_closed=True)
    b = check(prog, require_closed=True)
    assert a.coverage_sets == b.coverage_sets
    assert a.symbols.type_bounds == b.symbols.type_bounds


def test_coverage_disjoint_and_within_space(story_template, demo_template):
    for template in (story_template, demo_template):
        checked = check(parse_program(template.source), require_closed=True)
        per_table: dict[str, set] = {}
        for eq, covered in zip(checked.program.equations, checked.coverage_sets):
            bounds = checked.table_bounds(eq.table)
            for tup in covered:
                assert all(lo <= k <= hi for k, (lo, hi) in zip(tup, bounds))
                assert tup not in per_table.setdefault(eq.table, set())
                per_table[eq.table].add(tup)


# -- classify_index ---------------------------------------------------------

def scalar(src):
    return ast.ScalarIndex(parse_expression(src))


def test_classify_examples():
    assert classify_index(scalar("i-1")) == STATIC_INDEX
    assert classify_index(scalar("the_index[i]")) == RUNTIME_INDEX
    assert classify_index(ast.AllIndex()) == ALL
    assert classify_index(ast.RangeIndex(parse_expression("2"), parse_expression("3"))) == STATIC_RANGE
    assert (
        classify_index(
            ast.RangeIndex(parse_expression("the_index[i-1]+1"), parse_expression("upb(elements_base)"))
        )
        == RUNTIME_RANGE
    )


@pytest.mark.parametrize(
    "static_src,runtime_src",
    [
        ("1", "t[1]"),
        ("i-1", "i-t[1]"),
        ("upb(s)+2", "upb(s)+t[i]"),
        ("k*2+1", "k*2+t[k]"),
    ],
)
def test_classify_is_monotone(static_src, runtime_src):
    # Replacing a literal with a table reference never looks "more static".
    order = {STATIC_INDEX: 0, RUNTIME_INDEX: 1}
    assert order[classify_index(scalar(static_src))] <= order[classify_index(scalar(runtime_src))]
    assert classify_index(scalar(runtime_src)) == RUNTIME_INDEX
