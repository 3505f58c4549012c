"""Scalar values and spreadsheet coercion rules.

A cell value is a float, a str, None (blank) or a CellError. Blank
coerces to 0 in arithmetic and "" in concatenation; errors propagate
through every operation except the ISNA-style predicates. Logical
results are represented as the numbers 1 and 0 (the value set is closed).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .pretty import render_number

NA = "NA"
REF = "REF"
VALUE = "VALUE"
DIV0 = "DIV0"
NAME = "NAME"
CYCLE = "CYCLE"

ERROR_CODES = {
    NA: "#N/A",
    REF: "#REF!",
    VALUE: "#VALUE!",
    DIV0: "#DIV/0!",
    NAME: "#NAME?",
    CYCLE: "#CYCLE!",
}
_CODE_TO_KIND = {code: kind for kind, code in ERROR_CODES.items()}


@dataclass(frozen=True)
class CellError:
    kind: str
    note: str = ""

    def __str__(self) -> str:
        return ERROR_CODES[self.kind]


Value = float | str | None | CellError


def is_error(v: Value) -> bool:
    return isinstance(v, CellError)


def render_value(v: Value) -> str:
    if v is None:
        return ""
    if isinstance(v, CellError):
        return str(v)
    if isinstance(v, float):
        return render_number(v)
    return v


def parse_rendered(text: str) -> Value:
    """Inverse of render_value for round-tripping value grids."""
    if text == "":
        return None
    if text in _CODE_TO_KIND:
        return CellError(_CODE_TO_KIND[text])
    try:
        return float(text)
    except ValueError:
        return text


def to_number(v: Value) -> float | CellError:
    if isinstance(v, CellError):
        return v
    if v is None:
        return 0.0
    if isinstance(v, float):
        return v
    return CellError(VALUE, "text where a number is needed")


def to_text(v: Value) -> str | CellError:
    if isinstance(v, CellError):
        return v
    if v is None:
        return ""
    if isinstance(v, float):
        return render_number(v)
    return v


def to_logical(v: Value) -> bool | CellError:
    if isinstance(v, CellError):
        return v
    if v is None:
        return False
    if isinstance(v, float):
        return v != 0
    return CellError(VALUE, "text where a condition is needed")


def logical(value: bool) -> float:
    return 1.0 if value else 0.0


def compare(op: str, a: Value, b: Value) -> Value:
    if isinstance(a, CellError):
        return a
    if isinstance(b, CellError):
        return b
    if a is None:
        a = "" if isinstance(b, str) else 0.0
    if b is None:
        b = "" if isinstance(a, str) else 0.0
    if isinstance(a, str) and isinstance(b, str):
        a_key: float | str = a.casefold()
        b_key: float | str = b.casefold()
    elif isinstance(a, float) and isinstance(b, float):
        a_key, b_key = a, b
    else:
        # Mixed types never compare equal; numbers order before text.
        if op == "=":
            return logical(False)
        if op == "<>":
            return logical(True)
        a_less = isinstance(a, float)
        if op in ("<", "<="):
            return logical(a_less)
        return logical(not a_less)
    if op == "=":
        return logical(a_key == b_key)
    if op == "<>":
        return logical(a_key != b_key)
    if op == "<":
        return logical(a_key < b_key)
    if op == ">":
        return logical(a_key > b_key)
    if op == "<=":
        return logical(a_key <= b_key)
    return logical(a_key >= b_key)


def wildcard_regex(pattern: str) -> re.Pattern[str]:
    """Spreadsheet wildcard pattern: * is any run, ? one char, case-folded."""
    parts = []
    for ch in pattern:
        if ch == "*":
            parts.append(".*")
        elif ch == "?":
            parts.append(".")
        else:
            parts.append(re.escape(ch))
    return re.compile("".join(parts), re.IGNORECASE | re.DOTALL)


def wildcard_match(pattern: str, text: str) -> bool:
    return wildcard_regex(pattern).fullmatch(text) is not None
