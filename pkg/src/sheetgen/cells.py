"""A1-notation cell addresses and conversions."""

from __future__ import annotations

import re
from dataclasses import dataclass

MAX_COL = 16384
MAX_ROW = 1048576

_A1_RE = re.compile(r"([A-Za-z]{1,3})([0-9]+)$")
_SHEET_RE = re.compile(r"[A-Za-z0-9_]+$")


def col_to_letters(col: int) -> str:
    if col < 1:
        raise ValueError(f"column must be >= 1, got {col}")
    letters = ""
    while col > 0:
        col, rem = divmod(col - 1, 26)
        letters = chr(ord("A") + rem) + letters
    return letters


def letters_to_col(letters: str) -> int:
    col = 0
    for ch in letters.upper():
        col = col * 26 + (ord(ch) - ord("A") + 1)
    return col


def parse_a1_ident(text: str) -> tuple[int, int] | None:
    """Parse a bare A1 token like 'B12' into (col, row), or None if not one."""
    m = _A1_RE.fullmatch(text)
    if not m:
        return None
    row = int(m.group(2))
    if row < 1:
        return None
    return letters_to_col(m.group(1)), row


@dataclass(frozen=True, order=True)
class CellAddr:
    sheet: str
    row: int
    col: int

    def a1(self) -> str:
        return f"{col_to_letters(self.col)}{self.row}"

    def qualified(self) -> str:
        return f"{self.sheet}!{self.a1()}"

    def shifted(self, rows: int, cols: int) -> "CellAddr":
        return CellAddr(self.sheet, self.row + rows, self.col + cols)

    def __str__(self) -> str:
        return self.qualified()


def valid_sheet_name(name: str) -> bool:
    return bool(_SHEET_RE.fullmatch(name))


def parse_a1(text: str, sheet: str = "") -> CellAddr:
    """Parse 'A3' or 'Sheet1!A3' (case-insensitive) into a CellAddr."""
    text = text.strip()
    if "!" in text:
        sheet_part, _, cell_part = text.partition("!")
        if not valid_sheet_name(sheet_part):
            raise ValueError(f"invalid sheet name {sheet_part!r}")
        sheet = sheet_part
    else:
        cell_part = text
    parsed = parse_a1_ident(cell_part)
    if parsed is None:
        raise ValueError(f"invalid cell reference {text!r}")
    col, row = parsed
    return CellAddr(sheet, row, col)


def in_sheet_bounds(addr: CellAddr) -> bool:
    return 1 <= addr.col <= MAX_COL and 1 <= addr.row <= MAX_ROW
