"""The compiled artifact: per-sheet cells holding formulae or literals.

Blank cells are simply absent. `regions` records the rectangle each placed
table occupies; the evaluator uses them to bound the reach of dynamic
OFFSET references when building the dependency graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cells import CellAddr


@dataclass(frozen=True)
class Formula:
    text: str  # without a leading "="
    elem_type: str = "general"


@dataclass(frozen=True)
class LiteralNumber:
    value: float


@dataclass(frozen=True)
class LiteralText:
    value: str


CellContent = Formula | LiteralNumber | LiteralText

Rect = tuple[int, int, int, int]  # row1, col1, row2, col2 inclusive


@dataclass
class FormulaGrid:
    sheets: dict[str, dict[tuple[int, int], CellContent]] = field(default_factory=dict)
    validations: dict[str, dict[tuple[int, int], tuple[str, ...]]] = field(default_factory=dict)
    regions: dict[str, list[Rect]] = field(default_factory=dict)

    def set(self, addr: CellAddr, content: CellContent) -> None:
        self.sheets.setdefault(addr.sheet, {})[(addr.row, addr.col)] = content

    def get(self, addr: CellAddr) -> CellContent | None:
        return self.sheets.get(addr.sheet, {}).get((addr.row, addr.col))

    def set_validation(self, addr: CellAddr, options: tuple[str, ...]) -> None:
        self.validations.setdefault(addr.sheet, {})[(addr.row, addr.col)] = options

    def validation(self, addr: CellAddr) -> tuple[str, ...] | None:
        return self.validations.get(addr.sheet, {}).get((addr.row, addr.col))

    def add_region(self, sheet: str, rect: Rect) -> None:
        self.regions.setdefault(sheet, []).append(rect)

    def cell_count(self) -> int:
        return sum(len(cells) for cells in self.sheets.values())

    def iter_cells(self):
        """Yield (CellAddr, content) sorted by sheet, row, column."""
        for sheet in sorted(self.sheets):
            for (row, col) in sorted(self.sheets[sheet]):
                yield CellAddr(sheet, row, col), self.sheets[sheet][(row, col)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FormulaGrid):
            return NotImplemented
        return (
            _packed(self.sheets) == _packed(other.sheets)
            and _packed(self.validations) == _packed(other.validations)
            and {s: sorted(r) for s, r in self.regions.items() if r}
            == {s: sorted(r) for s, r in other.regions.items() if r}
        )


def _packed(d: dict) -> dict:
    return {k: v for k, v in d.items() if v}


def overlay(base: FormulaGrid, patch: FormulaGrid) -> tuple[FormulaGrid, list[CellAddr]]:
    """Write patch cells over a copy of base; collisions are populated targets."""
    merged = FormulaGrid(
        sheets={s: dict(cells) for s, cells in base.sheets.items()},
        validations={s: dict(v) for s, v in base.validations.items()},
        regions={s: list(r) for s, r in base.regions.items()},
    )
    collisions: list[CellAddr] = []
    for addr, content in patch.iter_cells():
        if merged.get(addr) is not None:
            collisions.append(addr)
            continue
        merged.set(addr, content)
    for sheet, validations in patch.validations.items():
        for (row, col), options in validations.items():
            merged.set_validation(CellAddr(sheet, row, col), options)
    for sheet, rects in patch.regions.items():
        for rect in rects:
            merged.add_region(sheet, rect)
    return merged, collisions
