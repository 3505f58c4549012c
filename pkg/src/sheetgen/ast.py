"""Syntax tree for template programs.

A program is an unordered bag of statements (meaning does not depend on
statement order); source order is kept only for documentation rendering.
Expressions are shared between the template language and the compiled
formula language: cell references and cell ranges occur only in the latter.
"""

from __future__ import annotations

from dataclasses import dataclass, field


# --------------------------------------------------------------------------
# Expressions

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Str:
    value: str


@dataclass(frozen=True)
class Name:
    """A bare identifier: a constant or an equation index variable."""

    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # + - * / & = <> < > <= >=
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    name: str  # lowercased at parse time
    args: tuple["Expr", ...]


@dataclass(frozen=True)
class Bound:
    """upb(type) or lwb(type)."""

    kind: str  # "upb" | "lwb"
    type_name: str


@dataclass(frozen=True)
class ScalarIndex:
    expr: "Expr"


@dataclass(frozen=True)
class RangeIndex:
    lo: "Expr"
    hi: "Expr"


@dataclass(frozen=True)
class AllIndex:
    pass


IndexExpr = ScalarIndex | RangeIndex | AllIndex


@dataclass(frozen=True)
class TableRef:
    table: str
    indices: tuple[IndexExpr, ...]


@dataclass(frozen=True)
class CellRef:
    """A1-style reference in compiled formulae. sheet is None when local."""

    sheet: str | None
    col: int
    row: int


@dataclass(frozen=True)
class CellRange:
    start: CellRef
    end: CellRef


Expr = (
    Num | Str | Name | Neg | BinOp | Call | Bound | TableRef | CellRef | CellRange
)


# --------------------------------------------------------------------------
# Left-hand-side index specs

@dataclass(frozen=True)
class LitIndex:
    value: int


@dataclass(frozen=True)
class VarIndex:
    name: str


@dataclass(frozen=True)
class GuardIndex:
    name: str
    op: str  # > < >= <= <>
    bound: Expr  # compile-time evaluable


IndexSpec = LitIndex | VarIndex | GuardIndex


# --------------------------------------------------------------------------
# Statements

@dataclass(frozen=True)
class ConstantDecl:
    name: str
    value: float | str | None  # None marks a template hole
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class IndexTypeDecl:
    name: str
    lo: Expr | None  # None marks a template hole
    hi: Expr | None
    line: int = 0
    col: int = 0


ELEM_TYPES = ("general", "text", "number")


@dataclass(frozen=True)
class TableDecl:
    name: str
    dims: tuple[str, ...]  # 0, 1 or 2 index-type names
    elem_type: str
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class Equation:
    table: str
    indices: tuple[IndexSpec, ...]
    rhs: Expr
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class TableItem:
    table: str
    orientation: str | None  # y | x | yx; None means the default for the arity
    options: tuple[str, ...] | None = None  # dropdown validation list


@dataclass(frozen=True)
class Skip:
    rows: int
    cols: int


@dataclass(frozen=True)
class Heading:
    pass


@dataclass(frozen=True)
class Label:
    text: str


LayoutItem = TableItem | Skip | Heading | Label


@dataclass(frozen=True)
class LayoutDirective:
    sheet: str
    groups: tuple[tuple[LayoutItem, ...], ...]
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class Place:
    """Absolute placement of one table, overriding grid layout."""

    table: str
    sheet: str
    cell: str  # A1 form
    orientation: str
    line: int = 0
    col: int = 0


Statement = ConstantDecl | IndexTypeDecl | TableDecl | Equation | LayoutDirective | Place


# --------------------------------------------------------------------------
# Documentation chunks (literate rendering)

@dataclass(frozen=True)
class Prose:
    text: str


@dataclass(frozen=True)
class CodeSpan:
    text: str


DocChunk = Prose | CodeSpan


@dataclass
class Program:
    constants: list[ConstantDecl] = field(default_factory=list)
    index_types: list[IndexTypeDecl] = field(default_factory=list)
    tables: list[TableDecl] = field(default_factory=list)
    equations: list[Equation] = field(default_factory=list)
    layouts: list[LayoutDirective | Place] = field(default_factory=list)
    doc_chunks: list[DocChunk] = field(default_factory=list)
    statements: list[Statement] = field(default_factory=list)  # source order

    def add(self, stmt: Statement) -> None:
        self.statements.append(stmt)
        if isinstance(stmt, ConstantDecl):
            self.constants.append(stmt)
        elif isinstance(stmt, IndexTypeDecl):
            self.index_types.append(stmt)
        elif isinstance(stmt, TableDecl):
            self.tables.append(stmt)
        elif isinstance(stmt, Equation):
            self.equations.append(stmt)
        else:
            self.layouts.append(stmt)


def same_structure(a: Program, b: Program) -> bool:
    """Structural equality on statements, ignoring source positions and docs."""
    return _strip(a) == _strip(b)


def _strip(p: Program) -> tuple:
    def clean(stmt: Statement) -> Statement:
        if isinstance(stmt, (ConstantDecl, IndexTypeDecl, TableDecl, Equation, LayoutDirective, Place)):
            return type(stmt)(**{k: v for k, v in stmt.__dict__.items() if k not in ("line", "col")})
        return stmt

    return (
        tuple(clean(s) for s in p.constants),
        tuple(clean(s) for s in p.index_types),
        tuple(clean(s) for s in p.tables),
        tuple(clean(s) for s in p.equations),
        tuple(clean(s) for s in p.layouts),
    )
