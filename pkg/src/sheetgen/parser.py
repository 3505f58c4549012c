"""Recursive-descent parser for template programs and compiled formulae.

The two grammars share the expression core. Template mode resolves bare
identifiers to names and bracketed suffixes to table references; formula
mode instead recognizes A1 cell references (optionally sheet-qualified)
and `first:last` ranges, as produced by the code generator.

Operator precedence, loosest first: comparisons, `&`, additive,
multiplicative, unary minus, then calls and indexing.
"""

from __future__ import annotations

from . import ast
from .cells import parse_a1_ident
from .errors import ParseError
from .lexer import (
    AMP,
    ARROW,
    BANG,
    COLON,
    COMMA,
    DOT,
    EOF,
    EQ,
    GE,
    GT,
    IDENT,
    LBRACKET,
    LE,
    LPAREN,
    LT,
    MINUS,
    NE,
    NUMBER,
    PLUS,
    RBRACKET,
    RPAREN,
    SLASH,
    STAR,
    STRING,
    Comment,
    Token,
    tokenize,
)

_COMPARISONS = (EQ, NE, LT, GT, LE, GE)
_ORIENTATIONS = ("y", "x", "yx")


class _Parser:
    def __init__(self, tokens: list[Token], formula_mode: bool = False):
        self.tokens = tokens
        self.pos = 0
        self.formula_mode = formula_mode

    # -- token plumbing ----------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        i = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[i]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.type != EOF:
            self.pos += 1
        return tok

    def at(self, *types: str) -> bool:
        return self.peek().type in types

    def expect(self, type_: str, what: str | None = None) -> Token:
        tok = self.peek()
        if tok.type != type_:
            expected = what or f"'{type_}'"
            got = tok.value if tok.type != EOF else "end of input"
            raise ParseError(f"expected {expected}, got {got!r}", tok.line, tok.col)
        return self.advance()

    def fail(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.col)

    # -- expressions -------------------------------------------------------

    def expression(self) -> ast.Expr:
        left = self.concat()
        while self.at(*_COMPARISONS):
            op = self.advance().type
            right = self.concat()
            left = ast.BinOp(op, left, right)
        return left

    def concat(self) -> ast.Expr:
        left = self.additive()
        while self.at(AMP):
            self.advance()
            left = ast.BinOp("&", left, self.additive())
        return left

    def additive(self) -> ast.Expr:
        left = self.multiplicative()
        while self.at(PLUS, MINUS):
            op = self.advance().type
            left = ast.BinOp(op, left, self.multiplicative())
        return left

    def multiplicative(self) -> ast.Expr:
        left = self.unary()
        while self.at(STAR, SLASH):
            op = self.advance().type
            left = ast.BinOp(op, left, self.unary())
        return left

    def unary(self) -> ast.Expr:
        if self.at(MINUS):
            self.advance()
            return ast.Neg(self.unary())
        return self.primary()

    def primary(self) -> ast.Expr:
        tok = self.peek()
        if tok.type == NUMBER:
            self.advance()
            return ast.Num(float(tok.value))
        if tok.type == STRING:
            self.advance()
            return ast.Str(tok.value)
        if tok.type == LPAREN:
            self.advance()
            inner = self.expression()
            self.expect(RPAREN)
            return inner
        if tok.type == IDENT:
            return self.identifier_expr()
        raise self.fail(f"expected an expression, got {tok.value or 'end of input'!r}")

    def identifier_expr(self) -> ast.Expr:
        tok = self.advance()
        name = tok.value
        if self.at(LPAREN):
            return self.call(name)
        if self.formula_mode:
            return self.cell_or_name(tok)
        if self.at(LBRACKET):
            return self.table_ref(name)
        return ast.Name(name)

    def call(self, name: str) -> ast.Expr:
        lowered = name.lower()
        self.expect(LPAREN)
        if not self.formula_mode and lowered in ("upb", "lwb"):
            type_name = self.expect(IDENT, "an index-type name").value
            self.expect(RPAREN)
            return ast.Bound(lowered, type_name)
        args: list[ast.Expr] = []
        if not self.at(RPAREN):
            args.append(self.expression())
            while self.at(COMMA):
                self.advance()
                args.append(self.expression())
        self.expect(RPAREN)
        return ast.Call(lowered, tuple(args))

    def table_ref(self, name: str) -> ast.Expr:
        self.expect(LBRACKET)
        indices: list[ast.IndexExpr] = []
        if not self.at(RBRACKET):
            indices.append(self.index_expr())
            while self.at(COMMA):
                self.advance()
                indices.append(self.index_expr())
        self.expect(RBRACKET)
        return ast.TableRef(name, tuple(indices))

    def index_expr(self) -> ast.IndexExpr:
        if self.at(IDENT) and self.peek().value == "all" and self.peek(1).type in (COMMA, RBRACKET):
            self.advance()
            return ast.AllIndex()
        lo = self.expression()
        if self.at(COLON):
            self.advance()
            return ast.RangeIndex(lo, self.expression())
        return ast.ScalarIndex(lo)

    def cell_or_name(self, tok: Token) -> ast.Expr:
        sheet: str | None = None
        name = tok.value
        if self.at(BANG):
            self.advance()
            sheet = name
            name = self.expect(IDENT, "a cell reference").value
        parsed = parse_a1_ident(name)
        if parsed is None:
            if sheet is not None:
                raise self.fail(f"expected a cell reference after {sheet}!")
            return ast.Name(name)
        col, row = parsed
        start = ast.CellRef(sheet, col, row)
        if self.at(COLON):
            self.advance()
            end_tok = self.expect(IDENT, "a cell reference")
            end_sheet: str | None = None
            end_name = end_tok.value
            if self.at(BANG):
                self.advance()
                end_sheet = end_name
                end_name = self.expect(IDENT, "a cell reference").value
            end_parsed = parse_a1_ident(end_name)
            if end_parsed is None:
                raise ParseError("expected a cell reference", end_tok.line, end_tok.col)
            return ast.CellRange(start, ast.CellRef(end_sheet, end_parsed[0], end_parsed[1]))
        return start


class _ProgramParser(_Parser):
    def program(self, source: str, comments: list[Comment]) -> ast.Program:
        prog = ast.Program()
        spans: list[tuple[int, int]] = []
        while not self.at(EOF):
            start_tok = self.peek()
            stmt = self.statement()
            end = self.tokens[self.pos - 1].end  # the full stop
            prog.add(stmt)
            spans.append((start_tok.start, end))
        prog.doc_chunks = _doc_chunks(source, spans, comments)
        return prog

    def statement(self) -> ast.Statement:
        tok = self.peek()
        if tok.type != IDENT:
            raise self.fail(f"expected a statement, got {tok.value or 'end of input'!r}")
        keyword = tok.value
        if keyword == "constant":
            return self.constant_decl()
        if keyword == "type":
            return self.type_decl()
        if keyword == "table":
            return self.table_decl()
        if keyword == "layout":
            return self.layout_directive()
        if keyword == "place":
            return self.place_directive()
        return self.equation()

    def end_statement(self) -> None:
        self.expect(DOT, "'.' to end the statement")

    def constant_decl(self) -> ast.ConstantDecl:
        tok = self.advance()
        name = self.expect(IDENT, "a constant name").value
        value: float | str | None = None
        if self.at(EQ):
            self.advance()
            value = self.literal()
        self.end_statement()
        return ast.ConstantDecl(name, value, tok.line, tok.col)

    def literal(self) -> float | str:
        if self.at(STRING):
            return self.advance().value
        negate = False
        if self.at(MINUS):
            self.advance()
            negate = True
        tok = self.expect(NUMBER, "a literal value")
        value = float(tok.value)
        return -value if negate else value

    def type_decl(self) -> ast.IndexTypeDecl:
        tok = self.advance()
        name = self.expect(IDENT, "a type name").value
        lo = hi = None
        if self.at(EQ):
            self.advance()
            lo = self.expression()
            self.expect(COLON)
            hi = self.expression()
        self.end_statement()
        return ast.IndexTypeDecl(name, lo, hi, tok.line, tok.col)

    def table_decl(self) -> ast.TableDecl:
        tok = self.advance()
        name = self.expect(IDENT, "a table name").value
        self.expect(COLON)
        dims: list[str] = []
        while self.at(IDENT):
            dims.append(self.advance().value)
        self.expect(ARROW, "'->'")
        elem_tok = self.expect(IDENT, "an element type")
        if elem_tok.value not in ast.ELEM_TYPES:
            raise ParseError(
                f"element type must be one of {', '.join(ast.ELEM_TYPES)}, got {elem_tok.value!r}",
                elem_tok.line,
                elem_tok.col,
            )
        if len(dims) > 2:
            raise ParseError(f"table {name!r} has {len(dims)} dimensions; at most 2 are supported", tok.line, tok.col)
        self.end_statement()
        return ast.TableDecl(name, tuple(dims), elem_tok.value, tok.line, tok.col)

    def equation(self) -> ast.Equation:
        tok = self.advance()
        indices: list[ast.IndexSpec] = []
        if self.at(LBRACKET):
            self.advance()
            if not self.at(RBRACKET):
                indices.append(self.lhs_index())
                while self.at(COMMA):
                    self.advance()
                    indices.append(self.lhs_index())
            self.expect(RBRACKET)
        self.expect(EQ, "'=' in an equation")
        rhs = self.expression()
        self.end_statement()
        return ast.Equation(tok.value, tuple(indices), rhs, tok.line, tok.col)

    def lhs_index(self) -> ast.IndexSpec:
        if self.at(NUMBER, MINUS):
            tok = self.peek()
            value = self.literal()
            if value != int(value):
                raise ParseError("indices must be integers", tok.line, tok.col)
            return ast.LitIndex(int(value))
        name = self.expect(IDENT, "an index variable or literal").value
        if self.at(*_COMPARISONS):
            op = self.advance().type
            if op == EQ:
                raise self.fail("guards use >, <, >=, <= or <>; a fixed index is written as a literal")
            return ast.GuardIndex(name, op, self.expression())
        return ast.VarIndex(name)

    # -- layout ------------------------------------------------------------

    def layout_directive(self) -> ast.LayoutDirective:
        tok = self.advance()
        self.expect(LPAREN)
        sheet = self.expect(STRING, "a sheet name").value
        self.expect(COMMA)
        rows_tok = self.expect(IDENT, "'rows'")
        if rows_tok.value != "rows":
            raise ParseError("layout body must be rows(...)", rows_tok.line, rows_tok.col)
        self.expect(LPAREN)
        groups: list[tuple[ast.LayoutItem, ...]] = [self.row_group()]
        while self.at(COMMA):
            self.advance()
            groups.append(self.row_group())
        self.expect(RPAREN)
        self.expect(RPAREN)
        self.end_statement()
        return ast.LayoutDirective(sheet, tuple(groups), tok.line, tok.col)

    def row_group(self) -> tuple[ast.LayoutItem, ...]:
        if self.at(IDENT) and self.peek().value == "heading":
            self.advance()
            return (ast.Heading(),)
        self.expect(LBRACKET, "a row group '[...]' or 'heading'")
        items: list[ast.LayoutItem] = []
        if not self.at(RBRACKET):
            items.append(self.layout_item())
            while self.at(COMMA):
                self.advance()
                items.append(self.layout_item())
        self.expect(RBRACKET)
        return tuple(items)

    def layout_item(self) -> ast.LayoutItem:
        if self.at(STRING):
            return ast.Label(self.advance().value)
        tok = self.expect(IDENT, "a layout item")
        if tok.value == "heading":
            return ast.Heading()
        if tok.value == "skip":
            self.expect(LPAREN)
            rows = int(self.expect(NUMBER, "a row count").value.split(".")[0])
            self.expect(COMMA)
            cols = int(self.expect(NUMBER, "a column count").value.split(".")[0])
            self.expect(RPAREN)
            return ast.Skip(rows, cols)
        if tok.value == "as" and self.at(LPAREN):
            # as( table, orientation [, [option, ...]] )
            self.advance()
            table = self.expect(IDENT, "a table name").value
            self.expect(COMMA)
            orientation = self.orientation()
            options: tuple[str, ...] | None = None
            if self.at(COMMA):
                self.advance()
                self.expect(LBRACKET, "a list of dropdown options")
                opts = [self.expect(STRING, "an option").value]
                while self.at(COMMA):
                    self.advance()
                    opts.append(self.expect(STRING, "an option").value)
                self.expect(RBRACKET)
                options = tuple(opts)
            self.expect(RPAREN)
            return ast.TableItem(table, orientation, options)
        # table [as orientation]
        orientation = None
        if self.at(IDENT) and self.peek().value == "as":
            self.advance()
            orientation = self.orientation()
        return ast.TableItem(tok.value, orientation)

    def orientation(self) -> str:
        tok = self.expect(IDENT, "an orientation (y, x or yx)")
        if tok.value not in _ORIENTATIONS:
            raise ParseError(f"orientation must be y, x or yx, got {tok.value!r}", tok.line, tok.col)
        return tok.value

    def place_directive(self) -> ast.Place:
        tok = self.advance()
        self.expect(LPAREN)
        table = self.expect(IDENT, "a table name").value
        self.expect(COMMA)
        sheet = self.expect(STRING, "a sheet name").value
        self.expect(COMMA)
        cell = self.expect(STRING, "an anchor cell").value
        self.expect(COMMA)
        orientation = self.orientation()
        self.expect(RPAREN)
        self.end_statement()
        return ast.Place(table, sheet, cell, orientation, tok.line, tok.col)


def _doc_chunks(
    source: str, spans: list[tuple[int, int]], comments: list[Comment]
) -> list[ast.DocChunk]:
    """Interleave prose (comments between statements) with code spans.

    Comments inside a statement's span stay part of that code chunk.
    Consecutive standalone comments merge into one prose chunk.
    """
    events: list[tuple[int, ast.DocChunk]] = []
    for start, end in spans:
        events.append((start, ast.CodeSpan(source[start:end])))
    covered = spans
    for comment in comments:
        if any(s <= comment.start < e for s, e in covered):
            continue
        events.append((comment.start, ast.Prose(comment.text)))
    events.sort(key=lambda pair: pair[0])

    chunks: list[ast.DocChunk] = []
    for _, chunk in events:
        if isinstance(chunk, ast.Prose) and chunks and isinstance(chunks[-1], ast.Prose):
            chunks[-1] = ast.Prose(chunks[-1].text + "\n" + chunk.text)
        else:
            chunks.append(chunk)
    return chunks


def parse_program(source: str) -> ast.Program:
    tokens, comments = tokenize(source)
    if source.startswith("﻿"):
        source = source[1:]
    return _ProgramParser(tokens).program(source, comments)


def parse_expression(source: str) -> ast.Expr:
    tokens, _ = tokenize(source)
    parser = _Parser(tokens)
    expr = parser.expression()
    parser.expect(EOF, "end of expression")
    return expr


def parse_formula(source: str) -> ast.Expr:
    """Parse compiled formula text (cell references instead of table refs)."""
    tokens, _ = tokenize(source)
    parser = _Parser(tokens, formula_mode=True)
    expr = parser.expression()
    parser.expect(EOF, "end of formula")
    return expr
