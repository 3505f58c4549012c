"""Error types shared across the compiler pipeline."""

from __future__ import annotations


class SheetgenError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(SheetgenError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class SemaError(SheetgenError):
    """A single semantic error. `kind` is a stable machine-readable code."""

    def __init__(self, kind: str, message: str, line: int | None = None, col: int | None = None):
        loc = f"{line}:{col}: " if line is not None else ""
        super().__init__(f"{loc}{kind}: {message}")
        self.kind = kind
        self.message = message
        self.line = line
        self.col = col


# SemaError kinds
UNKNOWN_NAME = "UnknownName"
ARITY_MISMATCH = "ArityMismatch"
TYPE_MISMATCH = "TypeMismatch"
OVERLAPPING_EQUATIONS = "OverlappingEquations"
INDEX_OUT_OF_BOUNDS = "IndexOutOfBounds"
UNBOUND_HOLE = "UnboundHole"
NON_CONSTANT_GUARD = "NonConstantGuard"
DIVISION_BY_ZERO = "DivisionByZero"


class SemaFailure(SheetgenError):
    """Raised when check() finds one or more semantic errors."""

    def __init__(self, errors: list[SemaError]):
        super().__init__("; ".join(str(e) for e in errors))
        self.errors = errors


class LayoutError(SheetgenError):
    pass


class CodegenError(SheetgenError):
    """Errors surfaced while expanding equations (e.g. an index out of bounds)."""

    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind
        self.message = message


class FormatError(SheetgenError):
    """Malformed serialized grid. Carries a 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        loc = f"line {line}: " if line is not None else ""
        super().__init__(f"{loc}{message}")
        self.message = message
        self.line = line


class ParamError(SheetgenError):
    """One invalid template parameter. `code` is stable for API clients."""

    def __init__(self, param: str, code: str, message: str):
        super().__init__(f"{param}: {code}: {message}")
        self.param = param
        self.code = code
        self.message = message


MISSING_PARAM = "MissingParam"
BAD_CELL_REF = "BadCellRef"
RANGE_NOT_LINEAR = "RangeNotLinear"
LENGTH_MISMATCH = "LengthMismatch"
BAD_VALUE = "BadValue"
UNKNOWN_PARAM = "UnknownParam"


class ParamFailure(SheetgenError):
    def __init__(self, errors: list[ParamError]):
        super().__init__("; ".join(str(e) for e in errors))
        self.errors = errors


class StageError(SheetgenError):
    """Wraps an error from one stage of template instantiation."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause
