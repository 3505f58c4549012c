"""sheetgen: a compiler and component repository for spreadsheet templates.

Templates are programs of guarded equations over named cell tables.
Instantiated with concrete cell ranges and constants they compile into
plain spreadsheet formulae, which the built-in evaluator can execute and
verify. Components live in a repository served over HTTP and a CLI.
"""

from .ast import Program
from .cells import CellAddr, parse_a1
from .codegen import compile_grid, fold_constants, rewrite_reference
from .docs import render_docs
from .errors import (
    CodegenError,
    FormatError,
    LayoutError,
    ParamError,
    ParamFailure,
    ParseError,
    SemaError,
    SemaFailure,
    SheetgenError,
    StageError,
)
from .evaluator import EvalConfig, EvalError, builtin, evaluate
from .grid import Formula, FormulaGrid, LiteralNumber, LiteralText, overlay
from .gridio import (
    emit_json,
    emit_tsv,
    emit_values_csv,
    emit_values_json,
    parse_json,
    parse_tsv,
)
from .layout import PlacementMap, addr_of, resolve_layout
from .parser import parse_expression, parse_formula, parse_program
from .repo import bundled_repo_dir, catalog, load_template, scan
from .sema import CheckedProgram, check, classify_index, coverage
from .template import (
    ComponentTemplate,
    ParamSpec,
    instantiate,
    synthesize_prelude,
    validate_params,
)
from .values import CellError, Value

__version__ = "0.1.0"

__all__ = [
    "CellAddr",
    "CellError",
    "CheckedProgram",
    "CodegenError",
    "ComponentTemplate",
    "EvalConfig",
    "EvalError",
    "Formula",
    "FormatError",
    "FormulaGrid",
    "LayoutError",
    "LiteralNumber",
    "LiteralText",
    "ParamError",
    "ParamFailure",
    "ParamSpec",
    "ParseError",
    "PlacementMap",
    "Program",
    "SemaError",
    "SemaFailure",
    "SheetgenError",
    "StageError",
    "Value",
    "addr_of",
    "builtin",
    "bundled_repo_dir",
    "catalog",
    "check",
    "classify_index",
    "compile_grid",
    "coverage",
    "emit_json",
    "emit_tsv",
    "emit_values_csv",
    "emit_values_json",
    "evaluate",
    "fold_constants",
    "instantiate",
    "load_template",
    "overlay",
    "parse_a1",
    "parse_expression",
    "parse_formula",
    "parse_json",
    "parse_program",
    "parse_tsv",
    "render_docs",
    "resolve_layout",
    "rewrite_reference",
    "scan",
    "synthesize_prelude",
    "validate_params",
]
