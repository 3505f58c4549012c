"""Command-line interface: compile, eval, instantiate, doc and serve.

Exit codes: 0 success, 1 usage or parameter errors (bad flags, missing
files, invalid bindings), 2 compile or evaluation errors.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .cells import CellAddr, parse_a1
from .codegen import compile_grid
from .docs import render_docs
from .errors import ParamFailure, SheetgenError
from .evaluator import EvalConfig, evaluate
from .gridio import emit_json, emit_tsv, emit_values_csv, emit_values_json, parse_json, parse_tsv
from .grid import FormulaGrid
from .layout import resolve_layout
from .parser import parse_program
from .repo import bundled_repo_dir, load_template
from .sema import check
from .template import instantiate as instantiate_template
from .values import Value


@click.group()
def cli() -> None:
    """Compile spreadsheet templates and work with the results."""


def _read_source(path: str) -> str:
    p = Path(path)
    if not p.is_file():
        raise click.UsageError(f"no such file: {path}")
    return p.read_text("utf-8")


def _compile_source(source: str) -> FormulaGrid:
    program = parse_program(source)
    checked = check(program, require_closed=True)
    pm = resolve_layout(checked)
    return compile_grid(checked, pm)


def _emit_grid(grid: FormulaGrid, fmt: str) -> str:
    return emit_tsv(grid) if fmt == "tsv" else emit_json(grid)


def _write_output(text: str, output: str | None) -> None:
    if output is None:
        click.echo(text, nl=False)
    else:
        Path(output).write_text(text, "utf-8")


@cli.command("compile")
@click.argument("src")
@click.option("-o", "--output", default=None, help="Output file (default: stdout).")
@click.option("--format", "fmt", type=click.Choice(["tsv", "json"]), default="tsv", show_default=True)
def compile_cmd(src: str, output: str | None, fmt: str) -> None:
    """Compile a template source file into a formula grid."""
    grid = _compile_source(_read_source(src))
    _write_output(_emit_grid(grid, fmt), output)


def _load_grid(path: str) -> FormulaGrid:
    p = Path(path)
    if not p.is_file():
        raise click.UsageError(f"no such file: {path}")
    text = p.read_text("utf-8")
    if p.suffix == ".json" or text.lstrip().startswith("{"):
        return parse_json(text)
    return parse_tsv(text)


def _parse_override(spec: str) -> tuple[CellAddr, Value]:
    ref, eq, raw = spec.partition("=")
    if not eq:
        raise click.UsageError(f"--set wants Sheet!Cell=value, got {spec!r}")
    try:
        addr = parse_a1(ref)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None
    if not addr.sheet:
        raise click.UsageError(f"--set cell needs a sheet prefix: {spec!r}")
    try:
        return addr, float(raw)
    except ValueError:
        return addr, raw


@cli.command("eval")
@click.argument("gridfile")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for RAND().")
@click.option("--set", "overrides", multiple=True, metavar="Sheet!Cell=value",
              help="Override a cell before evaluating (repeatable).")
@click.option("--out", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
def eval_cmd(gridfile: str, seed: int, overrides: tuple[str, ...], fmt: str) -> None:
    """Evaluate a compiled grid and print the resulting values."""
    grid = _load_grid(gridfile)
    cfg = EvalConfig(seed=seed, overrides=[_parse_override(s) for s in overrides])
    values = evaluate(grid, cfg)
    click.echo(emit_values_csv(values) if fmt == "csv" else emit_values_json(values), nl=False)


@cli.command("instantiate")
@click.argument("template_dir")
@click.option("--param", "params", multiple=True, metavar="NAME=VALUE", help="One template parameter.")
@click.option("--params-file", default=None, help="JSON file of {name: value} bindings.")
@click.option("-o", "--output", default=None, help="Output file (default: stdout).")
@click.option("--format", "fmt", type=click.Choice(["tsv", "json"]), default="tsv", show_default=True)
def instantiate_cmd(
    template_dir: str, params: tuple[str, ...], params_file: str | None, output: str | None, fmt: str
) -> None:
    """Instantiate a component template with concrete bindings."""
    path = Path(template_dir)
    if not path.is_dir():
        raise click.UsageError(f"no such template directory: {template_dir}")
    bindings: dict[str, str] = {}
    if params_file is not None:
        pf = Path(params_file)
        if not pf.is_file():
            raise click.UsageError(f"no such file: {params_file}")
        loaded = json.loads(pf.read_text("utf-8"))
        if not isinstance(loaded, dict):
            raise click.UsageError("--params-file must hold a JSON object")
        bindings.update({str(k): str(v) for k, v in loaded.items()})
    for spec in params:
        name, eq, value = spec.partition("=")
        if not eq:
            raise click.UsageError(f"--param wants NAME=VALUE, got {spec!r}")
        bindings[name] = value
    template = load_template(path)
    grid = instantiate_template(template, bindings)
    _write_output(_emit_grid(grid, fmt), output)


@cli.command("doc")
@click.argument("src")
@click.option("-o", "--output", required=True, help="Output HTML file.")
def doc_cmd(src: str, output: str) -> None:
    """Render a template source file as a literate HTML page."""
    source = _read_source(src)
    path = Path(src)
    # bundle sources are all called source.txt; the directory is the name
    title = path.parent.name if path.stem == "source" and path.parent.name else path.stem
    Path(output).write_text(render_docs(source, title=title), "utf-8")


@cli.command("serve")
@click.option("--port", type=int, default=8080, show_default=True)
@click.option("--templates", "templates_dir", default=None,
              help="Template repository directory (default: the bundled components).")
@click.option("--token-ttl", type=float, default=3600.0, show_default=True,
              help="Seconds a download link stays valid.")
@click.option("--ui", "ui_dir", default=None, help="Directory with the built web UI to serve at /.")
def serve_cmd(port: int, templates_dir: str | None, token_ttl: float, ui_dir: str | None) -> None:
    """Run the component repository HTTP service."""
    import uvicorn

    from .service import create_app

    templates = Path(templates_dir) if templates_dir else bundled_repo_dir()
    if not templates.is_dir():
        raise click.UsageError(f"no such template directory: {templates}")
    if ui_dir is not None and not Path(ui_dir).is_dir():
        raise click.UsageError(f"no such UI directory: {ui_dir}")
    app = create_app(templates, token_ttl=token_ttl, ui_dir=Path(ui_dir) if ui_dir else None)
    uvicorn.run(app, host="0.0.0.0", port=port)


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Abort:
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except ParamFailure as exc:
        for err in exc.errors:
            click.echo(f"error: {err}", err=True)
        return 1
    except SheetgenError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
