"""Component bundles on disk and the repository catalog.

A bundle is a directory holding `source.txt` (the template program),
`manifest.json` (versioned parameter specs), `metadata.json` (id, title,
summary) and `example.json` (a complete binding set plus sample input
values for previews). On load the manifest is checked against the
source's holes, so a catalog entry is always instantiable.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import FormatError
from .template import PARAM_KINDS, ComponentTemplate, ParamSpec

MANIFEST_VERSION = 1

SOURCE_FILE = "source.txt"
MANIFEST_FILE = "manifest.json"
METADATA_FILE = "metadata.json"
EXAMPLE_FILE = "example.json"


def load_template(bundle_dir: Path | str) -> ComponentTemplate:
    bundle = Path(bundle_dir)

    def read_json(name: str) -> dict:
        path = bundle / name
        if not path.is_file():
            raise FormatError(f"{bundle.name}: missing {name}")
        try:
            obj = json.loads(path.read_text("utf-8"))
        except json.JSONDecodeError as exc:
            raise FormatError(f"{bundle.name}/{name}: bad JSON: {exc}") from None
        if not isinstance(obj, dict):
            raise FormatError(f"{bundle.name}/{name}: expected an object")
        return obj

    source_path = bundle / SOURCE_FILE
    if not source_path.is_file():
        raise FormatError(f"{bundle.name}: missing {SOURCE_FILE}")
    source = source_path.read_text("utf-8")

    metadata = read_json(METADATA_FILE)
    for key in ("id", "title", "summary"):
        if not isinstance(metadata.get(key), str):
            raise FormatError(f"{bundle.name}/{METADATA_FILE}: missing field {key!r}")

    manifest = read_json(MANIFEST_FILE)
    if manifest.get("version") != MANIFEST_VERSION:
        raise FormatError(f"{bundle.name}/{MANIFEST_FILE}: unsupported version {manifest.get('version')!r}")
    params = [_param_from_obj(bundle.name, p) for p in manifest.get("params", [])]

    example = read_json(EXAMPLE_FILE)
    bindings = example.get("bindings", {})
    inputs = example.get("inputs", {})

    template = ComponentTemplate(
        id=metadata["id"],
        title=metadata["title"],
        summary=metadata["summary"],
        source=source,
        params=params,
        example_bindings={str(k): str(v) for k, v in bindings.items()},
        example_inputs={str(k): v for k, v in inputs.items()},
    )
    _check_manifest_covers_holes(bundle.name, template)
    return template


def _param_from_obj(bundle_name: str, obj: dict) -> ParamSpec:
    if not isinstance(obj, dict) or not isinstance(obj.get("name"), str):
        raise FormatError(f"{bundle_name}/{MANIFEST_FILE}: parameter without a name")
    kind = obj.get("kind")
    if kind not in PARAM_KINDS:
        raise FormatError(f"{bundle_name}/{MANIFEST_FILE}: parameter {obj['name']!r} has unknown kind {kind!r}")
    binds = obj.get("binds", {})
    return ParamSpec(
        name=obj["name"],
        kind=kind,
        label=obj.get("label", obj["name"]),
        binds_constant=binds.get("constant"),
        binds_table=binds.get("table"),
        binds_index_type=binds.get("index_type"),
    )


def _check_manifest_covers_holes(bundle_name: str, template: ComponentTemplate) -> None:
    constants, types, tables = template.holes()
    bound_constants = {p.binds_constant for p in template.params if p.binds_constant}
    bound_types = {p.binds_index_type for p in template.params if p.binds_index_type}
    bound_tables = {p.binds_table for p in template.params if p.binds_table}
    for what, holes, bound in (
        ("constants", constants, bound_constants),
        ("index types", types, bound_types),
        ("tables", tables, bound_tables),
    ):
        missing = holes - bound
        extra = bound - holes
        if missing:
            raise FormatError(f"{bundle_name}: manifest leaves {what} unbound: {', '.join(sorted(missing))}")
        if extra:
            raise FormatError(f"{bundle_name}: manifest binds unknown {what}: {', '.join(sorted(extra))}")


def scan(repo_dir: Path | str) -> tuple[list[ComponentTemplate], list[tuple[str, str]]]:
    """Load every bundle under repo_dir; malformed ones become problem records."""
    repo = Path(repo_dir)
    templates: list[ComponentTemplate] = []
    problems: list[tuple[str, str]] = []
    if not repo.is_dir():
        raise FormatError(f"{repo} is not a directory")
    for entry in sorted(repo.iterdir()):
        if not entry.is_dir():
            continue
        try:
            templates.append(load_template(entry))
        except FormatError as exc:
            problems.append((entry.name, str(exc)))
    templates.sort(key=lambda t: t.id)
    return templates, problems


def catalog(repo_dir: Path | str) -> list[tuple[str, str, str]]:
    """Stable id-sorted listing of (id, title, summary)."""
    templates, _ = scan(repo_dir)
    return [(t.id, t.title, t.summary) for t in templates]


def bundled_repo_dir() -> Path:
    return Path(__file__).parent / "templates"
