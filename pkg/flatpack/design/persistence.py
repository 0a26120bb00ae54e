"""YAML persistence of design models.

save_design writes a canonical document: fixed key order, floats for every
number, canonical expression text. Loading that text and saving again yields
the same bytes.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

import yaml

from flatpack.design.constraints import ConstraintExpr
from flatpack.design.expressions import Num, format_expression, parse_expression
from flatpack.design.library import TemplateLibrary, get_library, template_from_doc
from flatpack.design.model import (
    Alignment,
    ComponentDecl,
    Connection,
    DesignModel,
    HingeDecl,
    Include,
    ParameterDecl,
)
from flatpack.design.schema import FORMAT_VERSION, DesignDoc, validate_design_document
from flatpack.design.templates import ComponentTemplate
from flatpack.exceptions import CycleError, SchemaError

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------


def load_design(
    source: str | Path | dict[str, Any],
    *,
    library: TemplateLibrary | None = None,
    base_dir: Path | None = None,
) -> DesignModel:
    """Load a design from a file path, YAML text or an already parsed mapping.

    Included files are resolved next to the including file, then on the
    library search path.

    Raises:
        SchemaError: With the path of the first schema violation.
        VersionMismatchError: If the format header is not supported.
        CycleError: If included files include each other.
    """
    library = library or get_library()
    if isinstance(source, Path):
        return _load_file(source, library, ())
    if isinstance(source, str):
        source = _parse_yaml(source, "<string>")
    return _from_document(source, library, base_dir, (), "", "design")


def _parse_yaml(text: str, origin: str) -> Any:
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise SchemaError(f"invalid YAML in {origin}: {e}", "/") from None


def _load_file(path: Path, library: TemplateLibrary, chain: tuple[Path, ...]) -> DesignModel:
    path = Path(path).resolve()
    if path in chain:
        raise CycleError([p.name for p in (*chain, path)])
    data = _parse_yaml(path.read_text(encoding="utf-8"), str(path))
    logger.debug("Loading design %s", path)
    return _from_document(data, library, path.parent, (*chain, path), "", path.stem)


def _from_document(
    data: Any,
    library: TemplateLibrary,
    base_dir: Path | None,
    chain: tuple[Path, ...],
    prefix: str,
    default_name: str,
) -> DesignModel:
    doc: DesignDoc = validate_design_document(data, prefix)
    templates = {name: template_from_doc(name, t) for name, t in doc.templates.items()}

    parameters = []
    for name, value in doc.parameters.items():
        if isinstance(value, float):
            parameters.append(ParameterDecl(name, value))
        else:
            parameters.append(ParameterDecl(name, value.value, value.min, value.max))

    constraints = []
    for target, text in doc.constraints.items():
        c = ConstraintExpr(target, str(text))
        c.expr  # noqa: B018 - parse eagerly so syntax errors surface at load time
        constraints.append(c)

    includes = []
    for i, inc in enumerate(doc.includes):
        if inc.file is not None:
            sub = _load_file(library.find_design(inc.file, base_dir), library, chain)
        else:
            sub = _from_document(
                inc.design, library, base_dir, chain, f"{prefix}/includes/{i}/design", inc.alias
            )
        includes.append(Include(inc.alias, sub, dict(inc.bindings), inc.file))

    return DesignModel(
        name=doc.name or default_name,
        templates=templates,
        parameters=tuple(parameters),
        components=tuple(ComponentDecl(c.id, c.template, dict(c.bindings)) for c in doc.components),
        includes=tuple(includes),
        constraints=tuple(constraints),
        connections=tuple(
            Connection(
                connecting=c.connecting,
                connected=c.connected,
                alignment=Alignment(c.alignment),
                offset=c.offset,
                rotation=c.rotation,
            )
            for c in doc.connections
        ),
        exports=dict(doc.exports),
        no_joint=tuple(doc.no_joint),
        hinges=tuple(HingeDecl(h.component, h.region, h.rows, h.cols) for h in doc.hinges),
    )


# ---------------------------------------------------------------------------
# Saving
# ---------------------------------------------------------------------------


def _scalar(value: float | str) -> float | str:
    """Float for literals, canonical text for expressions."""
    if isinstance(value, str):
        expr = parse_expression(value)
        return expr.value if isinstance(expr, Num) else format_expression(expr)
    return float(value)


def _template_document(template: ComponentTemplate) -> dict[str, Any]:
    return {
        "params": {
            p.name: {"min": float(p.lower), "max": float(p.upper)} for p in template.parameters
        },
        "vertices": [[_scalar(x), _scalar(y)] for x, y in template.vertex_expressions or ()],
        "interfaces": {name: int(edge) for name, edge in template.interfaces},
    }


def design_to_document(model: DesignModel) -> dict[str, Any]:
    """Canonical mapping form of ``model``; empty optional sections are omitted."""
    doc: dict[str, Any] = {"flatpack": FORMAT_VERSION, "name": model.name}
    custom = {n: t for n, t in sorted(model.templates.items()) if not t.builtin}
    if custom:
        doc["templates"] = {n: _template_document(t) for n, t in custom.items()}
    if model.parameters:
        params = {}
        for p in model.parameters:
            entry: dict[str, float] = {"value": float(p.value)}
            if p.lower is not None:
                entry["min"] = float(p.lower)
            if p.upper is not None:
                entry["max"] = float(p.upper)
            params[p.name] = entry
        doc["parameters"] = params
    doc["components"] = [
        {
            "id": c.id,
            "template": c.template,
            "bindings": {k: _scalar(v) for k, v in c.bindings.items()},
        }
        for c in model.components
    ]
    if model.includes:
        includes = []
        for inc in model.includes:
            item: dict[str, Any] = {"alias": inc.alias}
            if inc.source is not None:
                item["file"] = inc.source
            else:
                item["design"] = design_to_document(inc.model)
            if inc.bindings:
                item["bindings"] = {k: _scalar(v) for k, v in inc.bindings.items()}
            includes.append(item)
        doc["includes"] = includes
    if model.constraints:
        doc["constraints"] = {c.target: c.canonical_text for c in model.constraints}
    doc["connections"] = [
        {
            "connecting": list(c.connecting),
            "connected": list(c.connected),
            "alignment": Alignment(c.alignment).value,
            "offset": [float(v) for v in c.offset],
            "rotation": [float(v) for v in c.rotation],
        }
        for c in model.connections
    ]
    if model.exports:
        doc["exports"] = {name: list(ep) for name, ep in model.exports.items()}
    if model.no_joint:
        doc["no_joint"] = [list(pair) for pair in model.no_joint]
    if model.hinges:
        doc["hinges"] = [
            {
                "component": h.component,
                "region": [float(v) for v in h.region],
                "rows": int(h.rows),
                "cols": int(h.cols),
            }
            for h in model.hinges
        ]
    return doc


def save_design(model: DesignModel, path: Path | None = None) -> str:
    """Serialize ``model`` as canonical YAML, optionally writing it to ``path``."""
    text = yaml.safe_dump(
        design_to_document(model),
        sort_keys=False,
        default_flow_style=None,
        allow_unicode=True,
        width=100,
    )
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
        logger.debug("Saved design %s to %s", model.name, path)
    return text
