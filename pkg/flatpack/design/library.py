"""Template library: built-ins plus YAML files on the library search path."""

from __future__ import annotations

import logging
from functools import lru_cache
from pathlib import Path
from typing import Mapping

import yaml

from flatpack.core.config import settings
from flatpack.design.schema import TemplateDoc, validate_library_document
from flatpack.design.templates import (
    BUILTIN_TEMPLATES,
    ComponentTemplate,
    ParameterSpec,
    custom_template,
)
from flatpack.exceptions import DesignReferenceError, TemplateNotFoundError

logger = logging.getLogger(__name__)


def template_from_doc(name: str, doc: TemplateDoc) -> ComponentTemplate:
    """Build a custom template from its document form."""
    params = [ParameterSpec(p, bounds.min, bounds.max) for p, bounds in doc.params.items()]
    vertices = [(_scalar_text(x), _scalar_text(y)) for x, y in doc.vertices]
    return custom_template(name, params, vertices, doc.interfaces)


def _scalar_text(value: float | str) -> str:
    if isinstance(value, str):
        return value
    return repr(float(value))


class TemplateLibrary:
    """Registry of component templates and search path for included designs."""

    def __init__(self, dirs: list[Path] | None = None) -> None:
        self.dirs = list(dirs) if dirs is not None else settings.library_dirs()
        self._templates: dict[str, ComponentTemplate] = dict(BUILTIN_TEMPLATES)
        self._sources: dict[str, str] = {name: "builtin" for name in BUILTIN_TEMPLATES}
        for directory in self.dirs:
            for path in sorted(directory.glob("*.yaml")):
                self._load_file(path)

    def _load_file(self, path: Path) -> None:
        data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
        doc = validate_library_document(data, str(path))
        for name, template_doc in doc.templates.items():
            self.register(template_from_doc(name, template_doc), str(path))
        logger.debug("Loaded %d templates from %s", len(doc.templates), path)

    def register(self, template: ComponentTemplate, source: str = "runtime") -> None:
        """Add ``template``; a template of the same name is replaced with a warning."""
        if template.name in self._templates:
            logger.warning(
                "Template %s from %s shadows %s",
                template.name,
                source,
                self._sources[template.name],
            )
        self._templates[template.name] = template
        self._sources[template.name] = source

    def get(
        self, name: str, local: Mapping[str, ComponentTemplate] | None = None
    ) -> ComponentTemplate:
        """Look up ``name`` in ``local`` templates first, then the library.

        Raises:
            TemplateNotFoundError: If neither has the template.
        """
        if local and name in local:
            return local[name]
        template = self._templates.get(name)
        if template is None:
            raise TemplateNotFoundError(name)
        return template

    def names(self) -> list[str]:
        return sorted(self._templates)

    def source(self, name: str) -> str:
        return self._sources.get(name, "local")

    def find_design(self, ref: str, base_dir: Path | None = None) -> Path:
        """Resolve an included design file: next to the including file, then the search path.

        Raises:
            DesignReferenceError: If no candidate exists.
        """
        candidates = []
        ref_path = Path(ref)
        if ref_path.is_absolute():
            candidates.append(ref_path)
        else:
            if base_dir is not None:
                candidates.append(base_dir / ref_path)
            candidates.extend(d / ref_path for d in self.dirs)
        for candidate in candidates:
            if candidate.is_file():
                return candidate
        raise DesignReferenceError(f"Included design '{ref}' not found")


@lru_cache(maxsize=1)
def get_library() -> TemplateLibrary:
    """Library built from the configured search path."""
    return TemplateLibrary()
