"""Shared pytest fixtures for unit and integration tests.

Fixture designs live in tests/fixtures/designs. The ``library`` fixture has
no search directories, so tests never pick up templates from the
developer's FLATPACK_LIBRARY_PATH.

Usage in new test files:
    def test_something(load_fixture, spec):
        model = load_fixture("bookend")
        ...
"""

from __future__ import annotations

from pathlib import Path
from typing import Callable

import pytest

from flatpack.core.fabrication import FabricationSpec
from flatpack.design import DesignModel, FlatDesign, TemplateLibrary, flatten, load_design
from flatpack.design.templates import BUILTIN_TEMPLATES
from flatpack.passes.pipeline import CompileResult, compile_design

DESIGNS_DIR = Path(__file__).parent / "fixtures" / "designs"

# ------------------------------------------------------------------
# Specs and library
# ------------------------------------------------------------------


@pytest.fixture()
def spec() -> FabricationSpec:
    """3 mm plywood, 0.1 mm kerf, 0.05 mm fit on a 1200 x 900 mm sheet."""
    return FabricationSpec(
        thickness=3.0,
        kerf=0.1,
        interference=0.05,
        sheet_width=1200.0,
        sheet_height=900.0,
        spacing=5.0,
    )


@pytest.fixture()
def library() -> TemplateLibrary:
    """Built-in templates only."""
    return TemplateLibrary(dirs=[])


@pytest.fixture()
def rectangle():
    return BUILTIN_TEMPLATES["rectangle"]


# ------------------------------------------------------------------
# Fixture designs
# ------------------------------------------------------------------


@pytest.fixture()
def design_path() -> Callable[[str], Path]:
    """Path of a fixture design by stem."""

    def _path(name: str) -> Path:
        path = DESIGNS_DIR / f"{name}.yaml"
        assert path.is_file(), f"missing fixture {path}"
        return path

    return _path


@pytest.fixture()
def load_fixture(design_path, library) -> Callable[[str], DesignModel]:
    def _load(name: str) -> DesignModel:
        return load_design(design_path(name), library=library)

    return _load


@pytest.fixture()
def flat_fixture(load_fixture, library) -> Callable[[str], FlatDesign]:
    def _flat(name: str) -> FlatDesign:
        return flatten(load_fixture(name), library)

    return _flat


@pytest.fixture()
def compile_fixture(load_fixture, spec, library) -> Callable[[str], CompileResult]:
    def _compile(name: str) -> CompileResult:
        return compile_design(load_fixture(name), spec, library)

    return _compile


@pytest.fixture()
def write_design(tmp_path) -> Callable[[str, str], Path]:
    """Write YAML text to tmp_path/<name>.yaml and return the path."""

    def _write(text: str, name: str = "design") -> Path:
        path = tmp_path / f"{name}.yaml"
        path.write_text(text, encoding="utf-8")
        return path

    return _write
