"""Tests for YAML persistence and front-end validation."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from flatpack.design import load_design, save_design, validate_design
from flatpack.exceptions import CycleError, ParseError, SchemaError, VersionMismatchError

DESIGNS_DIR = Path(__file__).parent / "fixtures" / "designs"

ALL_FIXTURES = sorted(p.stem for p in DESIGNS_DIR.glob("*.yaml"))

MINIMAL = """
flatpack: 1
name: plank
components:
  - {id: plank, template: rectangle, bindings: {l: 400, w: 90}}
connections: []
"""


# ------------------------------------------------------------------
# Loading
# ------------------------------------------------------------------


class TestLoadDesign:
    def test_minimal_document(self, library) -> None:
        model = load_design(MINIMAL, library=library)
        assert model.name == "plank"
        assert len(model.components) == 1
        assert model.connections == ()

    def test_reading_desk_counts(self, load_fixture) -> None:
        model = load_fixture("reading_desk")
        assert len(model.components) == 11
        assert len(model.connections) == 10

    def test_missing_connections(self, library) -> None:
        text = "flatpack: 1\ncomponents: []\n"
        with pytest.raises(SchemaError) as exc_info:
            load_design(text, library=library)
        assert exc_info.value.path == "/connections"
        assert exc_info.value.code == "E_SCHEMA"

    def test_unknown_key_path(self, library) -> None:
        text = MINIMAL.replace("bindings:", "colour: red, bindings:")
        with pytest.raises(SchemaError) as exc_info:
            load_design(text, library=library)
        assert exc_info.value.path == "/components/0/colour"

    def test_version_mismatch(self, library) -> None:
        with pytest.raises(VersionMismatchError):
            load_design(MINIMAL.replace("flatpack: 1", "flatpack: 2"), library=library)

    def test_missing_header(self, library) -> None:
        with pytest.raises(SchemaError, match="format header"):
            load_design("components: []\nconnections: []\n", library=library)

    def test_invalid_yaml(self, library) -> None:
        with pytest.raises(SchemaError, match="invalid YAML"):
            load_design("flatpack: [1\n", library=library)

    def test_malformed_constraint_surfaces_at_load(self, library) -> None:
        text = MINIMAL + "constraints: {w: (l +}\n"
        with pytest.raises(ParseError):
            load_design(text, library=library)

    def test_include_cycle(self, write_design, library) -> None:
        write_design(
            "flatpack: 1\nincludes: [{alias: b, file: b.yaml}]\nconnections: []\n", name="a"
        )
        path = write_design(
            "flatpack: 1\nincludes: [{alias: a, file: a.yaml}]\nconnections: []\n", name="b"
        )
        with pytest.raises(CycleError):
            load_design(path, library=library)


# ------------------------------------------------------------------
# Saving
# ------------------------------------------------------------------


class TestSaveDesign:
    @pytest.mark.parametrize("name", ALL_FIXTURES)
    def test_save_load_save_is_byte_identical(self, name, load_fixture, library) -> None:
        first = save_design(load_fixture(name))
        second = save_design(load_design(first, library=library, base_dir=DESIGNS_DIR))
        assert first == second

    def test_canonical_numbers_and_expressions(self, write_design, library) -> None:
        path = write_design(
            """
flatpack: 1
parameters: {size: 100}
components:
  - {id: a, template: rectangle, bindings: {l: size*2, w: 5}}
connections: []
"""
        )
        text = save_design(load_design(path, library=library))
        assert "l: size * 2" in text
        assert "w: 5.0" in text
        assert "value: 100.0" in text

    def test_save_writes_file(self, tmp_path, load_fixture, library) -> None:
        out = tmp_path / "bookend.yaml"
        text = save_design(load_fixture("bookend"), out)
        assert out.read_text(encoding="utf-8") == text
        assert len(load_design(out, library=library).components) == 2


# ------------------------------------------------------------------
# Validation diagnostics
# ------------------------------------------------------------------


class TestValidateDesign:
    def test_valid_fixture(self, design_path, library) -> None:
        assert validate_design(design_path("reading_desk"), library) == []

    def test_reference_error(self, design_path, library) -> None:
        diagnostics = validate_design(design_path("broken"), library)
        assert [d.code for d in diagnostics] == ["E_REFERENCE"]
        record = json.loads(diagnostics[0].to_json())
        assert record["severity"] == "error"
        assert "side" in record["message"]

    def test_cycle(self, write_design, library) -> None:
        path = write_design(
            """
flatpack: 1
parameters: {x: 1, y: 2}
constraints: {x: y + 1, y: x * 2}
components:
  - {id: a, template: rectangle, bindings: {l: x, w: y}}
connections: []
"""
        )
        assert [d.code for d in validate_design(path, library)] == ["E_CYCLE"]

    def test_disconnected(self, write_design, library) -> None:
        path = write_design(
            """
flatpack: 1
components:
  - {id: a, template: rectangle, bindings: {l: 10, w: 10}}
  - {id: b, template: rectangle, bindings: {l: 10, w: 10}}
connections: []
"""
        )
        diagnostics = validate_design(path, library)
        assert [d.code for d in diagnostics] == ["E_DISCONNECTED"]
        assert "a" in diagnostics[0].message and "b" in diagnostics[0].message

    def test_empty_design(self, write_design, library) -> None:
        path = write_design("flatpack: 1\ncomponents: []\nconnections: []\n", name="bare")
        diagnostics = validate_design(path, library)
        assert [d.code for d in diagnostics] == ["E_EMPTY_DESIGN"]
        assert "'bare'" in diagnostics[0].message

    def test_schema_error_carries_path(self, write_design, library) -> None:
        path = write_design("flatpack: 1\ncomponents: []\n")
        diagnostics = validate_design(path, library)
        assert [(d.code, d.path) for d in diagnostics] == [("E_SCHEMA", "/connections")]
