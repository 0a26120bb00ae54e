"""Tests for the flatpack command-line driver."""

from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from flatpack import __version__
from flatpack.cli import cli
from flatpack.design.library import get_library

# Designs whose geometry is worked out end to end
COMPILABLE = (
    "bookend",
    "reading_desk",
    "reading_desk_flipped",
    "reading_desk_reordered",
    "reading_desk_composed",
    "reading_desk_three_part",
    "stool",
)


@pytest.fixture()
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture(autouse=True)
def builtin_library_only(monkeypatch):
    monkeypatch.setattr("flatpack.core.config.settings.library_path", "")
    get_library.cache_clear()
    yield
    get_library.cache_clear()


# ------------------------------------------------------------------
# compile
# ------------------------------------------------------------------


@pytest.mark.integration
class TestCompileCommand:
    @pytest.mark.parametrize("name", COMPILABLE)
    def test_fixture_compiles(self, name, runner, design_path, tmp_path) -> None:
        result = runner.invoke(cli, ["compile", str(design_path(name)), "-o", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert (tmp_path / "report.json").is_file()

    def test_reading_desk_report(self, runner, design_path, tmp_path) -> None:
        result = runner.invoke(
            cli,
            [
                "compile",
                str(design_path("reading_desk")),
                "--thickness", "3",
                "--kerf", "0.1",
                "--fit", "0.05",
                "-o", str(tmp_path),
            ],
        )
        assert result.exit_code == 0, result.output
        assert "parts: 11 -> 10 after merge" in result.output
        assert "10 user + 7 auto intersections" in result.output
        report = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
        assert report["joint_count"] == 17

    def test_sheet_option(self, runner, design_path, tmp_path) -> None:
        result = runner.invoke(
            cli,
            ["compile", str(design_path("bookend")), "--sheet", "300x300", "-o", str(tmp_path)],
        )
        assert result.exit_code == 0, result.output
        assert "sheets: 2" in result.output
        assert (tmp_path / "bookend-sheet2.svg").is_file()

    def test_formats_option(self, runner, design_path, tmp_path) -> None:
        result = runner.invoke(
            cli,
            ["compile", str(design_path("bookend")), "--formats", "dxf", "-o", str(tmp_path)],
        )
        assert result.exit_code == 0, result.output
        assert sorted(p.name for p in tmp_path.iterdir()) == [
            "bookend-sheet1.dxf",
            "report.json",
            "report.txt",
        ]

    def test_spec_file(self, runner, design_path, tmp_path) -> None:
        spec_file = tmp_path / "spec.yaml"
        spec_file.write_text("thickness: 6\nkerf: 0.15\n", encoding="utf-8")
        result = runner.invoke(
            cli,
            [
                "compile",
                str(design_path("bookend")),
                "--spec", str(spec_file),
                "--kerf", "0.1",
                "-o", str(tmp_path / "out"),
            ],
        )
        assert result.exit_code == 0, result.output

    def test_broken_design(self, runner, design_path, tmp_path) -> None:
        result = runner.invoke(cli, ["compile", str(design_path("broken")), "-o", str(tmp_path)])
        assert result.exit_code == 2
        assert "[flatten] E_REFERENCE" in result.output

    def test_invalid_spec_value(self, runner, design_path, tmp_path) -> None:
        result = runner.invoke(
            cli,
            ["compile", str(design_path("bookend")), "--thickness", "-1", "-o", str(tmp_path)],
        )
        assert result.exit_code == 2
        assert "E_SCHEMA" in result.output

    @pytest.mark.parametrize(
        "args",
        [["--sheet", "large"], ["--formats", "pdf"]],
    )
    def test_bad_options(self, args, runner, design_path, tmp_path) -> None:
        result = runner.invoke(
            cli, ["compile", str(design_path("bookend")), *args, "-o", str(tmp_path)]
        )
        assert result.exit_code == 2

    def test_kerf_help(self, runner) -> None:
        result = runner.invoke(cli, ["compile", "--help"])
        text = " ".join(result.output.split())
        assert "Material width removed by the cutting tool, compensated in joint" in text


# ------------------------------------------------------------------
# validate / params
# ------------------------------------------------------------------


class TestValidateCommand:
    def test_valid_design(self, runner, design_path) -> None:
        result = runner.invoke(cli, ["validate", str(design_path("reading_desk"))])
        assert result.exit_code == 0
        assert result.stdout == ""

    def test_broken_design(self, runner, design_path) -> None:
        result = runner.invoke(cli, ["validate", str(design_path("broken"))])
        assert result.exit_code == 2
        (line,) = result.stdout.splitlines()
        diagnostic = json.loads(line)
        assert diagnostic["code"] == "E_REFERENCE"
        assert diagnostic["severity"] == "error"


class TestParamsCommand:
    def test_simple_table(self, runner, design_path) -> None:
        result = runner.invoke(cli, ["params", str(design_path("simple_table"))])
        assert result.exit_code == 0, result.output
        lines = result.stdout.splitlines()
        assert lines[:2] == ["free: 4", "total: 22"]
        assert len(lines) == 2 + 4

    def test_unconstrained_rectangle(self, runner, write_design) -> None:
        path = write_design(
            "flatpack: 1\ncomponents:\n  - {id: a, template: rectangle, bindings: {l: 10, w: 20}}\n"
            "connections: []\n"
        )
        result = runner.invoke(cli, ["params", str(path)])
        assert result.exit_code == 0, result.output
        assert result.stdout.splitlines()[:2] == ["free: 2", "total: 2"]

    def test_rocker_chair(self, runner, design_path) -> None:
        result = runner.invoke(cli, ["params", str(design_path("rocker_chair"))])
        assert result.exit_code == 0, result.output
        assert result.stdout.splitlines()[0] == "free: 8"


# ------------------------------------------------------------------
# library
# ------------------------------------------------------------------


class TestLibraryCommand:
    def test_show_rectangle(self, runner) -> None:
        result = runner.invoke(cli, ["library", "--show", "rectangle"])
        assert result.exit_code == 0, result.output
        lines = result.stdout.splitlines()
        assert lines[0] == "rectangle (builtin)"
        assert [line.split()[1] for line in lines if line.strip().startswith("param")] == ["l", "w"]
        assert lines[-1] == "  interfaces b, r, t, l"

    def test_show_unknown(self, runner) -> None:
        result = runner.invoke(cli, ["library", "--show", "nosuch"])
        assert result.exit_code == 2
        assert "E_TEMPLATE" in result.output

    def test_list(self, runner) -> None:
        result = runner.invoke(cli, ["library", "--list"])
        assert result.exit_code == 0
        lines = result.stdout.splitlines()
        assert "rectangle(l, w) [builtin]" in lines
        names = {line.split("(")[0] for line in lines}
        assert {"rectangle", "trapezoid", "regular_polygon"} <= names

    def test_requires_an_option(self, runner) -> None:
        assert runner.invoke(cli, ["library"]).exit_code == 2


def test_version(runner) -> None:
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert __version__ in result.output
