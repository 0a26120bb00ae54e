"""Command-line driver: compile, validate, library and params.

Exit codes: 0 success, 1 internal error, 2 invalid input (any FlatpackError).
"""

from __future__ import annotations

import functools
import logging
from pathlib import Path
from typing import Callable

import click

from flatpack import __version__
from flatpack.core.config import settings
from flatpack.core.fabrication import FabricationSpec
from flatpack.design.flatten import flatten
from flatpack.design.library import TemplateLibrary, get_library
from flatpack.design.persistence import load_design
from flatpack.design.validation import validate_design
from flatpack.exceptions import FlatpackError
from flatpack.export import DEFAULT_FORMATS, available_formats
from flatpack.passes.pipeline import CompilePipeline

logger = logging.getLogger(__name__)

USER_ERROR_EXIT = 2


class DiagnosticError(click.ClickException):
    """A compiler error reported to the user with exit code 2."""

    exit_code = USER_ERROR_EXIT

    def __init__(self, error: FlatpackError) -> None:
        stage = f"[{error.stage}] " if error.stage else ""
        where = f" at {error.path}" if error.path else ""
        super().__init__(f"{stage}{error.code}: {error}{where}")
        self.error = error


def user_errors(func: Callable) -> Callable:
    """Turn FlatpackError into a DiagnosticError."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except FlatpackError as e:
            raise DiagnosticError(e) from e

    return wrapper


def _parse_sheet(ctx, param, value: str | None) -> tuple[float, float] | None:
    if value is None:
        return None
    try:
        width, height = (float(v) for v in value.lower().split("x"))
    except ValueError:
        raise click.BadParameter("expected WIDTHxHEIGHT in mm, e.g. 600x400") from None
    return width, height


def _parse_formats(ctx, param, value: str) -> tuple[str, ...]:
    formats = tuple(f.strip().lower() for f in value.split(",") if f.strip())
    unknown = [f for f in formats if f not in available_formats()]
    if unknown or not formats:
        raise click.BadParameter(
            f"unknown format(s) {', '.join(unknown) or '(none)'}; "
            f"choose from {', '.join(available_formats())}"
        )
    return formats


@click.group()
@click.version_option(__version__, prog_name="flatpack")
@click.option("-v", "--verbose", is_flag=True, help="Log at DEBUG level.")
def cli(verbose: bool) -> None:
    """Compile flat-pack furniture designs into cut files."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else settings.get_log_level_int(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )


# ---------------------------------------------------------------------------
# compile
# ---------------------------------------------------------------------------


@cli.command("compile")
@click.argument("design", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--spec", "spec_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--thickness", type=float, help="Material thickness, mm.")
@click.option(
    "--kerf",
    type=float,
    help="Material width removed by the cutting tool, compensated in joint dimensions (mm).",
)
@click.option("--fit", type=float, help="Interference fit, mm.")
@click.option("--sheet", callback=_parse_sheet, help="Sheet size WIDTHxHEIGHT, mm.")
@click.option("--spacing", type=float, help="Gap between parts on a sheet, mm.")
@click.option(
    "-o",
    "--output",
    "out_dir",
    type=click.Path(file_okay=False, path_type=Path),
    default=Path("out"),
    show_default=True,
)
@click.option(
    "--formats",
    default=",".join(DEFAULT_FORMATS),
    show_default=True,
    callback=_parse_formats,
)
@user_errors
def compile_command(
    design: Path,
    spec_file: Path | None,
    thickness: float | None,
    kerf: float | None,
    fit: float | None,
    sheet: tuple[float, float] | None,
    spacing: float | None,
    out_dir: Path,
    formats: tuple[str, ...],
) -> None:
    """Compile DESIGN and write cut files, a preview mesh and a report."""
    overrides = {
        "thickness": thickness,
        "kerf": kerf,
        "interference": fit,
        "spacing": spacing,
    }
    if sheet is not None:
        overrides["sheet_width"], overrides["sheet_height"] = sheet
    spec = FabricationSpec.resolve(spec_file, overrides)
    pipeline = CompilePipeline(spec)
    result = pipeline.compile(pipeline.load(design))
    written = pipeline.write(result, out_dir, formats)
    click.echo(result.report.to_text(), nl=False)
    for path in written:
        click.echo(f"wrote {path}")


# ---------------------------------------------------------------------------
# validate / params
# ---------------------------------------------------------------------------


@cli.command("validate")
@click.argument("design", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.pass_context
def validate_command(ctx: click.Context, design: Path) -> None:
    """Check DESIGN without any geometry pass; prints JSON-line diagnostics."""
    diagnostics = validate_design(design)
    for diagnostic in diagnostics:
        click.echo(diagnostic.to_json())
    if any(d.severity == "error" for d in diagnostics):
        ctx.exit(USER_ERROR_EXIT)


@cli.command("params")
@click.argument("design", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@user_errors
def params_command(design: Path) -> None:
    """Print the free and total parameter counts of DESIGN."""
    flat = flatten(load_design(design))
    click.echo(f"free: {len(flat.free_parameters)}")
    click.echo(f"total: {flat.total_parameters}")
    for name in flat.free_parameters:
        click.echo(f"  {name} = {flat.bindings[name]:g}")


# ---------------------------------------------------------------------------
# library
# ---------------------------------------------------------------------------


def _describe(library: TemplateLibrary, name: str) -> list[str]:
    template = library.get(name)
    lines = [f"{name} ({library.source(name)})"]
    for p in template.parameters:
        kind = " integer" if p.integer else ""
        lines.append(f"  param {p.name} [{p.lower:g}, {p.upper:g}]{kind}")
    if template.interface_generator is not None:
        lines.append("  interfaces e0 .. e(n-1)")
    else:
        lines.append("  interfaces " + ", ".join(n for n, _ in template.interfaces))
    return lines


@cli.command("library")
@click.option("--list", "list_all", is_flag=True, help="List every template.")
@click.option("--show", "show", metavar="TEMPLATE", help="Show one template.")
@user_errors
def library_command(list_all: bool, show: str | None) -> None:
    """List the component templates or show one of them."""
    library = get_library()
    if show is not None:
        for line in _describe(library, show):
            click.echo(line)
        return
    if not list_all:
        raise click.UsageError("pass --list or --show TEMPLATE")
    for name in library.names():
        template = library.get(name)
        params = ", ".join(template.parameter_names)
        click.echo(f"{name}({params}) [{library.source(name)}]")


def main() -> None:
    cli(prog_name="flatpack")

