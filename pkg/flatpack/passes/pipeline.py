"""Compile pipeline orchestrating the passes from design model to cut files."""

from __future__ import annotations

import json
import logging
import time
from collections import Counter
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping

import numpy as np

from flatpack.core.fabrication import FabricationSpec
from flatpack.design.component import ComponentInstance
from flatpack.design.flatten import FlatDesign, flatten
from flatpack.design.library import TemplateLibrary, get_library
from flatpack.design.model import DesignModel
from flatpack.design.persistence import load_design
from flatpack.exceptions import FlatpackError
from flatpack.export import DEFAULT_FORMATS, EmitContext, EmittedFile, get_emitter
from flatpack.export.layout import SheetLayout, layout_sheets
from flatpack.passes.intersect import (
    IntersectionRecord,
    classify_and_assign,
    find_intersection_segments,
    merge_coplanar,
)
from flatpack.passes.joints import (
    JointPattern,
    apply_patterns,
    flex_hinge_pattern,
    pattern_for_record,
)
from flatpack.passes.placement import PlacedModel, place_components

logger = logging.getLogger(__name__)


@dataclass
class CompileReport:
    """Counts of one compilation; everything except timings is deterministic."""

    design: str
    parts_before_merge: int = 0
    parts_after_merge: int = 0
    user_connections: int = 0
    user_records: int = 0
    auto_records: int = 0
    joints: dict[str, int] = field(default_factory=dict)
    sheets: int = 0
    free_parameters: int = 0
    total_parameters: int = 0
    warnings: list[str] = field(default_factory=list)
    records: list[str] = field(default_factory=list)
    timings_ms: dict[str, float] = field(default_factory=dict)

    @property
    def joint_count(self) -> int:
        return sum(self.joints.values())

    def to_text(self) -> str:
        lines = [
            f"design: {self.design}",
            f"parts: {self.parts_before_merge} -> {self.parts_after_merge} after merge",
            f"connections: {self.user_connections} user, "
            f"{self.user_records} user + {self.auto_records} auto intersections",
            f"joints: {self.joint_count} "
            + " ".join(f"{kind}={n}" for kind, n in sorted(self.joints.items())),
            f"sheets: {self.sheets}",
            f"parameters: {self.free_parameters} free / {self.total_parameters} total",
            *self.records,
            *(f"warning: {w}" for w in self.warnings),
        ]
        return "\n".join(lines) + "\n"

    def to_json(self, *, timings: bool = True) -> str:
        data = asdict(self)
        data["joint_count"] = self.joint_count
        if not timings:
            data.pop("timings_ms")
        return json.dumps(data, indent=2, sort_keys=True) + "\n"


@dataclass
class CompileResult:
    design: FlatDesign
    placed: PlacedModel  # before the coplanar merge
    merged: PlacedModel  # after merge, with feature lists assigned
    records: list[IntersectionRecord]
    patterns: list[JointPattern]
    parts: dict[str, ComponentInstance]
    layout: SheetLayout
    spec: FabricationSpec
    report: CompileReport

    def emit(self, formats: Iterable[str] = DEFAULT_FORMATS) -> list[EmittedFile]:
        context = EmitContext(self.design.name, self.parts, self.layout, self.spec)
        files: list[EmittedFile] = []
        for name in formats:
            files.extend(get_emitter(name).emit(context))
        return files


# ---------------------------------------------------------------------------
# Joint synthesis
# ---------------------------------------------------------------------------


def joint_counts(patterns: Iterable[JointPattern]) -> Mapping[str, int]:
    return Counter(p.kind.value for p in patterns)


def _hinge_region(
    placed: PlacedModel, merged: PlacedModel, component: str, region
) -> tuple[str, tuple[float, float, float, float]]:
    """Hinge region moved into the frame of the part that now carries it."""
    owner = merged.resolve(component)
    if owner == component:
        return owner, tuple(region)
    rel = merged.placement(owner).inverse() @ placed.placement(component)
    x0, y0, x1, y1 = region
    corners = rel.apply(np.array([[x0, y0, 0.0], [x1, y0, 0.0], [x1, y1, 0.0], [x0, y1, 0.0]]))
    lo, hi = corners[:, :2].min(axis=0), corners[:, :2].max(axis=0)
    return owner, (float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1]))


def synthesize_joints(
    merged: PlacedModel,
    records: list[IntersectionRecord],
    spec: FabricationSpec,
    placed: PlacedModel | None = None,
) -> tuple[dict[str, ComponentInstance], list[JointPattern]]:
    """Joint patterns for every record and hinge, applied to the parts.

    Raises:
        JointError: If a joint cannot be sized, placed or combined.
    """
    patterns = [pattern_for_record(r, merged.parts, spec) for r in records]
    for hinge in merged.design.hinges:
        owner, region = _hinge_region(placed or merged, merged, hinge.component, hinge.region)
        patterns.append(flex_hinge_pattern(owner, region, spec, hinge.rows, hinge.cols))
    parts = apply_patterns(merged.parts, patterns)
    logger.info("Synthesized %d joint patterns", len(patterns))
    return parts, patterns


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------


class CompilePipeline:
    """Runs every pass in order and collects a CompileReport.

    Errors from the passes leave with ``stage`` set to the stage that raised
    them; anything else is logged with its traceback and propagates as is.
    """

    def __init__(
        self,
        spec: FabricationSpec | None = None,
        library: TemplateLibrary | None = None,
    ) -> None:
        self.spec = spec or FabricationSpec.defaults()
        self.library = library or get_library()
        self.timings: dict[str, float] = {}

    @contextmanager
    def stage(self, name: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        except FlatpackError as e:
            if e.stage is None:
                e.stage = name
            logger.error("Stage %s failed: %s", name, e)
            raise
        except Exception:
            logger.exception("Internal error in stage %s", name)
            raise
        finally:
            self.timings[name] = round((time.perf_counter() - start) * 1000.0, 3)

    def load(self, path: Path) -> DesignModel:
        with self.stage("parse"):
            return load_design(Path(path), library=self.library)

    def compile(self, model: DesignModel) -> CompileResult:
        """Compile a design model to finished, laid out parts.

        Args:
            model: Parsed design, possibly hierarchical

        Returns:
            CompileResult whose emit() renders the output files

        Raises:
            FlatpackError: Any pass error, with ``stage`` filled in
        """
        warnings: list[str] = []
        with self.stage("flatten"):
            flat = flatten(model, self.library)
        with self.stage("place"):
            placed = place_components(flat)
        with self.stage("merge"):
            merged = merge_coplanar(placed)
        with self.stage("intersect"):
            records = find_intersection_segments(
                merged, self.spec.min_joint_length, warnings
            )
        with self.stage("classify"):
            merged = classify_and_assign(merged, records)
        with self.stage("synthesize"):
            parts, patterns = synthesize_joints(merged, records, self.spec, placed)
        with self.stage("layout"):
            layout = layout_sheets(parts, self.spec)

        report = CompileReport(
            design=flat.name,
            parts_before_merge=len(placed.parts),
            parts_after_merge=len(parts),
            user_connections=len(flat.connections),
            user_records=sum(r.source == "user" for r in records),
            auto_records=sum(r.source == "auto" for r in records),
            joints=dict(sorted(joint_counts(patterns).items())),
            sheets=layout.sheet_count,
            free_parameters=len(flat.free_parameters),
            total_parameters=flat.total_parameters,
            warnings=warnings,
            records=[r.report_line() for r in records],
            timings_ms=self.timings,
        )
        logger.info(
            "Compiled %s: %d parts, %d joints, %d sheets",
            flat.name,
            report.parts_after_merge,
            report.joint_count,
            report.sheets,
        )
        return CompileResult(
            design=flat,
            placed=placed,
            merged=merged,
            records=records,
            patterns=patterns,
            parts=parts,
            layout=layout,
            spec=self.spec,
            report=report,
        )

    def write(
        self,
        result: CompileResult,
        out_dir: Path,
        formats: Iterable[str] = DEFAULT_FORMATS,
    ) -> list[Path]:
        """Write the emitted files plus report.txt and report.json.

        Returns:
            Paths written, in write order
        """
        with self.stage("emit"):
            files = result.emit(formats)
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        written = []
        for item in files:
            path = out_dir / item.name
            path.write_bytes(item.data)
            written.append(path)
        for name, text in (
            ("report.txt", result.report.to_text()),
            ("report.json", result.report.to_json()),
        ):
            path = out_dir / name
            path.write_text(text, encoding="utf-8")
            written.append(path)
        logger.info("Wrote %d files to %s", len(written), out_dir)
        return written


def compile_design(
    model: DesignModel,
    spec: FabricationSpec | None = None,
    library: TemplateLibrary | None = None,
) -> CompileResult:
    """Compile ``model`` without writing anything."""
    return CompilePipeline(spec, library).compile(model)


def compile_file(
    path: Path,
    spec: FabricationSpec | None = None,
    library: TemplateLibrary | None = None,
) -> CompileResult:
    pipeline = CompilePipeline(spec, library)
    return pipeline.compile(pipeline.load(path))
