"""Vertical-acceleration RMS per section-run and the linear IRI estimate.

RMS here is sqrt(mean((az - g)^2)) over a section-run's samples. The source
formula for this statistic is sometimes printed without the square on the
deviation, which would take the square root of a signed sum; the squared
form is the only reading consistent with the name Root Mean Square and with
non-negativity, and is what this module computes.

No detrending or high-pass filtering is applied before the RMS; the phone
is assumed dash-mounted with z vertical. ``mean_subtraction=True`` replaces
the constant g with the window's own mean az, which absorbs a constant
mounting-angle bias at the cost of also absorbing any true DC offset.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .model import AccelSample, SectionRun


@dataclass(frozen=True)
class IriModel:
    """IRI (mm/m) as a linear function of RMS (m/s^2): slope * rms + intercept."""

    slope: float = 4.19
    intercept: float = 1.73

    def __post_init__(self):
        if not self.slope > 0:
            raise ValueError(f"slope must be > 0, got {self.slope}")


def compute_rms(
    samples: Sequence[AccelSample], g: float, mean_subtraction: bool = False
) -> float:
    """RMS deviation of vertical acceleration from g (or from the sample mean)."""
    if not samples:
        raise ValueError("no samples")
    baseline = g
    if mean_subtraction:
        baseline = sum(s.az for s in samples) / len(samples)
    total = sum((s.az - baseline) ** 2 for s in samples)
    return math.sqrt(total / len(samples))


def estimate_iri(rms: float, model: IriModel = IriModel()) -> float:
    """Estimated IRI in mm/m for an RMS in m/s^2."""
    if rms < 0:
        raise ValueError(f"rms must be >= 0, got {rms}")
    return model.slope * rms + model.intercept


@dataclass(frozen=True)
class RmsRow:
    section_id: str
    run_id: str
    rms_mps2: float


@dataclass(frozen=True)
class RmsTable:
    """Per section-run RMS values plus the section-runs skipped as empty."""

    rows: tuple[RmsRow, ...]
    skipped: tuple[tuple[str, str], ...]  # (section_id, run_id) with no samples

    def __init__(self, rows, skipped):
        object.__setattr__(self, "rows", tuple(rows))
        object.__setattr__(self, "skipped", tuple(skipped))

    def section_means(self) -> dict[str, float]:
        """Mean RMS over runs, per section."""
        sums: dict[str, list[float]] = {}
        for row in self.rows:
            sums.setdefault(row.section_id, []).append(row.rms_mps2)
        return {sec: sum(v) / len(v) for sec, v in sums.items()}

    def matrix(self) -> tuple[list[str], list[str], list[list[float]]]:
        """(section_ids, run_ids, sections x runs RMS matrix); None-free or raises."""
        sections = sorted({r.section_id for r in self.rows})
        runs = sorted({r.run_id for r in self.rows})
        cell = {(r.section_id, r.run_id): r.rms_mps2 for r in self.rows}
        grid = []
        for sec in sections:
            row = []
            for run in runs:
                if (sec, run) not in cell:
                    raise ValueError(f"missing RMS cell for section {sec}, run {run}")
                row.append(cell[(sec, run)])
            grid.append(row)
        return sections, runs, grid


def section_rms_table(
    runs: Iterable[SectionRun], g: float, mean_subtraction: bool = False
) -> RmsTable:
    """One RMS row per non-empty section-run; empty ones go to the skip list."""
    rows = []
    skipped = []
    for run in runs:
        if run.n_samples == 0:
            skipped.append((run.section_id, run.run_id))
            continue
        rows.append(
            RmsRow(run.section_id, run.run_id, compute_rms(run.samples, g, mean_subtraction))
        )
    rows.sort(key=lambda r: (r.section_id, r.run_id))
    return RmsTable(rows, sorted(skipped))


def write_rms_csv(table: RmsTable, model: IriModel = IriModel()) -> str:
    """CSV ``section_id,run_id,rms_mps2,iri_est_mm_per_m`` sorted by section, run."""
    lines = ["section_id,run_id,rms_mps2,iri_est_mm_per_m"]
    for row in table.rows:
        iri = estimate_iri(row.rms_mps2, model)
        lines.append(f"{row.section_id},{row.run_id},{row.rms_mps2!r},{iri!r}")
    return "\n".join(lines) + "\n"


def parse_rms_csv(stream) -> RmsTable:
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None or [c.strip() for c in header][:3] != ["section_id", "run_id", "rms_mps2"]:
        raise ValueError("RMS CSV must start with header section_id,run_id,rms_mps2[,...]")
    rows = []
    for row in reader:
        if not row or all(c.strip() == "" for c in row):
            continue
        rows.append(RmsRow(row[0].strip(), row[1].strip(), float(row[2])))
    return RmsTable(rows, ())
