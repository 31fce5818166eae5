"""Simple linear regression between roughness and the condition indices.

Everything here is ordinary least squares on (x, y) pairs with RMS as the
predictor. Fits are reported with r2 (= 1 - SS_res/SS_tot) and the Pearson
correlation coefficient; scatter points are kept alongside each fit so the
plots can be regenerated from the report alone.
"""

from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .model import RatingRecord, RegressionFit
from .roughness import IriModel, RmsTable


def ols_fit(xs: Sequence[float], ys: Sequence[float]) -> RegressionFit:
    """Least-squares line through (xs, ys).

    xs must vary (all-equal xs is an error). If ys are all equal the line is
    flat and r2/pearson_r are undefined (SS_tot = 0), reported as None.
    """
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} xs vs {len(ys)} ys")
    n = len(xs)
    if n < 2:
        raise ValueError(f"need >= 2 points, got {n}")
    if max(xs) == min(xs):
        raise ValueError("degenerate x: all x values are equal")

    x_mean = math.fsum(xs) / n
    y_mean = math.fsum(ys) / n
    if max(ys) == min(ys):
        return RegressionFit(slope=0.0, intercept=y_mean, r2=None, pearson_r=None, n=n)

    sxx = math.fsum((x - x_mean) ** 2 for x in xs)
    syy = math.fsum((y - y_mean) ** 2 for y in ys)
    sxy = math.fsum((x - x_mean) * (y - y_mean) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = y_mean - slope * x_mean
    ss_res = math.fsum((y - (slope * x + intercept)) ** 2 for x, y in zip(xs, ys))
    r2 = 1.0 - ss_res / syy
    pearson = sxy / math.sqrt(sxx * syy)
    return RegressionFit(slope=slope, intercept=intercept, r2=r2, pearson_r=pearson, n=n)


def residuals(fit: RegressionFit, xs: Sequence[float], ys: Sequence[float]) -> list[float]:
    return [y - (fit.slope * x + fit.intercept) for x, y in zip(xs, ys)]


def fit_iri_model(pairs: Sequence[tuple[float, float]]) -> IriModel:
    """Refit the RMS -> IRI line from paired (rms, iri) observations.

    Needs at least 3 pairs with varying RMS; a non-increasing line is
    rejected because the ride gets rougher, never smoother, as RMS grows.
    """
    if len(pairs) < 3:
        raise ValueError(f"need >= 3 (rms, iri) pairs, got {len(pairs)}")
    xs = [p[0] for p in pairs]
    ys = [p[1] for p in pairs]
    fit = ols_fit(xs, ys)
    if fit.slope <= 0:
        raise ValueError(f"non-physical slope {fit.slope!r}: IRI must increase with RMS")
    return IriModel(slope=fit.slope, intercept=fit.intercept)


# ---------------------------------------------------------------------------
# Index correlation report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScatterPoint:
    section_id: str
    run_id: str | None  # None for section-level aggregates
    rms: float
    target: float


@dataclass(frozen=True)
class PairingFit:
    target_name: str  # "iri" | "rqi" | "pdi"
    fit: RegressionFit
    points: tuple[ScatterPoint, ...]

    def to_dict(self) -> dict:
        return {
            "target": self.target_name,
            "slope": self.fit.slope,
            "intercept": self.fit.intercept,
            "r2": self.fit.r2,
            "pearson_r": self.fit.pearson_r,
            "n": self.fit.n,
            "points": [
                {
                    "section_id": p.section_id,
                    "run_id": p.run_id,
                    "rms_mps2": p.rms,
                    "value": p.target,
                }
                for p in self.points
            ],
        }


def mean_rqi_by_section(ratings: Iterable[RatingRecord]) -> dict[str, float]:
    """Mean rating per section, pooled over raters and runs."""
    grouped: dict[str, list[float]] = defaultdict(list)
    for r in ratings:
        grouped[r.section_id].append(r.rqi)
    return {sec: sum(v) / len(v) for sec, v in grouped.items()}


def _pairing(
    name: str,
    rms_table: RmsTable,
    target: Mapping[str, float],
    per_run: bool,
) -> PairingFit:
    section_rms = rms_table.section_means()
    common = sorted(set(section_rms) & set(target))
    if len(common) < 3:
        raise ValueError(
            f"{name}: only {len(common)} section(s) common to the RMS table "
            "and the target table; need >= 3"
        )
    if per_run:
        points = [
            ScatterPoint(row.section_id, row.run_id, row.rms_mps2, target[row.section_id])
            for row in rms_table.rows
            if row.section_id in target
        ]
    else:
        points = [ScatterPoint(sec, None, section_rms[sec], target[sec]) for sec in common]
    fit = ols_fit([p.rms for p in points], [p.target for p in points])
    return PairingFit(name, fit, tuple(points))


def correlate_indices(
    rms_table: RmsTable,
    iri: Mapping[str, float] | None = None,
    rqi: Mapping[str, float] | None = None,
    pdi: Mapping[str, float] | None = None,
    per_run: bool = False,
) -> dict[str, PairingFit]:
    """Fit RMS against each available per-section index.

    Targets are per-section values (reference IRI, mean panel RQI, PDI).
    By default the predictor is the per-section mean RMS over runs; with
    per_run=True every (section, run) RMS is paired with its section's
    target instead.
    """
    targets = {"iri": iri, "rqi": rqi, "pdi": pdi}
    available = {name: t for name, t in targets.items() if t is not None}
    if not available:
        raise ValueError("no target tables given: need at least one of iri/rqi/pdi")
    return {
        name: _pairing(name, rms_table, table, per_run)
        for name, table in available.items()
    }


def fit_report(fits: Mapping[str, PairingFit], per_run: bool = False) -> dict:
    return {
        "per_run": per_run,
        "pairings": {name: fits[name].to_dict() for name in sorted(fits)},
    }


# ---------------------------------------------------------------------------
# Reference-IRI CSV (section_id, iri_mm_per_m)
# ---------------------------------------------------------------------------

IRI_HEADER = ["section_id", "iri_mm_per_m"]


def parse_iri_csv(stream: io.TextIOBase) -> dict[str, float]:
    reader = csv.reader(stream)
    header = next(reader, None)
    if header != IRI_HEADER:
        raise ValueError(f"bad IRI header {header!r}, expected {IRI_HEADER!r}")
    out: dict[str, float] = {}
    for row_no, row in enumerate(reader, start=1):
        if len(row) != 2:
            raise ValueError(f"row {row_no}: expected 2 fields, got {len(row)}")
        sec, raw = row[0], row[1]
        if sec in out:
            raise ValueError(f"row {row_no}: duplicate section {sec!r}")
        out[sec] = float(raw)
    return out


def write_iri_csv(values: Mapping[str, float], stream: io.TextIOBase) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(IRI_HEADER)
    for sec in sorted(values):
        writer.writerow([sec, repr(float(values[sec]))])
