"""Pavement Distress Index: weighted sum of severity x density per section.

PDI(section) = sum over records of W(type) * severity_code * density.
Linear distresses contribute meters and area distresses square meters; the
index sums the mixed units directly (that is how the weighting scheme is
defined), so PDI values are comparable only under a fixed survey convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .model import DISTRESS_TYPES, DistressRecord, canonical_distress_type

DEFAULT_WEIGHTS = {
    "longitudinal crack": 2.0,
    "transverse crack": 2.0,
    "alligator crack": 3.0,
    "pothole": 3.0,
    "patching": 1.0,
    "corrugation": 1.5,
}


@dataclass(frozen=True)
class WeightTable:
    """Per-distress-type weights; defaults cover the six surveyable types."""

    weights: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))

    def __post_init__(self):
        cleaned = {}
        for name, w in self.weights.items():
            key = " ".join(name.strip().lower().split())
            if float(w) <= 0:
                raise ValueError(f"weight for {name!r} must be > 0, got {w}")
            cleaned[key] = float(w)
        object.__setattr__(self, "weights", cleaned)

    def weight(self, distress_type: str) -> float:
        key = " ".join(distress_type.strip().lower().split())
        if key not in self.weights:
            raise KeyError(f"no weight configured for distress type {key!r}")
        return self.weights[key]


def compute_pdi(
    records: Iterable[DistressRecord],
    weights: WeightTable = WeightTable(),
    section_ids: Iterable[str] | None = None,
) -> dict[str, float]:
    """PDI per section; sections listed in ``section_ids`` but unseen get 0."""
    pdi: dict[str, float] = {}
    if section_ids is not None:
        pdi = {str(s): 0.0 for s in section_ids}
    for r in records:
        w = weights.weight(r.distress_type)
        pdi[r.section_id] = pdi.get(r.section_id, 0.0) + w * r.severity_value * r.density
    return pdi


def write_pdi_csv(pdi: dict[str, float]) -> str:
    lines = ["section_id,pdi"]
    for section_id in sorted(pdi):
        lines.append(f"{section_id},{pdi[section_id]!r}")
    return "\n".join(lines) + "\n"


def parse_pdi_csv(stream) -> dict[str, float]:
    import csv

    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None or [c.strip() for c in header] != ["section_id", "pdi"]:
        raise ValueError("PDI CSV must start with header section_id,pdi")
    out = {}
    for row in reader:
        if not row or all(c.strip() == "" for c in row):
            continue
        out[row[0].strip()] = float(row[1])
    return out


def weights_from_config(raw: dict[str, float]) -> WeightTable:
    """Build a WeightTable from a config mapping, validating the type names.

    Unknown names are allowed (user-extended surveys) but get canonical
    whitespace/case folding; the six standard types keep their defaults
    unless overridden.
    """
    merged = dict(DEFAULT_WEIGHTS)
    for name, w in raw.items():
        key = " ".join(name.strip().lower().split())
        if key in DISTRESS_TYPES:
            key = canonical_distress_type(key)
        merged[key] = float(w)
    return WeightTable(merged)
