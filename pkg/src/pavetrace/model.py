"""Shared domain types for the roughness pipeline.

Everything here is an immutable value object: construction validates the
invariants and raises ValueError on bad input, after which instances are
safe to share across threads. No I/O and no statistics live in this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

GRAVITY_MPS2 = 9.80665

#: Closed set of surveyable distress types (canonical lowercase spelling).
DISTRESS_TYPES = (
    "longitudinal crack",
    "transverse crack",
    "alligator crack",
    "pothole",
    "patching",
    "corrugation",
)

SEVERITY_LABELS = ("Low", "Moderate", "High")

_SEVERITY_CODES = {"low": 1, "moderate": 2, "high": 3}


def severity_code(label: str) -> int:
    """Map a severity label to its numeric code: High=3, Moderate=2, Low=1."""
    try:
        return _SEVERITY_CODES[label.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown severity label: {label!r}") from None


def canonical_distress_type(name: str) -> str:
    """Return the canonical spelling of a distress type (case-insensitive)."""
    key = " ".join(name.strip().lower().split())
    if key not in DISTRESS_TYPES:
        raise ValueError(f"unknown distress type: {name!r}")
    return key


def canonical_severity(label: str) -> str:
    key = label.strip().lower()
    if key not in _SEVERITY_CODES:
        raise ValueError(f"unknown severity label: {label!r}")
    return key.capitalize()


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class AccelSample:
    """One 3-axis accelerometer reading, t_ms milliseconds into the run."""

    t_ms: int
    ax: float
    ay: float
    az: float

    def __post_init__(self):
        if self.t_ms < 0:
            raise ValueError(f"t_ms must be >= 0, got {self.t_ms}")
        for name in ("ax", "ay", "az"):
            _require_finite(name, getattr(self, name))


@dataclass(frozen=True)
class GpsSample:
    """One GPS fix: WGS-84 position plus instantaneous speed."""

    t_ms: int
    lat: float
    lon: float
    speed_kph: float

    def __post_init__(self):
        if self.t_ms < 0:
            raise ValueError(f"t_ms must be >= 0, got {self.t_ms}")
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"lat out of range [-90, 90]: {self.lat}")
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"lon out of range [-180, 180]: {self.lon}")
        _require_finite("speed_kph", self.speed_kph)
        if self.speed_kph < 0:
            raise ValueError(f"speed_kph must be >= 0, got {self.speed_kph}")


def _check_strictly_increasing(kind: str, times: list[int]) -> None:
    for prev, cur in zip(times, times[1:]):
        if cur <= prev:
            raise ValueError(
                f"{kind} timestamps must be strictly increasing: "
                f"{cur} follows {prev}"
            )


@dataclass(frozen=True)
class Trace:
    """All samples recorded during one run over the segment.

    Both streams are ordered by time. ``gravity_mps2`` is the constant
    subtracted from vertical acceleration when computing roughness; it is
    stored per trace so a locally calibrated value can be carried along.
    """

    run_id: str
    accel: tuple[AccelSample, ...]
    gps: tuple[GpsSample, ...]
    gravity_mps2: float = GRAVITY_MPS2

    def __init__(self, run_id, accel, gps, gravity_mps2=GRAVITY_MPS2):
        object.__setattr__(self, "run_id", str(run_id))
        object.__setattr__(self, "accel", tuple(accel))
        object.__setattr__(self, "gps", tuple(gps))
        object.__setattr__(self, "gravity_mps2", float(gravity_mps2))
        _require_finite("gravity_mps2", self.gravity_mps2)
        _check_strictly_increasing("accel", [s.t_ms for s in self.accel])
        _check_strictly_increasing("gps", [s.t_ms for s in self.gps])

    @property
    def n_accel(self) -> int:
        return len(self.accel)

    @property
    def duration_ms(self) -> int:
        if not self.accel:
            return 0
        return self.accel[-1].t_ms - self.accel[0].t_ms


@dataclass(frozen=True)
class SectionDefinition:
    """A road section: a chainage interval on the route, plus its geometry."""

    section_id: str
    polyline: tuple[tuple[float, float], ...]
    start_chainage_m: float
    end_chainage_m: float

    def __init__(self, section_id, polyline, start_chainage_m, end_chainage_m):
        object.__setattr__(self, "section_id", str(section_id))
        object.__setattr__(self, "polyline", tuple((float(a), float(b)) for a, b in polyline))
        object.__setattr__(self, "start_chainage_m", float(start_chainage_m))
        object.__setattr__(self, "end_chainage_m", float(end_chainage_m))
        if not self.end_chainage_m > self.start_chainage_m:
            raise ValueError(
                f"section {self.section_id}: end_chainage_m ({self.end_chainage_m}) "
                f"must exceed start_chainage_m ({self.start_chainage_m})"
            )

    @property
    def length_m(self) -> float:
        return self.end_chainage_m - self.start_chainage_m

    def contains(self, chainage_m: float) -> bool:
        # Half-open interval so touching sections never share a sample.
        return self.start_chainage_m <= chainage_m < self.end_chainage_m


def check_sections_disjoint(sections: list[SectionDefinition]) -> None:
    """Raise ValueError if any two chainage intervals overlap."""
    ordered = sorted(sections, key=lambda s: s.start_chainage_m)
    for a, b in zip(ordered, ordered[1:]):
        if b.start_chainage_m < a.end_chainage_m:
            raise ValueError(
                f"sections {a.section_id} and {b.section_id} overlap: "
                f"[{a.start_chainage_m}, {a.end_chainage_m}) vs "
                f"[{b.start_chainage_m}, {b.end_chainage_m})"
            )


@dataclass(frozen=True)
class SectionRun:
    """The slice of one run's accelerometer samples assigned to one section."""

    section_id: str
    run_id: str
    samples: tuple[AccelSample, ...]
    mean_speed_kph: float | None
    speed_gate_pass: bool

    def __init__(self, section_id, run_id, samples, mean_speed_kph, speed_gate_pass):
        object.__setattr__(self, "section_id", str(section_id))
        object.__setattr__(self, "run_id", str(run_id))
        object.__setattr__(self, "samples", tuple(samples))
        object.__setattr__(
            self, "mean_speed_kph", None if mean_speed_kph is None else float(mean_speed_kph)
        )
        object.__setattr__(self, "speed_gate_pass", bool(speed_gate_pass))
        _check_strictly_increasing("section-run", [s.t_ms for s in self.samples])

    @property
    def n_samples(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class DistressRecord:
    """One observed distress on a section.

    ``density`` is the surveyed quantity, in meters for linear distresses and
    square meters for area ones; the weighting scheme sums the units as-is.
    """

    section_id: str
    distress_type: str
    severity: str
    density: float

    def __init__(self, section_id, distress_type, severity, density):
        object.__setattr__(self, "section_id", str(section_id))
        object.__setattr__(self, "distress_type", canonical_distress_type(distress_type))
        object.__setattr__(self, "severity", canonical_severity(severity))
        object.__setattr__(self, "density", float(density))
        _require_finite("density", self.density)
        if self.density < 0:
            raise ValueError(f"density must be >= 0, got {self.density}")

    @property
    def severity_value(self) -> int:
        return severity_code(self.severity)


@dataclass(frozen=True)
class RatingRecord:
    """One rater's ride-quality rating of one section on one run (0..5)."""

    rater_id: str
    section_id: str
    run_id: str
    rqi: float

    def __init__(self, rater_id, section_id, run_id, rqi):
        object.__setattr__(self, "rater_id", str(rater_id))
        object.__setattr__(self, "section_id", str(section_id))
        object.__setattr__(self, "run_id", str(run_id))
        object.__setattr__(self, "rqi", float(rqi))
        if not 0.0 <= self.rqi <= 5.0:
            raise ValueError(f"rqi out of range [0, 5]: {self.rqi}")


@dataclass(frozen=True)
class RegressionFit:
    """Result of a simple least-squares line fit.

    ``r2`` and ``pearson_r`` are None when the response is constant
    (SS_tot = 0 leaves them undefined).
    """

    slope: float
    intercept: float
    r2: float | None
    pearson_r: float | None
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"fit needs n >= 2, got n={self.n}")
        if (self.r2 is None) != (self.pearson_r is None):
            raise ValueError("r2 and pearson_r must be defined (or undefined) together")
        if self.r2 is not None:
            if not -1e-9 <= self.r2 <= 1.0 + 1e-9:
                raise ValueError(f"r2 out of range [0, 1]: {self.r2}")
            if not -1.0 - 1e-9 <= self.pearson_r <= 1.0 + 1e-9:
                raise ValueError(f"pearson_r out of range [-1, 1]: {self.pearson_r}")
            if abs(self.r2 - self.pearson_r**2) > 1e-6:
                raise ValueError(
                    f"r2 ({self.r2}) inconsistent with pearson_r^2 ({self.pearson_r**2})"
                )
