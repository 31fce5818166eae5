"""CSV parsing and completeness/consistency checks for the three input kinds.

File formats (UTF-8, comma-separated, ``.`` decimal point, header mandatory):

* trace:    ``t_ms,ax,ay,az,lat,lon,speed_kph`` -- every row carries an
  accelerometer sample; rows with lat/lon/speed also carry a GPS fix.
  The three GPS fields must be blank or present together.
* distress: ``section_id,distress_type,severity,density``
* ratings:  ``rater_id,section_id,run_id,rqi``

Row numbers in errors are 1-based data-row ordinals (the header is row 0 in
no one's count: the first row after the header is row 1).
"""

from __future__ import annotations

import csv
import io
import statistics
from dataclasses import dataclass
from typing import Iterable, TextIO

from .model import AccelSample, DistressRecord, GpsSample, RatingRecord, Trace
from .model import GRAVITY_MPS2

TRACE_HEADER = ["t_ms", "ax", "ay", "az", "lat", "lon", "speed_kph"]
DISTRESS_HEADER = ["section_id", "distress_type", "severity", "density"]
RATING_HEADER = ["rater_id", "section_id", "run_id", "rqi"]


class ParseError(ValueError):
    """Malformed input; ``row`` is the offending 1-based data row (0 = header)."""

    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row
        self.message = message


@dataclass(frozen=True)
class ValidationReport:
    """Findings from the completeness/consistency pass over one trace."""

    errors: tuple[tuple[int, str], ...]
    warnings: tuple[tuple[int, str], ...]
    cadence_ms_observed: float | None

    def __init__(self, errors, warnings, cadence_ms_observed):
        object.__setattr__(self, "errors", tuple(errors))
        object.__setattr__(self, "warnings", tuple(warnings))
        object.__setattr__(
            self,
            "cadence_ms_observed",
            None if cadence_ms_observed is None else float(cadence_ms_observed),
        )

    @property
    def completeness_ok(self) -> bool:
        return not self.errors

    def to_dict(self) -> dict:
        return {
            "completeness_ok": self.completeness_ok,
            "cadence_ms_observed": self.cadence_ms_observed,
            "errors": [{"row": r, "message": m} for r, m in self.errors],
            "warnings": [{"row": r, "message": m} for r, m in self.warnings],
        }


def _check_header(row: list[str] | None, expected: list[str]) -> None:
    if row is None:
        raise ParseError(0, f"missing header; expected {','.join(expected)}")
    if [c.strip() for c in row] != expected:
        raise ParseError(
            0, f"bad header {','.join(row)!r}; expected {','.join(expected)}"
        )


def _rows(stream: TextIO, expected_header: list[str]):
    reader = csv.reader(stream)
    header = next(reader, None)
    _check_header(header, expected_header)
    for i, row in enumerate(reader, start=1):
        if not row or all(c.strip() == "" for c in row):
            continue
        if len(row) != len(expected_header):
            raise ParseError(i, f"expected {len(expected_header)} fields, got {len(row)}")
        yield i, [c.strip() for c in row]


def _parse_float(row: int, name: str, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(row, f"malformed number in {name}: {text!r}") from None


def _parse_int(row: int, name: str, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(row, f"malformed integer in {name}: {text!r}") from None


def parse_trace(stream: TextIO, run_id: str = "run", gravity_mps2: float = GRAVITY_MPS2) -> Trace:
    """Parse one trace CSV into a Trace.

    Every data row yields an AccelSample; rows with the GPS fields present
    yield a GpsSample at the same timestamp. Timestamps must be strictly
    increasing.
    """
    accel: list[AccelSample] = []
    gps: list[GpsSample] = []
    last_t: int | None = None
    for i, row in _rows(stream, TRACE_HEADER):
        t_ms = _parse_int(i, "t_ms", row[0])
        if last_t is not None and t_ms <= last_t:
            raise ParseError(i, f"t_ms not increasing: {t_ms} after {last_t}")
        last_t = t_ms
        ax = _parse_float(i, "ax", row[1])
        ay = _parse_float(i, "ay", row[2])
        az = _parse_float(i, "az", row[3])
        try:
            accel.append(AccelSample(t_ms, ax, ay, az))
        except ValueError as exc:
            raise ParseError(i, str(exc)) from None
        gps_fields = row[4:7]
        blank = [f == "" for f in gps_fields]
        if all(blank):
            continue
        if any(blank):
            raise ParseError(i, "lat, lon and speed_kph must be blank or present together")
        lat = _parse_float(i, "lat", row[4])
        lon = _parse_float(i, "lon", row[5])
        speed = _parse_float(i, "speed_kph", row[6])
        try:
            gps.append(GpsSample(t_ms, lat, lon, speed))
        except ValueError as exc:
            raise ParseError(i, str(exc)) from None
    return Trace(run_id, accel, gps, gravity_mps2)


def write_trace_csv(trace: Trace) -> str:
    """Serialize a trace back to the CSV schema parse_trace reads.

    Only representable traces serialize: every GPS fix must share a timestamp
    with an accelerometer sample, because the schema has no GPS-only rows.
    """
    gps_by_t = {s.t_ms: s for s in trace.gps}
    missing = set(gps_by_t) - {s.t_ms for s in trace.accel}
    if missing:
        raise ValueError(
            f"GPS fixes at t_ms={sorted(missing)} have no matching accel sample; "
            "trace is not representable in the merged CSV schema"
        )
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(TRACE_HEADER)
    for s in trace.accel:
        g = gps_by_t.get(s.t_ms)
        row = [str(s.t_ms), repr(s.ax), repr(s.ay), repr(s.az)]
        if g is None:
            row += ["", "", ""]
        else:
            row += [repr(g.lat), repr(g.lon), repr(g.speed_kph)]
        writer.writerow(row)
    return out.getvalue()


def validate_trace(trace: Trace, expected_cadence_ms: int) -> ValidationReport:
    """Run the cadence/gap/emptiness checks on a parsed trace.

    * empty accelerometer stream -> error
    * inter-sample gap > 3x the expected cadence -> error (one per gap)
    * median cadence deviating > 20% from expected -> warning

    Findings carry the index of the accel sample that closes the gap.
    """
    errors: list[tuple[int, str]] = []
    warnings: list[tuple[int, str]] = []
    if expected_cadence_ms <= 0:
        raise ValueError(f"expected_cadence_ms must be > 0, got {expected_cadence_ms}")
    if not trace.accel:
        errors.append((0, "empty accelerometer stream"))
        return ValidationReport(errors, warnings, None)

    diffs = [b.t_ms - a.t_ms for a, b in zip(trace.accel, trace.accel[1:])]
    cadence = float(statistics.median(diffs)) if diffs else None

    for i, gap in enumerate(diffs, start=1):
        if gap > 3 * expected_cadence_ms:
            errors.append(
                (
                    i,
                    f"gap of {gap} ms between t={trace.accel[i - 1].t_ms} "
                    f"and t={trace.accel[i].t_ms}",
                )
            )
    if cadence is not None:
        deviation = abs(cadence - expected_cadence_ms) / expected_cadence_ms
        if deviation > 0.20:
            warnings.append(
                (
                    0,
                    f"median cadence {cadence:.0f} ms deviates "
                    f"{deviation:.0%} from expected {expected_cadence_ms} ms",
                )
            )
    return ValidationReport(errors, warnings, cadence)


def parse_distress_csv(stream: TextIO) -> list[DistressRecord]:
    records = []
    for i, row in _rows(stream, DISTRESS_HEADER):
        density = _parse_float(i, "density", row[3])
        if density < 0:
            raise ParseError(i, f"negative density: {density}")
        try:
            records.append(DistressRecord(row[0], row[1], row[2], density))
        except ValueError as exc:
            raise ParseError(i, str(exc)) from None
    return records


def write_distress_csv(records: Iterable[DistressRecord]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(DISTRESS_HEADER)
    for r in records:
        writer.writerow([r.section_id, r.distress_type, r.severity, repr(r.density)])
    return out.getvalue()


def parse_rating_csv(stream: TextIO) -> list[RatingRecord]:
    records = []
    for i, row in _rows(stream, RATING_HEADER):
        rqi = _parse_float(i, "rqi", row[3])
        if not 0.0 <= rqi <= 5.0:
            raise ParseError(i, f"rqi out of range [0, 5]: {rqi}")
        records.append(RatingRecord(row[0], row[1], row[2], rqi))
    return records


def write_rating_csv(records: Iterable[RatingRecord]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(RATING_HEADER)
    for r in records:
        writer.writerow([r.rater_id, r.section_id, r.run_id, repr(r.rqi)])
    return out.getvalue()
