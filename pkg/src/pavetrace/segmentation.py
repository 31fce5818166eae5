"""Assign trace samples to road sections by chainage along a route polyline.

Chainage is measured as arc length along the route (sum of great-circle
segment lengths). Each GPS fix is projected onto the route; accelerometer
samples between two fixes get a chainage interpolated linearly in time,
the simplest defensible model at ~1 Hz GPS.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence, TextIO

from .model import SectionDefinition, SectionRun, Trace, check_sections_disjoint

EARTH_RADIUS_M = 6_371_000.0

#: GPS fixes farther than this from the route are flagged as off-route.
OFFROUTE_WARN_M = 30.0

LatLon = tuple[float, float]


def haversine_m(a: LatLon, b: LatLon) -> float:
    """Great-circle distance in meters on a sphere of radius 6,371,000 m."""
    lat1, lon1 = math.radians(a[0]), math.radians(a[1])
    lat2, lon2 = math.radians(b[0]), math.radians(b[1])
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = math.sin(dlat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


def _local_xy(point: LatLon, origin: LatLon) -> tuple[float, float]:
    # Equirectangular projection around the origin; adequate at urban scale.
    lat0 = math.radians(origin[0])
    x = math.radians(point[1] - origin[1]) * math.cos(lat0) * EARTH_RADIUS_M
    y = math.radians(point[0] - origin[0]) * EARTH_RADIUS_M
    return x, y


def chainage_of(point: LatLon, route: Sequence[LatLon]) -> tuple[float, float]:
    """Project a point onto the route; return (chainage_m, offset_m).

    Chainage is the arc-length position of the nearest point on the
    polyline; offset is the distance from the point to that projection,
    kept for off-route QA.
    """
    if len(route) < 2:
        raise ValueError(f"route must have >= 2 vertices, got {len(route)}")
    seg_lengths = [haversine_m(p, q) for p, q in zip(route, route[1:])]
    best: tuple[float, float, float] | None = None  # (offset, cum + t*len, _)
    cum = 0.0
    px, py = _local_xy(point, route[0])
    verts = [_local_xy(v, route[0]) for v in route]
    for (x1, y1), (x2, y2), seg_len in zip(verts, verts[1:], seg_lengths):
        dx, dy = x2 - x1, y2 - y1
        norm2 = dx * dx + dy * dy
        if norm2 == 0.0:
            t = 0.0
        else:
            t = max(0.0, min(1.0, ((px - x1) * dx + (py - y1) * dy) / norm2))
        cx, cy = x1 + t * dx, y1 + t * dy
        offset = math.hypot(px - cx, py - cy)
        chain = cum + t * seg_len
        if best is None or offset < best[0]:
            best = (offset, chain, t)
        cum += seg_len
    assert best is not None
    return best[1], best[0]


def route_length_m(route: Sequence[LatLon]) -> float:
    return sum(haversine_m(p, q) for p, q in zip(route, route[1:]))


@dataclass(frozen=True)
class SectionAssignment:
    """Result of distributing one run's samples over the sections."""

    runs: tuple[SectionRun, ...]
    dropped: int
    offroute_warnings: tuple[str, ...]

    def __init__(self, runs, dropped, offroute_warnings):
        object.__setattr__(self, "runs", tuple(runs))
        object.__setattr__(self, "dropped", int(dropped))
        object.__setattr__(self, "offroute_warnings", tuple(offroute_warnings))


def assign_sections(
    trace: Trace,
    sections: Sequence[SectionDefinition],
    route: Sequence[LatLon],
    speed_gate_kph: tuple[float, float] = (20.0, 50.0),
    offroute_warn_m: float = OFFROUTE_WARN_M,
) -> SectionAssignment:
    """Distribute a trace's accelerometer samples over the route's sections.

    Each sample's chainage is interpolated linearly in time between the
    chainages of its bracketing GPS fixes; samples outside the GPS time span
    or outside every section interval are dropped (and counted). The speed
    gate marks a section-run whose mean speed leaves the protocol window --
    it never deletes samples; filtering is the analyst's call.
    """
    if not trace.gps:
        raise ValueError(f"trace {trace.run_id} has no GPS samples")
    if not sections:
        raise ValueError("empty sections list")
    check_sections_disjoint(list(sections))

    fixes = []
    offroute = []
    for g in trace.gps:
        chain, offset = chainage_of((g.lat, g.lon), route)
        if offset > offroute_warn_m:
            offroute.append(
                f"gps fix at t={g.t_ms} ms is {offset:.1f} m off-route "
                f"(> {offroute_warn_m:g} m)"
            )
        fixes.append((g.t_ms, chain, g.speed_kph))

    t0, t1 = fixes[0][0], fixes[-1][0]
    assigned: dict[str, list] = {s.section_id: [] for s in sections}
    speeds: dict[str, list[float]] = {s.section_id: [] for s in sections}
    dropped = 0
    j = 0
    for sample in trace.accel:
        t = sample.t_ms
        if t < t0 or t > t1:
            dropped += 1
            continue
        while j + 1 < len(fixes) - 1 and fixes[j + 1][0] <= t:
            j += 1
        ta, ca, va = fixes[j]
        tb, cb, vb = fixes[j + 1] if j + 1 < len(fixes) else fixes[j]
        frac = 0.0 if tb == ta else (t - ta) / (tb - ta)
        chain = ca + frac * (cb - ca)
        speed = va + frac * (vb - va)
        for section in sections:
            if section.contains(chain):
                assigned[section.section_id].append(sample)
                speeds[section.section_id].append(speed)
                break
        else:
            dropped += 1

    lo, hi = speed_gate_kph
    runs = []
    for section in sections:
        samples = assigned[section.section_id]
        sec_speeds = speeds[section.section_id]
        mean_speed = sum(sec_speeds) / len(sec_speeds) if sec_speeds else None
        gate = mean_speed is not None and lo <= mean_speed <= hi
        runs.append(SectionRun(section.section_id, trace.run_id, samples, mean_speed, gate))
    return SectionAssignment(runs, dropped, offroute)


def parse_route_csv(stream: TextIO) -> list[LatLon]:
    """Read an ordered route polyline from a ``lat,lon`` CSV."""
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None or [c.strip() for c in header] != ["lat", "lon"]:
        raise ValueError("route CSV must start with header 'lat,lon'")
    route = []
    for i, row in enumerate(reader, start=1):
        if not row or all(c.strip() == "" for c in row):
            continue
        if len(row) != 2:
            raise ValueError(f"route row {i}: expected 2 fields, got {len(row)}")
        route.append((float(row[0]), float(row[1])))
    if len(route) < 2:
        raise ValueError("route polyline needs >= 2 vertices")
    return route


def write_route_csv(route: Sequence[LatLon]) -> str:
    lines = ["lat,lon"] + [f"{lat!r},{lon!r}" for lat, lon in route]
    return "\n".join(lines) + "\n"


def parse_sections_csv(stream: TextIO, route: Sequence[LatLon]) -> list[SectionDefinition]:
    """Read section chainage intervals; slice each section's polyline off the route."""
    reader = csv.reader(stream)
    header = next(reader, None)
    expected = ["section_id", "start_chainage_m", "end_chainage_m"]
    if header is None or [c.strip() for c in header] != expected:
        raise ValueError(f"sections CSV must start with header {','.join(expected)}")
    sections = []
    for i, row in enumerate(reader, start=1):
        if not row or all(c.strip() == "" for c in row):
            continue
        if len(row) != 3:
            raise ValueError(f"sections row {i}: expected 3 fields, got {len(row)}")
        start, end = float(row[1]), float(row[2])
        polyline = slice_route(route, start, end)
        sections.append(SectionDefinition(row[0], polyline, start, end))
    check_sections_disjoint(sections)
    return sections


def write_sections_csv(sections: Sequence[SectionDefinition]) -> str:
    lines = ["section_id,start_chainage_m,end_chainage_m"]
    for s in sections:
        lines.append(f"{s.section_id},{s.start_chainage_m!r},{s.end_chainage_m!r}")
    return "\n".join(lines) + "\n"


def point_at_chainage(route: Sequence[LatLon], chainage_m: float) -> LatLon:
    """Interpolate the route position at a chainage (clamped to the ends)."""
    if len(route) < 2:
        raise ValueError("route must have >= 2 vertices")
    if chainage_m <= 0:
        return route[0]
    cum = 0.0
    for p, q in zip(route, route[1:]):
        seg = haversine_m(p, q)
        if cum + seg >= chainage_m and seg > 0:
            t = (chainage_m - cum) / seg
            return (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))
        cum += seg
    return route[-1]


def slice_route(route: Sequence[LatLon], start_m: float, end_m: float) -> list[LatLon]:
    """The route's geometry between two chainages, end points interpolated."""
    if end_m <= start_m:
        raise ValueError(f"end chainage {end_m} must exceed start {start_m}")
    points = [point_at_chainage(route, start_m)]
    cum = 0.0
    for p, q in zip(route, route[1:]):
        seg = haversine_m(p, q)
        if start_m < cum < end_m:
            points.append(p)
        cum += seg
    points.append(point_at_chainage(route, end_m))
    return points
