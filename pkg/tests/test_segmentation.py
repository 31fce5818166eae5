import io
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pavetrace.model import AccelSample, GpsSample, SectionDefinition, Trace
from pavetrace.segmentation import (
    EARTH_RADIUS_M,
    assign_sections,
    chainage_of,
    haversine_m,
    parse_route_csv,
    parse_sections_csv,
    point_at_chainage,
    route_length_m,
    slice_route,
    write_route_csv,
    write_sections_csv,
)
from pavetrace.synth import straight_route

# ~111.2 km per degree of latitude on the R = 6371 km sphere
M_PER_DEG_LAT = math.pi * EARTH_RADIUS_M / 180.0


def test_haversine_zero_distance():
    assert haversine_m((35.7, 51.4), (35.7, 51.4)) == 0.0


def test_haversine_one_degree_latitude():
    d = haversine_m((35.0, 51.4), (36.0, 51.4))
    assert d == pytest.approx(M_PER_DEG_LAT, rel=1e-9)


def test_haversine_symmetry():
    a, b = (35.7, 51.4), (35.8, 51.5)
    assert haversine_m(a, b) == pytest.approx(haversine_m(b, a), abs=1e-9)


def test_route_length_is_segment_sum():
    route = [(35.70, 51.40), (35.71, 51.40), (35.71, 51.41)]
    total = haversine_m(route[0], route[1]) + haversine_m(route[1], route[2])
    assert route_length_m(route) == pytest.approx(total, rel=1e-12)


def test_chainage_endpoints_match_route_length():
    route = straight_route(2500.0)
    start_ch, start_off = chainage_of(route[0], route)
    end_ch, end_off = chainage_of(route[-1], route)
    assert start_ch == pytest.approx(0.0, abs=1e-6)
    assert start_off == pytest.approx(0.0, abs=1e-6)
    assert end_ch == pytest.approx(route_length_m(route), rel=1e-9)
    assert end_off == pytest.approx(0.0, abs=1e-6)


def test_chainage_of_midpoint():
    route = straight_route(1000.0)
    mid = point_at_chainage(route, 500.0)
    ch, off = chainage_of(mid, route)
    assert ch == pytest.approx(500.0, abs=1e-6)
    assert off == pytest.approx(0.0, abs=1e-6)


def test_chainage_offset_for_offroute_point():
    route = straight_route(1000.0)
    # push a point ~100 m east of the route midpoint
    lat_mid = (route[0][0] + route[1][0]) / 2.0
    dlon = math.degrees(100.0 / (EARTH_RADIUS_M * math.cos(math.radians(lat_mid))))
    ch, off = chainage_of((lat_mid, route[0][1] + dlon), route)
    assert off == pytest.approx(100.0, rel=1e-3)
    assert ch == pytest.approx(500.0, rel=1e-3)


@settings(max_examples=60)
@given(st.floats(min_value=0.0, max_value=1.0))
def test_chainage_monotone_along_route(frac):
    route = [(35.70, 51.40), (35.705, 51.405), (35.71, 51.405), (35.715, 51.41)]
    total = route_length_m(route)
    p = point_at_chainage(route, frac * total)
    ch, off = chainage_of(p, route)
    assert off < 1e-6
    assert ch == pytest.approx(frac * total, abs=1e-6)


def _route_sections(n=2, length_m=500.0):
    route = straight_route(n * length_m)
    sections = [
        SectionDefinition(
            f"s{i + 1:02d}",
            slice_route(route, i * length_m, (i + 1) * length_m),
            i * length_m,
            (i + 1) * length_m,
        )
        for i in range(n)
    ]
    return route, sections


def _trace_along(route, speed_kph=36.0, cadence_ms=500, n=None, t0_offset_ms=250):
    """Samples moving at constant speed from the route start."""
    speed_mps = speed_kph / 3.6
    total = route_length_m(route)
    if n is None:
        n = int(total / (speed_mps * cadence_ms / 1000.0))
    accel, gps = [], []
    for i in range(n):
        t_ms = i * cadence_ms + t0_offset_ms
        dist = speed_mps * t_ms / 1000.0
        lat = route[0][0] + math.degrees(dist / EARTH_RADIUS_M)
        accel.append(AccelSample(t_ms, 0.0, 0.0, 9.81))
        if i % 2 == 0 or i == n - 1:
            gps.append(GpsSample(t_ms, lat, route[0][1], speed_kph))
    return Trace("run01", accel, gps)


def test_assign_sections_partition():
    route, sections = _route_sections(n=2)
    trace = _trace_along(route)
    result = assign_sections(trace, sections, route)
    assigned = sum(r.n_samples for r in result.runs)
    assert assigned + result.dropped == trace.n_accel
    ids = {r.section_id for r in result.runs}
    assert ids == {"s01", "s02"}


def test_assign_sections_no_gps_is_error():
    route, sections = _route_sections()
    trace = Trace("r", [AccelSample(0, 0, 0, 9.8)], [])
    with pytest.raises(ValueError):
        assign_sections(trace, sections, route)


def test_assign_sections_speed_gate_marks_not_drops():
    route, sections = _route_sections(n=1, length_m=200.0)
    slow = _trace_along(route, speed_kph=10.0)  # below the 20 kph gate
    result = assign_sections(slow, sections, route, speed_gate_kph=(20.0, 50.0))
    assert result.runs, "samples must still be assigned"
    run = result.runs[0]
    assert run.n_samples > 0
    assert not run.speed_gate_pass
    assert run.mean_speed_kph == pytest.approx(10.0, rel=1e-6)


def test_assign_sections_offroute_warning():
    route, sections = _route_sections(n=1, length_m=200.0)
    # GPS fix 50 m east of the route: offset above the 30 m threshold
    dlon = math.degrees(50.0 / (EARTH_RADIUS_M * math.cos(math.radians(35.7))))
    gps = [
        GpsSample(0, 35.7, 51.4, 30.0),
        GpsSample(2000, 35.7005, 51.4 + dlon, 30.0),
    ]
    accel = [AccelSample(t, 0, 0, 9.8) for t in (0, 500, 1000, 1500, 2000)]
    trace = Trace("r", accel, gps)
    result = assign_sections(trace, sections, route)
    assert result.offroute_warnings


def test_assign_sections_half_open_boundary():
    route, sections = _route_sections(n=2, length_m=100.0)
    # single GPS fix exactly at the shared boundary chainage
    p = point_at_chainage(route, 100.0)
    trace = Trace(
        "r",
        [AccelSample(0, 0, 0, 9.8)],
        [GpsSample(0, p[0], p[1], 30.0)],
    )
    result = assign_sections(trace, sections, route)
    by_id = {r.section_id: r.n_samples for r in result.runs}
    # half-open [start, end): the boundary sample belongs to the second section
    assert by_id.get("s02", 0) == 1
    assert by_id.get("s01", 0) == 0


def test_slice_route_and_point_at_chainage_bounds():
    route = straight_route(1000.0)
    # out-of-range chainages clamp to the route ends
    assert point_at_chainage(route, -1.0) == route[0]
    assert point_at_chainage(route, 1000.5) == route[-1]
    piece = slice_route(route, 200.0, 300.0)
    assert route_length_m(piece) == pytest.approx(100.0, rel=1e-9)


def test_route_csv_roundtrip():
    route = [(35.7, 51.4), (35.71, 51.42)]
    text = write_route_csv(route)
    assert parse_route_csv(io.StringIO(text)) == route


def test_sections_csv_roundtrip():
    route, sections = _route_sections(n=3, length_m=250.0)
    text = write_sections_csv(sections)
    back = parse_sections_csv(io.StringIO(text), route)
    assert [s.section_id for s in back] == [s.section_id for s in sections]
    assert [s.start_chainage_m for s in back] == [0.0, 250.0, 500.0]


def test_parse_sections_rejects_overlap():
    route = straight_route(300.0)
    text = "section_id,start_chainage_m,end_chainage_m\na,0,200\nb,150,300\n"
    with pytest.raises(ValueError):
        parse_sections_csv(io.StringIO(text), route)
