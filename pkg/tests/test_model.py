import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pavetrace.model import (
    GRAVITY_MPS2,
    AccelSample,
    DistressRecord,
    GpsSample,
    RatingRecord,
    RegressionFit,
    SectionDefinition,
    Trace,
    check_sections_disjoint,
    severity_code,
)


def test_gravity_constant():
    assert GRAVITY_MPS2 == 9.80665


@pytest.mark.parametrize(
    "label,code",
    [("High", 3), ("Moderate", 2), ("Low", 1), ("high", 3), ("LOW", 1)],
)
def test_severity_code(label, code):
    assert severity_code(label) == code


def test_severity_code_rejects_unknown():
    with pytest.raises(ValueError, match="Severe"):
        severity_code("Severe")


def test_trace_requires_increasing_timestamps():
    a = [AccelSample(0, 0, 0, 9.8), AccelSample(0, 0, 0, 9.8)]
    with pytest.raises(ValueError):
        Trace("r", a, [])


def test_trace_duration_and_counts():
    a = [AccelSample(i * 500, 0, 0, 9.8) for i in range(5)]
    tr = Trace("r", a, [GpsSample(0, 35.7, 51.4, 30.0)])
    assert tr.n_accel == 5
    assert tr.duration_ms == 2000


def test_gps_sample_validates_latlon():
    with pytest.raises(ValueError):
        GpsSample(0, 95.0, 51.4, 30.0)
    with pytest.raises(ValueError):
        GpsSample(0, 35.7, 181.0, 30.0)


def test_distress_record_canonicalizes():
    rec = DistressRecord("s01", "Pothole", "HIGH", 2.0)
    assert rec.distress_type == "pothole"
    assert rec.severity == "High"
    assert rec.severity_value == 3


def test_distress_record_rejects_negative_density():
    with pytest.raises(ValueError):
        DistressRecord("s01", "pothole", "High", -1.0)


def test_rating_record_range():
    RatingRecord("r1", "s1", "run1", 0.0)
    RatingRecord("r1", "s1", "run1", 5.0)
    with pytest.raises(ValueError):
        RatingRecord("r1", "s1", "run1", 5.1)


def test_section_contains_half_open():
    sec = SectionDefinition("s1", [(35.7, 51.4), (35.71, 51.4)], 0.0, 100.0)
    assert sec.contains(0.0)
    assert sec.contains(99.999)
    assert not sec.contains(100.0)


def test_sections_disjoint_check():
    route = [(35.7, 51.4), (35.71, 51.4)]
    a = SectionDefinition("a", route, 0.0, 100.0)
    b = SectionDefinition("b", route, 100.0, 200.0)
    check_sections_disjoint([a, b])  # touching at the boundary is fine
    c = SectionDefinition("c", route, 150.0, 250.0)
    with pytest.raises(ValueError):
        check_sections_disjoint([a, b, c])


def test_regression_fit_consistency_enforced():
    with pytest.raises(ValueError):
        RegressionFit(slope=1.0, intercept=0.0, r2=0.9, pearson_r=0.5, n=10)
    fit = RegressionFit(slope=1.0, intercept=0.0, r2=0.25, pearson_r=-0.5, n=10)
    assert fit.r2 == 0.25


def test_regression_fit_r2_none_pairs_with_pearson_none():
    RegressionFit(slope=0.0, intercept=1.0, r2=None, pearson_r=None, n=5)
    with pytest.raises(ValueError):
        RegressionFit(slope=0.0, intercept=1.0, r2=None, pearson_r=0.5, n=5)


@given(st.lists(st.integers(min_value=0, max_value=10_000_000), min_size=2, unique=True))
def test_trace_accepts_any_strictly_increasing_times(times):
    times = sorted(times)
    accel = [AccelSample(t, 0.0, 0.0, 9.8) for t in times]
    tr = Trace("r", accel, [])
    assert tr.n_accel == len(times)


@given(
    st.floats(min_value=-1e3, max_value=1e3, allow_nan=False),
    st.floats(min_value=-1e3, max_value=1e3, allow_nan=False),
)
def test_accel_sample_roundtrips_fields(ax, az):
    s = AccelSample(10, ax, 0.0, az)
    assert s.ax == ax and s.az == az and math.isfinite(s.az)
