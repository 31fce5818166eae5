import io
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pavetrace.model import GRAVITY_MPS2, AccelSample
from pavetrace.roughness import (
    IriModel,
    RmsRow,
    RmsTable,
    compute_rms,
    estimate_iri,
    parse_rms_csv,
    section_rms_table,
    write_rms_csv,
)


def _samples(az_values):
    return [AccelSample(i * 500, 0.0, 0.0, az) for i, az in enumerate(az_values)]


def test_rms_of_constant_gravity_is_zero():
    assert compute_rms(_samples([GRAVITY_MPS2] * 10), GRAVITY_MPS2) == 0.0


def test_rms_alternating_deviation_is_exact():
    # |az - g| = 0.3 for every sample, so the RMS is exactly 0.3
    az = [GRAVITY_MPS2 + (0.3 if i % 2 == 0 else -0.3) for i in range(100)]
    assert compute_rms(_samples(az), GRAVITY_MPS2) == pytest.approx(0.3, abs=1e-15)


def test_rms_sine_matches_analytic():
    # 0.7 Hz sampled at 2 Hz over 300 s: RMS converges to A/sqrt(2)
    amp = 0.85
    az = [
        GRAVITY_MPS2 + amp * math.sin(2 * math.pi * 0.7 * (i * 0.5))
        for i in range(600)
    ]
    rms = compute_rms(_samples(az), GRAVITY_MPS2)
    assert rms == pytest.approx(amp / math.sqrt(2), rel=0.02)


def test_rms_empty_is_error():
    with pytest.raises(ValueError, match="no samples"):
        compute_rms([], GRAVITY_MPS2)


def test_rms_single_sample():
    assert compute_rms(_samples([GRAVITY_MPS2 + 1.5]), GRAVITY_MPS2) == 1.5


def test_mean_subtraction_removes_constant_offset():
    az = [GRAVITY_MPS2 + 0.5 + (0.2 if i % 2 == 0 else -0.2) for i in range(50)]
    biased = compute_rms(_samples(az), GRAVITY_MPS2)
    centered = compute_rms(_samples(az), GRAVITY_MPS2, mean_subtraction=True)
    assert biased > centered
    assert centered == pytest.approx(0.2, abs=1e-12)


@settings(max_examples=60)
@given(
    st.lists(
        st.floats(min_value=-5, max_value=5, allow_nan=False),
        min_size=2,
        max_size=60,
    ),
    st.floats(min_value=-2, max_value=2, allow_nan=False),
)
def test_mean_subtraction_invariant_to_shift(devs, shift):
    base = [GRAVITY_MPS2 + d for d in devs]
    shifted = [v + shift for v in base]
    a = compute_rms(_samples(base), GRAVITY_MPS2, mean_subtraction=True)
    b = compute_rms(_samples(shifted), GRAVITY_MPS2, mean_subtraction=True)
    assert a == pytest.approx(b, abs=1e-9)


@settings(max_examples=60)
@given(st.lists(st.floats(min_value=-5, max_value=5, allow_nan=False), min_size=1, max_size=60))
def test_rms_nonnegative_and_bounded_by_max_deviation(devs):
    rms = compute_rms(_samples([GRAVITY_MPS2 + d for d in devs]), GRAVITY_MPS2)
    assert rms >= 0.0
    assert rms <= max(abs(d) for d in devs) + 1e-12


def test_estimate_iri_worked_example():
    assert estimate_iri(0.1) == pytest.approx(2.149, abs=1e-9)


def test_estimate_iri_rejects_negative_rms():
    with pytest.raises(ValueError):
        estimate_iri(-0.1)


def test_iri_model_requires_positive_slope():
    with pytest.raises(ValueError):
        IriModel(slope=0.0, intercept=1.0)


@given(st.floats(min_value=0, max_value=10), st.floats(min_value=0, max_value=10))
def test_estimate_iri_strictly_increasing(a, b):
    model = IriModel()
    if a < b:
        assert estimate_iri(a, model) < estimate_iri(b, model)


def test_rms_table_matrix_and_means():
    rows = [
        RmsRow("s1", "run1", 0.2),
        RmsRow("s1", "run2", 0.4),
        RmsRow("s2", "run1", 0.6),
        RmsRow("s2", "run2", 0.8),
    ]
    table = RmsTable(rows, ())
    assert table.section_means() == {"s1": pytest.approx(0.3), "s2": pytest.approx(0.7)}
    sections, runs, grid = table.matrix()
    assert sections == ["s1", "s2"]
    assert runs == ["run1", "run2"]
    assert grid == [[0.2, 0.4], [0.6, 0.8]]


def test_rms_table_matrix_raises_on_missing_cell():
    table = RmsTable([RmsRow("s1", "run1", 0.2), RmsRow("s2", "run2", 0.8)], ())
    with pytest.raises(ValueError, match="missing"):
        table.matrix()


def test_rms_csv_roundtrip():
    rows = [RmsRow("s1", "run1", 0.123456789), RmsRow("s2", "run1", 0.5)]
    text = write_rms_csv(RmsTable(rows, ()))
    back = parse_rms_csv(io.StringIO(text))
    assert [(r.section_id, r.run_id, r.rms_mps2) for r in back.rows] == [
        ("s1", "run1", 0.123456789),
        ("s2", "run1", 0.5),
    ]


def test_rms_csv_iri_column_consistent():
    rows = [RmsRow("s1", "run1", 0.1)]
    text = write_rms_csv(RmsTable(rows, ()), IriModel())
    data = text.splitlines()[1].split(",")
    assert float(data[3]) == pytest.approx(2.149, abs=1e-9)


def test_section_rms_table_skips_empty_runs():
    from pavetrace.model import SectionRun

    runs = [
        SectionRun("s1", "run1", _samples([GRAVITY_MPS2 + 0.1] * 4), 30.0, True),
        SectionRun("s2", "run1", [], None, False),
    ]
    table = section_rms_table(runs, GRAVITY_MPS2)
    assert [(r.section_id, r.run_id) for r in table.rows] == [("s1", "run1")]
    assert table.skipped == (("s2", "run1"),)
