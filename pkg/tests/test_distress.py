import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pavetrace.distress import (
    DEFAULT_WEIGHTS,
    WeightTable,
    compute_pdi,
    parse_pdi_csv,
    weights_from_config,
    write_pdi_csv,
)
from pavetrace.model import DistressRecord


def test_default_weight_values():
    assert DEFAULT_WEIGHTS == {
        "longitudinal crack": 2.0,
        "transverse crack": 2.0,
        "alligator crack": 3.0,
        "pothole": 3.0,
        "patching": 1.0,
        "corrugation": 1.5,
    }


def test_pdi_single_record():
    # weight 3 (pothole) * severity 3 (High) * density 2 = 18
    recs = [DistressRecord("s1", "pothole", "High", 2.0)]
    assert compute_pdi(recs) == {"s1": 18.0}


def test_pdi_sums_within_section():
    recs = [
        DistressRecord("s1", "pothole", "High", 2.0),  # 3*3*2 = 18
        DistressRecord("s1", "patching", "Low", 4.0),  # 1*1*4 = 4
        DistressRecord("s2", "corrugation", "Moderate", 2.0),  # 1.5*2*2 = 6
    ]
    assert compute_pdi(recs) == {"s1": 22.0, "s2": 6.0}


def test_pdi_seeds_zero_for_listed_sections():
    recs = [DistressRecord("s1", "pothole", "Low", 1.0)]
    out = compute_pdi(recs, section_ids=["s1", "s2", "s3"])
    assert out == {"s1": 3.0, "s2": 0.0, "s3": 0.0}


def test_pdi_no_records_no_sections():
    assert compute_pdi([]) == {}


def test_weight_table_rejects_nonpositive():
    with pytest.raises(ValueError):
        WeightTable({"pothole": 0.0})


def test_weight_table_unknown_type_lookup():
    wt = WeightTable()
    with pytest.raises(KeyError, match="rutting"):
        wt.weight("rutting")


def test_weight_override_changes_pdi():
    wt = weights_from_config({"pothole": 5.0})
    recs = [DistressRecord("s1", "pothole", "High", 2.0)]
    assert compute_pdi(recs, wt) == {"s1": 30.0}
    # other defaults are preserved
    assert wt.weight("patching") == 1.0


def test_pdi_csv_roundtrip():
    pdi = {"s1": 22.0, "s2": 0.0, "s3": 6.5}
    assert parse_pdi_csv(io.StringIO(write_pdi_csv(pdi))) == pdi


severity_st = st.sampled_from(["Low", "Moderate", "High"])
dtype_st = st.sampled_from(sorted(DEFAULT_WEIGHTS))
record_st = st.builds(
    DistressRecord,
    st.sampled_from(["s1", "s2", "s3"]),
    dtype_st,
    severity_st,
    st.floats(min_value=0, max_value=100, allow_nan=False),
)


@settings(max_examples=80)
@given(st.lists(record_st, max_size=20), st.lists(record_st, max_size=20))
def test_pdi_additive_over_record_lists(a, b):
    combined = compute_pdi(a + b)
    pa, pb = compute_pdi(a), compute_pdi(b)
    for sec in set(pa) | set(pb):
        assert combined[sec] == pytest.approx(pa.get(sec, 0.0) + pb.get(sec, 0.0), rel=1e-12)


@settings(max_examples=80)
@given(st.lists(record_st, min_size=1, max_size=20), st.floats(min_value=0.1, max_value=10))
def test_pdi_scales_linearly_with_density(records, factor):
    scaled = [
        DistressRecord(r.section_id, r.distress_type, r.severity, r.density * factor)
        for r in records
    ]
    base = compute_pdi(records)
    out = compute_pdi(scaled)
    for sec, value in base.items():
        assert out[sec] == pytest.approx(value * factor, rel=1e-9)


@settings(max_examples=60)
@given(st.lists(record_st, max_size=20))
def test_pdi_nonnegative(records):
    assert all(v >= 0 for v in compute_pdi(records).values())
