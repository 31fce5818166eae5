import pytest

from pavetrace.model import AccelSample, GpsSample, RatingRecord, Trace

# Eleven per-rater mean ratings used across the QA tests. Feeding each mean
# as a single rating reproduces the published rater-bias table exactly.
RATER_MEANS = [3.71, 3.23, 2.98, 2.43, 2.66, 2.43, 3.71, 3.23, 3.43, 4.5, 3.95]


@pytest.fixture
def rater_mean_records():
    return [
        RatingRecord(f"rater{i + 1:02d}", "s01", "run01", m)
        for i, m in enumerate(RATER_MEANS)
    ]


def make_trace(az_values, cadence_ms=500, run_id="run01", g=9.80665, speed_kph=36.0):
    """Trace with the given vertical samples, straight-line GPS at 1 Hz."""
    accel = [
        AccelSample(i * cadence_ms, 0.0, 0.0, az) for i, az in enumerate(az_values)
    ]
    k = max(1, round(1000 / cadence_ms))
    picked = list(accel[::k])
    if picked and picked[-1].t_ms != accel[-1].t_ms:
        picked.append(accel[-1])
    gps = []
    for s in picked:
        dist = (speed_kph / 3.6) * s.t_ms / 1000.0
        gps.append(GpsSample(s.t_ms, 35.7 + dist / 6_371_000.0 * 57.29577951308232, 51.4, speed_kph))
    return Trace(run_id, accel, gps, gravity_mps2=g)
