"""Synthetic traces, panels, and campaigns with analytically known answers.

These generators are the pipeline's test oracle: every output has a value
that can be computed by hand (sine RMS = A/sqrt(2), two-zone traces whose
windowed RMS is exactly the configured level, panel ratings with injected
rater bias). All of them are deterministic for a fixed seed, and the
campaign writer emits the same CSV schemas the ingest side consumes.

Geometry is kept trivial on purpose: every synthetic route runs due north
at constant speed, so chainage is linear in time and section boundaries
fall where the arithmetic says they should.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .model import GRAVITY_MPS2, AccelSample, GpsSample, RatingRecord, SectionDefinition, Trace
from .segmentation import EARTH_RADIUS_M, slice_route

ORIGIN_LAT = 35.70
ORIGIN_LON = 51.40


def straight_route(total_m: float, lat0: float = ORIGIN_LAT, lon0: float = ORIGIN_LON):
    """Two-point polyline running due north for total_m metres."""
    dlat = math.degrees(total_m / EARTH_RADIUS_M)
    return [(lat0, lon0), (lat0 + dlat, lon0)]


def _gps_every_second(
    accel: Sequence[AccelSample],
    cadence_ms: int,
    speed_kph: float,
    lat0: float = ORIGIN_LAT,
    lon0: float = ORIGIN_LON,
) -> list[GpsSample]:
    """1 Hz GPS fixes moving north at constant speed, one per k-th accel row."""
    k = max(1, round(1000 / cadence_ms))
    speed_mps = speed_kph / 3.6
    picked = list(accel[::k])
    if picked and picked[-1].t_ms != accel[-1].t_ms:
        picked.append(accel[-1])  # cover the tail so no accel sample is dropped
    gps = []
    for sample in picked:
        dist = speed_mps * sample.t_ms / 1000.0
        lat = lat0 + math.degrees(dist / EARTH_RADIUS_M)
        gps.append(GpsSample(sample.t_ms, lat, lon0, speed_kph))
    return gps


def gen_sine_trace(
    amplitude: float,
    freq_hz: float,
    duration_s: float,
    cadence_ms: int = 500,
    g: float = GRAVITY_MPS2,
    seed: int = 0,
    speed_kph: float = 36.0,
    run_id: str = "run01",
) -> Trace:
    """Pure sine on the vertical axis: az = g + A*sin(2*pi*f*t + phi(seed)).

    The analytic RMS (about g) is A/sqrt(2). Sampling must stay below the
    Nyquist limit (freq_hz < 0.5 / cadence seconds) and the trace must hold
    at least five full cycles, otherwise the discrete RMS drifts too far
    from the analytic value to be useful as an oracle.
    """
    if amplitude < 0:
        raise ValueError(f"amplitude must be >= 0, got {amplitude}")
    if freq_hz <= 0 or duration_s <= 0 or cadence_ms <= 0:
        raise ValueError("freq_hz, duration_s and cadence_ms must be positive")
    cadence_s = cadence_ms / 1000.0
    if freq_hz >= 0.5 / cadence_s:
        raise ValueError(
            f"aliasing: freq {freq_hz} Hz needs cadence below "
            f"{500.0 / freq_hz:.1f} ms (got {cadence_ms} ms)"
        )
    if duration_s * freq_hz < 5.0:
        raise ValueError(
            f"duration too short: {duration_s} s holds fewer than 5 cycles at {freq_hz} Hz"
        )

    rng = np.random.default_rng(seed)
    phase = float(rng.uniform(0.0, 2.0 * math.pi))
    n = int(round(duration_s * 1000.0 / cadence_ms))
    accel = []
    for i in range(n):
        t_ms = i * cadence_ms
        az = g + amplitude * math.sin(2.0 * math.pi * freq_hz * (t_ms / 1000.0) + phase)
        accel.append(AccelSample(t_ms, 0.0, 0.0, az))
    gps = _gps_every_second(accel, cadence_ms, speed_kph)
    return Trace(run_id, accel, gps, gravity_mps2=g)


def gen_two_zone_trace(
    smooth_rms: float,
    rough_rms: float,
    smooth_zone: tuple[float, float] = (10.0, 70.0),
    rough_zone: tuple[float, float] = (120.0, 200.0),
    duration_s: float = 210.0,
    cadence_ms: int = 500,
    g: float = GRAVITY_MPS2,
    speed_kph: float = 36.0,
    run_id: str = "run01",
) -> Trace:
    """Trace with a calm stretch and a rough stretch at exact RMS levels.

    Inside each zone the vertical deviation alternates +level, -level,
    +level, ... so every sample has |az - g| equal to the zone's level and
    any window that stays inside one zone has exactly that RMS. Outside the
    zones az = g. No randomness is involved.
    """
    if not smooth_rms < rough_rms:
        raise ValueError(f"smooth_rms must be < rough_rms, got {smooth_rms} vs {rough_rms}")
    if smooth_rms < 0:
        raise ValueError("rms levels must be >= 0")
    for name, (start, end) in (("smooth", smooth_zone), ("rough", rough_zone)):
        if not start < end:
            raise ValueError(f"{name} zone must have start < end, got ({start}, {end})")
    zones = sorted([smooth_zone, rough_zone])
    if zones[1][0] < zones[0][1]:
        raise ValueError(f"overlapping zones: {smooth_zone} and {rough_zone}")
    if duration_s <= 0 or cadence_ms <= 0:
        raise ValueError("duration_s and cadence_ms must be positive")

    n = int(round(duration_s * 1000.0 / cadence_ms))
    accel = []
    zone_index = 0  # sample counter within the current zone, drives alternation
    prev_zone = None
    for i in range(n):
        t_ms = i * cadence_ms
        t_s = t_ms / 1000.0
        if smooth_zone[0] <= t_s < smooth_zone[1]:
            zone, level = "smooth", smooth_rms
        elif rough_zone[0] <= t_s < rough_zone[1]:
            zone, level = "rough", rough_rms
        else:
            zone, level = None, 0.0
        if zone != prev_zone:
            zone_index = 0
            prev_zone = zone
        sign = 1.0 if zone_index % 2 == 0 else -1.0
        accel.append(AccelSample(t_ms, 0.0, 0.0, g + sign * level))
        zone_index += 1
    gps = _gps_every_second(accel, cadence_ms, speed_kph)
    return Trace(run_id, accel, gps, gravity_mps2=g)


def gen_panel(
    true_rqi: Mapping[str, float] | Sequence[float],
    raters: int = 11,
    noise_sd: float = 0.0,
    seed: int = 0,
    bias: Mapping[str, float] | None = None,
    runs: int = 1,
) -> list[RatingRecord]:
    """Panel ratings: clamp(true + bias_rater + noise, 0, 5) per cell.

    true_rqi maps section ids to true values in [0, 5] (a bare sequence is
    auto-named s01, s02, ...). bias maps rater ids (rater01, rater02, ...)
    to a constant shift, which is how leniency/severity is injected. Noise
    is Gaussian per (rater, section, run), drawn in a fixed order so a seed
    pins the whole panel.
    """
    if not isinstance(true_rqi, Mapping):
        true_rqi = {f"s{i + 1:02d}": v for i, v in enumerate(true_rqi)}
    for sec, v in true_rqi.items():
        if not 0.0 <= v <= 5.0:
            raise ValueError(f"true RQI for {sec} is {v}, outside [0, 5]")
    if raters < 1:
        raise ValueError("need at least one rater")
    if noise_sd < 0:
        raise ValueError("noise_sd must be >= 0")
    if runs < 1:
        raise ValueError("need at least one run")

    rater_ids = [f"rater{i + 1:02d}" for i in range(raters)]
    bias = dict(bias or {})
    unknown = set(bias) - set(rater_ids)
    if unknown:
        raise ValueError(f"bias given for unknown rater(s): {sorted(unknown)}")

    rng = np.random.default_rng(seed)
    records = []
    for rater in rater_ids:
        shift = bias.get(rater, 0.0)
        for sec, true_value in true_rqi.items():
            for run in range(runs):
                eps = float(rng.normal(0.0, noise_sd)) if noise_sd > 0 else 0.0
                value = min(5.0, max(0.0, true_value + shift + eps))
                records.append(RatingRecord(rater, sec, f"run{run + 1:02d}", value))
    return records


# ---------------------------------------------------------------------------
# Multi-section, multi-run campaign
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Campaign:
    """A self-contained synthetic survey: route, sections, one trace per run,
    and the RMS level injected into each (section, run) cell."""

    traces: tuple[Trace, ...]
    route: tuple[tuple[float, float], ...]
    sections: tuple[SectionDefinition, ...]
    cell_rms: dict[str, dict[str, float]]  # section_id -> run_id -> injected RMS

    def __init__(self, traces, route, sections, cell_rms):
        object.__setattr__(self, "traces", tuple(traces))
        object.__setattr__(self, "route", tuple(tuple(p) for p in route))
        object.__setattr__(self, "sections", tuple(sections))
        object.__setattr__(self, "cell_rms", {k: dict(v) for k, v in cell_rms.items()})


def gen_campaign(
    section_rms: Sequence[float] = (0.2, 0.35, 0.5, 0.7, 0.95),
    n_runs: int = 5,
    section_len_m: float = 500.0,
    cadence_ms: int = 500,
    speed_kph: float = 36.0,
    jitter_frac: float = 0.02,
    g: float = GRAVITY_MPS2,
    seed: int = 0,
) -> Campaign:
    """Drive n_runs passes over consecutive sections with known roughness.

    Section i gets base RMS section_rms[i]; each (section, run) cell is
    perturbed by a multiplicative factor 1 + N(0, jitter_frac) so replicate
    runs are statistically identical without being byte-equal. Within a
    section the vertical deviation alternates in sign at exactly the cell's
    level, so the recovered per-cell RMS equals the injected value.

    Sampling is offset by half a cadence step so no sample lands exactly on
    a section boundary, where floating-point chainage could tip it into the
    neighbouring section.
    """
    if len(section_rms) < 1:
        raise ValueError("need at least one section")
    if any(v <= 0 for v in section_rms):
        raise ValueError("section RMS levels must be positive")
    if n_runs < 1:
        raise ValueError("need at least one run")
    if jitter_frac < 0:
        raise ValueError("jitter_frac must be >= 0")
    if section_len_m <= 0 or cadence_ms <= 0 or speed_kph <= 0:
        raise ValueError("section_len_m, cadence_ms and speed_kph must be positive")

    n_sections = len(section_rms)
    total_m = section_len_m * n_sections
    route = straight_route(total_m)
    sections = []
    for i in range(n_sections):
        start, end = i * section_len_m, (i + 1) * section_len_m
        sections.append(
            SectionDefinition(f"s{i + 1:02d}", slice_route(route, start, end), start, end)
        )

    speed_mps = speed_kph / 3.6
    half_step_ms = cadence_ms // 2
    n_samples = 0
    while speed_mps * (n_samples * cadence_ms + half_step_ms) / 1000.0 < total_m:
        n_samples += 1

    rng = np.random.default_rng(seed)
    run_ids = [f"run{r + 1:02d}" for r in range(n_runs)]
    cell_rms: dict[str, dict[str, float]] = {s.section_id: {} for s in sections}
    traces = []
    for run_id in run_ids:
        levels = []
        for sec, base in zip(sections, section_rms):
            factor = 1.0 + float(rng.normal(0.0, jitter_frac)) if jitter_frac > 0 else 1.0
            if factor <= 0:
                raise ValueError(
                    f"jitter produced a non-positive factor ({factor:.3f}); "
                    "lower jitter_frac"
                )
            level = base * factor
            levels.append(level)
            cell_rms[sec.section_id][run_id] = level
        accel = []
        for i in range(n_samples):
            t_ms = i * cadence_ms + half_step_ms
            chain = speed_mps * t_ms / 1000.0
            idx = min(int(chain // section_len_m), n_sections - 1)
            level = levels[idx]
            sign = 1.0 if i % 2 == 0 else -1.0
            accel.append(AccelSample(t_ms, 0.0, 0.0, g + sign * level))
        gps = _gps_every_second(accel, cadence_ms, speed_kph)
        traces.append(Trace(run_id, accel, gps, gravity_mps2=g))
    return Campaign(traces, route, sections, cell_rms)
