"""Pick a panel noise level for the noisy-RQI correlation demo.

Sweeps the per-rating noise SD over a grid and, for each level, runs the
full synthetic chain (campaign traces -> section RMS -> panel ratings ->
OLS fit of mean RQI on RMS) across many seeds. Reports the minimum r2
seen at each level and recommends the largest level whose worst-case r2
stays above the demo threshold with some margin.

Usage: python scripts/noise_pilot.py [--seeds 50] [--threshold 0.75]
"""

from __future__ import annotations

import argparse

from pavetrace.correlation import correlate_indices, mean_rqi_by_section
from pavetrace.roughness import RmsTable, section_rms_table
from pavetrace.segmentation import assign_sections
from pavetrace.synth import gen_campaign, gen_panel

LEVELS = [0.1, 0.2, 0.35, 0.5, 0.75, 1.0, 1.5]


def rms_table_for(seed: int) -> RmsTable:
    camp = gen_campaign(seed=seed)
    rows: list = []
    for trace in camp.traces:
        assignment = assign_sections(trace, list(camp.sections), list(camp.route))
        rows.extend(section_rms_table(assignment.runs, trace.gravity_mps2).rows)
    rows.sort(key=lambda r: (r.section_id, r.run_id))
    return RmsTable(rows, ())


def fit_r2(table, noise_sd: float, seed: int) -> float:
    means = table.section_means()
    true_rqi = {sec: max(0.0, min(5.0, 5.0 - 3.0 * m)) for sec, m in means.items()}
    ratings = gen_panel(true_rqi, raters=11, noise_sd=noise_sd, seed=seed)
    report = correlate_indices(table, rqi=mean_rqi_by_section(ratings))
    fit = report["rqi"].fit
    assert fit.slope < 0, "demo premise broken: slope not negative"
    return fit.r2


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument("--threshold", type=float, default=0.75)
    args = ap.parse_args()

    table = rms_table_for(seed=0)
    print(f"section mean RMS: {table.section_means()}")
    print(f"{'noise_sd':>8}  {'min r2':>8}  {'mean r2':>8}  {'ok':>5}")
    best = None
    for level in LEVELS:
        r2s = [fit_r2(table, level, seed) for seed in range(args.seeds)]
        ok = min(r2s) > args.threshold
        print(
            f"{level:8.2f}  {min(r2s):8.4f}  {sum(r2s) / len(r2s):8.4f}  {str(ok):>5}"
        )
        if ok:
            best = level
    if best is None:
        print("no level passed; lower the threshold or the noise grid")
    else:
        print(f"recommended noise_sd: {best} (largest with min r2 > {args.threshold})")


if __name__ == "__main__":
    main()
