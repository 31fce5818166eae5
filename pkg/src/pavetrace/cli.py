"""Command-line front end.

Subcommands mirror the pipeline stages: validate, segment, rms, pdi, qa,
fit, synth, and report (which chains everything and writes a bundle).
Every command writes only inside --out-dir, and identical inputs plus an
identical seed produce byte-identical outputs, figures included.

Exit codes: 0 on success, 1 for domain errors (failed validation, bad
tables, too little data), 2 for usage problems and missing files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import correlation, distress, ingest, panel_qa, roughness, segmentation, svgfig, synth
from .config import Config, load_config
from .model import Trace

PROG = "pavetrace"


def _json_text(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _write(out_dir: Path, name: str, text: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    path.write_text(text, encoding="utf-8")
    return path


def _load_config(args) -> Config:
    return load_config(args.config) if args.config else Config()


def _read_traces(paths: list[str], cfg: Config) -> list[Trace]:
    traces = []
    seen: set[str] = set()
    for raw in paths:
        path = Path(raw)
        run_id = path.stem
        if run_id in seen:
            raise ValueError(f"duplicate run id {run_id!r} (file {raw}); rename the file")
        seen.add(run_id)
        with open(path, newline="", encoding="utf-8") as fh:
            traces.append(ingest.parse_trace(fh, run_id=run_id, gravity_mps2=cfg.gravity_mps2))
    return traces


def _read_route_and_sections(args, cfg: Config):
    with open(args.route, newline="", encoding="utf-8") as fh:
        route = segmentation.parse_route_csv(fh)
    with open(args.sections, newline="", encoding="utf-8") as fh:
        sections = segmentation.parse_sections_csv(fh, route)
    return route, sections


def _rms_table(traces, route, sections, cfg: Config, mean_subtraction: bool):
    rows = []
    skipped = []
    warnings = []
    for trace in traces:
        assignment = segmentation.assign_sections(
            trace, sections, route, cfg.speed_gate_kph, cfg.offroute_warn_m
        )
        warnings.extend(assignment.offroute_warnings)
        for run in assignment.runs:
            if not run.speed_gate_pass:
                warnings.append(
                    f"section {run.section_id} run {run.run_id}: mean speed "
                    f"{run.mean_speed_kph!r} kph outside gate "
                    f"{cfg.speed_gate_kph[0]:g}-{cfg.speed_gate_kph[1]:g} kph"
                )
        table = roughness.section_rms_table(
            assignment.runs, cfg.gravity_mps2, mean_subtraction
        )
        rows.extend(table.rows)
        skipped.extend(table.skipped)
    rows.sort(key=lambda r: (r.section_id, r.run_id))
    return roughness.RmsTable(rows, sorted(skipped)), warnings


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_validate(args) -> int:
    cfg = _load_config(args)
    reports = {}
    any_error = False
    for raw in args.traces:
        path = Path(raw)
        with open(path, newline="", encoding="utf-8") as fh:
            try:
                trace = ingest.parse_trace(fh, run_id=path.stem, gravity_mps2=cfg.gravity_mps2)
            except ingest.ParseError as exc:
                reports[raw] = {
                    "completeness_ok": False,
                    "cadence_ms_observed": None,
                    "errors": [{"row": exc.row, "message": exc.message}],
                    "warnings": [],
                }
                any_error = True
                continue
        report = ingest.validate_trace(trace, cfg.cadence_ms)
        reports[raw] = report.to_dict()
        if report.errors:
            any_error = True
    text = _json_text(reports)
    sys.stdout.write(text)
    if args.out_dir:
        _write(Path(args.out_dir), "validation.json", text)
    return 1 if any_error else 0


def cmd_segment(args) -> int:
    cfg = _load_config(args)
    route, sections = _read_route_and_sections(args, cfg)
    traces = _read_traces(args.traces, cfg)
    payload = {}
    for trace in traces:
        assignment = segmentation.assign_sections(
            trace, sections, route, cfg.speed_gate_kph, cfg.offroute_warn_m
        )
        payload[trace.run_id] = {
            "dropped_samples": assignment.dropped,
            "offroute_warnings": list(assignment.offroute_warnings),
            "sections": [
                {
                    "section_id": run.section_id,
                    "n_samples": run.n_samples,
                    "mean_speed_kph": run.mean_speed_kph,
                    "speed_gate_pass": run.speed_gate_pass,
                }
                for run in assignment.runs
            ],
        }
    text = _json_text(payload)
    sys.stdout.write(text)
    if args.out_dir:
        _write(Path(args.out_dir), "segments.json", text)
    return 0


def _rms_series_svg(table: roughness.RmsTable) -> str | None:
    """Fig-style chart: one series per run across sections, if drawable."""
    by_run: dict[str, dict[str, float]] = {}
    for row in table.rows:
        by_run.setdefault(row.run_id, {})[row.section_id] = row.rms_mps2
    common = None
    for cells in by_run.values():
        common = set(cells) if common is None else common & set(cells)
    if not common:
        return None
    sections = sorted(common)
    series = {run: [cells[s] for s in sections] for run, cells in sorted(by_run.items())}
    return svgfig.series_svg(
        sections, series, "section RMS by run", "RMS (m/s^2)", x_label="section"
    )


def cmd_rms(args) -> int:
    cfg = _load_config(args)
    route, sections = _read_route_and_sections(args, cfg)
    traces = _read_traces(args.traces, cfg)
    table, warnings = _rms_table(traces, route, sections, cfg, args.mean_subtraction)
    for sec, run in table.skipped:
        print(f"skipped empty section {sec} in run {run}", file=sys.stderr)
    for note in warnings:
        print(note, file=sys.stderr)
    out_dir = Path(args.out_dir)
    _write(out_dir, "rms.csv", roughness.write_rms_csv(table, cfg.iri_model))
    chart = _rms_series_svg(table)
    if chart is None:
        print("no section is present in every run; skipping rms_by_run.svg", file=sys.stderr)
    else:
        _write(out_dir, "rms_by_run.svg", chart)
    print(f"wrote {out_dir / 'rms.csv'} ({len(table.rows)} rows)")
    return 0


def cmd_pdi(args) -> int:
    cfg = _load_config(args)
    with open(args.distress, newline="", encoding="utf-8") as fh:
        records = ingest.parse_distress_csv(fh)
    section_ids = None
    if args.sections:
        with open(args.sections, newline="", encoding="utf-8") as fh:
            reader = fh.read().splitlines()
        # Only the ids are needed here; chainage columns are ignored.
        section_ids = [line.split(",")[0] for line in reader[1:] if line.strip()]
    pdi = distress.compute_pdi(records, cfg.weights, section_ids)
    out_dir = Path(args.out_dir)
    _write(out_dir, "pdi.csv", distress.write_pdi_csv(pdi))
    print(f"wrote {out_dir / 'pdi.csv'} ({len(pdi)} sections)")
    return 0


def cmd_qa(args) -> int:
    cfg = _load_config(args)
    with open(args.ratings, newline="", encoding="utf-8") as fh:
        ratings = ingest.parse_rating_csv(fh)
    rms_matrix = None
    if args.rms:
        with open(args.rms, newline="", encoding="utf-8") as fh:
            table = roughness.parse_rms_csv(fh)
        rms_matrix = table.matrix()
    report = panel_qa.build_qa_report(ratings, rms_matrix, cfg.boxplot_k, cfg.alpha)
    text = _json_text(report)
    sys.stdout.write(text)
    if args.out_dir:
        _write(Path(args.out_dir), "qa.json", text)
    return 0


def _fit_annotation(name: str, pairing: correlation.PairingFit) -> str:
    fit = pairing.fit
    r2 = "n/a" if fit.r2 is None else f"{fit.r2:.3f}"
    return f"{name} = {fit.slope:.3f} * rms + {fit.intercept:.3f} (r2 = {r2}, n = {fit.n})"


def cmd_fit(args) -> int:
    cfg = _load_config(args)
    with open(args.rms, newline="", encoding="utf-8") as fh:
        rms_table = roughness.parse_rms_csv(fh)
    iri = rqi = pdi = None
    if args.iri:
        with open(args.iri, newline="", encoding="utf-8") as fh:
            iri = correlation.parse_iri_csv(fh)
    if args.ratings:
        with open(args.ratings, newline="", encoding="utf-8") as fh:
            rqi = correlation.mean_rqi_by_section(ingest.parse_rating_csv(fh))
    if args.pdi:
        with open(args.pdi, newline="", encoding="utf-8") as fh:
            pdi = distress.parse_pdi_csv(fh)
    if iri is None and rqi is None and pdi is None:
        raise ValueError("fit needs at least one of --iri, --ratings, --pdi")

    fits = correlation.correlate_indices(
        rms_table, iri=iri, rqi=rqi, pdi=pdi, per_run=args.per_run_fit
    )
    out_dir = Path(args.out_dir)
    text = _json_text(correlation.fit_report(fits, per_run=args.per_run_fit))
    _write(out_dir, "fit.json", text)
    sys.stdout.write(text)
    for name in sorted(fits):
        pairing = fits[name]
        chart = svgfig.scatter_svg(
            [(p.rms, p.target) for p in pairing.points],
            pairing.fit,
            f"RMS vs {name}",
            "RMS (m/s^2)",
            name,
            _fit_annotation(name, pairing),
        )
        _write(out_dir, f"fit_{name}.svg", chart)
    return 0


def cmd_report(args) -> int:
    cfg = _load_config(args)
    out_dir = Path(args.out_dir)
    manifest: dict[str, list[str] | dict] = {"stages": {}, "files": []}

    def record(stage: str, names: list[str]) -> None:
        manifest["stages"][stage] = names
        manifest["files"].extend(names)

    # Validation (always, traces are required)
    traces = _read_traces(args.traces, cfg)
    reports = {t.run_id: ingest.validate_trace(t, cfg.cadence_ms).to_dict() for t in traces}
    _write(out_dir, "validation.json", _json_text(reports))
    record("validate", ["validation.json"])
    if any(r["errors"] for r in reports.values()):
        print("validation errors; see validation.json", file=sys.stderr)
        return 1

    route, sections = _read_route_and_sections(args, cfg)
    table, warnings = _rms_table(traces, route, sections, cfg, args.mean_subtraction)
    for note in warnings:
        print(note, file=sys.stderr)
    _write(out_dir, "rms.csv", roughness.write_rms_csv(table, cfg.iri_model))
    names = ["rms.csv"]
    chart = _rms_series_svg(table)
    if chart is not None:
        _write(out_dir, "rms_by_run.svg", chart)
        names.append("rms_by_run.svg")
    record("rms", names)

    pdi = None
    if args.distress:
        with open(args.distress, newline="", encoding="utf-8") as fh:
            records = ingest.parse_distress_csv(fh)
        pdi = distress.compute_pdi(
            records, cfg.weights, [s.section_id for s in sections]
        )
        _write(out_dir, "pdi.csv", distress.write_pdi_csv(pdi))
        record("pdi", ["pdi.csv"])

    ratings = None
    if args.ratings:
        with open(args.ratings, newline="", encoding="utf-8") as fh:
            ratings = ingest.parse_rating_csv(fh)
        try:
            rms_matrix = table.matrix()
        except ValueError:
            rms_matrix = None
        qa = panel_qa.build_qa_report(ratings, rms_matrix, cfg.boxplot_k, cfg.alpha)
        _write(out_dir, "qa.json", _json_text(qa))
        record("qa", ["qa.json"])

    iri = None
    if args.iri:
        with open(args.iri, newline="", encoding="utf-8") as fh:
            iri = correlation.parse_iri_csv(fh)
    rqi = correlation.mean_rqi_by_section(ratings) if ratings else None
    targets = {"iri": iri, "rqi": rqi, "pdi": pdi}
    available = {k: v for k, v in targets.items() if v}
    if available:
        fits = correlation.correlate_indices(table, per_run=args.per_run_fit, **available)
        _write(out_dir, "fit.json", _json_text(correlation.fit_report(fits, args.per_run_fit)))
        names = ["fit.json"]
        for name in sorted(fits):
            pairing = fits[name]
            chart = svgfig.scatter_svg(
                [(p.rms, p.target) for p in pairing.points],
                pairing.fit,
                f"RMS vs {name}",
                "RMS (m/s^2)",
                name,
                _fit_annotation(name, pairing),
            )
            _write(out_dir, f"fit_{name}.svg", chart)
            names.append(f"fit_{name}.svg")
        record("fit", names)

    manifest["files"] = sorted(manifest["files"])
    _write(out_dir, "manifest.json", _json_text(manifest))
    print(f"report bundle in {out_dir} ({len(manifest['files'])} files + manifest)")
    return 0


# ---------------------------------------------------------------------------
# synth
# ---------------------------------------------------------------------------


def _write_trace_bundle(out_dir: Path, trace: Trace, truth: dict) -> None:
    _write(out_dir, f"{trace.run_id}.csv", ingest.write_trace_csv(trace))
    total_m = (trace.gps[-1].t_ms - trace.gps[0].t_ms) / 1000.0 * trace.gps[0].speed_kph / 3.6
    route = synth.straight_route(total_m)
    _write(out_dir, "route.csv", segmentation.write_route_csv(route))
    _write(out_dir, "truth.json", _json_text(truth))


def cmd_synth_sine(args) -> int:
    cfg = _load_config(args)
    trace = synth.gen_sine_trace(
        args.amplitude,
        args.freq_hz,
        args.duration_s,
        cfg.cadence_ms,
        cfg.gravity_mps2,
        args.seed,
        run_id="run01",
    )
    truth = {
        "kind": "sine",
        "amplitude": args.amplitude,
        "freq_hz": args.freq_hz,
        "analytic_rms_mps2": args.amplitude / 2**0.5,
        "seed": args.seed,
    }
    _write_trace_bundle(Path(args.out_dir), trace, truth)
    print(f"wrote run01.csv, route.csv, truth.json in {args.out_dir}")
    return 0


def cmd_synth_twozone(args) -> int:
    cfg = _load_config(args)
    trace = synth.gen_two_zone_trace(
        args.smooth_rms,
        args.rough_rms,
        (args.smooth_start, args.smooth_end),
        (args.rough_start, args.rough_end),
        args.duration_s,
        cfg.cadence_ms,
        cfg.gravity_mps2,
        run_id="run01",
    )
    truth = {
        "kind": "twozone",
        "smooth_rms": args.smooth_rms,
        "rough_rms": args.rough_rms,
        "smooth_zone_s": [args.smooth_start, args.smooth_end],
        "rough_zone_s": [args.rough_start, args.rough_end],
    }
    _write_trace_bundle(Path(args.out_dir), trace, truth)
    print(f"wrote run01.csv, route.csv, truth.json in {args.out_dir}")
    return 0


def cmd_synth_campaign(args) -> int:
    cfg = _load_config(args)
    levels = [float(v) for v in args.levels.split(",") if v.strip()]
    campaign = synth.gen_campaign(
        levels,
        args.runs,
        args.section_len_m,
        cfg.cadence_ms,
        args.speed_kph,
        args.jitter_frac,
        cfg.gravity_mps2,
        args.seed,
    )
    out_dir = Path(args.out_dir)
    for trace in campaign.traces:
        _write(out_dir, f"{trace.run_id}.csv", ingest.write_trace_csv(trace))
    _write(out_dir, "route.csv", segmentation.write_route_csv(list(campaign.route)))
    _write(out_dir, "sections.csv", segmentation.write_sections_csv(list(campaign.sections)))
    truth = {
        "kind": "campaign",
        "section_rms": dict(zip((s.section_id for s in campaign.sections), levels)),
        "cell_rms": campaign.cell_rms,
        "seed": args.seed,
    }
    _write(out_dir, "truth.json", _json_text(truth))
    print(
        f"wrote {len(campaign.traces)} trace file(s), route.csv, sections.csv, "
        f"truth.json in {out_dir}"
    )
    return 0


def _parse_bias(text: str | None) -> dict[str, float]:
    if not text:
        return {}
    out = {}
    for part in text.split(","):
        if not part.strip():
            continue
        if "=" not in part:
            raise ValueError(f"bad bias entry {part!r}; expected rater_id=shift")
        rater, shift = part.split("=", 1)
        out[rater.strip()] = float(shift)
    return out


def cmd_synth_panel(args) -> int:
    true_rqi = [float(v) for v in args.true_rqi.split(",") if v.strip()]
    bias = _parse_bias(args.bias)
    records = synth.gen_panel(true_rqi, args.raters, args.noise_sd, args.seed, bias, args.runs)
    out_dir = Path(args.out_dir)
    _write(out_dir, "ratings.csv", ingest.write_rating_csv(records))
    truth = {
        "kind": "panel",
        "true_rqi": {f"s{i + 1:02d}": v for i, v in enumerate(true_rqi)},
        "raters": args.raters,
        "noise_sd": args.noise_sd,
        "bias": bias,
        "runs": args.runs,
        "seed": args.seed,
    }
    _write(out_dir, "truth.json", _json_text(truth))
    print(f"wrote ratings.csv ({len(records)} rows), truth.json in {out_dir}")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="Smartphone roughness pipeline: RMS/IRI/PDI/RQI statistics and QA.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_required=True):
        p.add_argument("--config", help="TOML config file")
        if out_required:
            p.add_argument("--out-dir", required=True, help="directory for outputs")
        else:
            p.add_argument("--out-dir", help="optional directory to also write outputs into")

    p = sub.add_parser("validate", help="check trace files for gaps and cadence drift")
    p.add_argument("traces", nargs="+", help="trace CSV file(s)")
    common(p, out_required=False)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("segment", help="map trace samples onto route sections")
    p.add_argument("traces", nargs="+")
    p.add_argument("--route", required=True, help="route polyline CSV (lat,lon)")
    p.add_argument("--sections", required=True, help="sections CSV (id, start, end chainage)")
    common(p, out_required=False)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("rms", help="per section-run RMS and estimated IRI")
    p.add_argument("traces", nargs="+")
    p.add_argument("--route", required=True)
    p.add_argument("--sections", required=True)
    p.add_argument("--mean-subtraction", action="store_true",
                   help="subtract the window mean instead of configured gravity")
    common(p)
    p.set_defaults(func=cmd_rms)

    p = sub.add_parser("pdi", help="distress index per section")
    p.add_argument("distress", help="distress survey CSV")
    p.add_argument("--sections", help="optional sections CSV; lists sections with no distress")
    common(p)
    p.set_defaults(func=cmd_pdi)

    p = sub.add_parser("qa", help="panel-rating quality battery")
    p.add_argument("ratings", help="ratings CSV")
    p.add_argument("--rms", help="optional RMS CSV for repeatability and run ANOVA")
    common(p, out_required=False)
    p.set_defaults(func=cmd_qa)

    p = sub.add_parser("fit", help="regressions of RMS against IRI / RQI / PDI")
    p.add_argument("--rms", required=True, help="RMS CSV (from the rms command)")
    p.add_argument("--iri", help="reference IRI CSV (section_id,iri_mm_per_m)")
    p.add_argument("--ratings", help="panel ratings CSV (averaged per section)")
    p.add_argument("--pdi", help="PDI CSV (from the pdi command)")
    p.add_argument("--per-run-fit", action="store_true",
                   help="fit on per-run RMS points instead of per-section means")
    common(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("report", help="run the whole pipeline and write a bundle")
    p.add_argument("traces", nargs="+")
    p.add_argument("--route", required=True)
    p.add_argument("--sections", required=True)
    p.add_argument("--ratings")
    p.add_argument("--distress")
    p.add_argument("--iri")
    p.add_argument("--per-run-fit", action="store_true")
    p.add_argument("--mean-subtraction", action="store_true")
    common(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("synth", help="generate synthetic fixtures with known answers")
    synth_sub = p.add_subparsers(dest="kind", required=True)

    q = synth_sub.add_parser("sine", help="single-tone trace with RMS = amplitude/sqrt(2)")
    q.add_argument("--amplitude", type=float, required=True)
    q.add_argument("--freq-hz", type=float, required=True)
    q.add_argument("--duration-s", type=float, default=300.0)
    q.add_argument("--seed", type=int, default=0)
    common(q)
    q.set_defaults(func=cmd_synth_sine)

    q = synth_sub.add_parser("twozone", help="smooth stretch then rough stretch")
    q.add_argument("--smooth-rms", type=float, required=True)
    q.add_argument("--rough-rms", type=float, required=True)
    q.add_argument("--smooth-start", type=float, default=10.0)
    q.add_argument("--smooth-end", type=float, default=70.0)
    q.add_argument("--rough-start", type=float, default=120.0)
    q.add_argument("--rough-end", type=float, default=200.0)
    q.add_argument("--duration-s", type=float, default=210.0)
    common(q)
    q.set_defaults(func=cmd_synth_twozone)

    q = synth_sub.add_parser("campaign", help="multi-section, multi-run survey")
    q.add_argument("--levels", default="0.2,0.35,0.5,0.7,0.95",
                   help="comma-separated per-section RMS levels")
    q.add_argument("--runs", type=int, default=5)
    q.add_argument("--section-len-m", type=float, default=500.0)
    q.add_argument("--speed-kph", type=float, default=36.0)
    q.add_argument("--jitter-frac", type=float, default=0.02)
    q.add_argument("--seed", type=int, default=0)
    common(q)
    q.set_defaults(func=cmd_synth_campaign)

    q = synth_sub.add_parser("panel", help="rating panel with optional rater bias")
    q.add_argument("--true-rqi", required=True, help="comma-separated true section values")
    q.add_argument("--raters", type=int, default=11)
    q.add_argument("--noise-sd", type=float, default=0.0)
    q.add_argument("--bias", help="rater biases, e.g. rater03=1.0,rater07=-0.5")
    q.add_argument("--runs", type=int, default=1)
    q.add_argument("--seed", type=int, default=0)
    common(q)
    q.set_defaults(func=cmd_synth_panel)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"file not found: {exc.filename}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
