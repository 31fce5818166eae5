"""Quality battery for panel ratings and replicate roughness measurements.

Covers the classic rater-error checks (leniency/severity via deviation from
the grand mean, central tendency via rating range), boxplot outlier
screening, one-way and two-way ANOVA with F-distribution p-values, and
repeatability (SD / CV) across replicate runs.

Conventions baked in here:

* Quartiles use linear interpolation between order statistics (the common
  "type 7" rule, numpy's default).
* The grand mean is the unweighted mean of rater means, so a prolific rater
  does not drag the baseline.
* A rater is flagged lenient/severe when |delta_r| exceeds twice the
  standard deviation of the rater means -- the spread the deltas are
  measured against. Central tendency is flagged when a rater's range is
  below one standard deviation of all ratings.
* F-tail probabilities come from the regularized incomplete beta function.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import special

from .model import RatingRecord


def boxplot_outliers(values: Sequence[float], k: float = 1.5) -> set[int]:
    """Indices of values outside [Q1 - k*IQR, Q3 + k*IQR]."""
    if len(values) == 0:
        raise ValueError("boxplot_outliers needs a non-empty list")
    arr = np.asarray(values, dtype=float)
    q1, q3 = np.percentile(arr, [25.0, 75.0])
    iqr = q3 - q1
    lo, hi = q1 - k * iqr, q3 + k * iqr
    return {i for i, v in enumerate(arr) if v < lo or v > hi}


def sample_sd(values: Sequence[float]) -> float:
    """Sample standard deviation (n-1 denominator)."""
    arr = np.asarray(values, dtype=float)
    if arr.size < 2:
        raise ValueError("sample SD needs >= 2 values")
    return float(np.std(arr, ddof=1))


# ---------------------------------------------------------------------------
# Leniency / severity (delta R) and central tendency
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DeltaRRow:
    rater_id: str
    n: int
    mean: float
    sd: float | None  # None when the rater has a single rating
    delta_r: float
    rank: int
    flag: str | None  # "leniency", "severity", or None


@dataclass(frozen=True)
class DeltaRTable:
    rows: tuple[DeltaRRow, ...]
    grand_mean: float
    sd_of_rater_means: float | None
    warnings: tuple[str, ...]

    def __init__(self, rows, grand_mean, sd_of_rater_means, warnings=()):
        object.__setattr__(self, "rows", tuple(rows))
        object.__setattr__(self, "grand_mean", float(grand_mean))
        object.__setattr__(
            self,
            "sd_of_rater_means",
            None if sd_of_rater_means is None else float(sd_of_rater_means),
        )
        object.__setattr__(self, "warnings", tuple(warnings))

    def to_dict(self) -> dict:
        return {
            "grand_mean": self.grand_mean,
            "sd_of_rater_means": self.sd_of_rater_means,
            "rows": [
                {
                    "rater_id": r.rater_id,
                    "n": r.n,
                    "mean": r.mean,
                    "sd": r.sd,
                    "delta_r": r.delta_r,
                    "rank": r.rank,
                    "flag": r.flag,
                }
                for r in self.rows
            ],
            "warnings": list(self.warnings),
        }


def _by_rater(ratings: Iterable[RatingRecord]) -> dict[str, list[float]]:
    grouped: dict[str, list[float]] = defaultdict(list)
    for r in ratings:
        grouped[r.rater_id].append(r.rqi)
    return dict(grouped)


def delta_r_table(ratings: Iterable[RatingRecord]) -> DeltaRTable:
    """Per-rater mean, SD, deviation from the grand mean, and dense rank.

    The grand mean is the unweighted mean of rater means. Dense ranking
    orders raters by |delta_r| descending; exactly equal magnitudes share
    a rank. Flags mark raters more than two SDs (of the rater means) above
    (leniency) or below (severity) the grand mean.
    """
    grouped = _by_rater(ratings)
    if len(grouped) < 2:
        raise ValueError(f"delta_r_table needs >= 2 raters, got {len(grouped)}")
    warnings: list[str] = []

    means = {rid: sum(v) / len(v) for rid, v in grouped.items()}
    grand_mean = sum(means.values()) / len(means)
    sd_means = sample_sd(list(means.values())) if len(means) >= 2 else None
    deltas = {rid: means[rid] - grand_mean for rid in means}

    # Dense rank on |delta_r|, largest magnitude first; ties share a rank.
    magnitudes = sorted({abs(d) for d in deltas.values()}, reverse=True)
    rank_of = {m: i + 1 for i, m in enumerate(magnitudes)}

    threshold = None if sd_means is None else 2.0 * sd_means
    rows = []
    for rid in sorted(grouped):
        values = grouped[rid]
        sd = sample_sd(values) if len(values) >= 2 else None
        if sd is None:
            warnings.append(f"rater {rid} has a single rating; SD undefined")
        delta = deltas[rid]
        flag = None
        if threshold is not None and abs(delta) > threshold:
            flag = "leniency" if delta > 0 else "severity"
        rows.append(DeltaRRow(rid, len(values), means[rid], sd, delta, rank_of[abs(delta)], flag))
    return DeltaRTable(rows, grand_mean, sd_means, warnings)


@dataclass(frozen=True)
class RangeRow:
    rater_id: str
    n: int
    rating_range: float
    flagged: bool  # central-tendency suspect


@dataclass(frozen=True)
class RangeTable:
    rows: tuple[RangeRow, ...]
    sd_all_ratings: float | None
    warnings: tuple[str, ...]

    def __init__(self, rows, sd_all_ratings, warnings=()):
        object.__setattr__(self, "rows", tuple(rows))
        object.__setattr__(
            self, "sd_all_ratings", None if sd_all_ratings is None else float(sd_all_ratings)
        )
        object.__setattr__(self, "warnings", tuple(warnings))

    def to_dict(self) -> dict:
        return {
            "sd_all_ratings": self.sd_all_ratings,
            "rows": [
                {
                    "rater_id": r.rater_id,
                    "n": r.n,
                    "range": r.rating_range,
                    "flagged": r.flagged,
                }
                for r in self.rows
            ],
            "warnings": list(self.warnings),
        }


def rating_ranges(ratings: Iterable[RatingRecord]) -> RangeTable:
    """Max - min rating per rater; a range below one SD of all ratings flags
    the rater for central tendency. Single-rating raters are excluded with a
    warning (a one-point range is meaningless)."""
    grouped = _by_rater(ratings)
    all_values = [r for values in grouped.values() for r in values]
    sd_all = sample_sd(all_values) if len(all_values) >= 2 else None
    rows = []
    warnings = []
    for rid in sorted(grouped):
        values = grouped[rid]
        if len(values) < 2:
            warnings.append(f"rater {rid} has a single rating; excluded from range table")
            continue
        span = max(values) - min(values)
        flagged = sd_all is not None and span < sd_all
        rows.append(RangeRow(rid, len(values), span, flagged))
    return RangeTable(rows, sd_all, warnings)


# ---------------------------------------------------------------------------
# ANOVA
# ---------------------------------------------------------------------------


def f_sf(f: float, df1: int, df2: int) -> float:
    """Upper-tail probability P(F(df1, df2) > f) via the regularized
    incomplete beta function."""
    if f < 0:
        return 1.0
    if math.isinf(f):
        return 0.0
    x = df2 / (df2 + df1 * f)
    return float(special.betainc(df2 / 2.0, df1 / 2.0, x))


@dataclass(frozen=True)
class AnovaRow:
    source: str
    ss: float
    df: int
    ms: float | None
    f: float | None
    p: float | None
    significant: bool | None


@dataclass(frozen=True)
class AnovaResult:
    rows: tuple[AnovaRow, ...]
    ss_total: float
    df_total: int
    alpha: float
    degenerate: bool = False

    def __init__(self, rows, ss_total, df_total, alpha, degenerate=False):
        object.__setattr__(self, "rows", tuple(rows))
        object.__setattr__(self, "ss_total", float(ss_total))
        object.__setattr__(self, "df_total", int(df_total))
        object.__setattr__(self, "alpha", float(alpha))
        object.__setattr__(self, "degenerate", bool(degenerate))

    def row(self, source: str) -> AnovaRow:
        for r in self.rows:
            if r.source == source:
                return r
        raise KeyError(f"no ANOVA source named {source!r}")

    def to_dict(self) -> dict:
        return {
            "rows": [
                {
                    "source": r.source,
                    "ss": r.ss,
                    "df": r.df,
                    "ms": r.ms,
                    "f": (None if r.f is None else (r.f if math.isfinite(r.f) else "inf")),
                    "p": r.p,
                    "significant": r.significant,
                }
                for r in self.rows
            ],
            "ss_total": self.ss_total,
            "df_total": self.df_total,
            "alpha": self.alpha,
            "degenerate": self.degenerate,
        }


def anova_one_way(groups: Sequence[Sequence[float]], alpha: float = 0.05) -> AnovaResult:
    """Standard one-way decomposition: between + within = total.

    Requires >= 2 non-empty groups and at least one group with >= 2 values
    (otherwise there is no within-group degree of freedom).
    """
    if len(groups) < 2:
        raise ValueError(f"one-way ANOVA needs >= 2 groups, got {len(groups)}")
    arrays = [np.asarray(g, dtype=float) for g in groups]
    if any(a.size == 0 for a in arrays):
        raise ValueError("one-way ANOVA groups must be non-empty")
    n_total = sum(a.size for a in arrays)
    k = len(arrays)
    if n_total - k < 1:
        raise ValueError("one-way ANOVA needs at least one group with >= 2 values")

    grand = sum(float(a.sum()) for a in arrays) / n_total
    ss_between = sum(a.size * (float(a.mean()) - grand) ** 2 for a in arrays)
    ss_within = sum(float(((a - a.mean()) ** 2).sum()) for a in arrays)
    ss_total = sum(float(((a - grand) ** 2).sum()) for a in arrays)
    df_between, df_within = k - 1, n_total - k
    ms_between = ss_between / df_between
    ms_within = ss_within / df_within

    degenerate = ms_within == 0.0 and ss_between == 0.0
    if degenerate:
        f = p = sig = None
    elif ms_within == 0.0:
        f, p, sig = math.inf, 0.0, True
    else:
        f = ms_between / ms_within
        p = f_sf(f, df_between, df_within)
        sig = p < alpha
    rows = [
        AnovaRow("between", ss_between, df_between, ms_between, f, p, sig),
        AnovaRow("within", ss_within, df_within, ms_within, None, None, None),
    ]
    return AnovaResult(rows, ss_total, n_total - 1, alpha, degenerate)


def anova_two_way_no_replication(
    table: Sequence[Sequence[float]],
    alpha: float = 0.05,
    row_name: str = "sections",
    col_name: str = "runs",
) -> AnovaResult:
    """Two-way ANOVA without replication on a complete rows x columns matrix.

    Decomposes SS_total into row, column and residual components; each
    effect is tested against the residual mean square. Missing cells are an
    error -- no imputation.
    """
    arr = np.asarray(table, dtype=float)
    if arr.ndim != 2:
        raise ValueError("two-way ANOVA needs a 2-D matrix")
    if np.isnan(arr).any():
        raise ValueError("two-way ANOVA matrix has missing cells")
    n_rows, n_cols = arr.shape
    if n_rows < 2 or n_cols < 2:
        raise ValueError(f"two-way ANOVA needs >= 2 rows and >= 2 columns, got {arr.shape}")

    grand = float(arr.mean())
    row_means = arr.mean(axis=1)
    col_means = arr.mean(axis=0)
    ss_rows = float(n_cols * ((row_means - grand) ** 2).sum())
    ss_cols = float(n_rows * ((col_means - grand) ** 2).sum())
    resid = arr - row_means[:, None] - col_means[None, :] + grand
    ss_resid = float((resid**2).sum())
    ss_total = float(((arr - grand) ** 2).sum())
    df_rows, df_cols = n_rows - 1, n_cols - 1
    df_resid = df_rows * df_cols
    ms_resid = ss_resid / df_resid

    def effect(source: str, ss: float, df: int) -> tuple[AnovaRow, bool]:
        ms = ss / df
        if ms_resid == 0.0 and ss == 0.0:
            return AnovaRow(source, ss, df, ms, None, None, None), True
        if ms_resid == 0.0:
            return AnovaRow(source, ss, df, ms, math.inf, 0.0, True), False
        f = ms / ms_resid
        p = f_sf(f, df, df_resid)
        return AnovaRow(source, ss, df, ms, f, p, p < alpha), False

    row_row, deg_r = effect(row_name, ss_rows, df_rows)
    col_row, deg_c = effect(col_name, ss_cols, df_cols)
    rows = [
        row_row,
        col_row,
        AnovaRow("residual", ss_resid, df_resid, ms_resid, None, None, None),
    ]
    return AnovaResult(rows, ss_total, n_rows * n_cols - 1, alpha, deg_r or deg_c)


# ---------------------------------------------------------------------------
# Repeatability
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Repeatability:
    mean: float
    sd: float
    cv_percent: float | None  # None when the mean is zero

    def to_dict(self) -> dict:
        return {"mean": self.mean, "sd": self.sd, "cv_percent": self.cv_percent}


def repeatability(values: Sequence[float]) -> Repeatability:
    """Mean, sample SD and CV (= SD/mean, as percent) of replicate values."""
    if len(values) < 2:
        raise ValueError(f"repeatability needs >= 2 values, got {len(values)}")
    arr = np.asarray(values, dtype=float)
    mean = float(arr.mean())
    sd = float(np.std(arr, ddof=1))
    cv = None if mean == 0.0 else 100.0 * sd / mean
    return Repeatability(mean, sd, cv)


# ---------------------------------------------------------------------------
# Composite QA report
# ---------------------------------------------------------------------------


def rating_outliers_by_section(
    ratings: Sequence[RatingRecord], k: float = 1.5
) -> dict[str, list[RatingRecord]]:
    """Boxplot outliers of the ratings within each section."""
    by_section: dict[str, list[RatingRecord]] = defaultdict(list)
    for r in ratings:
        by_section[r.section_id].append(r)
    out: dict[str, list[RatingRecord]] = {}
    for sec in sorted(by_section):
        group = by_section[sec]
        idx = boxplot_outliers([r.rqi for r in group], k)
        out[sec] = [group[i] for i in sorted(idx)]
    return out


def build_qa_report(
    ratings: Sequence[RatingRecord],
    rms_matrix: tuple[list[str], list[str], list[list[float]]] | None = None,
    k: float = 1.5,
    alpha: float = 0.05,
) -> dict:
    """Assemble the full QA report (JSON-serializable dict) with verdicts."""
    deltas = delta_r_table(ratings)
    ranges = rating_ranges(ratings)
    outliers = rating_outliers_by_section(ratings, k)

    by_section: dict[str, list[float]] = defaultdict(list)
    by_rater: dict[str, list[float]] = defaultdict(list)
    for r in ratings:
        by_section[r.section_id].append(r.rqi)
        by_rater[r.rater_id].append(r.rqi)
    def _one_way_block(groups: list[list[float]], label: str) -> dict:
        # A single section (or rater) leaves nothing to compare across, but
        # the rest of the battery still applies; report the block as skipped.
        if len(groups) < 2:
            return {"skipped": f"needs >= 2 {label}, got {len(groups)}"}
        if sum(len(g) for g in groups) <= len(groups):
            return {"skipped": f"no within-{label} replication"}
        result = anova_one_way(groups, alpha)
        return {**result.to_dict(), "verdict": _anova_verdict(result, "between", label)}

    anova_sections = _one_way_block(
        [by_section[s] for s in sorted(by_section)], "sections"
    )
    anova_raters = _one_way_block([by_rater[s] for s in sorted(by_rater)], "raters")

    flags = [r.rater_id for r in deltas.rows if r.flag]
    range_flags = [r.rater_id for r in ranges.rows if r.flagged]
    n_outliers = sum(len(v) for v in outliers.values())

    report = {
        "delta_r": {
            **deltas.to_dict(),
            "verdict": (
                "no leniency/severity flags"
                if not flags
                else f"flagged raters: {', '.join(flags)}"
            ),
        },
        "ranges": {
            **ranges.to_dict(),
            "verdict": (
                "no central-tendency flags"
                if not range_flags
                else f"flagged raters: {', '.join(range_flags)}"
            ),
        },
        "outliers": {
            "k": k,
            "by_section": [
                {
                    "section_id": sec,
                    "outliers": [
                        {"rater_id": r.rater_id, "run_id": r.run_id, "rqi": r.rqi}
                        for r in recs
                    ],
                }
                for sec, recs in outliers.items()
            ],
            "verdict": (
                "no outliers" if n_outliers == 0 else f"{n_outliers} outlier rating(s)"
            ),
        },
        "anova": {
            "ratings_by_section": anova_sections,
            "ratings_by_rater": anova_raters,
        },
    }

    if rms_matrix is not None:
        section_ids, run_ids, grid = rms_matrix
        rep_rows = [
            {"section_id": sec, **repeatability(row).to_dict()}
            for sec, row in zip(section_ids, grid)
        ]
        two_way = anova_two_way_no_replication(grid, alpha)
        report["repeatability"] = {
            "rows": rep_rows,
            "verdict": _repeatability_verdict(rep_rows),
        }
        report["anova"]["rms_sections_by_runs"] = {
            **two_way.to_dict(),
            "run_ids": run_ids,
            "verdict": _anova_verdict(two_way, "runs", "runs"),
        }
    return report


def _anova_verdict(result: AnovaResult, source: str, label: str) -> str:
    row = result.row(source)
    if row.significant is None:
        return f"{label}: degenerate (no variation)"
    if row.significant:
        return f"significant {label} effect (p = {row.p:.4g} < {result.alpha:g})"
    return f"no significant {label} effect (p = {row.p:.4g} >= {result.alpha:g})"


def _repeatability_verdict(rows: list[dict]) -> str:
    cvs = [r["cv_percent"] for r in rows if r["cv_percent"] is not None]
    if not cvs:
        return "CV undefined (zero means)"
    worst = max(abs(c) for c in cvs)
    return f"max |CV| = {worst:.1f}%"
