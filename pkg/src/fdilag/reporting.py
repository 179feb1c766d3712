"""Artifact rendering: matrix, trend, and plot files plus the run report.

Everything here is deterministic. CSV artifacts carry full ``repr`` precision
(round-tripping exactly through ``float()``); console text rounds to four
decimals, the convention used by the published tables this toolkit
reproduces. JSON is rendered with sorted keys, two-space indent, and a
trailing newline, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import json
from typing import Mapping, Sequence

from .panel import IhdiGroup, Panel
from .ranksize import RankedCoefficients, RankSizeFit, fitted_values
from .trends import ClusterTrend

#: Comparison tolerance for "same value at four printed decimals".
COEFFICIENT_TOLERANCE = 1e-4

#: Allowed R-squared deviation when comparing fits to the published ones.
R_SQUARED_TOLERANCE = 5e-3


def render_json(payload) -> str:
    """Canonical JSON rendering used for every JSON artifact."""
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"


# --- correlation matrix ------------------------------------------------------

def matrix_row_dict(row) -> dict:
    """Row as a JSON-ready mapping.

    Accepts both full correlation rows and bare coefficient rows (those
    carry only ``rho``); the statistics keys appear only when present.
    """
    out = {
        "country": row.country_id,
        "display_name": getattr(row, "display_name", row.country_id),
        "group": row.group.label,
        "rho": list(row.rho),
    }
    for name in ("n", "t", "p"):
        seq = getattr(row, name, None)
        if seq is not None:
            out[name] = list(seq)
    return out


def render_matrix_csv(rows: Sequence) -> str:
    """Wide per-country matrix: one block of rho/n/t/p columns per lag.

    Bare coefficient rows (no significance statistics) get rho columns only.
    """
    if not rows:
        return "country,group\n"
    max_lag = rows[0].max_lag
    with_stats = getattr(rows[0], "p", None) is not None
    header = ["country", "group"]
    for k in range(max_lag + 1):
        header.append(f"rho_lag{k}")
        if with_stats:
            header += [f"n_lag{k}", f"t_lag{k}", f"p_lag{k}"]
    lines = [",".join(header)]
    for row in rows:
        cells = [row.country_id, row.group.label]
        for k in range(max_lag + 1):
            cells.append(repr(row.rho[k]))
            if with_stats:
                cells += [str(row.n[k]), repr(row.t[k]), repr(row.p[k])]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def render_matrix_json(rows: Sequence) -> str:
    max_lag = rows[0].max_lag if rows else 0
    return render_json(
        {"max_lag": max_lag, "rows": [matrix_row_dict(r) for r in rows]}
    )


# --- significance summary ----------------------------------------------------

def significance_summary(rows: Sequence, alpha: float) -> dict:
    """Per-cluster share of significant coefficients at each lag.

    ``last_majority_lag`` is the largest lag at which at least half the
    cluster's coefficients are significant at ``alpha``, or None when no lag
    reaches a majority.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    max_lag = rows[0].max_lag if rows else 0
    groups = []
    for group in IhdiGroup:
        members = [r for r in rows if r.group is group]
        if not members:
            continue
        groups.append(_group_summary(group.label, members, max_lag, alpha))
    overall = _group_summary("all", list(rows), max_lag, alpha) if rows else None
    return {"alpha": alpha, "max_lag": max_lag, "groups": groups, "overall": overall}


def _group_summary(label: str, members: list, max_lag: int, alpha: float) -> dict:
    counts = [sum(1 for r in members if r.p[k] < alpha) for k in range(max_lag + 1)]
    shares = [c / len(members) for c in counts]
    majorities = [k for k, share in enumerate(shares) if share >= 0.5]
    last_majority = majorities[-1] if majorities else None
    return {
        "group": label,
        "countries": len(members),
        "significant": counts,
        "share": shares,
        "last_majority_lag": last_majority,
    }


def render_significance_text(summary: dict) -> str:
    """Console block: one line per cluster plus the overall row."""
    alpha = summary["alpha"]
    max_lag = summary["max_lag"]
    lines = [f"share of coefficients significant at alpha={alpha:g}:"]
    entries = list(summary["groups"])
    if summary["overall"] is not None:
        entries.append(summary["overall"])
    for entry in entries:
        shares = "  ".join(
            f"lag{k}={entry['share'][k]:.2f}" for k in range(max_lag + 1)
        )
        last = entry["last_majority_lag"]
        if last is None:
            note = "no majority at any lag"
        elif last == max_lag:
            note = f"majority significant through lag {max_lag}"
        else:
            note = f"majority significance lost after lag {last}"
        lines.append(
            f"  {entry['group']:<9} ({entry['countries']:>2} countries)  "
            f"{shares}  [{note}]"
        )
    return "\n".join(lines) + "\n"


# --- cluster trends ----------------------------------------------------------

def trend_dict(trend: ClusterTrend) -> dict:
    return {
        "group": trend.group.label,
        "slope": trend.slope,
        "intercept": trend.intercept,
        "mean_rho": list(trend.mean_rho),
        "fitted_trend": list(trend.fitted_trend),
        "per_country_slopes": dict(sorted(trend.per_country_slopes.items())),
    }


def render_trends_csv(trends: Sequence[ClusterTrend]) -> str:
    lines = ["group,lag,mean_rho,fitted_trend"]
    for trend in trends:
        fitted = trend.fitted_trend
        for k, mean in enumerate(trend.mean_rho):
            lines.append(f"{trend.group.label},{k},{repr(mean)},{repr(fitted[k])}")
    return "\n".join(lines) + "\n"


def render_trends_text(trends: Sequence[ClusterTrend]) -> str:
    lines = ["cluster mean correlation vs lag (least-squares line):"]
    for trend in trends:
        means = "  ".join(
            f"lag{k}={m:.4f}" for k, m in enumerate(trend.mean_rho)
        )
        lines.append(
            f"  {trend.group.label:<9} slope={trend.slope:+.4f} "
            f"intercept={trend.intercept:+.4f}  {means}"
        )
    return "\n".join(lines) + "\n"


# --- rank-size fits ----------------------------------------------------------

def fit_dict(lag: int, fit: RankSizeFit) -> dict:
    return {
        "lag": lag,
        "m1": fit.m1,
        "m2": fit.m2,
        "m3": fit.m3,
        "se_m1": fit.se1,
        "se_m2": fit.se2,
        "se_m3": fit.se3,
        "r_squared": fit.r_squared,
        "sse": fit.sse,
        "iterations": fit.iterations,
        "converged": fit.converged,
        "nonpositive_params": list(fit.nonpositive_params),
    }


def render_plot_csv(ranked: RankedCoefficients, fit: RankSizeFit) -> str:
    """Plot data for one lag: rank, observed coefficient, fitted value."""
    fitted = fitted_values(ranked, fit)
    lines = ["r,observed,fitted"]
    for entry, value in zip(ranked.entries, fitted):
        lines.append(f"{entry.rank},{repr(entry.value)},{repr(float(value))}")
    return "\n".join(lines) + "\n"


def render_fit_text(results: Mapping[int, RankSizeFit], failures: Mapping[int, str]) -> str:
    lines = ["rank-size law fit per lag:"]
    for lag in sorted(set(results) | set(failures)):
        if lag in results:
            fit = results[lag]
            lines.append(
                f"  lag {lag}: m1={fit.m1:.4f}±{fit.se1:.4f}  "
                f"m2={fit.m2:.4f}±{fit.se2:.4f}  m3={fit.m3:.4f}±{fit.se3:.4f}  "
                f"R²={fit.r_squared:.4f}  ({fit.iterations} iterations)"
            )
        else:
            lines.append(f"  lag {lag}: failed: {failures[lag]}")
    return "\n".join(lines) + "\n"


# --- reproduction checklist ----------------------------------------------------

_TABLE_NUMBERS = {
    IhdiGroup.VERY_HIGH: 1,
    IhdiGroup.HIGH: 2,
    IhdiGroup.MEDIUM: 3,
    IhdiGroup.LOW: 4,
}


def reproduction_checklist(
    rows: Sequence,
    fits: Mapping[int, RankSizeFit],
    reference_rows: Sequence,
    reference_params: Mapping[int, Mapping[str, float]],
    *,
    coefficient_tolerance: float = COEFFICIENT_TOLERANCE,
) -> list[dict]:
    """Compare computed outputs against the published tables and figures.

    Tables 1 through 4 are the per-cluster lagged correlation matrices (in
    cluster order very_high, high, medium, low); Table 5 holds the rank-size
    fit parameters; Figures 1 and 2 are the trend and rank-size plots, for
    which the checklist records the artifact that carries the plot data.
    """
    items = []
    computed = {r.country_id: r for r in rows}
    for group, number in _TABLE_NUMBERS.items():
        ref_members = [r for r in reference_rows if r.group is group]
        deltas = []
        missing = []
        for ref in ref_members:
            mine = computed.get(ref.country_id)
            if mine is None:
                missing.append(ref.country_id)
                continue
            shared = min(mine.max_lag, ref.max_lag) + 1
            deltas.extend(
                abs(mine.rho[k] - ref.rho[k]) for k in range(shared)
            )
        max_delta = max(deltas) if deltas else None
        matched = not missing and max_delta is not None and max_delta <= coefficient_tolerance
        items.append(
            {
                "item": f"Table {number}",
                "description": (
                    f"lagged correlation matrix, {group.label} cluster "
                    f"({len(ref_members)} countries)"
                ),
                "status": "matched" if matched else "unmatched",
                "max_abs_delta": max_delta,
                "compared": len(deltas),
                "missing_countries": missing,
            }
        )

    fit_deltas: dict[str, dict[str, float]] = {}
    fit_ok = True
    for lag in sorted(reference_params):
        ref = reference_params[lag]
        fit = fits.get(lag)
        if fit is None:
            fit_ok = False
            fit_deltas[f"lag{lag}"] = {}
            continue
        entry = {}
        for name, value in (("m1", fit.m1), ("m2", fit.m2), ("m3", fit.m3)):
            delta = abs(value - ref[name])
            entry[name] = delta
            if delta > ref[f"{name}_se"]:
                fit_ok = False
        entry["r_squared"] = abs(fit.r_squared - ref["r_squared"])
        if entry["r_squared"] > R_SQUARED_TOLERANCE:
            fit_ok = False
        fit_deltas[f"lag{lag}"] = entry
    items.append(
        {
            "item": "Table 5",
            "description": "rank-size law parameters and R² per lag",
            "status": "matched" if fit_ok else "unmatched",
            "deltas": fit_deltas,
            "criterion": "each parameter within one published standard error; "
            f"R² within {R_SQUARED_TOLERANCE:g}",
        }
    )
    items.append(
        {
            "item": "Figure 1",
            "description": "cluster mean correlation vs lag with fitted trend lines",
            "status": "generated",
            "artifact": "trends.csv",
        }
    )
    items.append(
        {
            "item": "Figure 2",
            "description": "observed vs fitted coefficient by rank, one curve per lag",
            "status": "generated",
            "artifact": "ranksize_lag<k>.csv",
        }
    )
    return items


def render_checklist_text(items: Sequence[dict]) -> str:
    lines = ["reproduction checklist:"]
    for item in items:
        detail = ""
        if item.get("max_abs_delta") is not None:
            detail = f" (max |delta| = {item['max_abs_delta']:.2e})"
        elif item.get("artifact"):
            detail = f" ({item['artifact']})"
        lines.append(f"  {item['item']}: {item['status']}{detail}")
    return "\n".join(lines) + "\n"


# --- consolidated report -------------------------------------------------------

def panel_summary(panel: Panel) -> dict:
    return {
        "countries": len(panel),
        "year_range": list(panel.year_range),
        "observation_count": panel.observation_count,
        "group_sizes": {g.label: n for g, n in panel.group_sizes().items()},
        "metadata": dict(panel.metadata),
    }


def build_report(
    *,
    source: str,
    panel: Panel | None,
    rows: Sequence,
    summary: dict,
    trends: Sequence[ClusterTrend],
    fits: Mapping[int, RankSizeFit],
    fit_failures: Mapping[int, str],
    checklist: list[dict] | None,
) -> dict:
    """Assemble the consolidated run report as one JSON-ready mapping."""
    return {
        "source": source,
        "panel": panel_summary(panel) if panel is not None else None,
        "matrix": [matrix_row_dict(r) for r in rows],
        "significance_summary": summary,
        "trends": [trend_dict(t) for t in trends],
        "fits": [fit_dict(lag, fit) for lag, fit in sorted(fits.items())],
        "fit_failures": {str(lag): msg for lag, msg in sorted(fit_failures.items())},
        "checklist": checklist,
    }
