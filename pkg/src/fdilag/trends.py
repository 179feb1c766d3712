"""Cluster-averaged linear trend of correlation coefficients versus lag.

Each country's coefficients are regressed on the integer lag grid 0..K by
ordinary least squares; the cluster trend averages those per-country lines.
Because every country shares the same regressor grid, this equals the OLS
line through the per-lag cluster means exactly, so a single trend line is
reported alongside the mean coefficient series.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DataValidationError, EmptyClusterError
from .lagcorr import LagCorrelationRow
from .panel import IhdiGroup


def ols_line(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float]:
    """Least-squares ``(slope, intercept)`` of ys against xs."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size != y.size:
        raise DataValidationError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < 2:
        raise DataValidationError("need at least two points for a line")
    dx = x - x.mean()
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise DataValidationError("regressor has zero variance")
    slope = float(dx @ (y - y.mean())) / sxx
    intercept = float(y.mean()) - slope * float(x.mean())
    return slope, intercept


@dataclass(frozen=True)
class ClusterTrend:
    """Averaged coefficient trend for one IHDI cluster."""

    group: IhdiGroup
    mean_rho: tuple[float, ...]
    slope: float
    intercept: float
    per_country_slopes: dict[str, float]

    @property
    def lags(self) -> range:
        return range(len(self.mean_rho))

    @property
    def fitted_trend(self) -> tuple[float, ...]:
        return tuple(self.intercept + self.slope * k for k in self.lags)


def cluster_trend(
    rows: Sequence[LagCorrelationRow], group: IhdiGroup, max_lag: int
) -> ClusterTrend:
    """Averaged per-country trend line and per-lag means for one cluster."""
    members = sorted(
        (row for row in rows if row.group is group), key=lambda r: r.country_id
    )
    if not members:
        raise EmptyClusterError(f"no countries in group {group.label}")
    for row in members:
        if row.max_lag < max_lag:
            raise DataValidationError(
                f"country {row.country_id} has no lag {max_lag} coefficient"
            )

    lag_grid = np.arange(max_lag + 1, dtype=float)
    slopes: dict[str, float] = {}
    intercepts = []
    for row in members:
        slope, intercept = ols_line(lag_grid, row.rho[: max_lag + 1])
        slopes[row.country_id] = slope
        intercepts.append(intercept)

    coefficients = np.array([row.rho[: max_lag + 1] for row in members], dtype=float)
    mean_rho = coefficients.mean(axis=0)
    return ClusterTrend(
        group=group,
        mean_rho=tuple(float(v) for v in mean_rho),
        slope=float(np.mean(list(slopes.values()))),
        intercept=float(np.mean(intercepts)),
        per_country_slopes=slopes,
    )


def all_cluster_trends(
    rows: Sequence[LagCorrelationRow], max_lag: int
) -> list[ClusterTrend]:
    """Trends for every non-empty cluster, in group order."""
    present = [g for g in IhdiGroup if any(row.group is g for row in rows)]
    return [cluster_trend(rows, group, max_lag) for group in present]
