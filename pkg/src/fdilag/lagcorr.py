"""Equal-time and lagged Pearson correlation with significance statistics.

The lag convention is FDI leading GDP growth: at lag ``k`` the correlated
pairs are ``(gdp[t], fdi[t - k])`` over the ``n - k`` overlapping years, so
``k = 0`` reduces to the plain product-moment coefficient. Pair counts
shrink with the lag; there is no padding or circular wrap-around.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DataValidationError,
    LagTooLargeError,
    LengthMismatchError,
    TooFewPairsError,
    TooShortError,
    ZeroVarianceError,
)
from .panel import MIN_WINDOW_YEARS, IhdiGroup, Panel
from .tdist import two_sided_p

#: Fewest (x, y) pairs for which a correlation coefficient is computed.
MIN_PAIRS = 3


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Product-moment correlation of two equal-length sequences.

    Uses the mean-centered form, which is numerically stable and keeps the
    coefficient invariant under positive affine maps of either argument.
    """
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.ndim != 1 or ya.ndim != 1:
        raise DataValidationError("pearson expects one-dimensional sequences")
    if xa.size != ya.size:
        raise LengthMismatchError(f"length mismatch: {xa.size} vs {ya.size}")
    if xa.size < MIN_PAIRS:
        raise TooShortError(f"need at least {MIN_PAIRS} pairs, got {xa.size}")
    dx = xa - xa.mean()
    dy = ya - ya.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0:
        raise ZeroVarianceError("first sequence has zero variance")
    if syy == 0.0:
        raise ZeroVarianceError("second sequence has zero variance")
    return float((dx @ dy) / math.sqrt(sxx * syy))


def lagged_pearson(gdp: Sequence[float], fdi: Sequence[float], k: int) -> float:
    """Correlation of ``(gdp[t], fdi[t - k])`` over the overlapping years.

    Both sequences must be aligned to the same consecutive years. The GDP
    series is truncated at the front by ``k`` and the FDI series at the
    back, leaving ``n - k`` pairs.
    """
    if k < 0:
        raise LagTooLargeError(f"lag must be non-negative, got {k}")
    gdp_a = np.asarray(gdp, dtype=float)
    fdi_a = np.asarray(fdi, dtype=float)
    if gdp_a.size != fdi_a.size:
        raise LengthMismatchError(f"length mismatch: {gdp_a.size} vs {fdi_a.size}")
    if gdp_a.size - k < MIN_PAIRS:
        raise LagTooLargeError(
            f"lag {k} leaves {gdp_a.size - k} pairs out of {gdp_a.size} years; "
            f"need at least {MIN_PAIRS}"
        )
    if k == 0:
        return pearson(gdp_a, fdi_a)
    return pearson(gdp_a[k:], fdi_a[:-k])


def significance(rho: float, n: int) -> tuple[float, float]:
    """Two-sided t-test of a correlation coefficient against zero.

    Returns ``(t, p)`` with ``t = rho * sqrt((n - 2) / (1 - rho^2))`` and
    ``p`` the two-sided Student-t tail probability at ``n - 2`` degrees of
    freedom. ``|rho| = 1`` yields an infinite t and ``p = 0``.
    """
    if n < MIN_PAIRS:
        raise TooFewPairsError(f"need at least {MIN_PAIRS} pairs, got {n}")
    if abs(rho) > 1.0:
        if abs(rho) - 1.0 > 1e-12:
            raise DataValidationError(f"correlation out of range: {rho}")
        rho = math.copysign(1.0, rho)
    if abs(rho) == 1.0:
        return math.copysign(math.inf, rho), 0.0
    df = n - 2
    t = rho * math.sqrt(df / (1.0 - rho * rho))
    return t, two_sided_p(t, df)


@dataclass(frozen=True)
class LagSpec:
    """Lag grid 0..max_lag, in years."""

    max_lag: int = 3

    def __post_init__(self):
        if self.max_lag < 0:
            raise DataValidationError(f"max_lag must be >= 0, got {self.max_lag}")

    @property
    def lags(self) -> range:
        return range(self.max_lag + 1)


@dataclass(frozen=True)
class LagCorrelationRow:
    """Per-country coefficients and test statistics for lags 0..max_lag."""

    country_id: str
    group: IhdiGroup
    rho: tuple[float, ...]
    n: tuple[int, ...]
    t: tuple[float, ...]
    p: tuple[float, ...]
    display_name: str = ""

    @property
    def max_lag(self) -> int:
        return len(self.rho) - 1


def country_row(series, spec: LagSpec) -> LagCorrelationRow:
    """Lagged coefficients with significance for one country series."""
    window = series.window_length
    if window - spec.max_lag < MIN_WINDOW_YEARS:
        raise LagTooLargeError(
            f"country {series.country_id}: window of {window} years cannot "
            f"support max lag {spec.max_lag} (needs {spec.max_lag + MIN_WINDOW_YEARS})"
        )
    rhos, ns, ts, ps = [], [], [], []
    for k in spec.lags:
        try:
            rho = lagged_pearson(series.gdp_growth, series.fdi, k)
            n_k = window - k
            t_k, p_k = significance(rho, n_k)
        except DataValidationError as exc:
            raise type(exc)(f"country {series.country_id}: {exc}") from exc
        rhos.append(rho)
        ns.append(n_k)
        ts.append(t_k)
        ps.append(p_k)
    return LagCorrelationRow(
        country_id=series.country_id,
        group=series.group,
        rho=tuple(rhos),
        n=tuple(ns),
        t=tuple(ts),
        p=tuple(ps),
        display_name=series.display_name,
    )


def correlation_matrix(panel: Panel, spec: LagSpec | None = None) -> list[LagCorrelationRow]:
    """One row per country, ordered by cluster (very high to low) then id.

    Full precision is retained; rounding happens only at presentation.
    """
    spec = spec or LagSpec()
    return [country_row(series, spec) for series in panel.countries]
