"""Lagged correlation and significance against explicit oracles."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy import stats

from fdilag.errors import (
    DataValidationError,
    LagTooLargeError,
    LengthMismatchError,
    TooFewPairsError,
    ZeroVarianceError,
)
from fdilag.lagcorr import (
    LagSpec,
    correlation_matrix,
    country_row,
    lagged_pearson,
    pearson,
    significance,
)
from fdilag.panel import CountrySeries, IhdiGroup


def pairlist_oracle(gdp, fdi, k: int) -> float:
    """Build the lag-k pairs one by one, then correlate with numpy."""
    xs, ys = [], []
    for t in range(len(gdp)):
        if t - k >= 0:
            xs.append(gdp[t])
            ys.append(fdi[t - k])
    return float(np.corrcoef(xs, ys)[0, 1])


def random_series(rng, n):
    return rng.normal(size=n), rng.normal(size=n)


# --- correlation values --------------------------------------------------------

def test_matches_pairlist_oracle_small_sample():
    rng = np.random.default_rng(7)
    for _ in range(200):
        n = int(rng.integers(8, 40))
        gdp, fdi = random_series(rng, n)
        for k in range(4):
            assert lagged_pearson(gdp, fdi, k) == pytest.approx(
                pairlist_oracle(gdp, fdi, k), abs=1e-12
            )


def test_lag_zero_is_plain_pearson():
    rng = np.random.default_rng(8)
    gdp, fdi = random_series(rng, 20)
    assert lagged_pearson(gdp, fdi, 0) == pearson(gdp, fdi)


def test_perfect_and_sign_cases():
    xs = [1.0, 2.0, 3.0, 4.0, 5.0]
    assert pearson(xs, xs) == pytest.approx(1.0, abs=1e-15)
    assert pearson(xs, [-v for v in xs]) == pytest.approx(-1.0, abs=1e-15)


def test_known_shifted_signal():
    # fdi leads gdp by exactly 2 years, so lag 2 recovers the correlation
    rng = np.random.default_rng(9)
    fdi = rng.normal(size=60)
    gdp = np.concatenate([np.zeros(2), fdi[:-2]]) + rng.normal(scale=1e-6, size=60)
    assert lagged_pearson(gdp, fdi, 2) > 0.999999
    assert abs(lagged_pearson(gdp, fdi, 0)) < 0.5


# --- property tests ---------------------------------------------------------------

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


def _well_conditioned(values) -> bool:
    """Spread comparable to magnitude, so mean-centering keeps precision."""
    spread = max(values) - min(values)
    return spread >= 0.01 * (1.0 + max(abs(v) for v in values))


@settings(max_examples=150, deadline=None)
@given(data=st.data())
def test_affine_invariance_and_antisymmetry(data):
    n = data.draw(st.integers(min_value=6, max_value=25))
    gdp = data.draw(st.lists(finite, min_size=n, max_size=n))
    fdi = data.draw(st.lists(finite, min_size=n, max_size=n))
    k = data.draw(st.integers(min_value=0, max_value=3))
    gdp_used, fdi_used = gdp[k:], fdi[: n - k if k else n]
    assume(_well_conditioned(gdp_used) and _well_conditioned(fdi_used))
    scale = data.draw(st.floats(min_value=1e-3, max_value=1e3))
    # a shift far beyond the spread destroys float precision for any
    # correlation algorithm, so keep the transform moderately conditioned
    span = scale * min(max(gdp_used) - min(gdp_used), max(fdi_used) - min(fdi_used))
    shift = data.draw(st.floats(min_value=-100.0, max_value=100.0)) * span

    base = lagged_pearson(gdp, fdi, k)
    scaled = lagged_pearson(
        [scale * g + shift for g in gdp], [scale * f + shift for f in fdi], k
    )
    assert scaled == pytest.approx(base, abs=5e-12)
    # negation flips the sign bit-exactly in the mean-centered form
    assert lagged_pearson([-g for g in gdp], fdi, k) == -base


@settings(max_examples=100, deadline=None)
@given(data=st.data())
def test_pearson_symmetric_and_bounded(data):
    n = data.draw(st.integers(min_value=3, max_value=30))
    xs = data.draw(st.lists(finite, min_size=n, max_size=n))
    ys = data.draw(st.lists(finite, min_size=n, max_size=n))
    assume(len(set(xs)) > 1 and len(set(ys)) > 1)
    r = pearson(xs, ys)
    assert -1.0 - 1e-12 <= r <= 1.0 + 1e-12
    assert pearson(ys, xs) == pytest.approx(r, abs=1e-15)


# --- significance -------------------------------------------------------------------

def test_significance_frozen_oracle():
    t, p = significance(0.29, 46)
    assert t == pytest.approx(2.010019666284193, abs=1e-14)
    assert p == pytest.approx(0.05058485970573015, abs=1e-14)


def test_significance_against_scipy():
    for rho in (-0.93, -0.40, -0.05, 0.11, 0.47, 0.88):
        for n in (5, 11, 46):
            t, p = significance(rho, n)
            expected_t = rho * math.sqrt((n - 2) / (1 - rho * rho))
            assert t == pytest.approx(expected_t, abs=1e-14)
            assert p == pytest.approx(2 * stats.t.sf(abs(t), n - 2), abs=1e-13)


def test_significance_edges():
    assert significance(0.0, 30) == (0.0, 1.0)
    t, p = significance(1.0, 10)
    assert t == math.inf and p == 0.0
    t, p = significance(-1.0, 10)
    assert t == -math.inf and p == 0.0
    # float noise just past 1 is clamped, a real violation is rejected
    assert significance(1.0 + 5e-13, 10) == (math.inf, 0.0)
    with pytest.raises(DataValidationError):
        significance(1.001, 10)
    with pytest.raises(TooFewPairsError):
        significance(0.5, 2)


# --- errors ------------------------------------------------------------------------

def test_lag_errors():
    xs = list(range(10))
    with pytest.raises(LagTooLargeError):
        lagged_pearson(xs, xs, -1)
    with pytest.raises(LagTooLargeError):
        lagged_pearson(xs, xs, 8)  # leaves 2 pairs
    with pytest.raises(LengthMismatchError):
        lagged_pearson(xs, xs[:-1], 0)
    with pytest.raises(ZeroVarianceError):
        lagged_pearson([1.0] * 8, list(range(8)), 0)


def test_lagspec_rejects_negative():
    with pytest.raises(DataValidationError):
        LagSpec(-1)
    assert list(LagSpec(2).lags) == [0, 1, 2]


# --- per-country rows and the matrix ---------------------------------------------

def make_series(cid="ABC", group=IhdiGroup.LOW, n=12, seed=3):
    rng = np.random.default_rng(seed)
    fdi, gdp = random_series(rng, n)
    return CountrySeries(
        cid, group, 1990, tuple(float(v) for v in fdi), tuple(float(v) for v in gdp)
    )


def test_country_row_values_and_counts():
    series = make_series(n=15)
    row = country_row(series, LagSpec(3))
    assert row.n == (15, 14, 13, 12)
    for k in range(4):
        expected = lagged_pearson(series.gdp_growth, series.fdi, k)
        assert row.rho[k] == expected
        t, p = significance(expected, 15 - k)
        assert (row.t[k], row.p[k]) == (t, p)


def test_country_row_window_guard():
    series = make_series(n=7)
    with pytest.raises(LagTooLargeError) as excinfo:
        country_row(series, LagSpec(3))
    assert "ABC" in str(excinfo.value)
    assert country_row(series, LagSpec(2)).max_lag == 2


def test_matrix_is_in_cluster_then_id_order(bundled_matrix):
    keys = [(row.group.sort_key, row.country_id) for row in bundled_matrix]
    assert keys == sorted(keys)
    assert [r.country_id for r in bundled_matrix[:3]] == ["AUS", "AUT", "CAN"]


def test_matrix_reproduces_published_coefficients(bundled_matrix, published_rows):
    reference = {r.country_id: r.rho for r in published_rows}
    assert len(bundled_matrix) == len(reference) == 43
    for row in bundled_matrix:
        for k in range(4):
            assert row.rho[k] == pytest.approx(reference[row.country_id][k], abs=5e-5)


def test_matrix_spot_values(bundled_matrix):
    by_id = {r.country_id: r for r in bundled_matrix}
    assert by_id["KOR"].rho[0] == pytest.approx(-0.4883, abs=1e-4)
    assert by_id["FRA"].rho[2] == pytest.approx(-0.4663, abs=1e-4)
    assert by_id["GHA"].rho[3] == pytest.approx(0.3487, abs=1e-4)
