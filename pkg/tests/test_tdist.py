"""Student-t tail probabilities against independent oracles.

Two oracles: numerical quadrature of the t density (no shared code at all)
and scipy's incomplete-beta based implementation (shared mathematics,
independent code).
"""

from __future__ import annotations

import math

import pytest
from hypothesis import given, strategies as st
from scipy import integrate, special

from fdilag.tdist import reg_inc_beta, t_cdf, two_sided_p


def t_density(x: float, df: float) -> float:
    log_norm = (
        math.lgamma((df + 1) / 2)
        - math.lgamma(df / 2)
        - 0.5 * math.log(df * math.pi)
    )
    return math.exp(log_norm - (df + 1) / 2 * math.log1p(x * x / df))


def quadrature_two_sided_p(t: float, df: float) -> float:
    tail, _err = integrate.quad(t_density, abs(t), math.inf, args=(df,))
    return 2.0 * tail


@pytest.mark.parametrize("df", [3, 6, 11, 44])
@pytest.mark.parametrize("t", [0.17, 0.9, 2.010019666284193, 4.5, 9.0])
def test_matches_quadrature(t, df):
    assert two_sided_p(t, df) == pytest.approx(
        quadrature_two_sided_p(t, df), abs=1e-12
    )
    assert two_sided_p(-t, df) == two_sided_p(t, df)


def test_matches_scipy_dense_grid():
    for df in range(3, 45):
        for i in range(1, 80):
            t = i * 0.15
            expected = 2.0 * special.stdtr(df, -t)
            assert two_sided_p(t, df) == pytest.approx(expected, abs=1e-12)


def test_reg_inc_beta_against_scipy():
    grid = [0.001, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999]
    for a in (0.5, 1.0, 2.5, 22.0):
        for b in (0.5, 1.0, 3.0):
            for x in grid:
                assert reg_inc_beta(a, b, x) == pytest.approx(
                    special.betainc(a, b, x), abs=1e-13
                )


def test_exact_endpoints():
    assert two_sided_p(0.0, 10) == 1.0
    assert two_sided_p(math.inf, 10) == 0.0
    assert two_sided_p(-math.inf, 10) == 0.0
    assert reg_inc_beta(2.0, 3.0, 0.0) == 0.0
    assert reg_inc_beta(2.0, 3.0, 1.0) == 1.0


def test_cdf_relates_to_two_sided_p():
    for t in (0.3, 1.7, 5.0):
        for df in (4, 19):
            assert t_cdf(t, df) == pytest.approx(1.0 - two_sided_p(t, df) / 2.0)
            assert t_cdf(-t, df) == pytest.approx(two_sided_p(t, df) / 2.0)


@given(
    t=st.floats(min_value=-50.0, max_value=50.0, allow_nan=False),
    df=st.integers(min_value=1, max_value=200),
)
def test_probability_properties(t, df):
    p = two_sided_p(t, df)
    assert 0.0 <= p <= 1.0
    assert p == two_sided_p(-t, df)
    # strictly wider tails for a strictly smaller |t|
    if abs(t) > 1e-6:
        assert two_sided_p(t * 0.5, df) >= p


@given(df=st.integers(min_value=1, max_value=100))
def test_cdf_is_monotone(df):
    values = [t_cdf(-8.0 + 0.5 * i, df) for i in range(33)]
    assert all(a <= b for a, b in zip(values, values[1:]))
