"""HTTP service endpoints, source selection rules, and error mapping."""

from __future__ import annotations

import httpx
import pytest
from fastapi.testclient import TestClient

import fdilag.service.app as app_module
from conftest import FIXTURE_COUNTRIES
from fdilag.errors import NumericalError
from fdilag.worldbank import FDI_INDICATOR, GDP_GROWTH_INDICATOR, WorldBankClient
from fdilag.service.app import create_app

BUNDLED = {"use_bundled": True}

SMALL_PANEL = "\n".join(
    ["country,year,fdi_usd,gdp_growth_pct"]
    + [f"AAA,{1990 + i},{float(i + 1)},{float((i * 3) % 7)}" for i in range(8)]
) + "\n"
SMALL_MAPPING = "country,group\nAAA,low\n"


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok"


# --- ingest -----------------------------------------------------------------

def test_ingest_bundled(client):
    response = client.post("/v1/ingest", json={"source": BUNDLED})
    assert response.status_code == 200
    body = response.json()
    assert body["countries"] == 43
    assert body["year_range"] == [1970, 2015]
    assert body["observation_count"] == 3956
    assert body["group_sizes"] == {
        "very_high": 13, "high": 11, "medium": 8, "low": 11
    }
    assert len(body["windows"]) == 43
    assert body["panel_csv"].startswith("country,year,fdi_usd,gdp_growth_pct")


def test_ingest_inline(client):
    response = client.post(
        "/v1/ingest",
        json={"source": {"panel_csv": SMALL_PANEL, "mapping_csv": SMALL_MAPPING}},
    )
    assert response.status_code == 200
    assert response.json()["countries"] == 1


def test_source_must_be_exactly_one(client):
    for source in (
        {},
        {"use_bundled": True, "panel_csv": SMALL_PANEL},
        {"mapping_csv": SMALL_MAPPING},
    ):
        response = client.post("/v1/ingest", json={"source": source})
        assert response.status_code == 422
        assert response.json()["category"] == "validation"


def test_unknown_fields_rejected(client):
    response = client.post(
        "/v1/ingest", json={"source": BUNDLED, "surprise": 1}
    )
    assert response.status_code == 422


def test_validation_error_names_country(client):
    gap = (
        "country,year,fdi_usd,gdp_growth_pct\n"
        "AAA,1990,1.0,2.0\nAAA,1991,1.5,\nAAA,1992,1.2,2.0\n"
        "AAA,1993,1.9,2.5\nAAA,1994,1.4,2.1\n"
    )
    response = client.post(
        "/v1/ingest",
        json={"source": {"panel_csv": gap, "mapping_csv": SMALL_MAPPING}},
    )
    assert response.status_code == 422
    body = response.json()
    assert body["category"] == "validation"
    assert "AAA" in body["message"]


# --- correlate / trends --------------------------------------------------------

def test_correlate_bundled(client):
    response = client.post(
        "/v1/correlate", json={"source": BUNDLED, "max_lag": 3, "alpha": 0.05}
    )
    assert response.status_code == 200
    body = response.json()
    assert len(body["rows"]) == 43
    by_id = {row["country"]: row for row in body["rows"]}
    assert by_id["KOR"]["rho"][0] == pytest.approx(-0.4883, abs=1e-4)
    assert by_id["FRA"]["n"] == [46, 45, 44, 43]
    assert set(body["artifacts"]) == {"matrix.csv", "matrix.json"}
    assert len(body["summary"]["groups"]) == 4


def test_correlate_max_lag_zero_degenerates(client):
    response = client.post("/v1/correlate", json={"source": BUNDLED, "max_lag": 0})
    assert response.status_code == 200
    rows = response.json()["rows"]
    assert all(len(row["rho"]) == 1 for row in rows)


def test_correlate_rejects_bad_alpha(client):
    response = client.post(
        "/v1/correlate", json={"source": BUNDLED, "alpha": 1.5}
    )
    assert response.status_code == 422
    assert response.json()["category"] == "validation"


def test_trends_bundled(client):
    response = client.post("/v1/trends", json={"source": BUNDLED, "max_lag": 3})
    assert response.status_code == 200
    body = response.json()
    assert [t["group"] for t in body["trends"]] == [
        "very_high", "high", "medium", "low"
    ]
    assert set(body["artifacts"]) == {"trends.csv"}


# --- fit-ranksize -----------------------------------------------------------------

def test_fit_paper_tables(client, published_fit_params):
    response = client.post(
        "/v1/fit-ranksize", json={"source": {"use_paper_tables": True}, "max_lag": 3}
    )
    assert response.status_code == 200
    body = response.json()
    assert body["failures"] == {}
    assert [fit["lag"] for fit in body["fits"]] == [0, 1, 2, 3]
    for fit in body["fits"]:
        published = published_fit_params[fit["lag"]]
        assert abs(fit["m1"] - published["m1"]) <= published["m1_se"]
        assert fit["r_squared"] == pytest.approx(published["r_squared"], abs=5e-3)
    expected_files = {"fit_report.json"} | {f"ranksize_lag{k}.csv" for k in range(4)}
    assert set(body["artifacts"]) == expected_files


def test_fit_reports_per_lag_failures(client):
    constant = "country,group,lag0\n" + "".join(
        f"C{i:02d},low,0.5\n" for i in range(6)
    )
    response = client.post(
        "/v1/fit-ranksize",
        json={"source": {"coefficients_csv": constant}, "max_lag": 0},
    )
    assert response.status_code == 200
    body = response.json()
    assert body["fits"] == []
    assert "0" in body["failures"]


def test_fit_source_exclusivity(client):
    response = client.post(
        "/v1/fit-ranksize",
        json={"source": {"use_paper_tables": True, "coefficients_csv": "x"}},
    )
    assert response.status_code == 422


def test_fit_rejects_max_lag_beyond_source(client):
    two_lags = "country,group,lag0,lag1\n" + "".join(
        f"C{i:02d},low,{0.5 - i * 0.01},{0.4 - i * 0.01}\n" for i in range(6)
    )
    response = client.post(
        "/v1/fit-ranksize",
        json={"source": {"coefficients_csv": two_lags}, "max_lag": 3},
    )
    assert response.status_code == 422
    assert "lags 0..1" in response.json()["message"]


# --- fetch --------------------------------------------------------------------------

def test_fetch_from_fixture_dir(client, wb_fixture_dir):
    response = client.post(
        "/v1/fetch",
        json={
            "country_ids": list(FIXTURE_COUNTRIES),
            "first_year": 1970,
            "last_year": 2015,
            "fixture_dir": str(wb_fixture_dir),
        },
    )
    assert response.status_code == 200
    body = response.json()
    assert body["countries"] == 5
    assert body["dropped"] == []
    assert body["metadata"]["indicators"][FDI_INDICATOR]["last_updated"] == "2026-07-01"
    assert body["panel_csv"].count("\n") == 1 + 5 * 46


def test_fetch_missing_fixture_maps_to_502(client, tmp_path):
    response = client.post(
        "/v1/fetch", json={"country_ids": ["FRA"], "fixture_dir": str(tmp_path)}
    )
    assert response.status_code == 502
    assert response.json()["category"] == "network"


def test_fetch_requires_exactly_one_mode(client):
    for payload in (
        {"country_ids": ["FRA"]},
        {"country_ids": ["FRA"], "live": True, "fixture_dir": "/tmp"},
    ):
        assert client.post("/v1/fetch", json=payload).status_code == 422


def test_fetch_live_uses_injected_factory(wb_fixture_dir):
    from fdilag.worldbank import fixture_transport

    def factory():
        return WorldBankClient(
            transport=fixture_transport(wb_fixture_dir), sleeper=lambda _s: None
        )

    test_client = TestClient(create_app(worldbank_client_factory=factory))
    response = test_client.post(
        "/v1/fetch", json={"country_ids": list(FIXTURE_COUNTRIES), "live": True}
    )
    assert response.status_code == 200
    assert response.json()["countries"] == 5


# --- report -------------------------------------------------------------------------

def test_report_bundled_is_complete_and_deterministic(client):
    payload = {"source": {"panel": BUNDLED}, "max_lag": 3, "alpha": 0.05}
    first = client.post("/v1/report", json=payload)
    second = client.post("/v1/report", json=payload)
    assert first.status_code == 200
    assert first.json()["artifacts"] == second.json()["artifacts"]
    report = first.json()["report"]
    assert len(report["trends"]) == 4
    assert len(report["fits"]) == 4
    assert report["panel"]["countries"] == 43
    statuses = {item["item"]: item["status"] for item in report["checklist"]}
    assert statuses == {
        "Table 1": "matched", "Table 2": "matched", "Table 3": "matched",
        "Table 4": "matched", "Table 5": "matched",
        "Figure 1": "generated", "Figure 2": "generated",
    }


def test_report_paper_tables(client):
    response = client.post(
        "/v1/report", json={"source": {"use_paper_tables": True}}
    )
    assert response.status_code == 200
    report = response.json()["report"]
    assert report["panel"] is None
    assert report["significance_summary"] is None
    assert report["source"] == "bundled published tables"
    for item in report["checklist"]:
        if item["item"].startswith("Table") and item["item"] != "Table 5":
            assert item["max_abs_delta"] == 0.0


# --- error category mapping -----------------------------------------------------------

def test_numerical_errors_map_to_500(monkeypatch):
    def explode(panel, spec):
        raise NumericalError("synthetic numerical failure")

    monkeypatch.setattr(app_module, "correlation_matrix", explode)
    test_client = TestClient(create_app())
    response = test_client.post("/v1/correlate", json={"source": BUNDLED})
    assert response.status_code == 500
    body = response.json()
    assert body["category"] == "numerical"
    assert body["error"] == "NumericalError"
