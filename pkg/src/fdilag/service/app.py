"""FastAPI application exposing the pipeline over HTTP.

Each endpoint accepts data inline (CSV content in the request body) or the
bundled reference data, runs the corresponding pipeline stage, and returns
structured results together with ready-to-write artifact files keyed by
filename. Toolkit errors map onto status codes by category: validation 422,
numerical 500, network 502, with a uniform ``{category, error, message}``
body.
"""

from __future__ import annotations

from typing import Callable

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import DataValidationError, NumericalError, ToolkitError
from ..lagcorr import LagSpec, correlation_matrix
from ..panel import Panel, load_group_mapping, load_panel, serialize_panel
from ..ranksize import fit_ranksize, rank_coefficients
from ..reference import (
    load_reference_panel,
    parse_coefficient_rows,
    reference_coefficient_rows,
    reference_fit_parameters,
    reference_group_mapping,
)
from ..reporting import (
    build_report,
    fit_dict,
    matrix_row_dict,
    render_json,
    render_matrix_csv,
    render_matrix_json,
    render_plot_csv,
    render_trends_csv,
    reproduction_checklist,
    significance_summary,
    trend_dict,
)
from ..trends import all_cluster_trends
from ..worldbank import WorldBankClient, fixture_transport, indicator_requests
from . import schemas

_STATUS_BY_CATEGORY = {"validation": 422, "numerical": 500, "network": 502}

ClientFactory = Callable[[], WorldBankClient]


def _load_panel_source(source: schemas.PanelSource) -> Panel:
    if source.use_bundled:
        return load_reference_panel()
    mapping = (
        load_group_mapping(source.mapping_csv)
        if source.mapping_csv is not None
        else reference_group_mapping()
    )
    return load_panel(source.panel_csv, mapping)


def _coefficient_rows(source: schemas.CoefficientSource, max_lag: int):
    """Resolve a coefficient source to rows plus (panel or None, label)."""
    if source.panel is not None:
        panel = _load_panel_source(source.panel)
        rows = correlation_matrix(panel, LagSpec(max_lag))
        label = (
            "bundled reconstructed panel"
            if source.panel.use_bundled
            else "inline panel file"
        )
        return rows, panel, label
    if source.use_paper_tables:
        rows, label = reference_coefficient_rows(), "bundled published tables"
    else:
        rows = parse_coefficient_rows(source.coefficients_csv)
        label = "inline coefficient file"
    if rows and rows[0].max_lag < max_lag:
        raise DataValidationError(
            f"coefficient source carries lags 0..{rows[0].max_lag}, "
            f"requested max_lag={max_lag}"
        )
    return rows, None, label


def _fit_lags(rows, max_lag: int):
    """One fit per lag; numerical failures are collected, not fatal."""
    fits, failures, ranked_by_lag = {}, {}, {}
    for lag in range(max_lag + 1):
        ranked = rank_coefficients(rows, lag)
        ranked_by_lag[lag] = ranked
        try:
            fits[lag] = fit_ranksize(ranked)
        except NumericalError as exc:
            failures[lag] = str(exc)
    return fits, failures, ranked_by_lag


def _fit_artifacts(fits, failures, ranked_by_lag) -> dict[str, str]:
    artifacts = {
        "fit_report.json": render_json(
            {
                "fits": [fit_dict(lag, fit) for lag, fit in sorted(fits.items())],
                "failures": {str(lag): msg for lag, msg in sorted(failures.items())},
            }
        )
    }
    for lag, fit in sorted(fits.items()):
        artifacts[f"ranksize_lag{lag}.csv"] = render_plot_csv(ranked_by_lag[lag], fit)
    return artifacts


def create_app(*, worldbank_client_factory: ClientFactory | None = None) -> FastAPI:
    """Build the service; the client factory is injectable for tests."""
    app = FastAPI(title="fdilag service", version=__version__)
    factory = worldbank_client_factory or WorldBankClient

    @app.exception_handler(ToolkitError)
    async def _toolkit_error(request: Request, exc: ToolkitError):
        return JSONResponse(
            status_code=_STATUS_BY_CATEGORY.get(exc.category, 500),
            content={
                "category": exc.category,
                "error": type(exc).__name__,
                "message": str(exc),
            },
        )

    @app.exception_handler(RequestValidationError)
    async def _request_error(request: Request, exc: RequestValidationError):
        details = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}"
            for err in exc.errors()
        )
        return JSONResponse(
            status_code=422,
            content={
                "category": "validation",
                "error": "RequestValidationError",
                "message": details,
            },
        )

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/v1/ingest", response_model=schemas.IngestResponse)
    def ingest(req: schemas.IngestRequest):
        panel = _load_panel_source(req.source)
        windows = [
            schemas.CountryWindow(
                country=series.country_id,
                display_name=series.display_name,
                group=series.group.label,
                first_year=series.first_year,
                last_year=series.last_year,
                years=series.window_length,
            )
            for series in panel.countries
        ]
        return schemas.IngestResponse(
            countries=len(panel),
            year_range=panel.year_range,
            observation_count=panel.observation_count,
            group_sizes={g.label: n for g, n in panel.group_sizes().items()},
            windows=windows,
            panel_csv=serialize_panel(panel),
        )

    @app.post("/v1/correlate", response_model=schemas.CorrelateResponse)
    def correlate(req: schemas.CorrelateRequest):
        panel = _load_panel_source(req.source)
        rows = correlation_matrix(panel, LagSpec(req.max_lag))
        summary = significance_summary(rows, req.alpha)
        return schemas.CorrelateResponse(
            rows=[matrix_row_dict(r) for r in rows],
            summary=summary,
            artifacts={
                "matrix.csv": render_matrix_csv(rows),
                "matrix.json": render_matrix_json(rows),
            },
        )

    @app.post("/v1/trends", response_model=schemas.TrendsResponse)
    def trends(req: schemas.TrendsRequest):
        panel = _load_panel_source(req.source)
        rows = correlation_matrix(panel, LagSpec(req.max_lag))
        result = all_cluster_trends(rows, req.max_lag)
        return schemas.TrendsResponse(
            trends=[trend_dict(t) for t in result],
            artifacts={"trends.csv": render_trends_csv(result)},
        )

    @app.post("/v1/fit-ranksize", response_model=schemas.FitResponse)
    def fit(req: schemas.FitRequest):
        rows, _panel, _label = _coefficient_rows(req.source, req.max_lag)
        fits, failures, ranked_by_lag = _fit_lags(rows, req.max_lag)
        return schemas.FitResponse(
            fits=[fit_dict(lag, f) for lag, f in sorted(fits.items())],
            failures={str(lag): msg for lag, msg in sorted(failures.items())},
            artifacts=_fit_artifacts(fits, failures, ranked_by_lag),
        )

    @app.post("/v1/fetch", response_model=schemas.FetchResponse)
    def fetch(req: schemas.FetchRequest):
        mapping = (
            load_group_mapping(req.mapping_csv)
            if req.mapping_csv is not None
            else reference_group_mapping()
        )
        ids = tuple(req.country_ids) if req.country_ids else tuple(sorted(mapping))
        fdi_req, gdp_req = indicator_requests(ids, (req.first_year, req.last_year))
        if req.fixture_dir is not None:
            client = WorldBankClient(
                transport=fixture_transport(req.fixture_dir),
                sleeper=lambda _s: None,
            )
        else:
            client = factory()
        with client:
            result = client.fetch_panel(fdi_req, gdp_req, mapping)
        return schemas.FetchResponse(
            countries=len(result.panel),
            dropped=list(result.dropped),
            year_range=result.panel.year_range,
            observation_count=result.panel.observation_count,
            metadata=result.metadata,
            panel_csv=serialize_panel(result.panel),
        )

    @app.post("/v1/report", response_model=schemas.ReportResponse)
    def report(req: schemas.ReportRequest):
        rows, panel, label = _coefficient_rows(req.source, req.max_lag)
        with_stats = bool(rows) and getattr(rows[0], "p", None) is not None
        summary = significance_summary(rows, req.alpha) if with_stats else None
        cluster_trends = all_cluster_trends(rows, req.max_lag)
        fits, failures, ranked_by_lag = _fit_lags(rows, req.max_lag)
        checklist = reproduction_checklist(
            rows, fits, reference_coefficient_rows(), reference_fit_parameters()
        )
        document = build_report(
            source=label,
            panel=panel,
            rows=rows,
            summary=summary,
            trends=cluster_trends,
            fits=fits,
            fit_failures=failures,
            checklist=checklist,
        )
        artifacts = {
            "matrix.csv": render_matrix_csv(rows),
            "matrix.json": render_matrix_json(rows),
            "trends.csv": render_trends_csv(cluster_trends),
            **_fit_artifacts(fits, failures, ranked_by_lag),
            "report.json": render_json(document),
        }
        return schemas.ReportResponse(report=document, artifacts=artifacts)

    return app
