"""Request and response models for the HTTP service.

All request bodies are strict (unknown fields rejected) so a typo in a
client fails loudly instead of silently using a default. Source selection
follows one rule everywhere: exactly one data source per request.
"""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field, model_validator


class _StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class PanelSource(_StrictModel):
    """Panel input: inline CSV content or the bundled reconstructed panel.

    ``mapping_csv`` may be omitted with ``panel_csv``, in which case the
    bundled IHDI group mapping applies.
    """

    panel_csv: str | None = None
    mapping_csv: str | None = None
    use_bundled: bool = False

    @model_validator(mode="after")
    def _exactly_one_source(self):
        if self.use_bundled:
            if self.panel_csv is not None or self.mapping_csv is not None:
                raise ValueError("use_bundled excludes inline panel/mapping content")
        else:
            if self.panel_csv is None:
                raise ValueError("provide panel_csv or set use_bundled")
        return self


class CoefficientSource(_StrictModel):
    """Coefficient input: a panel to correlate, an inline wide CSV of
    coefficients, or the bundled transcription of the published tables."""

    panel: PanelSource | None = None
    coefficients_csv: str | None = None
    use_paper_tables: bool = False

    @model_validator(mode="after")
    def _exactly_one_source(self):
        chosen = sum(
            [
                self.panel is not None,
                self.coefficients_csv is not None,
                self.use_paper_tables,
            ]
        )
        if chosen != 1:
            raise ValueError(
                "choose exactly one of panel, coefficients_csv, use_paper_tables"
            )
        return self


# --- ingest --------------------------------------------------------------

class IngestRequest(_StrictModel):
    source: PanelSource


class CountryWindow(_StrictModel):
    country: str
    display_name: str
    group: str
    first_year: int
    last_year: int
    years: int


class IngestResponse(_StrictModel):
    countries: int
    year_range: tuple[int, int]
    observation_count: int
    group_sizes: dict[str, int]
    windows: list[CountryWindow]
    panel_csv: str


# --- correlate / trends -----------------------------------------------------

class CorrelateRequest(_StrictModel):
    source: PanelSource
    max_lag: int = Field(default=3, ge=0)
    alpha: float = Field(default=0.05, gt=0.0, lt=1.0)


class MatrixRow(_StrictModel):
    country: str
    display_name: str
    group: str
    rho: list[float]
    n: list[int] | None = None
    t: list[float] | None = None
    p: list[float] | None = None


class CorrelateResponse(_StrictModel):
    rows: list[MatrixRow]
    summary: dict
    artifacts: dict[str, str]


class TrendsRequest(_StrictModel):
    source: PanelSource
    max_lag: int = Field(default=3, ge=0)


class Trend(_StrictModel):
    group: str
    slope: float
    intercept: float
    mean_rho: list[float]
    fitted_trend: list[float]
    per_country_slopes: dict[str, float]


class TrendsResponse(_StrictModel):
    trends: list[Trend]
    artifacts: dict[str, str]


# --- rank-size fit ------------------------------------------------------------

class FitRequest(_StrictModel):
    source: CoefficientSource
    max_lag: int = Field(default=3, ge=0)


class Fit(_StrictModel):
    lag: int
    m1: float
    m2: float
    m3: float
    se_m1: float
    se_m2: float
    se_m3: float
    r_squared: float
    sse: float
    iterations: int
    converged: bool
    nonpositive_params: list[str]


class FitResponse(_StrictModel):
    fits: list[Fit]
    failures: dict[str, str]
    artifacts: dict[str, str]


# --- fetch ---------------------------------------------------------------------

class FetchRequest(_StrictModel):
    """Fetch both indicators and assemble a validated panel.

    Exactly one of ``live`` (real network) or ``fixture_dir`` (recorded
    response pages on the service host) must be selected; the default
    refuses to touch the network by accident.
    """

    country_ids: list[str] | None = None
    first_year: int = 1970
    last_year: int = 2015
    mapping_csv: str | None = None
    live: bool = False
    fixture_dir: str | None = None

    @model_validator(mode="after")
    def _exactly_one_mode(self):
        if self.live == (self.fixture_dir is not None):
            raise ValueError("choose exactly one of live or fixture_dir")
        if self.country_ids is not None and not self.country_ids:
            raise ValueError("country_ids must be omitted or non-empty")
        return self


class FetchResponse(_StrictModel):
    countries: int
    dropped: list[str]
    year_range: tuple[int, int]
    observation_count: int
    metadata: dict
    panel_csv: str


# --- report ----------------------------------------------------------------------

class ReportRequest(_StrictModel):
    source: CoefficientSource
    max_lag: int = Field(default=3, ge=0)
    alpha: float = Field(default=0.05, gt=0.0, lt=1.0)


class ReportResponse(_StrictModel):
    report: dict
    artifacts: dict[str, str]


class ErrorBody(_StrictModel):
    category: str
    error: str
    message: str
