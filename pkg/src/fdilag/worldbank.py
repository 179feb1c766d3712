"""Client for the World Bank indicator API (v2, JSON).

The bundled panel makes network access optional; this module exists so the
same validated :class:`~fdilag.panel.Panel` can be rebuilt from current data.
Responses arrive as a two-element JSON array ``[page_metadata, observations]``
and are paginated through ``page``/``pages`` fields. The client fetches the
two indicators (FDI inflows and GDP growth) with at most two concurrent
requests, merges observations by ``(country, year)``, and funnels the result
through :func:`~fdilag.panel.load_panel` so fetched panels obey exactly the
same invariants as ingested files.

For tests and offline replay, any ``httpx`` transport can be injected;
:func:`fixture_transport` serves recorded response pages from a directory.
"""

from __future__ import annotations

import datetime as _dt
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping

import httpx

from .errors import (
    DataValidationError,
    GapInsideWindowError,
    HttpError,
    PaginationInconsistencyError,
    RateLimitedError,
    SchemaMismatchError,
    ZeroVarianceSeriesError,
)
from .panel import (
    MIN_WINDOW_YEARS,
    PANEL_COLUMNS,
    IhdiGroup,
    Panel,
    load_panel,
)

API_BASE = "https://api.worldbank.org/v2"

#: Net foreign direct investment inflows, current US dollars.
FDI_INDICATOR = "BX.KLT.DINV.CD.WD"
#: Annual GDP growth, percent.
GDP_GROWTH_INDICATOR = "NY.GDP.MKTP.KD.ZG"

#: The API carries no indicator data before this year.
EARLIEST_YEAR = 1960

DEFAULT_USER_AGENT = "fdilag-panel-client/0.1"
DEFAULT_PER_PAGE = 1000
DEFAULT_MAX_RETRIES = 3


def _current_year() -> int:
    return _dt.date.today().year


@dataclass(frozen=True)
class IndicatorRequest:
    """One indicator series over a set of countries and a year range.

    Validated on construction so that a malformed request fails before any
    network traffic happens.
    """

    country_ids: tuple[str, ...]
    indicator_id: str
    year_range: tuple[int, int]

    def __post_init__(self):
        object.__setattr__(self, "country_ids", tuple(self.country_ids))
        object.__setattr__(self, "year_range", tuple(self.year_range))
        if not self.country_ids:
            raise DataValidationError("country list must not be empty")
        for cid in self.country_ids:
            if len(cid) != 3 or not cid.isalpha() or cid != cid.upper():
                raise DataValidationError(f"not an ISO-3 country code: {cid!r}")
        if len(set(self.country_ids)) != len(self.country_ids):
            raise DataValidationError("duplicate country codes in request")
        if not self.indicator_id:
            raise DataValidationError("indicator id must not be empty")
        if len(self.year_range) != 2:
            raise DataValidationError("year_range must be (first, last)")
        first, last = self.year_range
        if first > last:
            raise DataValidationError(f"year range reversed: {first} > {last}")
        if first < EARLIEST_YEAR or last > _current_year():
            raise DataValidationError(
                f"year range [{first}, {last}] outside [{EARLIEST_YEAR}, "
                f"{_current_year()}]"
            )

    @property
    def date_param(self) -> str:
        return f"{self.year_range[0]}:{self.year_range[1]}"


@dataclass(frozen=True)
class IndicatorSeries:
    """Parsed observations for one indicator: ``(country, year) -> value``."""

    indicator_id: str
    values: Mapping[tuple[str, int], float]
    last_updated: str


@dataclass(frozen=True)
class FetchResult:
    """A fetched panel plus which requested countries had to be dropped."""

    panel: Panel
    dropped: tuple[str, ...]
    metadata: dict = field(compare=False)


def _parse_retry_after(header: str | None) -> float | None:
    if header is None:
        return None
    try:
        seconds = float(header)
    except ValueError:
        return None
    return max(seconds, 0.0)


def _page_int(meta: dict, key: str) -> int:
    try:
        return int(meta[key])
    except (KeyError, TypeError, ValueError):
        raise SchemaMismatchError(f"page metadata lacks integer {key!r}: {meta!r}")


class WorldBankClient:
    """Thin paginated JSON client with retry handling for rate limits.

    ``transport`` and ``sleeper`` are injectable so the full request path,
    including 429 retries, can run against recorded fixtures without touching
    the network or the wall clock.
    """

    def __init__(
        self,
        base_url: str = API_BASE,
        *,
        transport: httpx.BaseTransport | None = None,
        user_agent: str = DEFAULT_USER_AGENT,
        per_page: int = DEFAULT_PER_PAGE,
        max_retries: int = DEFAULT_MAX_RETRIES,
        timeout: float = 30.0,
        sleeper: Callable[[float], None] = time.sleep,
        clock: Callable[[], _dt.datetime] | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.per_page = per_page
        self.max_retries = max_retries
        self._sleeper = sleeper
        self._clock = clock or (lambda: _dt.datetime.now(_dt.timezone.utc))
        self._http = httpx.Client(
            transport=transport,
            timeout=timeout,
            headers={"User-Agent": user_agent},
        )

    def close(self) -> None:
        self._http.close()

    def __enter__(self) -> "WorldBankClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- request plumbing ---------------------------------------------------

    def _get(self, url: str, params: dict) -> list:
        """GET one page, honoring Retry-After on 429 up to the retry budget."""
        for attempt in range(self.max_retries + 1):
            try:
                response = self._http.get(url, params=params)
            except httpx.HTTPError as exc:
                raise HttpError(0, f"transport failure: {exc}") from exc
            if response.status_code == 429:
                if attempt == self.max_retries:
                    raise RateLimitedError(
                        f"still rate-limited after {self.max_retries} retries"
                    )
                delay = _parse_retry_after(response.headers.get("Retry-After"))
                self._sleeper(delay if delay is not None else float(attempt + 1))
                continue
            if response.status_code != 200:
                excerpt = response.text[:200]
                raise HttpError(response.status_code, excerpt)
            try:
                body = response.json()
            except (json.JSONDecodeError, ValueError) as exc:
                raise SchemaMismatchError(f"response is not JSON: {exc}") from exc
            return self._check_body_shape(body)
        raise RateLimitedError("retry loop exhausted")  # pragma: no cover

    @staticmethod
    def _check_body_shape(body) -> list:
        if not isinstance(body, list):
            raise SchemaMismatchError(f"expected JSON array, got {type(body).__name__}")
        if len(body) == 1 and isinstance(body[0], dict) and "message" in body[0]:
            raise SchemaMismatchError(f"API error payload: {body[0]['message']!r}")
        if len(body) != 2 or not isinstance(body[0], dict):
            raise SchemaMismatchError("expected [page_metadata, observations]")
        if body[1] is not None and not isinstance(body[1], list):
            raise SchemaMismatchError("observation block is not an array")
        return body

    # -- indicator fetch ------------------------------------------------------

    def fetch_indicator(self, request: IndicatorRequest) -> IndicatorSeries:
        """Fetch every page for one indicator and parse the observations."""
        codes = ";".join(request.country_ids)
        url = f"{self.base_url}/country/{codes}/indicator/{request.indicator_id}"
        params = {
            "format": "json",
            "date": request.date_param,
            "per_page": self.per_page,
            "page": 1,
        }
        first_meta, observations = self._fetch_page(url, params, expected_page=1)
        pages = _page_int(first_meta, "pages")
        total = _page_int(first_meta, "total")
        last_updated = str(first_meta.get("lastupdated", ""))
        for page in range(2, pages + 1):
            meta, more = self._fetch_page(
                url, {**params, "page": page}, expected_page=page
            )
            if _page_int(meta, "pages") != pages:
                raise PaginationInconsistencyError(
                    f"page count changed mid-fetch: {pages} became {meta['pages']}"
                )
            observations.extend(more)
        if len(observations) != total:
            raise PaginationInconsistencyError(
                f"metadata promised {total} observations, pages delivered "
                f"{len(observations)}"
            )
        wanted = set(request.country_ids)
        first, last = request.year_range
        values: dict[tuple[str, int], float] = {}
        for obs in observations:
            cid, year, value = self._parse_observation(obs)
            if cid not in wanted or not first <= year <= last:
                continue
            if value is not None:
                values[(cid, year)] = value
        return IndicatorSeries(request.indicator_id, values, last_updated)

    def _fetch_page(self, url: str, params: dict, expected_page: int):
        body = self._get(url, params)
        meta = body[0]
        if _page_int(meta, "page") != expected_page:
            raise PaginationInconsistencyError(
                f"asked for page {expected_page}, got page {meta['page']}"
            )
        observations = body[1] if body[1] is not None else []
        return meta, list(observations)

    @staticmethod
    def _parse_observation(obs) -> tuple[str, int, float | None]:
        if not isinstance(obs, dict):
            raise SchemaMismatchError(f"observation is not an object: {obs!r}")
        cid = obs.get("countryiso3code") or ""
        try:
            year = int(obs["date"])
        except (KeyError, TypeError, ValueError):
            raise SchemaMismatchError(f"observation lacks a usable date: {obs!r}")
        raw = obs.get("value")
        if raw is None:
            return cid, year, None
        if not isinstance(raw, (int, float)) or isinstance(raw, bool):
            raise SchemaMismatchError(f"non-numeric value for {cid} {year}: {raw!r}")
        return cid, year, float(raw)

    # -- panel assembly -------------------------------------------------------

    def fetch_panel(
        self,
        fdi_request: IndicatorRequest,
        gdp_request: IndicatorRequest,
        mapping: Mapping[str, IhdiGroup],
    ) -> FetchResult:
        """Fetch both indicators, merge by (country, year), validate as a Panel.

        Countries whose merged series no longer offer a usable window (data
        revisions do shrink them) are dropped and reported rather than failing
        the whole fetch.
        """
        if set(fdi_request.country_ids) != set(gdp_request.country_ids):
            raise DataValidationError("indicator requests cover different countries")
        if fdi_request.year_range != gdp_request.year_range:
            raise DataValidationError("indicator requests cover different years")
        if fdi_request.indicator_id == gdp_request.indicator_id:
            raise DataValidationError("the two requests name the same indicator")
        missing = [c for c in fdi_request.country_ids if c not in mapping]
        if missing:
            raise DataValidationError(
                f"no group mapping for requested countries: {', '.join(sorted(missing))}"
            )

        with ThreadPoolExecutor(max_workers=2) as pool:
            fdi_future = pool.submit(self.fetch_indicator, fdi_request)
            gdp_future = pool.submit(self.fetch_indicator, gdp_request)
            fdi = fdi_future.result()
            gdp = gdp_future.result()

        first, last = fdi_request.year_range
        header = ",".join(PANEL_COLUMNS)
        kept_rows: list[str] = []
        dropped: dict[str, str] = {}
        for cid in sorted(fdi_request.country_ids):
            rows = []
            for year in range(first, last + 1):
                f = fdi.values.get((cid, year))
                g = gdp.values.get((cid, year))
                if f is None and g is None:
                    continue
                rows.append(
                    f"{cid},{year},{'' if f is None else repr(f)},"
                    f"{'' if g is None else repr(g)}"
                )
            if not rows:
                dropped[cid] = "no observations returned"
                continue
            try:
                load_panel("\n".join([header] + rows) + "\n", {cid: mapping[cid]})
            except (GapInsideWindowError, ZeroVarianceSeriesError) as exc:
                dropped[cid] = str(exc)
                continue
            kept_rows.extend(rows)

        if not kept_rows:
            raise DataValidationError(
                "no requested country retained a complete window of at least "
                f"{MIN_WINDOW_YEARS} years"
            )
        panel = load_panel("\n".join([header] + kept_rows) + "\n", mapping)
        metadata = {
            "source": self.base_url,
            "retrieved_at": self._clock().isoformat(),
            "indicators": {
                fdi.indicator_id: {"last_updated": fdi.last_updated},
                gdp.indicator_id: {"last_updated": gdp.last_updated},
            },
            "dropped": dict(sorted(dropped.items())),
        }
        panel.metadata.update(metadata)
        return FetchResult(panel, tuple(sorted(dropped)), metadata)


def indicator_requests(
    country_ids, year_range: tuple[int, int]
) -> tuple[IndicatorRequest, IndicatorRequest]:
    """The standard (FDI, GDP growth) request pair for one fetch."""
    ids = tuple(country_ids)
    return (
        IndicatorRequest(ids, FDI_INDICATOR, year_range),
        IndicatorRequest(ids, GDP_GROWTH_INDICATOR, year_range),
    )


def fixture_transport(directory: str | Path) -> httpx.MockTransport:
    """Serve recorded response pages from ``directory`` instead of the network.

    Files are named ``<indicator_id>.page<N>.json`` and hold the raw JSON body
    of one page. Requests for anything not on disk get a 404, which surfaces
    as :class:`~fdilag.errors.HttpError` through the normal client path.
    """
    root = Path(directory)

    def handler(request: httpx.Request) -> httpx.Response:
        indicator = request.url.path.rstrip("/").rsplit("/", 1)[-1]
        page = request.url.params.get("page", "1")
        candidate = root / f"{indicator}.page{page}.json"
        if not candidate.is_file():
            return httpx.Response(404, text=f"no fixture for {candidate.name}")
        return httpx.Response(
            200,
            content=candidate.read_bytes(),
            headers={"Content-Type": "application/json"},
        )

    return httpx.MockTransport(handler)
