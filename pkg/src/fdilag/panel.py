"""Country panel model and validated ingestion from delimited text.

Input format: comma-delimited UTF-8 with header ``country,year,fdi_usd,
gdp_growth_pct``. A blank value field marks a missing observation. Each
country keeps its maximal contiguous run of years in which both series are
present; gaps are never interpolated.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import (
    DataValidationError,
    DuplicateCountryYearError,
    GapInsideWindowError,
    MissingColumnError,
    NonNumericValueError,
    UnknownGroupLabelError,
    UnmappedCountryError,
    ZeroVarianceSeriesError,
)

#: Shortest per-country window accepted; keeps n - k - 2 comfortably positive
#: for the default three-year maximum lag.
MIN_WINDOW_YEARS = 5

PANEL_COLUMNS = ("country", "year", "fdi_usd", "gdp_growth_pct")
MAPPING_COLUMNS = ("country", "group")


class IhdiGroup(enum.Enum):
    """Inequality-adjusted human development clusters, highest score first."""

    VERY_HIGH = ("very_high", 0.80, 1.00)
    HIGH = ("high", 0.70, 0.799)
    MEDIUM = ("medium", 0.55, 0.699)
    LOW = ("low", 0.0, 0.549)

    def __init__(self, label: str, score_min: float, score_max: float):
        self.label = label
        self.score_min = score_min
        self.score_max = score_max

    @classmethod
    def from_label(cls, label: str) -> "IhdiGroup":
        normalized = label.strip().lower()
        for group in cls:
            if group.label == normalized:
                return group
        raise UnknownGroupLabelError(
            f"unknown group label {label!r}; expected one of "
            f"{', '.join(g.label for g in cls)}"
        )

    @property
    def sort_key(self) -> int:
        return _GROUP_ORDER[self]


_GROUP_ORDER = {group: index for index, group in enumerate(IhdiGroup)}


@dataclass(frozen=True)
class CountrySeries:
    """One country's aligned annual FDI and GDP-growth observations."""

    country_id: str
    group: IhdiGroup
    first_year: int
    fdi: tuple[float, ...]
    gdp_growth: tuple[float, ...]
    display_name: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.country_id:
            raise DataValidationError("country_id must be non-empty")
        if len(self.fdi) != len(self.gdp_growth):
            raise DataValidationError(
                f"country {self.country_id}: fdi and gdp_growth series differ "
                f"in length ({len(self.fdi)} vs {len(self.gdp_growth)})"
            )
        if len(self.fdi) < MIN_WINDOW_YEARS:
            raise GapInsideWindowError(
                f"country {self.country_id}: window of {len(self.fdi)} years "
                f"is below the minimum of {MIN_WINDOW_YEARS}"
            )
        for name, values in (("fdi", self.fdi), ("gdp_growth", self.gdp_growth)):
            if min(values) == max(values):
                raise ZeroVarianceSeriesError(
                    f"country {self.country_id}: {name} series is constant "
                    f"over {self.first_year}-{self.last_year}"
                )
        if not self.display_name:
            object.__setattr__(self, "display_name", self.country_id)

    @property
    def window_length(self) -> int:
        return len(self.fdi)

    @property
    def last_year(self) -> int:
        return self.first_year + len(self.fdi) - 1

    @property
    def years(self) -> range:
        return range(self.first_year, self.last_year + 1)


@dataclass(frozen=True)
class Panel:
    """Validated collection of country series sharing a year range."""

    countries: tuple[CountrySeries, ...]
    year_range: tuple[int, int]
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        ids = [c.country_id for c in self.countries]
        if len(set(ids)) != len(ids):
            seen, dupes = set(), set()
            for cid in ids:
                (dupes if cid in seen else seen).add(cid)
            raise DuplicateCountryYearError(
                f"duplicate country ids in panel: {', '.join(sorted(dupes))}"
            )
        lo, hi = self.year_range
        for c in self.countries:
            if c.first_year < lo or c.last_year > hi:
                raise DataValidationError(
                    f"country {c.country_id}: window {c.first_year}-{c.last_year} "
                    f"outside panel year range {lo}-{hi}"
                )

    def __len__(self) -> int:
        return len(self.countries)

    @property
    def observation_count(self) -> int:
        """Total stored values across both series (two per country-year)."""
        return sum(2 * c.window_length for c in self.countries)

    def country(self, country_id: str) -> CountrySeries:
        for c in self.countries:
            if c.country_id == country_id:
                return c
        raise KeyError(country_id)

    def cluster(self, group: IhdiGroup) -> list[CountrySeries]:
        return cluster(self, group)

    def group_sizes(self) -> dict[IhdiGroup, int]:
        sizes = {group: 0 for group in IhdiGroup}
        for c in self.countries:
            sizes[c.group] += 1
        return sizes

    def mapping(self) -> dict[str, IhdiGroup]:
        return {c.country_id: c.group for c in self.countries}


def cluster(panel: Panel, group: IhdiGroup) -> list[CountrySeries]:
    """Members of one IHDI cluster, in ascending country-id order."""
    return sorted(
        (c for c in panel.countries if c.group is group),
        key=lambda c: c.country_id,
    )


def _split_header(header: list[str], required: tuple[str, ...], kind: str) -> dict[str, int]:
    names = [h.strip().lower() for h in header]
    index = {}
    for column in required:
        if column not in names:
            raise MissingColumnError(f"{kind} input is missing column {column!r}")
        index[column] = names.index(column)
    return index


def _parse_year(token: str, where: str) -> int:
    token = token.strip()
    if not token.isdigit() or len(token) != 4:
        raise NonNumericValueError(f"{where}: year must be a 4-digit integer, got {token!r}")
    return int(token)


def _parse_value(token: str, where: str) -> float | None:
    token = token.strip()
    if token == "":
        return None
    try:
        return float(token)
    except ValueError:
        raise NonNumericValueError(f"{where}: non-numeric value {token!r}") from None


def load_group_mapping(source: str) -> dict[str, IhdiGroup]:
    """Parse a ``country,group`` mapping file into a dict."""
    reader = csv.reader(io.StringIO(source))
    try:
        header = next(reader)
    except StopIteration:
        raise MissingColumnError("mapping input is empty") from None
    index = _split_header(header, MAPPING_COLUMNS, "mapping")
    mapping: dict[str, IhdiGroup] = {}
    for row_number, row in enumerate(reader, start=2):
        if not any(cell.strip() for cell in row):
            continue
        cid = row[index["country"]].strip().upper()
        if cid in mapping:
            raise DataValidationError(f"duplicate mapping entry for country {cid}")
        mapping[cid] = IhdiGroup.from_label(row[index["group"]])
    return mapping


def _longest_complete_run(years: list[int]) -> tuple[int, int]:
    """Bounds of the longest run of consecutive years; latest run wins ties."""
    best_start = start = prev = years[0]
    best_end = years[0]
    for year in years[1:]:
        if year == prev + 1:
            prev = year
        else:
            start = prev = year
        if prev - start >= best_end - best_start:
            best_start, best_end = start, prev
    return best_start, best_end


def load_panel(
    source: str,
    mapping: Mapping[str, IhdiGroup],
    display_names: Mapping[str, str] | None = None,
) -> Panel:
    """Build a validated :class:`Panel` from delimited text content.

    Rows are grouped by country and sorted by year; every country keeps the
    maximal contiguous run of years in which both values are present. A
    country whose longest run is shorter than :data:`MIN_WINDOW_YEARS`
    aborts the load with :class:`GapInsideWindowError`.
    """
    display_names = display_names or {}
    reader = csv.reader(io.StringIO(source))
    try:
        header = next(reader)
    except StopIteration:
        raise MissingColumnError("panel input is empty") from None
    index = _split_header(header, PANEL_COLUMNS, "panel")

    observations: dict[str, dict[int, tuple[float | None, float | None]]] = {}
    for row_number, row in enumerate(reader, start=2):
        if not any(cell.strip() for cell in row):
            continue
        where = f"row {row_number}"
        if len(row) < len(header):
            raise NonNumericValueError(
                f"{where}: expected {len(header)} fields, got {len(row)}"
            )
        cid = row[index["country"]].strip().upper()
        if not cid:
            raise NonNumericValueError(f"{where}: empty country id")
        year = _parse_year(row[index["year"]], where)
        fdi = _parse_value(row[index["fdi_usd"]], f"{where} (fdi_usd)")
        gdp = _parse_value(row[index["gdp_growth_pct"]], f"{where} (gdp_growth_pct)")
        per_country = observations.setdefault(cid, {})
        if year in per_country:
            raise DuplicateCountryYearError(f"duplicate row for country {cid}, year {year}")
        per_country[year] = (fdi, gdp)

    countries = []
    for cid in sorted(observations):
        if cid not in mapping:
            raise UnmappedCountryError(f"country {cid} has no group mapping")
        rows = observations[cid]
        complete = sorted(
            year for year, (fdi, gdp) in rows.items() if fdi is not None and gdp is not None
        )
        if not complete:
            raise GapInsideWindowError(f"country {cid}: no complete (fdi, gdp) observations")
        start, end = _longest_complete_run(complete)
        length = end - start + 1
        if length < MIN_WINDOW_YEARS:
            later = [y for y in rows if y > end]
            message = (
                f"country {cid}: longest contiguous complete window is "
                f"{start}-{end} ({length} years), below the minimum of "
                f"{MIN_WINDOW_YEARS}"
            )
            if later:
                message += f"; window breaks at year {end + 1}"
            raise GapInsideWindowError(message)
        window = range(start, end + 1)
        countries.append(
            CountrySeries(
                country_id=cid,
                group=mapping[cid],
                first_year=start,
                fdi=tuple(rows[y][0] for y in window),
                gdp_growth=tuple(rows[y][1] for y in window),
                display_name=display_names.get(cid, ""),
            )
        )

    if not countries:
        raise MissingColumnError("panel input contains no data rows")
    countries.sort(key=lambda c: (c.group.sort_key, c.country_id))
    year_range = (
        min(c.first_year for c in countries),
        max(c.last_year for c in countries),
    )
    return Panel(countries=tuple(countries), year_range=year_range)


def serialize_panel(panel: Panel) -> str:
    """Canonical delimited-text form of a panel; inverse of :func:`load_panel`."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(PANEL_COLUMNS)
    for c in panel.countries:
        for offset, year in enumerate(c.years):
            writer.writerow([c.country_id, year, repr(c.fdi[offset]), repr(c.gdp_growth[offset])])
    return out.getvalue()


def serialize_mapping(mapping: Mapping[str, IhdiGroup]) -> str:
    """Canonical ``country,group`` text for a mapping."""
    items = sorted(mapping.items(), key=lambda kv: (kv[1].sort_key, kv[0]))
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(MAPPING_COLUMNS)
    for cid, group in items:
        writer.writerow([cid, group.label])
    return out.getvalue()
