"""Loaders for the bundled reference data.

Three data files ship with the package:

* ``ihdi_groups.csv`` -- the fixed 43-country IHDI cluster mapping
  (13 very-high, 11 high, 8 medium, 11 low).
* ``reference_coefficients.csv`` -- the published per-country lagged
  correlation coefficients (lags 0..3, four decimals) that the rank-size
  reproduction fits against, independent of any data vintage.
* ``reference_fit_params.csv`` -- the published rank-size parameters,
  standard errors and R-squared per lag, used by the reproduction
  checklist.
* ``reference_panel.csv`` -- a reconstructed 1970-2015 panel. The original
  data vintage is not recoverable, so this file contains seeded synthetic
  series calibrated so that every country's lagged correlations match the
  reference coefficients; it is not source observational data. Use the
  fetch command for current observational data.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from importlib import resources

from .panel import IhdiGroup, Panel, load_group_mapping, load_panel

YEAR_RANGE = (1970, 2015)

DISPLAY_NAMES = {
    "AUS": "Australia",
    "AUT": "Austria",
    "CAN": "Canada",
    "DNK": "Denmark",
    "FRA": "France",
    "FIN": "Finland",
    "DEU": "Germany",
    "NLD": "Netherlands",
    "SWE": "Sweden",
    "GBR": "Great Britain",
    "NOR": "Norway",
    "ISL": "Iceland",
    "IRL": "Ireland",
    "ARG": "Argentina",
    "ISR": "Israel",
    "ESP": "Spain",
    "ITA": "Italy",
    "USA": "USA",
    "PRT": "Portugal",
    "GRC": "Greece",
    "JPN": "Japan",
    "MLT": "Malta",
    "CYP": "Cyprus",
    "KOR": "Korea",
    "URY": "Uruguay",
    "LKA": "Sri Lanka",
    "VEN": "Venezuela",
    "MEX": "Mexico",
    "PER": "Peru",
    "MUS": "Mauritius",
    "CHL": "Chile",
    "TUR": "Turkey",
    "PHL": "Philippines",
    "PRY": "Paraguay",
    "IRQ": "Iraq",
    "BOL": "Bolivia",
    "ZAF": "South Africa",
    "NGA": "Nigeria",
    "NER": "Niger",
    "SLV": "El Salvador",
    "IND": "India",
    "NPL": "Nepal",
    "GHA": "Ghana",
}


def _read_data(name: str) -> str:
    return resources.files("fdilag.data").joinpath(name).read_text(encoding="utf-8")


def reference_mapping_csv() -> str:
    return _read_data("ihdi_groups.csv")


def reference_panel_csv() -> str:
    return _read_data("reference_panel.csv")


def reference_group_mapping() -> dict[str, IhdiGroup]:
    return load_group_mapping(reference_mapping_csv())


def load_reference_panel() -> Panel:
    panel = load_panel(
        reference_panel_csv(), reference_group_mapping(), DISPLAY_NAMES
    )
    panel.metadata["source"] = "bundled reconstructed panel"
    return panel


@dataclass(frozen=True)
class CoefficientRow:
    """A transcribed coefficient row: no sample sizes or test statistics."""

    country_id: str
    group: IhdiGroup
    rho: tuple[float, ...]
    display_name: str = ""

    @property
    def max_lag(self) -> int:
        return len(self.rho) - 1


def parse_coefficient_rows(source: str) -> list[CoefficientRow]:
    """Parse a wide coefficient table: ``country,group,lag0,lag1,...``."""
    from .errors import MissingColumnError, NonNumericValueError

    reader = csv.reader(io.StringIO(source))
    try:
        header = [h.strip().lower() for h in next(reader)]
    except StopIteration:
        raise MissingColumnError("coefficient input is empty") from None
    for column in ("country", "group"):
        if column not in header:
            raise MissingColumnError(f"coefficient input is missing column {column!r}")
    lag_columns = []
    k = 0
    while f"lag{k}" in header:
        lag_columns.append(header.index(f"lag{k}"))
        k += 1
    if not lag_columns:
        raise MissingColumnError("coefficient input has no lag0 column")
    country_index = header.index("country")
    group_index = header.index("group")

    rows = []
    for row_number, row in enumerate(reader, start=2):
        if not any(cell.strip() for cell in row):
            continue
        cid = row[country_index].strip().upper()
        group = IhdiGroup.from_label(row[group_index])
        try:
            rho = tuple(float(row[i]) for i in lag_columns)
        except (ValueError, IndexError):
            raise NonNumericValueError(
                f"row {row_number}: non-numeric or missing coefficient"
            ) from None
        rows.append(
            CoefficientRow(
                country_id=cid,
                group=group,
                rho=rho,
                display_name=DISPLAY_NAMES.get(cid, cid),
            )
        )
    rows.sort(key=lambda r: (r.group.sort_key, r.country_id))
    return rows


def reference_coefficient_rows() -> list[CoefficientRow]:
    """The published per-country coefficients for lags 0..3."""
    return parse_coefficient_rows(_read_data("reference_coefficients.csv"))


def reference_fit_parameters() -> dict[int, dict[str, float]]:
    """Published rank-size fit parameters keyed by lag.

    Each value maps ``m1, m1_se, m2, m2_se, m3, m3_se, r_squared`` to its
    published number.
    """
    reader = csv.DictReader(io.StringIO(_read_data("reference_fit_params.csv")))
    out: dict[int, dict[str, float]] = {}
    for record in reader:
        lag = int(record.pop("lag"))
        out[lag] = {key: float(value) for key, value in record.items()}
    return out
