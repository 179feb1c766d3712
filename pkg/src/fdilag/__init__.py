"""Lagged FDI-GDP correlation analysis over an IHDI-clustered country panel.

Core pipeline: load a validated panel, compute per-country lagged Pearson
coefficients with significance tests, average cluster trends across lags,
and fit the extended rank-size law to each lag's ranked coefficient vector.
The bundled reference data reproduces the published tables offline; the
``worldbank`` module can rebuild the panel from current data when a network
is available.
"""

from .errors import (
    DataValidationError,
    NetworkError,
    NumericalError,
    ToolkitError,
)
from .lagcorr import (
    LagCorrelationRow,
    LagSpec,
    correlation_matrix,
    lagged_pearson,
    pearson,
    significance,
)
from .panel import (
    CountrySeries,
    IhdiGroup,
    Panel,
    cluster,
    load_group_mapping,
    load_panel,
    serialize_panel,
)
from .ranksize import (
    FitConfig,
    RankedCoefficients,
    RankSizeFit,
    eval_model,
    fit_ranksize,
    fitted_values,
    rank_coefficients,
)
from .reference import (
    load_reference_panel,
    reference_coefficient_rows,
    reference_fit_parameters,
    reference_group_mapping,
)
from .trends import ClusterTrend, all_cluster_trends, cluster_trend, ols_line

__version__ = "0.1.0"

__all__ = [
    "ClusterTrend",
    "CountrySeries",
    "DataValidationError",
    "FitConfig",
    "IhdiGroup",
    "LagCorrelationRow",
    "LagSpec",
    "NetworkError",
    "NumericalError",
    "Panel",
    "RankSizeFit",
    "RankedCoefficients",
    "ToolkitError",
    "all_cluster_trends",
    "cluster",
    "cluster_trend",
    "correlation_matrix",
    "eval_model",
    "fit_ranksize",
    "fitted_values",
    "lagged_pearson",
    "load_group_mapping",
    "load_panel",
    "load_reference_panel",
    "ols_line",
    "pearson",
    "rank_coefficients",
    "reference_coefficient_rows",
    "reference_fit_parameters",
    "reference_group_mapping",
    "serialize_panel",
    "significance",
    "__version__",
]
