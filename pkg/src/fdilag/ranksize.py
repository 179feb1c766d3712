"""Cross-country coefficient ranking and the extended rank-size law fit.

The model for a coefficient of rank ``r`` among ``N`` countries is

    y(r) = -1 + m1 * N**(-m2) * r**(-m2) * (N + 1 - r)**m3

a decreasing power law with distinct exponents at low and high ranks. It is
fitted by Levenberg-Marquardt with an analytic Jacobian; standard errors
come from the linearized covariance ``SSE / (N - 3) * inv(J'J)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DataValidationError,
    DegenerateDataError,
    DomainError,
    EmptyInputError,
    LagTooLargeError,
    NoConvergenceError,
    SingularJacobianError,
    TooShortError,
)

PARAM_NAMES = ("m1", "m2", "m3")


@dataclass(frozen=True)
class RankEntry:
    rank: int
    country_id: str
    value: float


@dataclass(frozen=True)
class RankedCoefficients:
    """One lag's coefficients sorted descending, ties broken by country id."""

    lag: int
    entries: tuple[RankEntry, ...]

    def __post_init__(self):
        if not self.entries:
            raise EmptyInputError("ranked coefficients must be non-empty")
        for position, entry in enumerate(self.entries, start=1):
            if entry.rank != position:
                raise DataValidationError(
                    f"ranks must be exactly 1..{len(self.entries)}; "
                    f"found {entry.rank} at position {position}"
                )
        values = [e.value for e in self.entries]
        if any(a < b for a, b in zip(values, values[1:])):
            raise DataValidationError("ranked values must be non-increasing")

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def values(self) -> np.ndarray:
        return np.array([e.value for e in self.entries], dtype=float)

    @property
    def ranks(self) -> np.ndarray:
        return np.arange(1, self.size + 1, dtype=float)

    @classmethod
    def from_values(
        cls, values: Sequence[tuple[str, float]], lag: int
    ) -> "RankedCoefficients":
        ordered = sorted(values, key=lambda item: (-item[1], item[0]))
        entries = tuple(
            RankEntry(rank=i, country_id=cid, value=value)
            for i, (cid, value) in enumerate(ordered, start=1)
        )
        return cls(lag=lag, entries=entries)


def rank_coefficients(rows: Sequence, lag: int) -> RankedCoefficients:
    """Rank one lag's coefficients across countries, descending.

    ``rows`` may be any objects with ``country_id`` and an indexable ``rho``
    (correlation-matrix rows or transcribed reference rows). Ties are broken
    by ascending country id, so the lower id receives the lower rank.
    """
    if not rows:
        raise EmptyInputError("no rows to rank")
    pairs = []
    for row in rows:
        if lag >= len(row.rho):
            raise LagTooLargeError(
                f"row for {row.country_id} has no lag {lag} coefficient"
            )
        pairs.append((row.country_id, float(row.rho[lag])))
    return RankedCoefficients.from_values(pairs, lag=lag)


def eval_model(r: int, size: int, m1: float, m2: float, m3: float) -> float:
    """Rank-size law value at integer rank ``r`` among ``size`` entries."""
    if not 1 <= r <= size:
        raise DomainError(f"rank {r} outside 1..{size}")
    return -1.0 + m1 * size ** (-m2) * r ** (-m2) * (size + 1 - r) ** m3


def _model_values(ranks: np.ndarray, size: int, params: np.ndarray) -> np.ndarray:
    m1, m2, m3 = params
    return -1.0 + m1 * float(size) ** (-m2) * ranks ** (-m2) * (size + 1 - ranks) ** m3


def model_jacobian(ranks: np.ndarray, size: int, params: np.ndarray) -> np.ndarray:
    """Analytic partials of the model in (m1, m2, m3), one row per rank."""
    m1, m2, m3 = params
    reflected = size + 1 - ranks
    g = float(size) ** (-m2) * ranks ** (-m2) * reflected ** m3
    jac = np.empty((ranks.size, 3))
    jac[:, 0] = g
    jac[:, 1] = -m1 * g * np.log(size * ranks)
    jac[:, 2] = m1 * g * np.log(reflected)
    return jac


@dataclass(frozen=True)
class FitConfig:
    initial: tuple[float, float, float] = (1.0, 0.1, 0.2)
    max_iterations: int = 1000
    sse_rtol: float = 1e-12
    step_tol: float = 1e-10
    damping: float = 1e-3
    damping_increase: float = 10.0
    damping_decrease: float = 10.0


@dataclass(frozen=True)
class RankSizeFit:
    """Fitted parameters with uncertainty and convergence diagnostics."""

    m1: float
    m2: float
    m3: float
    se1: float
    se2: float
    se3: float
    r_squared: float
    sse: float
    iterations: int
    converged: bool
    nonpositive_params: tuple[str, ...] = ()

    @property
    def params(self) -> tuple[float, float, float]:
        return (self.m1, self.m2, self.m3)

    @property
    def standard_errors(self) -> tuple[float, float, float]:
        return (self.se1, self.se2, self.se3)


def fit_ranksize(ranked: RankedCoefficients, config: FitConfig | None = None) -> RankSizeFit:
    """Least-squares fit of the rank-size law to one ranked coefficient vector.

    Damped Gauss-Newton (Levenberg-Marquardt): the damping factor scales the
    diagonal of the normal matrix, grows tenfold on a rejected step and
    shrinks tenfold on an accepted one. Convergence is declared when the
    relative SSE improvement or the parameter step becomes negligible;
    exceeding the iteration budget raises :class:`NoConvergenceError`.
    """
    config = config or FitConfig()
    size = ranked.size
    if size < 5:
        raise TooShortError(f"need at least 5 ranked values, got {size}")
    observed = ranked.values
    if float(observed.min()) == float(observed.max()):
        # the mean of identical floats need not reproduce exactly, so test
        # the spread rather than requiring the computed SST to be zero
        raise DegenerateDataError("all ranked values are equal")
    sst = float(np.sum((observed - observed.mean()) ** 2))
    ranks = ranked.ranks

    params = np.asarray(config.initial, dtype=float)
    residual = _model_values(ranks, size, params) - observed
    sse = float(residual @ residual)
    damping = config.damping
    converged = False
    iterations = 0

    for iterations in range(1, config.max_iterations + 1):
        jac = model_jacobian(ranks, size, params)
        normal = jac.T @ jac
        gradient = jac.T @ residual
        diag = np.maximum(np.diag(normal), 1e-30)
        try:
            step = np.linalg.solve(normal + damping * np.diag(diag), -gradient)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobianError(f"normal equations singular: {exc}") from exc
        if not np.all(np.isfinite(step)):
            raise SingularJacobianError("non-finite step from normal equations")

        candidate = params + step
        candidate_residual = _model_values(ranks, size, candidate) - observed
        candidate_sse = float(candidate_residual @ candidate_residual)
        small_step = float(np.linalg.norm(step)) <= config.step_tol * (
            float(np.linalg.norm(params)) + config.step_tol
        )

        if candidate_sse <= sse:
            improvement = sse - candidate_sse
            params, residual, sse = candidate, candidate_residual, candidate_sse
            damping = max(damping / config.damping_decrease, 1e-15)
            if small_step or improvement <= config.sse_rtol * max(sse, 1e-300):
                converged = True
                break
        else:
            damping *= config.damping_increase
            if small_step:
                converged = True
                break

    if not converged:
        raise NoConvergenceError(
            f"no convergence after {config.max_iterations} iterations (sse={sse:.6g})"
        )

    jac = model_jacobian(ranks, size, params)
    normal = jac.T @ jac
    try:
        covariance = sse / (size - 3) * np.linalg.inv(normal)
    except np.linalg.LinAlgError as exc:
        raise SingularJacobianError(f"covariance matrix singular: {exc}") from exc
    errors = np.sqrt(np.maximum(np.diag(covariance), 0.0))

    nonpositive = tuple(
        name for name, value in zip(PARAM_NAMES, params) if value <= 0.0
    )
    return RankSizeFit(
        m1=float(params[0]),
        m2=float(params[1]),
        m3=float(params[2]),
        se1=float(errors[0]),
        se2=float(errors[1]),
        se3=float(errors[2]),
        r_squared=1.0 - sse / sst,
        sse=sse,
        iterations=iterations,
        converged=converged,
        nonpositive_params=nonpositive,
    )


def fitted_values(ranked: RankedCoefficients, fit: RankSizeFit) -> np.ndarray:
    """Model values at every rank of ``ranked`` under ``fit``."""
    return _model_values(ranked.ranks, ranked.size, np.asarray(fit.params))
