"""Monte-Carlo oracle: path simulation and empirical record statistics.

Every closed-form law in the package can be cross-checked here against
plain simulation.  Paths are generated for the Gaussian (uni- and
multivariate), uniform-autoregression and stable moving-average families,
records are counted with the strict ``>`` convention (floating-point ties
count as non-records), and the runs estimator provides an empirical
extremal index with a bootstrap confidence interval.

Generation is chunked and keyed by ``(seed, chunk)`` on a counter-based
generator, so results are reproducible for a fixed study regardless of
how the chunks are scheduled.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import config
from .asymptotic import ExtremalIndex
from .errors import AllZeroCoefficients, InsufficientExceedances, ValidationError
from .linalg import cholesky
from .models import CorrelationModel, CrossCorrelationModel

__all__ = [
    "ChernickProcess",
    "StableMaProcess",
    "SimStudy",
    "EmpiricalRecordStats",
    "simulate_records",
    "simulate_chernick",
    "simulate_stable_ma",
    "sample_stable",
    "empirical_extremal_index",
]

_CHUNK = 4096
_DENSE_CAP = 500
_MIN_EXCEEDANCES = 30


@dataclass(frozen=True)
class ChernickProcess:
    """The uniform autoregression ``X_t = X_{t-1} / m + e_t``.

    The innovations ``e_t`` are uniform on ``{0, 1/m, ..., (m-1)/m}`` and
    the seed value is uniform on ``[0, 1]``, which makes every margin
    exactly uniform on ``[0, 1]``; the extremal index is ``(m - 1) / m``.
    """

    m: int

    def __post_init__(self) -> None:
        if int(self.m) != self.m or self.m < 2:
            raise ValidationError(f"m must be an integer >= 2, got {self.m!r}")

    @property
    def label(self) -> str:
        return f"chernick({self.m})"


@dataclass(frozen=True)
class StableMaProcess:
    """The moving average ``X_t = sum_i c_i Z_{t-i}`` of stable noise.

    ``Z`` are iid stable with unit scale, stability ``alpha`` and skewness
    ``kappa`` in the parametrization of :func:`sample_stable`.
    """

    coeffs: tuple[float, ...]
    alpha: float
    kappa: float = 0.0

    def __post_init__(self) -> None:
        coeffs = tuple(float(c) for c in self.coeffs)
        if not coeffs:
            raise ValidationError("coeffs must be non-empty")
        if not all(math.isfinite(c) for c in coeffs):
            raise ValidationError("coeffs must be finite")
        if all(c == 0 for c in coeffs):
            raise AllZeroCoefficients("at least one coefficient must be nonzero")
        if not 0 < self.alpha <= 2:
            raise ValidationError(f"alpha must be in (0, 2], got {self.alpha!r}")
        if not -1 <= self.kappa <= 1:
            raise ValidationError(f"kappa must be in [-1, 1], got {self.kappa!r}")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def label(self) -> str:
        return f"stable-ma(q={len(self.coeffs)},alpha={self.alpha:g},kappa={self.kappa:g})"


Process = Union[CorrelationModel, CrossCorrelationModel, ChernickProcess, StableMaProcess]


def _margin_grid(process: Process) -> np.ndarray:
    if isinstance(process, ChernickProcess):
        return np.linspace(0.02, 0.98, 25)
    return np.linspace(-4.0, 4.0, 25)


@dataclass(frozen=True)
class SimStudy:
    """A Monte-Carlo record experiment: process, horizon, paths, seed.

    ``margin`` is an optional strictly increasing transform applied
    pointwise to the simulated values; records are invariant under it, so
    it only changes the value-based statistics.  Monotonicity is validated
    on a grid at construction.
    """

    process: Process
    n: int
    n_paths: int
    seed: int = 0
    margin: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValidationError(f"n must be >= 2, got {self.n!r}")
        if self.n_paths < 1:
            raise ValidationError(f"n_paths must be >= 1, got {self.n_paths!r}")
        if self.seed < 0:
            raise ValidationError(f"seed must be >= 0, got {self.seed!r}")
        if self.margin is not None:
            with np.errstate(all="ignore"):
                grid = np.asarray(
                    self.margin(_margin_grid(self.process)), dtype=float
                )
            if grid.shape != _margin_grid(self.process).shape or not np.all(
                np.isfinite(grid)
            ) or not np.all(np.diff(grid) > 0):
                raise ValidationError(
                    "margin must be a strictly increasing finite transform"
                )

    @property
    def dim(self) -> int:
        if isinstance(self.process, CrossCorrelationModel):
            return self.process.d
        return 1

    @property
    def label(self) -> str:
        return self.process.label


@dataclass(frozen=True)
class EmpiricalRecordStats:
    """Per-index record rates and path-level record summaries.

    Arrival times ``t2``/``t3`` use the sentinel ``-1`` when no second or
    third record occurred within the horizon; the increments ``inc1`` /
    ``inc2`` (``X_{T(2)} - X_1`` and ``X_{T(3)} - X_{T(2)}``) are ``nan``
    there.  For multivariate processes the rates refer to complete records
    and the value-based columns are ``nan``.  Standard errors are ``nan``
    for single-path studies.
    """

    process: str
    n: int
    n_paths: int
    record_rate: np.ndarray
    record_se: np.ndarray
    record_count: np.ndarray
    t2: np.ndarray
    t3: np.ndarray
    inc1: np.ndarray
    inc2: np.ndarray
    max_value: np.ndarray
    pooled_record_index: np.ndarray
    pooled_record_value: np.ndarray
    indicators: np.ndarray | None = None
    paths: np.ndarray | None = None

    @property
    def expected_count(self) -> float:
        """Empirical mean number of records per path."""
        return float(np.mean(self.record_count))

    @property
    def expected_count_se(self) -> float:
        if self.n_paths < 2:
            return float("nan")
        return float(np.std(self.record_count, ddof=1) / math.sqrt(self.n_paths))

    def arrival_pmf(self, k: int, j: int) -> float:
        """Empirical ``P(T(k) = j)`` for ``k`` in {2, 3}."""
        if k == 2:
            return float(np.mean(self.t2 == j))
        if k == 3:
            return float(np.mean(self.t3 == j))
        raise ValidationError(f"only T(2) and T(3) are tracked, got k={k!r}")


def _record_indicators(x: np.ndarray) -> np.ndarray:
    """Strict-record indicator matrix; time 1 is always a record.

    ``x`` has shape (paths, n) or (paths, n, d); a multivariate record is
    complete (every component beats its own running maximum).
    """
    prev = np.maximum.accumulate(x, axis=1)[:, :-1]
    ind = np.empty(x.shape[:2], dtype=bool)
    ind[:, 0] = True
    beat = x[:, 1:] > prev
    ind[:, 1:] = beat if x.ndim == 2 else beat.all(axis=2)
    return ind


def _path_generator(process: Process, n: int) -> Callable[[np.random.Generator, int], np.ndarray]:
    if isinstance(process, CorrelationModel):
        if not process.simulable:
            raise ValidationError(
                f"{process.label} specifies a per-horizon record target, "
                "not a simulable stationary sequence"
            )
        if process.kind == "iid":
            return lambda rng, k: rng.standard_normal((k, n))
        if process.kind == "ar1":
            phi = process.phi
            sd = math.sqrt(1.0 - phi * phi)

            def ar1(rng: np.random.Generator, k: int) -> np.ndarray:
                out = np.empty((k, n))
                out[:, 0] = rng.standard_normal(k)
                eps = rng.standard_normal((k, n - 1))
                for t in range(1, n):
                    out[:, t] = phi * out[:, t - 1] + sd * eps[:, t - 1]
                return out

            return ar1
        if n > _DENSE_CAP:
            raise ValidationError(
                f"dense path generation needs n <= {_DENSE_CAP}, got n={n}"
            )
        lower = cholesky(process.matrix(n))
        return lambda rng, k: rng.standard_normal((k, n)) @ lower.T
    if isinstance(process, CrossCorrelationModel):
        if n * process.d > _DENSE_CAP:
            raise ValidationError(
                f"dense path generation needs n*d <= {_DENSE_CAP}, "
                f"got {n * process.d}"
            )
        lower = cholesky(process.matrix(n))
        d = process.d
        return lambda rng, k: (rng.standard_normal((k, n * d)) @ lower.T).reshape(k, n, d)
    if isinstance(process, ChernickProcess):
        m = process.m

        def chernick(rng: np.random.Generator, k: int) -> np.ndarray:
            out = np.empty((k, n))
            prev = rng.random(k)
            eps = rng.integers(0, m, (k, n)) / m
            for t in range(n):
                prev = prev / m + eps[:, t]
                out[:, t] = prev
            return out

        return chernick
    if isinstance(process, StableMaProcess):
        coeffs = process.coeffs
        q = len(coeffs)

        def stable_ma(rng: np.random.Generator, k: int) -> np.ndarray:
            eps = _stable_draws(rng, process.alpha, process.kappa, (k, n + q))
            out = np.zeros((k, n))
            for i, c in enumerate(coeffs):
                if c != 0.0:
                    out += c * eps[:, q - i : q - i + n]
            return out

        return stable_ma
    raise ValidationError(f"unsupported process {process!r}")


def simulate_records(
    study: SimStudy,
    *,
    keep_indicators: bool = False,
    keep_paths: bool = False,
    collect_values_from: int | None = None,
) -> EmpiricalRecordStats:
    """Simulate the study and summarize its record behaviour.

    ``collect_values_from`` pools ``(index, value)`` pairs of every record
    at a 1-based index at or beyond the threshold, for record-value
    distribution checks.  ``keep_paths`` / ``keep_indicators`` retain the
    raw matrices (memory permitting) for estimators that need them.
    """
    n, total = study.n, study.n_paths
    univariate = study.dim == 1
    counts = np.zeros(n)
    record_count = np.empty(total, dtype=np.int64)
    t2 = np.full(total, -1, dtype=np.int64)
    t3 = np.full(total, -1, dtype=np.int64)
    inc1 = np.full(total, np.nan)
    inc2 = np.full(total, np.nan)
    max_value = np.full(total, np.nan)
    pooled_i: list[np.ndarray] = []
    pooled_v: list[np.ndarray] = []
    indicators = np.empty((total, n), dtype=bool) if keep_indicators else None
    shape = (total, n) if univariate else (total, n, study.dim)
    paths = np.empty(shape) if keep_paths else None
    gen = _path_generator(study.process, n)
    offset = 0
    chunk_idx = 0
    while offset < total:
        k = min(_CHUNK, total - offset)
        rng = config.rng(study.seed, 0x70617468, chunk_idx)
        x = gen(rng, k)
        if study.margin is not None:
            x = np.asarray(study.margin(x), dtype=float)
        ind = _record_indicators(x)
        sl = slice(offset, offset + k)
        counts += ind.sum(axis=0)
        record_count[sl] = ind.sum(axis=1)
        later = ind[:, 1:]
        rows = np.arange(k)
        has2 = later.any(axis=1)
        first = later.argmax(axis=1)
        t2c = np.where(has2, first + 2, -1)
        cum = later.cumsum(axis=1)
        has3 = cum[:, -1] >= 2
        second = (later & (cum == 2)).argmax(axis=1)
        t3c = np.where(has3, second + 2, -1)
        t2[sl], t3[sl] = t2c, t3c
        if univariate:
            i1 = np.full(k, np.nan)
            i1[has2] = x[rows[has2], t2c[has2] - 1] - x[has2, 0]
            i2 = np.full(k, np.nan)
            i2[has3] = (
                x[rows[has3], t3c[has3] - 1] - x[rows[has3], t2c[has3] - 1]
            )
            inc1[sl], inc2[sl] = i1, i2
            max_value[sl] = x.max(axis=1)
            if collect_values_from is not None:
                rr, cc = np.nonzero(ind[:, collect_values_from - 1 :])
                pooled_i.append(cc + collect_values_from)
                pooled_v.append(x[rr, cc + collect_values_from - 1])
        if keep_indicators:
            indicators[sl] = ind
        if keep_paths:
            paths[sl] = x
        offset += k
        chunk_idx += 1
    rate = counts / total
    if total >= 2:
        se = np.sqrt(rate * (1.0 - rate) / total)
    else:
        se = np.full(n, np.nan)
    return EmpiricalRecordStats(
        process=study.label,
        n=n,
        n_paths=total,
        record_rate=rate,
        record_se=se,
        record_count=record_count,
        t2=t2,
        t3=t3,
        inc1=inc1,
        inc2=inc2,
        max_value=max_value,
        pooled_record_index=(
            np.concatenate(pooled_i) if pooled_i else np.empty(0, dtype=np.int64)
        ),
        pooled_record_value=(
            np.concatenate(pooled_v) if pooled_v else np.empty(0)
        ),
        indicators=indicators,
        paths=paths,
    )


def simulate_chernick(
    m: int,
    n: int,
    n_paths: int,
    seed: int = 0,
    *,
    keep_paths: bool = False,
    collect_values_from: int | None = None,
) -> EmpiricalRecordStats:
    """Simulate the uniform autoregression exactly and count its records."""
    study = SimStudy(ChernickProcess(m), n=n, n_paths=n_paths, seed=seed)
    return simulate_records(
        study, keep_paths=keep_paths, collect_values_from=collect_values_from
    )


def simulate_stable_ma(
    coeffs,
    alpha: float,
    kappa: float,
    n: int,
    n_paths: int,
    seed: int = 0,
    *,
    keep_paths: bool = False,
) -> EmpiricalRecordStats:
    """Simulate the stable moving average (with burn-in) and its records."""
    study = SimStudy(
        StableMaProcess(tuple(coeffs), alpha, kappa), n=n, n_paths=n_paths, seed=seed
    )
    return simulate_records(study, keep_paths=keep_paths)


def _stable_draws(
    rng: np.random.Generator, alpha: float, kappa: float, shape
) -> np.ndarray:
    """Chambers-Mallows-Stuck draws matching the target characteristic function.

    The target law has characteristic function
    ``exp(-|x|**alpha * (1 - i*kappa*sgn(x)*h(x, alpha)))`` with
    ``h = tan(alpha*pi/2)`` for ``alpha != 1`` and
    ``h(x, 1) = (2/pi)*log|x|``.  In the classical S1 parametrization this
    is skewness ``beta = kappa`` for ``alpha != 1``; the ``alpha = 1``
    branch flips the sign (its log term enters with the opposite sign), so
    there ``beta = -kappa``.  Unit scale avoids the well-known
    ``alpha = 1`` rescaling shift entirely.
    """
    u = (rng.random(shape) - 0.5) * math.pi
    w = rng.standard_exponential(shape)
    if abs(alpha - 1.0) < 1e-12:
        beta = -kappa
        half_pi = math.pi / 2.0
        bu = half_pi + beta * u
        x = (
            bu * np.tan(u)
            - beta * np.log(half_pi * w * np.cos(u) / bu)
        ) / half_pi
        return x
    beta = kappa
    tb = beta * math.tan(math.pi * alpha / 2.0)
    b0 = math.atan(tb) / alpha
    s = (1.0 + tb * tb) ** (1.0 / (2.0 * alpha))
    return (
        s
        * np.sin(alpha * (u + b0))
        / np.cos(u) ** (1.0 / alpha)
        * (np.cos(u - alpha * (u + b0)) / w) ** ((1.0 - alpha) / alpha)
    )


def sample_stable(alpha: float, kappa: float, count: int, seed: int = 0) -> np.ndarray:
    """Draw iid unit-scale stable variates.

    The parametrization follows the moving-average model's characteristic
    function (see :func:`_stable_draws`); ``alpha = 2`` gives a centred
    Gaussian with variance 2, ``alpha = 1, kappa = 0`` the standard Cauchy.
    """
    if not 0 < alpha <= 2:
        raise ValidationError(f"alpha must be in (0, 2], got {alpha!r}")
    if not -1 <= kappa <= 1:
        raise ValidationError(f"kappa must be in [-1, 1], got {kappa!r}")
    if count < 0:
        raise ValidationError(f"count must be >= 0, got {count!r}")
    if count == 0:
        return np.empty(0)
    rng = config.rng(seed, 0x737462)
    return _stable_draws(rng, alpha, kappa, (count,))


def empirical_extremal_index(
    paths,
    *,
    r: int | None = None,
    q: float = 0.95,
    n_boot: int = 200,
    seed: int = 0,
) -> ExtremalIndex:
    """Runs estimator of the extremal index from simulated paths.

    ``paths`` is a (n_paths, n) matrix.  With ``u`` the pooled empirical
    ``q``-quantile, the estimator is the fraction of exceedances of ``u``
    that are followed by ``r - 1`` non-exceedances, over all windows that
    fit in the horizon; the confidence interval is a path-level bootstrap
    percentile interval.  Defaults: ``r = ceil(sqrt(n))``, ``q = 0.95``.
    """
    paths = np.atleast_2d(np.asarray(paths, dtype=float))
    n_paths, n = paths.shape
    if r is None:
        r = math.ceil(math.sqrt(n))
    if r < 2 or r >= n:
        raise ValidationError(f"block length must satisfy 2 <= r < n, got r={r!r}")
    if not 0.8 < q < 1:
        raise ValidationError(f"threshold quantile must be in (0.8, 1), got {q!r}")
    threshold = float(np.quantile(paths, q))
    exceed = paths > threshold
    windows = sliding_window_view(exceed, r, axis=1)
    runs = windows[:, :, 0] & ~windows[:, :, 1:].any(axis=2)
    num = runs.sum(axis=1).astype(float)
    den = exceed[:, : n - r + 1].sum(axis=1).astype(float)
    total_den = float(den.sum())
    if total_den < _MIN_EXCEEDANCES:
        raise InsufficientExceedances(
            f"only {int(total_den)} exceedances above the {q:.0%} threshold; "
            f"need at least {_MIN_EXCEEDANCES}"
        )
    theta = float(num.sum() / total_den)
    rng = config.rng(seed, 0x626F6F74)
    draws = rng.integers(0, n_paths, (n_boot, n_paths))
    boot_num = num[draws].sum(axis=1)
    boot_den = den[draws].sum(axis=1)
    ok = boot_den > 0
    samples = boot_num[ok] / boot_den[ok]
    ci = (float(np.percentile(samples, 2.5)), float(np.percentile(samples, 97.5)))
    spread = float(np.std(samples, ddof=1)) if samples.size >= 2 else 0.0
    return ExtremalIndex(
        theta=theta,
        provenance="empirical",
        abs_error=spread,
        ci=ci,
        details={
            "r": float(r),
            "q": float(q),
            "threshold": threshold,
            "exceedances": total_den,
            "n_boot": float(n_boot),
        },
    )
