"""Asymptotic record laws for stationary sequences with an extremal index.

For a strictly stationary sequence whose maxima obey an extreme-value limit
with extremal index ``theta``, the probability of a record at a large time
``n`` behaves like ``1 / (n * theta)`` and the normalized record values
converge to a power ``G ** theta`` of the underlying generalized
extreme-value (GEV) law.  This module provides the GEV utilities, the
asymptotic record approximations, and closed-form extremal indices for three
worked process families: a max-autoregressive (Chernick) recursion, stable
moving averages, and a Gaussian triangular array parametrized by lag
constants ``delta_k``.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import ndtr

from . import config
from .errors import (
    AllZeroCoefficients,
    InvalidDeltaMatrix,
    MissingDelta,
    ValidationError,
)
from .mvn import MvnProblem, mvn_cdf

__all__ = [
    "GevSpec",
    "ExtremalIndex",
    "gev_cdf",
    "asymptotic_record_prob",
    "gaussian_norming",
    "chernick_theta",
    "stable_ma_theta",
    "hsing_theta",
]

_PROVENANCES = frozenset(
    {"analytic-chernick", "analytic-stable-ma", "analytic-hsing", "empirical"}
)

_GUMBEL_EPS = 1e-8


@dataclass(frozen=True)
class GevSpec:
    """A generalized extreme-value law ``G(x) = exp(-(1 + g*z)**(-1/g))``.

    Here ``z = (x - loc) / scale`` and ``g`` is the shape ``gamma``; the
    Gumbel case ``gamma = 0`` means ``G(x) = exp(-exp(-z))``.  The three
    classic sub-families are exposed as constructors parametrized so that
    their cdfs take the textbook forms ``exp(-exp(-x))``,
    ``exp(-x**-alpha)`` on ``x > 0`` and ``exp(-(-x)**beta)`` on ``x < 0``.
    """

    gamma: float
    loc: float = 0.0
    scale: float = 1.0

    def __post_init__(self) -> None:
        for name in ("gamma", "loc", "scale"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValidationError(f"{name} must be finite, got {value!r}")
        if self.scale <= 0:
            raise ValidationError(f"scale must be positive, got {self.scale!r}")

    @classmethod
    def gumbel(cls) -> GevSpec:
        """The standard Gumbel law ``exp(-exp(-x))``."""
        return cls(gamma=0.0)

    @classmethod
    def frechet(cls, alpha: float) -> GevSpec:
        """The standard Frechet law ``exp(-x**-alpha)`` on ``x > 0``."""
        if not alpha > 0:
            raise ValidationError(f"alpha must be positive, got {alpha!r}")
        return cls(gamma=1.0 / alpha, loc=1.0, scale=1.0 / alpha)

    @classmethod
    def negative_weibull(cls, beta: float) -> GevSpec:
        """The negative Weibull law ``exp(-(-x)**beta)`` on ``x < 0``."""
        if not beta > 0:
            raise ValidationError(f"beta must be positive, got {beta!r}")
        return cls(gamma=-1.0 / beta, loc=-1.0, scale=1.0 / beta)

    @property
    def support(self) -> tuple[float, float]:
        """Lower and upper endpoints of the distribution's support."""
        if abs(self.gamma) < _GUMBEL_EPS:
            return (-math.inf, math.inf)
        edge = self.loc - self.scale / self.gamma
        if self.gamma > 0:
            return (edge, math.inf)
        return (-math.inf, edge)

    def cdf(self, x: float, theta: float = 1.0) -> float:
        """Evaluate ``G(x) ** theta``.

        Parameters
        ----------
        x:
            Evaluation point.
        theta:
            Extremal index in ``(0, 1]``; the limiting record-value law of a
            dependent sequence is the iid limit raised to this power.
        """
        if not 0 < theta <= 1:
            raise ValidationError(f"theta must be in (0, 1], got {theta!r}")
        z = (x - self.loc) / self.scale
        if abs(self.gamma) < _GUMBEL_EPS:
            return float(np.exp(-theta * np.exp(-z)))
        t = 1.0 + self.gamma * z
        if t <= 0:
            return 0.0 if self.gamma > 0 else 1.0
        return float(np.exp(-theta * t ** (-1.0 / self.gamma)))


@dataclass(frozen=True)
class ExtremalIndex:
    """An extremal index together with how it was obtained.

    ``provenance`` is one of ``analytic-chernick``, ``analytic-stable-ma``,
    ``analytic-hsing`` or ``empirical``.  Analytic values carry an
    ``abs_error`` bound (zero for pure arithmetic); empirical estimates carry
    a bootstrap confidence interval instead.  ``gev`` records the limiting
    law of normalized maxima for the family when one is known.  Note the
    stable moving-average formula absorbs the stable tail constant, so its
    ``theta`` is not confined to ``(0, 1]``.
    """

    theta: float
    provenance: str
    abs_error: float = 0.0
    ci: tuple[float, float] | None = None
    gev: GevSpec | None = None
    details: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.provenance not in _PROVENANCES:
            raise ValidationError(
                f"unknown provenance {self.provenance!r}; "
                f"expected one of {sorted(_PROVENANCES)}"
            )
        if not math.isfinite(self.theta) or self.theta < 0:
            raise ValidationError(
                f"theta must be finite and non-negative, got {self.theta!r}"
            )
        if self.abs_error < 0:
            raise ValidationError(
                f"abs_error must be non-negative, got {self.abs_error!r}"
            )
        if self.ci is not None:
            lo, hi = self.ci
            if not lo <= hi:
                raise ValidationError(f"ci must satisfy lo <= hi, got {self.ci!r}")

    @property
    def in_standard_range(self) -> bool:
        """Whether ``theta`` lies in the canonical range ``(0, 1]``."""
        return 0 < self.theta <= 1


def gev_cdf(x: float, spec: GevSpec, theta: float = 1.0) -> float:
    """Evaluate the limiting record-value cdf ``G(x) ** theta``."""
    return spec.cdf(x, theta=theta)


def asymptotic_record_prob(theta: float, n: int) -> float:
    """Asymptotic approximation ``1 / (n * theta)`` to the record probability.

    For a stationary sequence with extremal index ``theta``,
    ``n * P(record at n)`` converges to ``1 / theta``; this returns the
    implied approximation for finite ``n``.  It is an approximation only and
    carries no error estimate.
    """
    if not 0 < theta <= 1:
        raise ValidationError(f"theta must be in (0, 1], got {theta!r}")
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n!r}")
    return 1.0 / (n * theta)


def gaussian_norming(n: int) -> tuple[float, float]:
    """Norming constants ``(a_n, b_n)`` for maxima of standard Gaussians.

    ``a_n = (2 log n) ** -0.5`` and
    ``b_n = 1/a_n - a_n * (log log n + log 4*pi) / 2``, so that
    ``(M_n - b_n) / a_n`` converges to the Gumbel law.
    """
    if n < 3:
        raise ValidationError(f"n must be >= 3, got {n!r}")
    a_n = 1.0 / math.sqrt(2.0 * math.log(n))
    b_n = 1.0 / a_n - a_n * (math.log(math.log(n)) + math.log(4.0 * math.pi)) / 2.0
    return a_n, b_n


def chernick_theta(m: int) -> ExtremalIndex:
    """Extremal index ``(m - 1) / m`` of the uniform max-autoregression.

    The process ``X_t = max((1/m) * X_{t-1}, e_t)`` with suitable iid
    innovations is strictly stationary with uniform margins and extremal
    index ``theta = (m - 1) / m`` for integer ``m >= 2``.  Its normalized
    maxima ``n * (M_n - 1)`` converge to ``exp(theta * x)`` on ``x < 0``,
    the negative Weibull law with unit shape.
    """
    if int(m) != m or m < 2:
        raise ValidationError(f"m must be an integer >= 2, got {m!r}")
    m = int(m)
    return ExtremalIndex(
        theta=(m - 1) / m,
        provenance="analytic-chernick",
        gev=GevSpec.negative_weibull(1.0),
        details={"m": float(m)},
    )


def stable_ma_theta(
    coeffs: Sequence[float], alpha: float, kappa: float = 0.0
) -> ExtremalIndex:
    """Extremal index of a moving average of stable innovations.

    For ``X_t = sum_j c_j * Z_{t-j}`` with iid alpha-stable innovations of
    skewness ``kappa``, the maxima normalized by ``n ** (1/alpha)`` converge
    to ``exp(-theta * x ** -alpha)`` where::

        theta = k_alpha * (c_plus**alpha * (1 + kappa)
                           + c_minus**alpha * (1 - kappa))

    with ``k_alpha = gamma(alpha) * sin(alpha * pi / 2) / pi``,
    ``c_plus = max_j max(c_j, 0)`` and ``c_minus = max_j max(-c_j, 0)``.
    This ``theta`` absorbs the stable tail constant and is therefore not
    confined to ``(0, 1]``.
    """
    values = np.asarray(coeffs, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise ValidationError("coeffs must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(values)):
        raise ValidationError("coeffs must be finite")
    if not 0 < alpha <= 2:
        raise ValidationError(f"alpha must be in (0, 2], got {alpha!r}")
    if not -1 <= kappa <= 1:
        raise ValidationError(f"kappa must be in [-1, 1], got {kappa!r}")
    if np.all(values == 0):
        raise AllZeroCoefficients("at least one coefficient must be nonzero")
    c_plus = float(np.max(np.maximum(values, 0.0)))
    c_minus = float(np.max(np.maximum(-values, 0.0)))
    k_alpha = gamma_fn(alpha) * math.sin(alpha * math.pi / 2.0) / math.pi
    theta = k_alpha * (c_plus**alpha * (1.0 + kappa) + c_minus**alpha * (1.0 - kappa))
    return ExtremalIndex(
        theta=theta,
        provenance="analytic-stable-ma",
        gev=GevSpec.frechet(alpha),
        details={
            "alpha": float(alpha),
            "kappa": float(kappa),
            "c_plus": c_plus,
            "c_minus": c_minus,
            "k_alpha": float(k_alpha),
        },
    )


def _hsing_sigma(deltas: Mapping[int, float], kset: tuple[int, ...]) -> np.ndarray:
    """Correlation matrix of the finite-lag block of the triangular array."""
    size = len(kset)
    sigma = np.eye(size)
    for a in range(size):
        for b in range(a + 1, size):
            lag = abs(kset[a] - kset[b])
            if lag not in deltas:
                raise MissingDelta(
                    f"entry ({kset[a]}, {kset[b]}) needs delta_{lag}, "
                    "which is not in the map"
                )
            d_lag = deltas[lag]
            if math.isinf(d_lag):
                raise InvalidDeltaMatrix(
                    f"delta_{lag} must be finite because lags {kset[a]} and "
                    f"{kset[b]} are both finite"
                )
            d_a, d_b = deltas[kset[a]], deltas[kset[b]]
            sigma[a, b] = sigma[b, a] = (d_a + d_b - d_lag) / (
                2.0 * math.sqrt(d_a * d_b)
            )
    if np.any(np.abs(sigma) > 1.0 + 1e-12):
        raise InvalidDeltaMatrix(
            "delta map induces correlations outside [-1, 1]"
        )
    eigvals = np.linalg.eigvalsh(sigma)
    if eigvals[0] < -1e-10 * max(1.0, eigvals[-1]):
        raise InvalidDeltaMatrix(
            f"delta map induces a non-PSD matrix (min eigenvalue {eigvals[0]:.3e})"
        )
    return np.clip(sigma, -1.0, 1.0)


def hsing_theta(
    deltas: Mapping[int, float],
    *,
    tol: float = 1e-8,
    seed: int = 0,
) -> ExtremalIndex:
    """Extremal index of the Gaussian triangular array with lag constants.

    ``deltas`` maps positive lags ``k`` to constants ``delta_k`` in
    ``(0, inf]``; infinite entries mean asymptotic independence at that lag.
    With ``K = {k : delta_k < inf}`` the extremal index is::

        theta = E[ Phi_{|K|}( sqrt(d_k) - U / (2 sqrt(d_k)), k in K; Sigma ) ]

    for a standard exponential ``U``, where ``Sigma`` has entries
    ``(d_i + d_j - d_{|i-j|}) / (2 sqrt(d_i d_j))``.  The expectation is
    computed by Gauss-Laguerre quadrature with order doubling until the
    change falls below ``tol``; multivariate normal values are evaluated to
    a matching tolerance (floored at 1e-6 for dimensions above two).
    """
    if tol <= 0:
        raise ValidationError(f"tol must be positive, got {tol!r}")
    clean: dict[int, float] = {}
    for key, value in deltas.items():
        if int(key) != key or key < 1:
            raise ValidationError(f"lags must be positive integers, got {key!r}")
        value = float(value)
        if math.isnan(value) or value <= 0:
            raise ValidationError(
                f"delta_{int(key)} must be in (0, inf], got {value!r}"
            )
        clean[int(key)] = value
    kset = tuple(sorted(k for k, v in clean.items() if math.isfinite(v)))
    if not kset:
        return ExtremalIndex(
            theta=1.0, provenance="analytic-hsing", gev=GevSpec.gumbel()
        )
    sigma = _hsing_sigma(clean, kset)
    # Regularize an exactly singular PSD matrix so the Cholesky-based
    # integrator can proceed.
    if np.linalg.eigvalsh(sigma)[0] < 1e-10:
        sigma = sigma + 1e-10 * np.eye(len(kset))
    sqrt_d = np.sqrt(np.array([clean[k] for k in kset]))
    mvn_tol = max(tol / 10.0, 1e-6) if len(kset) > 2 else max(tol / 10.0, 1e-10)

    def integrand(u: float, tag: int) -> tuple[float, float]:
        upper = sqrt_d - u / (2.0 * sqrt_d)
        if len(kset) == 1:
            return float(ndtr(upper[0])), 0.0
        problem = MvnProblem.lower_orthant(upper, cov=sigma)
        result = mvn_cdf(problem, tol=mvn_tol, seed=config.subseed(seed, tag))
        return result.value, result.abs_error

    order = 8
    previous = None
    estimate = 0.0
    numeric_error = 0.0
    quad_error = math.inf
    while order <= 512:
        nodes, weights = np.polynomial.laguerre.laggauss(order)
        values = np.empty(order)
        errors = np.empty(order)
        for i, u in enumerate(nodes):
            values[i], errors[i] = integrand(float(u), order * 1000 + i)
        estimate = float(weights @ values)
        numeric_error = float(weights @ errors)
        if previous is not None:
            quad_error = abs(estimate - previous)
            if quad_error <= tol:
                break
        previous = estimate
        order *= 2
    return ExtremalIndex(
        theta=min(max(estimate, 0.0), 1.0),
        provenance="analytic-hsing",
        abs_error=quad_error + numeric_error,
        gev=GevSpec.gumbel(),
        details={"order": float(order), "block": float(len(kset))},
    )
