"""Correlation models for stationary (and formally stationary) sequences.

A :class:`CorrelationModel` describes the autocorrelation of a standardized
Gaussian sequence.  Most kinds are genuinely stationary (``iid``, ``ar1``,
``equicorrelated``, ``tabulated``, ``explicit``); the ``gamma_identity``
kind is a per-horizon family used for the expected-records dichotomy: for
each target index n it prescribes corr(X_i, X_n) = c and corr(X_i, X_j) =
2c - 1 for i, j < n, which makes the record-law matrix proportional to the
identity.  No single stationary sequence realizes that structure for every
n at once, so the kind is marked non-simulable and its full matrix is not
positive definite beyond small n; only the entrywise record-law builder
accepts it.

:class:`CrossCorrelationModel` extends this to d components with lag
blocks, expanded time-major into an (n d) x (n d) matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import NotPositiveDefinite
from .linalg import cholesky, symmetrize

_VALID_KINDS = ("iid", "ar1", "equicorrelated", "tabulated", "explicit", "gamma_identity")


@dataclass(frozen=True)
class CorrelationModel:
    """Autocorrelation of a standardized stationary Gaussian sequence."""

    kind: str
    phi: float | None = None
    rho: float | None = None
    table: tuple[float, ...] | None = None
    values: np.ndarray | None = None
    c: float | None = None

    def __post_init__(self):
        if self.kind not in _VALID_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.kind == "ar1":
            if self.phi is None or not -1.0 < self.phi < 1.0:
                raise ValueError(f"ar1 requires |phi| < 1, got {self.phi}")
        if self.kind == "equicorrelated":
            if self.rho is None or not -1.0 < self.rho < 1.0:
                raise ValueError(f"equicorrelated requires |rho| < 1, got {self.rho}")
        if self.kind == "tabulated":
            if not self.table:
                raise ValueError("tabulated requires at least one lag correlation")
            if any(abs(r) >= 1.0 for r in self.table):
                raise ValueError("tabulated lag correlations must satisfy |rho| < 1")
        if self.kind == "explicit":
            a = symmetrize(np.asarray(self.values, dtype=float), "explicit correlation")
            if np.max(np.abs(np.diag(a) - 1.0)) > 1e-12:
                raise ValueError("explicit correlation matrix must have a unit diagonal")
            cholesky(a, name="explicit correlation")
            object.__setattr__(self, "values", a)
        if self.kind == "gamma_identity":
            if self.c is None or not 0.0 < self.c < 1.0:
                raise ValueError(f"gamma_identity requires c in (0, 1), got {self.c}")

    # -- constructors -----------------------------------------------------

    @classmethod
    def iid(cls) -> "CorrelationModel":
        return cls(kind="iid")

    @classmethod
    def ar1(cls, phi: float) -> "CorrelationModel":
        return cls(kind="ar1", phi=float(phi))

    @classmethod
    def equicorrelated(cls, rho: float) -> "CorrelationModel":
        return cls(kind="equicorrelated", rho=float(rho))

    @classmethod
    def tabulated(cls, lag_corrs) -> "CorrelationModel":
        """Correlations for lags 1..H; zero beyond the table."""
        return cls(kind="tabulated", table=tuple(float(r) for r in lag_corrs))

    @classmethod
    def explicit(cls, matrix) -> "CorrelationModel":
        """A fully specified correlation matrix (leading submatrices used)."""
        return cls(kind="explicit", values=np.asarray(matrix, dtype=float))

    @classmethod
    def gamma_identity(cls, c: float = 0.5) -> "CorrelationModel":
        return cls(kind="gamma_identity", c=float(c))

    # -- queries ----------------------------------------------------------

    @property
    def stationary(self) -> bool:
        return self.kind in ("iid", "ar1", "equicorrelated", "tabulated")

    @property
    def simulable(self) -> bool:
        return self.kind != "gamma_identity"

    def rho_at(self, lag: int) -> float:
        """Autocorrelation at a positive lag (stationary kinds only)."""
        lag = abs(int(lag))
        if lag == 0:
            return 1.0
        if self.kind == "iid":
            return 0.0
        if self.kind == "ar1":
            return self.phi ** lag
        if self.kind == "equicorrelated":
            return self.rho
        if self.kind == "tabulated":
            return self.table[lag - 1] if lag <= len(self.table) else 0.0
        raise ValueError(f"model kind {self.kind!r} has no single lag correlation")

    def corr(self, i: int, j: int, n: int | None = None) -> float:
        """corr(X_i, X_j) (1-based); ``gamma_identity`` needs the horizon n."""
        if i == j:
            return 1.0
        if self.stationary:
            return self.rho_at(j - i)
        if self.kind == "explicit":
            d = self.values.shape[0]
            if max(i, j) > d:
                raise ValueError(f"explicit model only covers indices 1..{d}")
            return float(self.values[i - 1, j - 1])
        # gamma_identity: correlations relative to the target index n
        if n is None:
            raise ValueError("gamma_identity correlations require the horizon n")
        if i == n or j == n:
            return self.c
        return 2.0 * self.c - 1.0

    def matrix(self, n: int) -> np.ndarray:
        """The n x n correlation matrix, validated positive definite.

        Raises :class:`NotPositiveDefinite` when the expansion is invalid
        (e.g. equicorrelated with rho <= -1/(n-1), or ``gamma_identity``
        beyond the horizon where its formal matrix degenerates).
        """
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        a = np.empty((n, n))
        for i in range(1, n + 1):
            a[i - 1, i - 1] = 1.0
            for j in range(i + 1, n + 1):
                a[i - 1, j - 1] = a[j - 1, i - 1] = self.corr(i, j, n)
        cholesky(a, name=f"{self.kind} correlation matrix (n={n})")
        return a

    @property
    def label(self) -> str:
        """Short text form used in CSV output and CLI echoes."""
        if self.kind == "iid":
            return "iid"
        if self.kind == "ar1":
            return f"ar1({self.phi:g})"
        if self.kind == "equicorrelated":
            return f"eq({self.rho:g})"
        if self.kind == "tabulated":
            return "tab(" + ",".join(f"{r:g}" for r in self.table) + ")"
        if self.kind == "explicit":
            return f"explicit[{self.values.shape[0]}]"
        return f"gamma-identity({self.c:g})"


@dataclass(frozen=True)
class CrossCorrelationModel:
    """Cross- and auto-correlation of a d-component stationary sequence.

    ``lag_blocks[h]`` is the d x d matrix of corr(X_t^{(i)}, X_{t+h}^{(j)});
    lags beyond the table are zero.  ``lag_blocks[0]`` must be a valid
    correlation matrix and every block must satisfy B(-h) = B(h)^T (blocks
    are stored for h >= 0 and must therefore be symmetric themselves for
    the expanded matrix to be symmetric under this representation).
    """

    d: int
    lag_blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"d must be >= 1, got {self.d}")
        blocks = []
        for h, b in enumerate(self.lag_blocks):
            b = symmetrize(np.asarray(b, dtype=float), f"lag-{h} block")
            if b.shape != (self.d, self.d):
                raise ValueError(f"lag-{h} block must be {self.d} x {self.d}")
            blocks.append(b)
        if not blocks:
            raise ValueError("at least the lag-0 block is required")
        if np.max(np.abs(np.diag(blocks[0]) - 1.0)) > 1e-12:
            raise ValueError("the lag-0 block must have a unit diagonal")
        object.__setattr__(self, "lag_blocks", tuple(blocks))

    @classmethod
    def separable(cls, temporal: CorrelationModel, cross, *, horizon: int = 64
                  ) -> "CrossCorrelationModel":
        """Blocks ``rho_temporal(h) * cross``; Kronecker structure keeps the
        expansion positive definite whenever both factors are."""
        cross = symmetrize(np.asarray(cross, dtype=float), "cross correlation")
        cholesky(cross, name="cross correlation")
        if not temporal.stationary:
            raise ValueError("separable cross models need a stationary temporal part")
        blocks = [cross.copy()]
        for h in range(1, horizon + 1):
            r = temporal.rho_at(h)
            blocks.append(r * cross)
            if r == 0.0 and temporal.kind in ("iid", "tabulated"):
                if temporal.kind == "iid" or h > len(temporal.table):
                    blocks.pop()
                    break
        return cls(d=cross.shape[0], lag_blocks=tuple(blocks))

    @classmethod
    def independent(cls, d: int, temporal: CorrelationModel, *, horizon: int = 64
                    ) -> "CrossCorrelationModel":
        """d independent copies of the same temporal model."""
        return cls.separable(temporal, np.eye(d), horizon=horizon)

    def block(self, h: int) -> np.ndarray:
        h = abs(int(h))
        if h < len(self.lag_blocks):
            return self.lag_blocks[h]
        return np.zeros((self.d, self.d))

    def flat_index(self, t: int, i: int) -> int:
        """0-based position of (time t, component i), both 1-based, in the
        time-major expansion."""
        return (t - 1) * self.d + (i - 1)

    def matrix(self, n: int) -> np.ndarray:
        """Time-major (n d) x (n d) correlation matrix, validated PD."""
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        nd = n * self.d
        a = np.empty((nd, nd))
        for s in range(n):
            for t in range(n):
                a[s * self.d : (s + 1) * self.d, t * self.d : (t + 1) * self.d] = \
                    self.block(t - s)
        a = symmetrize(a, "expanded cross-correlation")
        cholesky(a, name=f"expanded cross-correlation (n={n})")
        return a

    @property
    def label(self) -> str:
        return f"cross[d={self.d},H={len(self.lag_blocks) - 1}]"
