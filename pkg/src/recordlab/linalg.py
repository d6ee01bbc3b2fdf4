"""Correlation-matrix building blocks: validation, Cholesky, conditioning.

Everything downstream (Gaussian integrals, skew-normal laws, record
probabilities) funnels through the two primitives here: a Cholesky
factorization that reports *which* leading minor fails, and the standard
Gaussian conditioning decomposition ``Z_{I^c} | Z_I`` returned with its
pieces standardized.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import lapack

from .errors import EmptyPartition, NotPositiveDefinite

#: Relative tolerance for symmetry checks.
SYMMETRY_RTOL = 1e-12


def _as_square(values, name: str = "matrix") -> np.ndarray:
    a = np.asarray(values, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    if a.size and not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def symmetrize(values, name: str = "matrix") -> np.ndarray:
    """Validate near-symmetry and return the exactly symmetric average."""
    a = _as_square(values, name)
    if a.size == 0:
        return a
    scale = max(1.0, float(np.max(np.abs(a))))
    gap = float(np.max(np.abs(a - a.T)))
    if gap > SYMMETRY_RTOL * scale:
        raise ValueError(f"{name} is not symmetric (asymmetry {gap:.3e})")
    return 0.5 * (a + a.T)


def cholesky(values, *, jitter: float = 0.0, name: str = "matrix") -> np.ndarray:
    """Lower Cholesky factor with positive diagonal.

    Parameters
    ----------
    values : array_like
        Symmetric matrix (validated to ``SYMMETRY_RTOL``).
    jitter : float
        Optional non-negative ridge added to the diagonal before factoring.
        Off by default; regularization is always opt-in.

    Raises
    ------
    NotPositiveDefinite
        If factorization fails; ``minor_index`` carries the 1-based order of
        the offending leading principal minor.
    """
    a = symmetrize(values, name)
    if jitter < 0.0:
        raise ValueError(f"jitter must be >= 0, got {jitter}")
    if jitter:
        a = a + jitter * np.eye(a.shape[0])
    if a.shape[0] == 0:
        return a.copy()
    c, info = lapack.dpotrf(a, lower=1, clean=1)
    if info > 0:
        raise NotPositiveDefinite(f"{name} is not positive definite", minor_index=int(info))
    if info < 0:
        raise ValueError(f"invalid argument {-info} to Cholesky factorization")
    return c


def is_positive_definite(values) -> bool:
    """True if the symmetric matrix factors without jitter."""
    try:
        cholesky(values)
    except (NotPositiveDefinite, ValueError):
        return False
    return True


def standardize(cov, name: str = "covariance") -> tuple[np.ndarray, np.ndarray]:
    """Split a covariance matrix into (correlation, standard deviations).

    The returned correlation matrix has an exactly unit diagonal.
    """
    a = symmetrize(cov, name)
    d = np.diag(a)
    if a.size and np.any(d <= 0.0):
        raise NotPositiveDefinite(f"{name} has a non-positive diagonal entry")
    sd = np.sqrt(d)
    corr = a / np.outer(sd, sd) if a.size else a.copy()
    if corr.size:
        np.fill_diagonal(corr, 1.0)
    return corr, sd


@dataclass(frozen=True)
class CorrMatrix:
    """A validated correlation matrix (symmetric, unit diagonal, PD)."""

    values: np.ndarray

    def __post_init__(self):
        a = symmetrize(self.values, "correlation matrix")
        if a.size:
            if np.max(np.abs(np.diag(a) - 1.0)) > 1e-12:
                raise ValueError("correlation matrix must have a unit diagonal")
            if np.max(np.abs(a)) > 1.0 + 1e-12:
                raise ValueError("correlation entries must lie in [-1, 1]")
        cholesky(a, name="correlation matrix")
        object.__setattr__(self, "values", a)

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    @classmethod
    def from_array(cls, values) -> "CorrMatrix":
        return cls(np.asarray(values, dtype=float))


@dataclass(frozen=True)
class ConditionalGaussian:
    """The law of ``Z_{I^c} | Z_I = z`` for a centered Gaussian vector.

    Attributes
    ----------
    mean_map : ndarray, shape (|I^c|, |I|)
        Matrix ``A`` with conditional mean ``A z``.
    cond_cov : ndarray
        Conditional covariance (Schur complement).
    std_diag : ndarray
        Conditional standard deviations, ``sqrt(diag(cond_cov))``.
    cond_corr : ndarray
        Standardized conditional covariance with exact unit diagonal.
    cond_idx : tuple of int
        Conditioning indices, 1-based, ascending.
    complement : tuple of int
        Remaining indices, 1-based, ascending; rows of ``mean_map`` and of
        ``cond_cov`` follow this order.
    """

    mean_map: np.ndarray
    cond_cov: np.ndarray
    std_diag: np.ndarray
    cond_corr: np.ndarray
    cond_idx: tuple[int, ...]
    complement: tuple[int, ...]


def condition(full, cond_idx: Iterable[int]) -> ConditionalGaussian:
    """Condition a centered Gaussian vector on the coordinates ``cond_idx``.

    Parameters
    ----------
    full : array_like or CorrMatrix
        Covariance (or correlation) matrix of the full vector.
    cond_idx : iterable of int
        1-based indices of the conditioning coordinates; must be a non-empty
        proper subset of ``{1, ..., dim}``.
    """
    a = symmetrize(np.asarray(full, dtype=float), "covariance matrix")
    d = a.shape[0]
    idx = sorted(set(int(i) for i in cond_idx))
    if not idx:
        raise EmptyPartition("conditioning index set is empty")
    if idx[0] < 1 or idx[-1] > d:
        raise EmptyPartition(f"conditioning indices must lie in 1..{d}, got {idx}")
    if len(idx) >= d:
        raise EmptyPartition("conditioning on every coordinate leaves nothing to condition")
    comp = [i for i in range(1, d + 1) if i not in set(idx)]
    ii = np.array(idx) - 1
    cc = np.array(comp) - 1

    sig_ii = a[np.ix_(ii, ii)]
    sig_ci = a[np.ix_(cc, ii)]
    sig_cc = a[np.ix_(cc, cc)]
    chol_ii = cholesky(sig_ii, name="conditioning block")
    # mean_map = Sigma_{CI} Sigma_{II}^{-1} via two triangular solves
    tmp = np.linalg.solve(chol_ii, sig_ci.T)
    mean_map = np.linalg.solve(chol_ii.T, tmp).T
    cond_cov = symmetrize(sig_cc - mean_map @ sig_ci.T, "conditional covariance")
    var = np.diag(cond_cov)
    if np.any(var <= 0.0):
        raise NotPositiveDefinite("conditional covariance has a non-positive variance")
    cond_corr, sd = standardize(cond_cov, "conditional covariance")
    return ConditionalGaussian(
        mean_map=mean_map,
        cond_cov=cond_cov,
        std_diag=sd,
        cond_corr=cond_corr,
        cond_idx=tuple(idx),
        complement=tuple(comp),
    )


def submatrix(full, indices: Sequence[int]) -> np.ndarray:
    """The principal submatrix over 1-based ``indices`` (in given order)."""
    a = np.asarray(full, dtype=float)
    ii = np.array([int(i) - 1 for i in indices])
    return a[np.ix_(ii, ii)].copy()
