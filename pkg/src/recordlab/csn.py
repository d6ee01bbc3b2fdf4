"""Closed skew-normal distributions.

A CSN(xi, omega, delta, mu, sigma) law on R^m with n latent constraints is
the conditional distribution of ``U`` given ``delta (U - xi) + V > mu``,
where ``U ~ N(xi, omega)`` and ``V ~ N(0, sigma)`` are independent.  Its
density is

    phi_m(x - xi; omega) * Phi_n(delta (x - xi); mu, sigma) / Phi_n(0; mu, gamma)

with ``gamma = sigma + delta omega delta^T``.  The class is closed under
full-row-rank affine maps, and its distribution function is a ratio of two
Gaussian orthant integrals: the numerator lives on the (n+m)-dimensional
embedding covariance ``[[gamma, -delta omega], [-omega delta^T, omega]]``
evaluated at ``(-mu, x - xi)``.  ``n = 0`` degenerates to a plain Gaussian.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import config
from .errors import (
    AcceptanceTooLow,
    DegenerateNormalization,
    RankDeficient,
)
from .linalg import cholesky, symmetrize
from .mvn import DEFAULT_MAX_DIM, MvnProblem, MvnResult, mvn_cdf

#: Normalizing probabilities below this are treated as degenerate.
_NORMALIZER_FLOOR = 1e-12

#: Rejection sampling refuses to run below this acceptance probability.
_ACCEPTANCE_FLOOR = 1e-4


@dataclass(frozen=True)
class Estimate:
    """A numerical value with an absolute error estimate."""

    value: float
    abs_error: float


@dataclass(frozen=True)
class CsnSample:
    """Rejection-sampler output with acceptance diagnostics."""

    values: np.ndarray
    acceptance_rate: float
    expected_acceptance: float
    n_proposals: int


@dataclass(frozen=True)
class CsnParams:
    """Parameters of a CSN_{m,n} law.

    ``xi`` (m,), ``omega`` (m, m) positive definite, ``delta`` (n, m),
    ``mu`` (n,), ``sigma`` (n, n) positive definite; ``n = 0`` is allowed
    and means no latent constraint (a plain N(xi, omega)).
    """

    xi: np.ndarray
    omega: np.ndarray
    delta: np.ndarray
    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        omega = symmetrize(np.asarray(self.omega, dtype=float), "omega")
        m = omega.shape[0]
        if m == 0:
            raise ValueError("omega must have positive dimension")
        xi = np.broadcast_to(np.asarray(self.xi, dtype=float), (m,)).copy()
        delta = np.asarray(self.delta, dtype=float)
        if delta.ndim != 2 or delta.shape[1] != m:
            raise ValueError(f"delta must have shape (n, {m}), got {delta.shape}")
        n = delta.shape[0]
        mu = np.broadcast_to(np.asarray(self.mu, dtype=float), (n,)).copy()
        sigma = symmetrize(np.asarray(self.sigma, dtype=float), "sigma")
        if sigma.shape[0] != n:
            raise ValueError(f"sigma must have shape ({n}, {n}), got {sigma.shape}")
        cholesky(omega, name="omega")
        if n:
            cholesky(sigma, name="sigma")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    @property
    def m(self) -> int:
        return self.omega.shape[0]

    @property
    def n(self) -> int:
        return self.delta.shape[0]

    @cached_property
    def gamma_mat(self) -> np.ndarray:
        """``sigma + delta omega delta^T`` (validated positive definite)."""
        g = symmetrize(self.sigma + self.delta @ self.omega @ self.delta.T, "gamma")
        if g.size:
            cholesky(g, name="gamma")
        return g

    @classmethod
    def standard(cls, delta, sigma, *, omega=None) -> "CsnParams":
        """CSN with ``xi = 0``, ``mu = 0`` and identity ``omega`` by default."""
        delta = np.asarray(delta, dtype=float)
        m = delta.shape[1]
        if omega is None:
            omega = np.eye(m)
        return cls(xi=np.zeros(m), omega=omega, delta=delta,
                   mu=np.zeros(delta.shape[0]), sigma=sigma)


def _normalizer(params: CsnParams, *, tol, seed, max_dim) -> MvnResult:
    """``Phi_n(0; mu, gamma)``, the CSN normalizing probability."""
    if params.n == 0:
        return MvnResult(value=1.0, abs_error=0.0, points_used=0, converged=True)
    problem = MvnProblem.lower_orthant(upper=0.0, cov=params.gamma_mat, mean=params.mu)
    return mvn_cdf(problem, tol=tol, seed=seed, max_dim=max_dim)


def cdf_embedding(params: CsnParams) -> np.ndarray:
    """Covariance of the (n+m)-dimensional Gaussian whose lower orthant
    probabilities give the unnormalized CSN distribution function."""
    dw = params.delta @ params.omega
    top = np.hstack([params.gamma_mat, -dw])
    bottom = np.hstack([-dw.T, params.omega])
    return symmetrize(np.vstack([top, bottom]), "cdf embedding")


def embed_point(params: CsnParams, x) -> np.ndarray:
    """Evaluation point ``(-mu, x - xi)`` matching :func:`cdf_embedding`."""
    x = np.broadcast_to(np.asarray(x, dtype=float), (params.m,))
    return np.concatenate([-params.mu, x - params.xi])


def csn_cdf(
    x,
    params: CsnParams,
    *,
    tol: float | None = None,
    seed: int = 0,
    max_dim: int = DEFAULT_MAX_DIM,
) -> Estimate:
    """Distribution function ``P(X <= x)`` of the CSN law.

    Entries of ``x`` may be ``+inf`` (marginalizing those coordinates).
    """
    if params.n == 0:
        res = mvn_cdf(
            MvnProblem.lower_orthant(
                upper=np.broadcast_to(np.asarray(x, dtype=float), (params.m,)),
                cov=params.omega, mean=params.xi),
            tol=tol, seed=seed, max_dim=max_dim)
        return Estimate(value=res.value, abs_error=res.abs_error)
    den = _normalizer(params, tol=tol, seed=config.subseed(seed, 1), max_dim=max_dim)
    if den.value < _NORMALIZER_FLOOR:
        raise DegenerateNormalization(
            f"normalizing probability {den.value:.3e} below {_NORMALIZER_FLOOR:.0e}")
    num = mvn_cdf(
        MvnProblem.lower_orthant(upper=embed_point(params, x), cov=cdf_embedding(params)),
        tol=tol, seed=seed, max_dim=max_dim)
    value = num.value / den.value
    err = (num.abs_error + value * den.abs_error) / den.value
    return Estimate(value=min(1.0, max(0.0, value)), abs_error=err)


def csn_pdf(
    x,
    params: CsnParams,
    *,
    tol: float | None = None,
    seed: int = 0,
    max_dim: int = DEFAULT_MAX_DIM,
) -> Estimate:
    """Density of the CSN law at ``x``."""
    x = np.broadcast_to(np.asarray(x, dtype=float), (params.m,))
    dev = x - params.xi
    low = cholesky(params.omega, name="omega")
    z = np.linalg.solve(low, dev)
    logdet = 2.0 * float(np.sum(np.log(np.diag(low))))
    log_phi = -0.5 * (params.m * np.log(2.0 * np.pi) + logdet + z @ z)
    phi = float(np.exp(log_phi))
    if params.n == 0:
        return Estimate(value=phi, abs_error=0.0)
    den = _normalizer(params, tol=tol, seed=config.subseed(seed, 1), max_dim=max_dim)
    if den.value < _NORMALIZER_FLOOR:
        raise DegenerateNormalization(
            f"normalizing probability {den.value:.3e} below {_NORMALIZER_FLOOR:.0e}")
    num = mvn_cdf(
        MvnProblem.lower_orthant(upper=params.delta @ dev, mean=params.mu, cov=params.sigma),
        tol=tol, seed=seed, max_dim=max_dim)
    value = phi * num.value / den.value
    err = phi * (num.abs_error + (num.value / den.value) * den.abs_error) / den.value
    return Estimate(value=value, abs_error=err)


def csn_affine(a, b, params: CsnParams) -> CsnParams:
    """Parameters of ``A X + b`` for a full-row-rank matrix ``A``.

    The latent dimension ``n`` and the matrix ``gamma`` are unchanged.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[1] != params.m:
        raise ValueError(f"affine matrix must have shape (q, {params.m}), got {a.shape}")
    q = a.shape[0]
    if q == 0 or np.linalg.matrix_rank(a) < q:
        raise RankDeficient(f"affine matrix of shape {a.shape} lacks full row rank")
    b = np.broadcast_to(np.asarray(b, dtype=float), (q,))
    # the sandwich products are symmetric in exact arithmetic; average away
    # the floating-point asymmetry instead of validating it
    omega_raw = a @ params.omega @ a.T
    omega_new = 0.5 * (omega_raw + omega_raw.T)
    dwat = params.delta @ params.omega @ a.T
    delta_new = np.linalg.solve(omega_new, dwat.T).T if params.n else np.zeros((0, q))
    sigma_raw = (
        params.gamma_mat - delta_new @ dwat.T if params.n else np.zeros((0, 0))
    )
    sigma_new = 0.5 * (sigma_raw + sigma_raw.T)
    return CsnParams(xi=a @ params.xi + b, omega=omega_new, delta=delta_new,
                     mu=params.mu, sigma=sigma_new)


def csn_sample(
    n_paths: int,
    params: CsnParams,
    *,
    seed: int = 0,
    tol: float | None = None,
    max_dim: int = DEFAULT_MAX_DIM,
) -> CsnSample:
    """Exact rejection sampling from the conditioning representation.

    Proposals ``U ~ N(xi, omega)`` are accepted when
    ``delta (U - xi) + V > mu`` with independent ``V ~ N(0, sigma)``; the
    acceptance probability equals the normalizer ``Phi_n(0; mu, gamma)``.
    """
    if n_paths <= 0:
        raise ValueError(f"n_paths must be positive, got {n_paths}")
    expected = _normalizer(params, tol=tol, seed=config.subseed(seed, 1),
                           max_dim=max_dim).value
    if expected < _ACCEPTANCE_FLOOR:
        raise AcceptanceTooLow(
            f"estimated acceptance {expected:.3e} below {_ACCEPTANCE_FLOOR:.0e}")
    low_u = cholesky(params.omega, name="omega")
    low_v = cholesky(params.sigma, name="sigma") if params.n else None
    gen = config.rng(seed, 0x63736E)
    out = np.empty((n_paths, params.m))
    have = 0
    proposed = 0
    accepted = 0
    cap = int(max(1e6, 50.0 * n_paths / expected))
    while have < n_paths:
        need = n_paths - have
        batch = int(min(2_000_000, max(1000, 1.5 * need / expected)))
        u_dev = gen.standard_normal((batch, params.m)) @ low_u.T
        proposed += batch
        if params.n:
            v = gen.standard_normal((batch, params.n)) @ low_v.T
            keep = np.all(u_dev @ params.delta.T + v > params.mu, axis=1)
            u_dev = u_dev[keep]
        # every acceptance counts toward the rate, even past n_paths
        accepted += u_dev.shape[0]
        take = min(need, u_dev.shape[0])
        out[have : have + take] = params.xi + u_dev[:take]
        have += take
        if proposed > cap:
            raise AcceptanceTooLow(
                f"acceptance rate {have / proposed:.3e} too low after {proposed} proposals")
    return CsnSample(values=out, acceptance_rate=accepted / proposed,
                     expected_acceptance=expected, n_proposals=proposed)
