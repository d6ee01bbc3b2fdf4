"""Exact record laws for dependent standardized Gaussian sequences.

An observation is a record when it strictly exceeds the running maximum.
For a sequence with standard normal margins and a given autocorrelation
structure, every record quantity here reduces to Gaussian orthant
probabilities of a matrix built from conditional correlations:
conditioning the sequence on a subset I of indices and absorbing the
conditioning variables into skew directions turns "everything below its
bound" events into closed skew-normal (CSN) laws whose normalizing matrix

    gamma = cond_corr + varrho @ base @ varrho.T

drives all probabilities.  The margins never enter: any strictly
increasing componentwise transformation of the sequence leaves records,
arrival times and record-increment signs unchanged, so these laws hold for
every sequence whose dependence is the Gaussian copula of ``model``.

The distribution-function formulas are products ``Phi_k(0; Gamma) * Psi``
of an orthant factor and a CSN distribution function; since the orthant
factor equals the CSN normalizer, each product collapses to a single
Gaussian integral on the CSN embedding covariance, which is how the code
evaluates them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import ndtr

from . import config
from .csn import CsnParams, cdf_embedding, csn_affine, embed_point
from .errors import (
    DegenerateCorrelation,
    DegenerateNormalization,
    InvalidGamma,
    InvalidTimes,
    NotPositiveDefinite,
    TailNotConverged,
)
from .linalg import cholesky, condition, standardize, submatrix, symmetrize
from .models import CorrelationModel
from .mvn import DEFAULT_MAX_DIM, MvnProblem, MvnResult, mvn_cdf

_NORMALIZER_FLOOR = 1e-12
_INNER_TOL_FLOOR = 1e-9


# ---------------------------------------------------------------------------
# result containers


@dataclass(frozen=True)
class TailPolicy:
    """Stopping rule for record-time series.

    Summation stops once ``consecutive`` successive terms fall below
    ``eps_tail`` and the geometric tail extrapolation is below
    ``10 * eps_tail``; ``max_terms`` is a hard budget.
    """

    eps_tail: float = 1e-7
    consecutive: int = 5
    max_terms: int = 500

    def __post_init__(self):
        if self.eps_tail <= 0 or self.consecutive < 1 or self.max_terms < 1:
            raise ValueError("invalid tail policy")


@dataclass(frozen=True)
class RecordLaw:
    """A record probability or distribution-function value."""

    value: float
    abs_error: float
    dim: int
    converged: bool = True
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SeriesResult:
    """A truncated record-time series with explicit residual accounting.

    ``status`` is ``"converged"`` (tail rule fired), or ``"truncated"``
    (the integral dimension cap bounded the enumeration; the unreached tail
    is covered by ``residual_bound``, which is folded into ``abs_error``).
    ``last_index`` is the largest record time enumerated; for two-index
    series ``pairs`` lists the enumerated (j, k) region.
    """

    value: float
    abs_error: float
    terms: tuple[float, ...]
    last_index: int
    residual_bound: float
    status: str
    converged: bool = True
    pairs: tuple[tuple[int, int], ...] | None = None


@dataclass(frozen=True)
class ExpectedRecords:
    """Partial sums of expected record counts with a divergence verdict.

    ``classification`` is ``"divergent"`` (every computed record-law matrix
    dominates the iid one entrywise, so terms are >= 1/n by comparison),
    ``"convergent"`` (clearly geometric term decay; ``total`` adds the
    geometric tail), or ``"inconclusive"``.  ``partial_sum`` includes the
    deterministic first record.
    """

    partial_sum: float
    abs_error: float
    terms: tuple[float, ...]
    classification: str
    horizon: int
    total: float | None


# ---------------------------------------------------------------------------
# gamma construction


@dataclass(frozen=True)
class GammaConstruction:
    """The conditional pieces behind a record law.

    For conditioning indices ``I`` (the candidate record times) and
    complement ``S``, the matrix ``gamma = cond_corr + varrho @ base @
    varrho.T`` is the covariance of the variables whose lower orthant
    carries the record event:

    - ``cond_corr``: correlation matrix of ``Z_S`` given ``Z_I``,
    - ``base``: correlation matrix of ``Z_I``,
    - ``varrho``: skew directions, row i standardized from the bound map.
    """

    gamma: np.ndarray
    varrho: np.ndarray
    cond_corr: np.ndarray
    base: np.ndarray
    cond_idx: tuple[int, ...]
    complement: tuple[int, ...]

    @property
    def gamma_corr(self) -> np.ndarray:
        """``gamma`` rescaled to unit diagonal."""
        return standardize(self.gamma, "gamma")[0]

    def base_params(self) -> CsnParams:
        """The CSN law of ``Z_I`` given every complement variable below its
        bound (the building block of all record-value laws)."""
        return CsnParams(
            xi=np.zeros(self.base.shape[0]),
            omega=self.base,
            delta=self.varrho,
            mu=np.zeros(self.varrho.shape[0]),
            sigma=self.cond_corr,
        )


def _check_gamma(gamma: np.ndarray, context: str) -> np.ndarray:
    corr, _ = standardize(gamma, "gamma")
    worst = float(np.max(np.abs(corr))) if corr.size else 0.0
    if worst > 1.0 + 1e-10:
        raise InvalidGamma(
            f"{context}: standardized gamma entry {worst:.6f} outside [-1, 1]; "
            "the pair correlations must satisfy "
            "|1 + r_ij - r_i - r_j| <= 2*sqrt((1 - r_i)(1 - r_j))"
        )
    try:
        cholesky(gamma, name="gamma")
    except NotPositiveDefinite as exc:
        raise InvalidGamma(f"{context}: gamma is not positive definite") from exc
    return gamma


def gamma_single(
    model: CorrelationModel,
    n: int,
    *,
    cond_index: int | None = None,
    complement: Sequence[int] | None = None,
) -> GammaConstruction:
    """Record-law matrix for a single conditioning index.

    By default conditions on the last index ``n`` with complement
    ``1..n-1``; record arrival laws condition on index 1 instead.  Built
    entrywise from pair correlations (rank-one update), so it accepts
    per-horizon model kinds whose full matrix is not positive definite, as
    long as ``gamma`` itself is admissible.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    c = n if cond_index is None else int(cond_index)
    comp = tuple(range(1, n)) if complement is None else tuple(int(i) for i in complement)
    if not comp:
        raise ValueError("complement must be non-empty")
    if c in comp:
        raise ValueError(f"conditioning index {c} appears in the complement")

    r_c = np.array([model.corr(min(i, c), max(i, c), n) for i in comp])
    if np.any(np.abs(r_c) >= 1.0 - 1e-12):
        worst = comp[int(np.argmax(np.abs(r_c)))]
        raise DegenerateCorrelation(
            f"|corr(X_{worst}, X_{c})| = 1; the record law is degenerate")
    varrho = np.sqrt((1.0 - r_c) / (1.0 + r_c))
    sd = np.sqrt(1.0 - r_c**2)
    m = len(comp)
    cond_corr = np.empty((m, m))
    for a in range(m):
        cond_corr[a, a] = 1.0
        for b in range(a + 1, m):
            i, j = comp[a], comp[b]
            r_ij = model.corr(min(i, j), max(i, j), n)
            cond_corr[a, b] = cond_corr[b, a] = (r_ij - r_c[a] * r_c[b]) / (sd[a] * sd[b])
    gamma = cond_corr + np.outer(varrho, varrho)
    _check_gamma(gamma, f"record law at n={n} (conditioning on {c})")
    return GammaConstruction(
        gamma=gamma,
        varrho=varrho[:, None],
        cond_corr=cond_corr,
        base=np.ones((1, 1)),
        cond_idx=(c,),
        complement=comp,
    )


def gamma_multi(
    full,
    cond_idx: Sequence[int],
    bounds,
    *,
    complement_order: Sequence[int] | None = None,
) -> GammaConstruction:
    """Record-law matrix for a set of conditioning indices.

    ``bounds`` maps the conditioning vector to the upper bound of each
    complement variable (row per complement index, in ``complement_order``),
    e.g. a 0/1 selector picking "the most recent candidate record".
    """
    full = np.asarray(full, dtype=float)
    idx = tuple(int(i) for i in cond_idx)
    cg = condition(full, idx)
    order = cg.complement if complement_order is None else tuple(int(i) for i in complement_order)
    if sorted(order) != list(cg.complement):
        raise ValueError("complement_order must permute the complement indices")
    pos = [cg.complement.index(i) for i in order]
    bmat = np.asarray(bounds, dtype=float)
    if bmat.shape != (len(order), len(idx)):
        raise ValueError(
            f"bounds must have shape ({len(order)}, {len(idx)}), got {bmat.shape}")
    mean_map = cg.mean_map[pos]
    sd = cg.std_diag[pos]
    cond_corr = cg.cond_corr[np.ix_(pos, pos)]
    varrho = (bmat - mean_map) / sd[:, None]
    base = submatrix(full, idx)
    gamma = symmetrize(cond_corr + varrho @ base @ varrho.T, "gamma")
    _check_gamma(gamma, f"record law conditioning on {idx}")
    return GammaConstruction(
        gamma=gamma,
        varrho=varrho,
        cond_corr=cond_corr,
        base=base,
        cond_idx=idx,
        complement=order,
    )


# ---------------------------------------------------------------------------
# shared evaluation helpers


def _orthant(cov, *, upper=0.0, tol, seed, max_dim) -> MvnResult:
    return mvn_cdf(
        MvnProblem.lower_orthant(upper=upper, cov=cov),
        tol=tol, seed=seed, max_dim=max_dim,
    )


def _embedded_orthant(params: CsnParams, point, *, tol, seed, max_dim) -> MvnResult:
    """``Phi_latent(0; mu, gamma) * P_CSN(X <= point)`` as one integral.

    The orthant factor equals the CSN normalizer, so the product is the
    plain lower-orthant probability of the embedding covariance.
    """
    if params.n == 0:
        problem = MvnProblem.lower_orthant(
            upper=np.broadcast_to(np.asarray(point, dtype=float), (params.m,)),
            cov=params.omega, mean=params.xi)
    else:
        problem = MvnProblem.lower_orthant(
            upper=embed_point(params, point), cov=cdf_embedding(params))
    return mvn_cdf(problem, tol=tol, seed=seed, max_dim=max_dim)


def _ratio_tol(tol: float | None, den: float, calls: int) -> float | None:
    """Inner tolerance for the orthant calls behind a normalized ratio.

    Dividing by a normalizer of size ``den`` amplifies the raw orthant
    errors by roughly ``calls / den``, so per-call tolerance ``tol`` would
    deliver a conditional law accurate only to ``calls * tol / den``.
    Splitting the budget across the calls keeps the error of the returned
    ratio itself within ``tol``; ``None`` (solver defaults) passes through.
    """
    if tol is None:
        return None
    return max(_INNER_TOL_FLOOR, tol * den / calls)


def _first_difference(k: int) -> np.ndarray:
    d = np.zeros((k - 1, k))
    for i in range(k - 1):
        d[i, i] = 1.0
        d[i, i + 1] = -1.0
    return d


def _meta(model: CorrelationModel, **kw) -> dict:
    return {"model": model.label, **kw}


# ---------------------------------------------------------------------------
# single-record laws


def record_probability(
    model: CorrelationModel,
    n: int,
    *,
    tol: float | None = None,
    seed: int = 0,
    max_dim: int = DEFAULT_MAX_DIM,
) -> RecordLaw:
    """``P(X_n is a record)`` in an n-long stretch of the sequence."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n == 1:
        return RecordLaw(1.0, 0.0, 0, meta=_meta(model, n=1))
    gc = gamma_single(model, n)
    res = _orthant(gc.gamma, tol=tol, seed=seed, max_dim=max_dim)
    return RecordLaw(res.value, res.abs_error, n - 1, res.converged, _meta(model, n=n))


def record_value_cdf(
    model: CorrelationModel,
    n: int,
    x: float,
    *,
    tol: float | None = None,
    seed: int = 0,
    max_dim: int = DEFAULT_MAX_DIM,
) -> RecordLaw:
    """``P(X_n <= x | X_n is a record)`` (standard normal margins)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n == 1:
        return RecordLaw(float(ndtr(x)), 1e-15, 1, meta=_meta(model, n=1, x=x))
    gc = gamma_single(model, n)
    params = gc.base_params()
    den = _orthant(gc.gamma, tol=tol, seed=config.subseed(seed, 1), max_dim=max_dim)
    if den.value < _NORMALIZER_FLOOR:
        raise DegenerateNormalization(
            f"record probability {den.value:.3e} too small to condition on")
    inner = _ratio_tol(tol, den.value, 2)
    if inner is not None:
        den = _orthant(gc.gamma, tol=inner, seed=config.subseed(seed, 1),
                       max_dim=max_dim)
    num = _embedded_orthant(params, [x], tol=inner, seed=seed, max_dim=max_dim)
    value = min(1.0, max(0.0, num.value / den.value))
    err = (num.abs_error + value * den.abs_error) / den.value
    return RecordLaw(value, err, n, num.converged and den.converged,
                     _meta(model, n=n, x=x))


def arrival_times_joint(
    model: CorrelationModel,
    times: Sequence[int],
    *,
    tol: float | None = None,
    seed: int = 0,
    max_dim: int = DEFAULT_MAX_DIM,
) -> RecordLaw:
    """``P(T(2) = j_2, ..., T(k) = j_k)`` for record arrival times.

    ``times`` lists the arrival times of the 2nd..k-th records (the first
    record is always at time 1).
    """
    times = tuple(int(t) for t in times)
    if not times:
        raise InvalidTimes("at least one arrival time is required")
    full_times = (1,) + times
    if any(b <= a for a, b in zip(full_times, full_times[1:])):
        raise InvalidTimes(f"arrival times must be strictly increasing from 2, got {times}")
    k = len(full_times)
    jk = full_times[-1]
    comp = tuple(i for i in range(1, jk + 1) if i not in set(full_times))
    fmat = model.matrix(jk)
    if comp:
        bmat = np.zeros((len(comp), k))
        for row, i in enumerate(comp):
            pred = max(t for t in full_times if t < i)
            bmat[row, full_times.index(pred)] = 1.0
        gc = gamma_multi(fmat, full_times, bmat)
        base = gc.base_params()
    else:
        base = CsnParams(xi=np.zeros(k), omega=fmat, delta=np.zeros((0, k)),
                         mu=np.zeros(0), sigma=np.zeros((0, 0)))
    img = csn_affine(_first_difference(k), 0.0, base)
    res = _embedded_orthant(img, np.zeros(k - 1), tol=tol, seed=seed, max_dim=max_dim)
    return RecordLaw(res.value, res.abs_error, jk - 1, res.converged,
                     _meta(model, times=times))


def second_record_time_pmf(
    model: CorrelationModel,
    n: int,
    *,
    tol: float | None = None,
    seed: int = 0,
    max_dim: int = DEFAULT_MAX_DIM,
) -> RecordLaw:
    """``P(T(2) = n)``: the waiting-time law of the second record."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if n == 2:
        return RecordLaw(0.5, 0.0, 1, meta=_meta(model, n=2))
    gc_b = gamma_single(model, n, cond_index=1, complement=range(2, n + 1))
    gc_a = gamma_single(model, n - 1, cond_index=1, complement=range(2, n))
    a = _orthant(gc_a.gamma, tol=tol, seed=seed, max_dim=max_dim)
    b = _orthant(gc_b.gamma, tol=tol, seed=config.subseed(seed, 1), max_dim=max_dim)
    value = max(0.0, a.value - b.value)
    return RecordLaw(value, a.abs_error + b.abs_error, n - 1,
                     a.converged and b.converged, _meta(model, n=n))


# ---------------------------------------------------------------------------
# record-increment series


def _geometric_tail(terms: Sequence[float]) -> float:
    if len(terms) < 2 or terms[-1] <= 0.0:
        return 0.0
    ratio = terms[-1] / terms[-2] if terms[-2] > 0 else 0.0
    ratio = min(ratio, 0.999)
    return terms[-1] * ratio / (1.0 - ratio) if ratio > 0 else 0.0


def first_increment_cdf(
    model: CorrelationModel,
    x: float,
    *,
    trunc: TailPolicy | None = None,
    tol: float | None = None,
    seed: int = 0,
    max_dim: int = DEFAULT_MAX_DIM,
) -> SeriesResult:
    """``P(X_{T(2)} - X_1 <= x)``: law of the first record increment.

    The series over the arrival time ``T(2) = n`` needs one integral of
    dimension n-1 per term, so the dimension cap truncates it; the residual
    ``P(T(2) > last_index)`` is computed exactly and folded into
    ``abs_error``.
    """
    if not x > 0.0:
        raise ValueError(f"x must be > 0, got {x}")
    trunc = trunc or TailPolicy()
    terms: list[float] = []
    err = 0.0
    consec = 0
    status = None
    residual = 0.0
    n = 2
    while True:
        if n - 1 > max_dim:
            status = "truncated"
            break
        if len(terms) >= trunc.max_terms:
            raise TailNotConverged(
                f"tail rule not satisfied within max_terms={trunc.max_terms}")
        gc = gamma_single(model, n, cond_index=1, complement=range(2, n + 1))
        r1n = model.corr(1, n, n)
        upper = np.zeros(n - 1)
        upper[-1] = x / np.sqrt(1.0 - r1n**2)
        s = config.subseed(seed, n)
        hi = _orthant(gc.gamma, upper=upper, tol=tol, seed=s, max_dim=max_dim)
        lo = _orthant(gc.gamma, tol=tol, seed=s, max_dim=max_dim)
        term = max(0.0, hi.value - lo.value)
        terms.append(term)
        err += hi.abs_error + lo.abs_error
        consec = consec + 1 if term < trunc.eps_tail else 0
        if consec >= trunc.consecutive:
            tail = _geometric_tail(terms)
            if tail < 10.0 * trunc.eps_tail:
                status = "converged"
                residual = tail
                break
        n += 1
    last = n if status == "converged" else n - 1
    if status == "truncated":
        gc = gamma_single(model, last, cond_index=1, complement=range(2, last + 1))
        rem = _orthant(gc.gamma, tol=tol, seed=config.subseed(seed, 0), max_dim=max_dim)
        residual = rem.value
        err += rem.abs_error
    return SeriesResult(
        value=float(np.sum(terms)),
        abs_error=err + residual,
        terms=tuple(terms),
        last_index=last,
        residual_bound=residual,
        status=status,
        converged=True,
    )


def second_increment_cdf(
    model: CorrelationModel,
    x: float,
    *,
    trunc: TailPolicy | None = None,
    tol: float | None = None,
    seed: int = 0,
    max_dim: int = DEFAULT_MAX_DIM,
) -> SeriesResult:
    """``P(X_{T(3)} - X_{T(2)} <= x)``: law of the second record increment.

    Enumerates arrival pairs (T(2), T(3)) = (j, k) along diagonals
    j + k = const; each pair costs two integrals of dimension k-1.  The
    dimension cap bounds k; the unreachable mass ``1 - P(T(3) <= last_index)``
    is accumulated exactly from the enumerated pair masses and folded into
    ``abs_error``.
    """
    if not x > 0.0:
        raise ValueError(f"x must be > 0, got {x}")
    trunc = trunc or TailPolicy()
    k_cap = max_dim + 1
    if k_cap < 3:
        raise ValueError("max_dim too small for any (j, k) pair")
    terms: list[float] = []
    pairs: list[tuple[int, int]] = []
    mass = 0.0
    err = 0.0
    diag_terms: list[float] = []
    diag_mass: list[float] = []
    consec = 0
    status = None
    residual = 0.0
    done = False
    for s_diag in range(5, 2 * k_cap):
        d_term = 0.0
        d_mass = 0.0
        any_pair = False
        for j in range(2, (s_diag + 1) // 2):
            k = s_diag - j
            if k <= j or k > k_cap:
                continue
            if len(terms) >= trunc.max_terms:
                raise TailNotConverged(
                    f"tail rule not satisfied within max_terms={trunc.max_terms}")
            any_pair = True
            fmat = model.matrix(k)
            idx = (1, j, k)
            comp = tuple(i for i in range(2, k) if i != j)
            if comp:
                bmat = np.zeros((len(comp), 3))
                for row, i in enumerate(comp):
                    bmat[row, 0 if i < j else 1] = 1.0
                gc = gamma_multi(fmat, idx, bmat)
                base = gc.base_params()
            else:
                base = CsnParams(xi=np.zeros(3), omega=fmat, delta=np.zeros((0, 3)),
                                 mu=np.zeros(0), sigma=np.zeros((0, 0)))
            img = csn_affine(np.array([[1.0, -1.0, 0.0], [0.0, 1.0, -1.0]]), 0.0, base)
            sd = config.subseed(seed, j, k)
            pmass = _embedded_orthant(img, [0.0, 0.0], tol=tol, seed=sd, max_dim=max_dim)
            shifted = _embedded_orthant(img, [0.0, -x], tol=tol, seed=sd, max_dim=max_dim)
            term = max(0.0, pmass.value - shifted.value)
            terms.append(term)
            pairs.append((j, k))
            mass += pmass.value
            err += pmass.abs_error + shifted.abs_error
            d_term += term
            d_mass += pmass.value
        if not any_pair:
            continue
        diag_terms.append(d_term)
        diag_mass.append(d_mass)
        consec = consec + 1 if d_term < trunc.eps_tail else 0
        if consec >= trunc.consecutive:
            tail = _geometric_tail(diag_mass)
            if tail < 10.0 * trunc.eps_tail:
                status = "converged"
                residual = tail
                done = True
                break
    if not done:
        status = "truncated"
        residual = max(0.0, 1.0 - mass)
    return SeriesResult(
        value=float(np.sum(terms)),
        abs_error=err + residual,
        terms=tuple(terms),
        last_index=max(k for _, k in pairs),
        residual_bound=residual,
        status=status,
        converged=True,
        pairs=tuple(pairs),
    )


def expected_records(
    model: CorrelationModel,
    *,
    horizon: int = 30,
    trunc: TailPolicy | None = None,
    tol: float | None = None,
    seed: int = 0,
    max_dim: int = DEFAULT_MAX_DIM,
) -> ExpectedRecords:
    """Expected number of records up to ``horizon`` with a divergence verdict.

    The per-index record probabilities are summed; if every computed
    standardized record-law matrix dominates the iid value 1/2 entrywise,
    each term dominates the iid term 1/n (monotonicity of orthant
    probabilities in correlations), so the full series diverges.  Clearly
    geometric decay is classified convergent with an extrapolated total;
    anything else is inconclusive.
    """
    if horizon < 2:
        raise ValueError(f"horizon must be >= 2, got {horizon}")
    trunc = trunc or TailPolicy()
    last = min(horizon, max_dim + 1, trunc.max_terms + 1)
    terms: list[float] = []
    err = 0.0
    slepian = True
    for n in range(2, last + 1):
        gc = gamma_single(model, n)
        res = _orthant(gc.gamma, tol=tol, seed=config.subseed(seed, n), max_dim=max_dim)
        terms.append(res.value)
        err += res.abs_error
        off = gc.gamma_corr[~np.eye(n - 1, dtype=bool)]
        if off.size and float(np.min(off)) < 0.5 - 1e-9:
            slepian = False
    partial = 1.0 + float(np.sum(terms))
    if slepian:
        classification = "divergent"
        total = float("inf")
    else:
        ratios = [terms[i + 1] / terms[i] for i in range(len(terms) - 1)
                  if terms[i] > 0][-5:]
        # geometric decay has a constant ratio; harmonic-like decay has
        # ratios drifting up toward 1, so a wide spread is not geometric
        if (len(ratios) >= 3 and max(ratios) <= 0.9
                and max(ratios) - min(ratios) <= 0.05):
            classification = "convergent"
            r = max(ratios)
            tail = terms[-1] * r / (1.0 - r)
            total = partial + tail
            err += tail * 0.5
        else:
            classification = "inconclusive"
            total = None
    return ExpectedRecords(
        partial_sum=partial,
        abs_error=err,
        terms=tuple(terms),
        classification=classification,
        horizon=last,
        total=total,
    )


# ---------------------------------------------------------------------------
# joint and consecutive records


def _check_pair_correlation(model: CorrelationModel, j: int, n: int) -> float:
    r = model.corr(j, n, n)
    if abs(r) >= 1.0 - 1e-12:
        raise DegenerateCorrelation(f"|corr(X_{j}, X_{n})| = 1; joint law degenerate")
    return r


def _joint_base(model: CorrelationModel, j: int, n: int) -> CsnParams:
    """CSN law of (X_j, X_n) given all other indices below their candidate
    record (indices < j below X_j; indices in (j, n) below X_n)."""
    fmat = model.matrix(n)
    comp = tuple(i for i in range(1, n) if i != j)
    bmat = np.zeros((len(comp), 2))
    for row, i in enumerate(comp):
        bmat[row, 0 if i < j else 1] = 1.0
    gc = gamma_multi(fmat, (j, n), bmat)
    return gc.base_params()


def joint_record_prob(
    model: CorrelationModel,
    j: int,
    n: int,
    *,
    tol: float | None = None,
    seed: int = 0,
    max_dim: int = DEFAULT_MAX_DIM,
) -> RecordLaw:
    """``P(R_j = 1, R_n = 1)``: both indices set records."""
    if not 2 <= j < n:
        raise ValueError(f"need 2 <= j < n, got j={j}, n={n}")
    _check_pair_correlation(model, j, n)
    base = _joint_base(model, j, n)
    img = csn_affine(np.array([[1.0, -1.0]]), 0.0, base)
    res = _embedded_orthant(img, [0.0], tol=tol, seed=seed, max_dim=max_dim)
    return RecordLaw(res.value, res.abs_error, n - 1, res.converged,
                     _meta(model, j=j, n=n))


def joint_record_cdf(
    model: CorrelationModel,
    j: int,
    n: int,
    x1: float,
    x2: float,
    *,
    tol: float | None = None,
    seed: int = 0,
    max_dim: int = DEFAULT_MAX_DIM,
) -> RecordLaw:
    """``P(X_j <= x1, X_n <= x2 | R_j = 1, R_n = 1)``.

    Either argument may be ``+inf``, yielding the marginal laws.
    """
    if not 2 <= j < n:
        raise ValueError(f"need 2 <= j < n, got j={j}, n={n}")
    _check_pair_correlation(model, j, n)
    base = _joint_base(model, j, n)
    den = joint_record_prob(model, j, n, tol=tol, seed=config.subseed(seed, 9),
                            max_dim=max_dim)
    if den.value < _NORMALIZER_FLOOR:
        raise DegenerateNormalization(
            f"joint record probability {den.value:.3e} too small to condition on")
    inner = _ratio_tol(tol, den.value, 2 if x1 > x2 else 4)
    if inner is not None:
        den = joint_record_prob(model, j, n, tol=inner,
                                seed=config.subseed(seed, 9), max_dim=max_dim)
    diff = csn_affine(np.array([[1.0, -1.0], [0.0, 1.0]]), 0.0, base)
    if x1 > x2:
        # {X_j <= x1, X_n <= x2, X_j < X_n} forces X_j < x2 as well
        t3 = _embedded_orthant(diff, [0.0, x2], tol=inner, seed=seed, max_dim=max_dim)
        num, num_err = t3.value, t3.abs_error
        conv = t3.converged
    else:
        s = config.subseed(seed, 1)
        t1 = _embedded_orthant(base, [x1, x2], tol=inner, seed=s, max_dim=max_dim)
        t2 = _embedded_orthant(base, [x1, x1], tol=inner, seed=s, max_dim=max_dim)
        t3 = _embedded_orthant(diff, [0.0, x1], tol=inner, seed=seed, max_dim=max_dim)
        num = t1.value - t2.value + t3.value
        num_err = t1.abs_error + t2.abs_error + t3.abs_error
        conv = t1.converged and t2.converged and t3.converged
    value = min(1.0, max(0.0, num / den.value))
    err = (num_err + value * den.abs_error) / den.value
    return RecordLaw(value, err, n, conv and den.converged,
                     _meta(model, j=j, n=n, x1=x1, x2=x2))


def joint_record_marginals(
    model: CorrelationModel,
    j: int,
    n: int,
    x: float,
    which: str,
    *,
    tol: float | None = None,
    seed: int = 0,
    max_dim: int = DEFAULT_MAX_DIM,
) -> RecordLaw:
    """Marginal record-value law at index ``which`` in {"at_j", "at_n"},
    conditional on records at both j and n."""
    if which == "at_j":
        return joint_record_cdf(model, j, n, x, np.inf, tol=tol, seed=seed,
                                max_dim=max_dim)
    if which == "at_n":
        return joint_record_cdf(model, j, n, np.inf, x, tol=tol, seed=seed,
                                max_dim=max_dim)
    raise ValueError(f"which must be 'at_j' or 'at_n', got {which!r}")


def consecutive_joint_record_prob(
    model: CorrelationModel,
    j: int,
    n: int,
    *,
    tol: float | None = None,
    seed: int = 0,
    max_dim: int = DEFAULT_MAX_DIM,
) -> RecordLaw:
    """``P(records at j and n with none in between)``."""
    if not 1 <= j < n:
        raise ValueError(f"need 1 <= j < n, got j={j}, n={n}")
    comp_a = [i for i in range(1, n) if i != j]
    if comp_a:
        gc_a = gamma_single(model, n, cond_index=j, complement=comp_a)
        a = _orthant(gc_a.gamma, tol=tol, seed=seed, max_dim=max_dim)
    else:
        a = MvnResult(1.0, 0.0, 0, True)
    gc_b = gamma_single(model, n, cond_index=j,
                        complement=[i for i in range(1, n + 1) if i != j])
    b = _orthant(gc_b.gamma, tol=tol, seed=config.subseed(seed, 1), max_dim=max_dim)
    value = max(0.0, a.value - b.value)
    return RecordLaw(value, a.abs_error + b.abs_error, n - 1,
                     a.converged and b.converged, _meta(model, j=j, n=n))


def consecutive_joint_record_cdf(
    model: CorrelationModel,
    j: int,
    n: int,
    x1: float,
    x2: float,
    *,
    tol: float | None = None,
    seed: int = 0,
    max_dim: int = DEFAULT_MAX_DIM,
) -> RecordLaw:
    """``P(X_j <= x1, X_n <= x2 | consecutive records at j and n)``."""
    if not 1 <= j < n:
        raise ValueError(f"need 1 <= j < n, got j={j}, n={n}")
    a_pt, b_pt = (x1, x2) if x1 <= x2 else (x2, x2)
    comp = [i for i in range(1, n + 1) if i != j]
    gc = gamma_single(model, n, cond_index=j, complement=comp)
    r = model.corr(j, n, n)
    s = np.sqrt(1.0 - r * r)

    den = consecutive_joint_record_prob(model, j, n, tol=tol,
                                        seed=config.subseed(seed, 9), max_dim=max_dim)
    if den.value < _NORMALIZER_FLOOR:
        raise DegenerateNormalization(
            f"consecutive record probability {den.value:.3e} too small to condition on")
    inner = _ratio_tol(tol, den.value, 4)
    if inner is not None:
        den = consecutive_joint_record_prob(model, j, n, tol=inner,
                                            seed=config.subseed(seed, 9),
                                            max_dim=max_dim)
    term_b = _embedded_orthant(gc.base_params(), [a_pt], tol=inner,
                               seed=config.subseed(seed, 1), max_dim=max_dim)
    varrho_t = gc.varrho.copy()
    varrho_t[-1, 0] = -r / s
    shift = np.zeros(n - 1)
    shift[-1] = b_pt / s
    params_a = CsnParams(xi=np.zeros(1), omega=np.ones((1, 1)), delta=varrho_t,
                         mu=-shift, sigma=gc.cond_corr)
    term_a = _embedded_orthant(params_a, [a_pt], tol=inner, seed=seed, max_dim=max_dim)
    num = term_a.value - term_b.value
    value = min(1.0, max(0.0, num / den.value))
    err = (term_a.abs_error + term_b.abs_error + value * den.abs_error) / den.value
    return RecordLaw(value, err, n, term_a.converged and term_b.converged and den.converged,
                     _meta(model, j=j, n=n, x1=x1, x2=x2))
