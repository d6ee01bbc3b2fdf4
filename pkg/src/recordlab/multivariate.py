"""Complete-record laws for multi-component stationary Gaussian sequences.

A *complete record* at time ``n`` means every component of the d-vector
``X_n`` strictly exceeds the running maximum of its own coordinate.  As in
the univariate module, conditioning on the candidate record blocks turns
these events into Gaussian orthants of a ``gamma`` matrix and the value
laws into closed skew-normal distribution functions; products of an
orthant factor and a CSN distribution function are again collapsed into a
single integral on the CSN embedding covariance.

Complement variables are stacked component-major (all times of component
1, then component 2, ...), matching the block-selector structure of the
bound matrix ``B``: each past coordinate is bounded by the current value
of its own component.
"""

from __future__ import annotations

import itertools

import numpy as np

from . import config
from .csn import csn_affine
from .errors import DegenerateNormalization, InvalidTimes, SubsetExplosion
from .models import CrossCorrelationModel
from .mvn import DEFAULT_MAX_DIM, MvnProblem, mvn_cdf
from .records import (
    _NORMALIZER_FLOOR,
    GammaConstruction,
    RecordLaw,
    _embedded_orthant,
    _orthant,
    _ratio_tol,
    gamma_multi,
)

__all__ = [
    "complete_record_probability",
    "complete_record_cdf",
    "joint_complete_record_prob",
    "joint_complete_record_cdf",
]

_SUBSET_CAP = 4


def _meta(model: CrossCorrelationModel, **kw) -> dict:
    return {"model": model.label, "d": model.d, **kw}


def _complete_gamma(model: CrossCorrelationModel, n: int) -> GammaConstruction:
    """Condition on the time-n block, bounding each past coordinate by the
    current value of its own component."""
    d = model.d
    full = model.matrix(n)
    cond_idx = tuple((n - 1) * d + i for i in range(1, d + 1))
    order = tuple(
        (t - 1) * d + i for i in range(1, d + 1) for t in range(1, n)
    )
    bounds = np.zeros(((n - 1) * d, d))
    for row, i in enumerate(np.repeat(np.arange(d), n - 1)):
        bounds[row, i] = 1.0
    return gamma_multi(full, cond_idx, bounds, complement_order=order)


def complete_record_probability(
    model: CrossCorrelationModel,
    n: int,
    *,
    tol: float | None = None,
    seed: int = 0,
    max_dim: int = DEFAULT_MAX_DIM,
) -> RecordLaw:
    """``P(X_n is a complete record)`` for the d-component sequence.

    The probability is the lower orthant of the ``(n-1)d``-dimensional
    ``gamma`` matrix; for fully independent components and times it equals
    ``n ** -d``.
    """
    if n < 1:
        raise InvalidTimes(f"n must be >= 1, got {n}")
    if n == 1:
        return RecordLaw(1.0, 0.0, 0, True, _meta(model, n=n))
    gc = _complete_gamma(model, n)
    res = _orthant(gc.gamma, tol=tol, seed=seed, max_dim=max_dim)
    return RecordLaw(
        res.value, res.abs_error, (n - 1) * model.d, res.converged, _meta(model, n=n)
    )


def complete_record_cdf(
    model: CrossCorrelationModel,
    n: int,
    x,
    *,
    tol: float | None = None,
    seed: int = 0,
    max_dim: int = DEFAULT_MAX_DIM,
) -> RecordLaw:
    """``P(X_n <= x | X_n is a complete record)`` componentwise at ``x``.

    The conditional law of the record value is closed skew-normal of
    dimension d with ``(n-1)d`` skew directions; the cdf is the embedded
    orthant divided by the complete-record probability.
    """
    x = np.broadcast_to(np.asarray(x, dtype=float), (model.d,))
    if n < 1:
        raise InvalidTimes(f"n must be >= 1, got {n}")
    if n == 1:
        res = mvn_cdf(
            MvnProblem.lower_orthant(upper=x, cov=model.block(0)),
            tol=tol, seed=seed, max_dim=max_dim,
        )
        return RecordLaw(
            res.value, res.abs_error, model.d, res.converged,
            _meta(model, n=n, x=tuple(x)),
        )
    gc = _complete_gamma(model, n)
    den = _orthant(gc.gamma, tol=tol, seed=config.subseed(seed, 1), max_dim=max_dim)
    if den.value < _NORMALIZER_FLOOR:
        raise DegenerateNormalization(
            f"complete-record probability {den.value:.3e} too small to condition on"
        )
    inner = _ratio_tol(tol, den.value, 2)
    if inner is not None:
        den = _orthant(gc.gamma, tol=inner, seed=config.subseed(seed, 1),
                       max_dim=max_dim)
    num = _embedded_orthant(gc.base_params(), x, tol=inner, seed=seed, max_dim=max_dim)
    value = min(1.0, max(0.0, num.value / den.value))
    err = (num.abs_error + value * den.abs_error) / den.value
    return RecordLaw(
        value, err, n * model.d, num.converged and den.converged,
        _meta(model, n=n, x=tuple(x)),
    )


def _joint_base(model: CrossCorrelationModel, j: int, n: int) -> GammaConstruction:
    """Condition on the time-j and time-n blocks jointly.

    Complement bound selectors: times before j are bounded by the time-j
    value of their component, times strictly between j and n by the time-n
    value.  The within-block ordering ``X_j`` then ``X_n`` fixes the CSN
    coordinate layout used by the affine maps below.
    """
    d = model.d
    full = model.matrix(n)
    cond_idx = tuple((j - 1) * d + i for i in range(1, d + 1)) + tuple(
        (n - 1) * d + i for i in range(1, d + 1)
    )
    times = [t for t in range(1, n) if t != j]
    order = tuple((t - 1) * d + i for i in range(1, d + 1) for t in times)
    bounds = np.zeros((len(times) * d, 2 * d))
    row = 0
    for i in range(d):
        for t in times:
            bounds[row, i if t < j else d + i] = 1.0
            row += 1
    return gamma_multi(full, cond_idx, bounds, complement_order=order)


def joint_complete_record_prob(
    model: CrossCorrelationModel,
    j: int,
    n: int,
    *,
    tol: float | None = None,
    seed: int = 0,
    max_dim: int = DEFAULT_MAX_DIM,
) -> RecordLaw:
    """``P(complete records at both times j and n)`` for ``2 <= j < n``.

    Conditional on the two candidate blocks, the event asks every other
    time to stay below its bounding block and ``X_j`` to stay below ``X_n``
    componentwise; the latter is the lower orthant of the image of the base
    CSN under the difference map ``(I_d, -I_d)``.
    """
    if not 2 <= j < n:
        raise InvalidTimes(f"need 2 <= j < n, got j={j}, n={n}")
    d = model.d
    gc = _joint_base(model, j, n)
    diff = np.hstack([np.eye(d), -np.eye(d)])
    img = csn_affine(diff, np.zeros(d), gc.base_params())
    res = _embedded_orthant(img, np.zeros(d), tol=tol, seed=seed, max_dim=max_dim)
    return RecordLaw(
        res.value, res.abs_error, (n - 1) * d, res.converged, _meta(model, j=j, n=n)
    )


def joint_complete_record_cdf(
    model: CrossCorrelationModel,
    j: int,
    n: int,
    x1,
    x2,
    *,
    tol: float | None = None,
    seed: int = 0,
    max_dim: int = DEFAULT_MAX_DIM,
) -> RecordLaw:
    """``P(X_j <= x1, X_n <= x2 | complete records at j and n)``.

    Componentwise, the event ``{Z_j <= x1, Z_n <= x2, Z_j < Z_n}`` splits
    into the disjoint pieces ``{Z_j < Z_n <= a}`` and
    ``{Z_j <= a, a < Z_n <= x2}`` with ``a = min(x1, x2)``; summing the
    split over components and resolving the interval lower bounds by
    inclusion-exclusion yields a sum of ``3 ** d`` embedded-orthant terms,
    one per subset pair ``K subset-of complement(J)``, normalized by the
    joint complete-record probability.
    """
    if not 2 <= j < n:
        raise InvalidTimes(f"need 2 <= j < n, got j={j}, n={n}")
    d = model.d
    if d > _SUBSET_CAP:
        raise SubsetExplosion(
            f"joint complete-record cdf enumerates 3**d corner terms; "
            f"d={d} exceeds the cap {_SUBSET_CAP}"
        )
    x1 = np.broadcast_to(np.asarray(x1, dtype=float), (d,)).astype(float)
    x2 = np.broadcast_to(np.asarray(x2, dtype=float), (d,)).astype(float)
    a = np.minimum(x1, x2)
    den = joint_complete_record_prob(
        model, j, n, tol=tol, seed=config.subseed(seed, 1), max_dim=max_dim
    )
    if den.value < _NORMALIZER_FLOOR:
        raise DegenerateNormalization(
            f"joint complete-record probability {den.value:.3e} too small "
            "to condition on"
        )
    inner = _ratio_tol(tol, den.value, 3 ** d + 1)
    if inner is not None:
        den = joint_complete_record_prob(
            model, j, n, tol=inner, seed=config.subseed(seed, 1), max_dim=max_dim
        )
    base = _joint_base(model, j, n).base_params()
    total = 0.0
    num_err = 0.0
    converged = den.converged
    terms = 0
    for bits in itertools.product((False, True), repeat=d):
        inside = [i for i in range(d) if bits[i]]
        outside = [i for i in range(d) if not bits[i]]
        rows = (
            [_unit(i, 2 * d) - _unit(d + i, 2 * d) for i in inside]
            + [_unit(i, 2 * d) for i in outside]
            + [_unit(d + i, 2 * d) for i in inside]
            + [_unit(d + i, 2 * d) for i in outside]
        )
        img = csn_affine(np.array(rows), np.zeros(2 * d), base)
        seed_j = config.subseed(seed, 2, terms)
        head = np.concatenate([np.zeros(len(inside)), a[outside], a[inside]])
        for ksub in itertools.product((False, True), repeat=len(outside)):
            tail = np.array(
                [a[i] if k else x2[i] for i, k in zip(outside, ksub)]
            )
            res = _embedded_orthant(
                img, np.concatenate([head, tail]),
                tol=inner, seed=seed_j, max_dim=max_dim,
            )
            total += (-1) ** sum(ksub) * res.value
            num_err += res.abs_error
            converged = converged and res.converged
            terms += 1
    value = min(1.0, max(0.0, total / den.value))
    err = (num_err + value * den.abs_error) / den.value
    return RecordLaw(
        value, err, n * d, converged,
        _meta(model, j=j, n=n, x1=tuple(x1), x2=tuple(x2), terms=terms),
    )


def _unit(i: int, size: int) -> np.ndarray:
    e = np.zeros(size)
    e[i] = 1.0
    return e
