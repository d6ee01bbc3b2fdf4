"""Command-line front end for record laws, asymptotics and simulation.

Every subcommand writes CSV with ``# key=value`` header lines echoing the
full run configuration (re-running with those flags reproduces the output
byte for byte) followed by a column header and data rows; ``--format
pretty`` renders an aligned table instead.  Exit codes: 0 on success, 2 on
validation/usage errors, 3 on numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from pathlib import Path

import numpy as np

from . import asymptotic, multivariate, records, simulate
from .linalg import standardize
from .errors import (
    AcceptanceTooLow,
    DegenerateNormalization,
    RecordLabError,
    TailNotConverged,
    ValidationError,
)
from .models import CorrelationModel, CrossCorrelationModel
from .mvn import DEFAULT_MAX_DIM, MvnProblem, bvn_cdf, mvn_cdf

__all__ = ["main"]


# ---------------------------------------------------------------------------
# parsing helpers


def _parse_tol(text: str) -> float | None:
    if text == "auto":
        return None
    try:
        value = float(text)
    except ValueError:
        raise ValidationError(f"--tol must be a number or 'auto', got {text!r}")
    if value <= 0:
        raise ValidationError(f"--tol must be positive, got {value!r}")
    return value


def _parse_floats(text: str, flag: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part != ""]
    except ValueError:
        raise ValidationError(f"{flag} must be a comma-separated float list, got {text!r}")


def _parse_model(args: argparse.Namespace) -> CorrelationModel:
    if getattr(args, "model_file", None):
        return _read_model_file(Path(args.model_file), jitter=args.jitter)
    spec = args.model
    name, _, rest = spec.partition(":")
    try:
        if name == "iid" and not rest:
            return CorrelationModel.iid()
        if name == "ar1":
            return CorrelationModel.ar1(float(rest))
        if name == "eq":
            return CorrelationModel.equicorrelated(float(rest))
        if name == "tab":
            return CorrelationModel.tabulated(_parse_floats(rest, "--model tab:"))
        if name == "gamma-identity":
            return CorrelationModel.gamma_identity(float(rest) if rest else 0.5)
    except ValueError as exc:
        raise ValidationError(f"bad model spec {spec!r}: {exc}")
    raise ValidationError(
        f"unknown model {spec!r}; expected iid, ar1:PHI, eq:RHO, "
        "tab:R1,R2,..., gamma-identity:C, or --model-file"
    )


def _read_model_file(path: Path, *, jitter: float = 0.0) -> CorrelationModel:
    """Autocorrelation table (``lag,value`` header) or explicit matrix CSV."""
    if not path.exists():
        raise ValidationError(f"model file not found: {path}")
    lines = [
        ln.strip() for ln in path.read_text().splitlines()
        if ln.strip() and not ln.strip().startswith("#")
    ]
    if not lines:
        raise ValidationError(f"model file {path} is empty")
    if lines[0].replace(" ", "").lower() == "lag,value":
        table: dict[int, float] = {}
        for ln in lines[1:]:
            lag_txt, value_txt = ln.split(",")
            table[int(lag_txt)] = float(value_txt)
        max_lag = max(table) if table else 0
        return CorrelationModel.tabulated(
            [table.get(lag, 0.0) for lag in range(1, max_lag + 1)]
        )
    rows = [_parse_floats(ln, f"model file {path}") for ln in lines]
    matrix = np.array(rows)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValidationError(f"model file {path} must hold a square matrix")
    if jitter:
        matrix = standardize(
            matrix + jitter * np.eye(matrix.shape[0]), f"model file {path}"
        )[0]
    return CorrelationModel.explicit(matrix)


def _parse_cross(args: argparse.Namespace) -> CrossCorrelationModel:
    if getattr(args, "cross_file", None):
        return _read_cross_file(Path(args.cross_file), jitter=args.jitter)
    d = getattr(args, "d", None)
    if d is None:
        raise ValidationError("multivariate commands need --cross-file or --d")
    temporal = _parse_model(args)
    rho = getattr(args, "cross_rho", 0.0) or 0.0
    cross = np.full((d, d), rho)
    np.fill_diagonal(cross, 1.0)
    return CrossCorrelationModel.separable(temporal, cross)


def _read_cross_file(path: Path, *, jitter: float = 0.0) -> CrossCorrelationModel:
    """Lag-stamped d x d sections: ``# lag=H`` then H's block rows."""
    if not path.exists():
        raise ValidationError(f"cross file not found: {path}")
    sections: dict[int, list[list[float]]] = {}
    current: int | None = None
    for ln in path.read_text().splitlines():
        ln = ln.strip()
        if not ln:
            continue
        if ln.startswith("#"):
            body = ln.lstrip("#").replace(" ", "")
            if body.startswith("lag="):
                current = int(body[4:])
                sections[current] = []
            continue
        if current is None:
            raise ValidationError(f"cross file {path} must start with '# lag=0'")
        sections[current].append(_parse_floats(ln, f"cross file {path}"))
    if 0 not in sections:
        raise ValidationError(f"cross file {path} is missing the lag-0 block")
    max_lag = max(sections)
    if sorted(sections) != list(range(max_lag + 1)):
        raise ValidationError(f"cross file {path} must stamp lags 0..{max_lag} in full")
    blocks = [np.array(sections[lag]) for lag in range(max_lag + 1)]
    if jitter:
        # rescale every lag by the jittered lag-0 standard deviations so the
        # contemporaneous block keeps a unit diagonal
        corr0, sd = standardize(
            blocks[0] + jitter * np.eye(blocks[0].shape[0]), f"cross file {path}"
        )
        scale = np.outer(1.0 / sd, 1.0 / sd)
        blocks = [corr0] + [scale * block for block in blocks[1:]]
    return CrossCorrelationModel(d=blocks[0].shape[0], lag_blocks=tuple(blocks))


# ---------------------------------------------------------------------------
# output


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _emit(args, command: str, settings: dict, columns: list[str], rows: list[tuple]) -> None:
    lines: list[str] = []
    header = {"command": command,
              **{k: v for k, v in settings.items() if v is not None}}
    if args.format == "csv":
        lines.extend(f"# {key}={_fmt(val)}" for key, val in header.items())
        sink = io.StringIO()
        writer = csv.writer(sink, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows([_fmt(cell) for cell in row] for row in rows)
        lines.append(sink.getvalue().rstrip("\n"))
    else:
        lines.extend(f"{key} = {_fmt(val)}" for key, val in header.items())
        lines.append("")
        cells = [columns] + [[_fmt(cell) for cell in row] for row in rows]
        widths = [max(len(r[c]) for r in cells) for c in range(len(columns))]
        for r in cells:
            lines.append("  ".join(cell.rjust(w) for cell, w in zip(r, widths)))
    text = "\n".join(lines) + "\n"
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)


def _law_settings(args, **extra) -> dict:
    settings = {
        "model": getattr(args, "model", None),
        "tol": args.tol,
        "seed": args.seed,
        "max_dim": args.max_dim,
    }
    if getattr(args, "model_file", None):
        settings["model"] = f"file:{args.model_file}"
    if getattr(args, "cross_file", None):
        settings["cross"] = f"file:{args.cross_file}"
    elif getattr(args, "d", None) is not None:
        settings["d"] = args.d
        settings["cross_rho"] = getattr(args, "cross_rho", 0.0) or 0.0
    settings.update(extra)
    return settings


_LAW_COLUMNS = ["value", "abs_error", "dim", "converged"]


def _law_row(law: records.RecordLaw) -> tuple:
    return (law.value, law.abs_error, law.dim, law.converged)


def _finish(args, laws) -> int:
    return 0 if all(law.converged for law in laws) else 3


# ---------------------------------------------------------------------------
# subcommand handlers


def _kw(args) -> dict:
    return {"tol": _parse_tol(args.tol), "seed": args.seed, "max_dim": args.max_dim}


def _cmd_record_prob(args) -> int:
    model = _parse_model(args)
    ns = range(2, args.n_max + 1) if args.n_max else [args.n]
    laws = [records.record_probability(model, n, **_kw(args)) for n in ns]
    _emit(args, "record-prob", _law_settings(args, n=args.n, n_max=args.n_max),
          ["n"] + _LAW_COLUMNS, [(n, *_law_row(law)) for n, law in zip(ns, laws)])
    return _finish(args, laws)


def _cmd_record_cdf(args) -> int:
    model = _parse_model(args)
    xs = _parse_floats(args.x, "--x")
    laws = [records.record_value_cdf(model, args.n, x, **_kw(args)) for x in xs]
    _emit(args, "record-cdf", _law_settings(args, n=args.n, x=args.x),
          ["x"] + _LAW_COLUMNS, [(x, *_law_row(law)) for x, law in zip(xs, laws)])
    return _finish(args, laws)


def _cmd_arrival_times(args) -> int:
    model = _parse_model(args)
    times = [int(t) for t in _parse_floats(args.times, "--times")]
    law = records.arrival_times_joint(model, times, **_kw(args))
    _emit(args, "arrival-times", _law_settings(args, times=args.times),
          _LAW_COLUMNS, [_law_row(law)])
    return _finish(args, [law])


def _cmd_t2_pmf(args) -> int:
    model = _parse_model(args)
    ns = range(2, args.n_max + 1) if args.n_max else [args.n]
    laws = [records.second_record_time_pmf(model, n, **_kw(args)) for n in ns]
    _emit(args, "t2-pmf", _law_settings(args, n=args.n, n_max=args.n_max),
          ["n"] + _LAW_COLUMNS, [(n, *_law_row(law)) for n, law in zip(ns, laws)])
    return _finish(args, laws)


def _series_row(x: float, res: records.SeriesResult) -> tuple:
    return (x, res.value, res.abs_error, len(res.terms), res.last_index,
            res.residual_bound, res.status)


_SERIES_COLUMNS = ["x", "value", "abs_error", "terms", "last_index",
                   "residual_bound", "status"]


def _cmd_increment_cdf(args) -> int:
    model = _parse_model(args)
    xs = _parse_floats(args.x, "--x")
    trunc = records.TailPolicy(max_terms=args.max_terms)
    results = [
        records.first_increment_cdf(model, x, trunc=trunc, **_kw(args)) for x in xs
    ]
    _emit(args, "increment-cdf", _law_settings(args, x=args.x, max_terms=args.max_terms),
          _SERIES_COLUMNS, [_series_row(x, r) for x, r in zip(xs, results)])
    return 0 if all(r.converged for r in results) else 3


def _cmd_increment2_cdf(args) -> int:
    model = _parse_model(args)
    xs = _parse_floats(args.x, "--x")
    trunc = records.TailPolicy(max_terms=args.max_terms)
    results = [
        records.second_increment_cdf(model, x, trunc=trunc, **_kw(args)) for x in xs
    ]
    _emit(args, "increment2-cdf", _law_settings(args, x=args.x, max_terms=args.max_terms),
          _SERIES_COLUMNS, [_series_row(x, r) for x, r in zip(xs, results)])
    return 0 if all(r.converged for r in results) else 3


def _cmd_expected_records(args) -> int:
    model = _parse_model(args)
    res = records.expected_records(model, horizon=args.horizon, **_kw(args))
    _emit(args, "expected-records", _law_settings(args, horizon=args.horizon),
          ["partial_sum", "abs_error", "terms", "classification", "total"],
          [(res.partial_sum, res.abs_error, len(res.terms), res.classification,
            res.total if res.total is not None else math.nan)])
    return 0


def _cmd_joint_prob(args) -> int:
    model = _parse_model(args)
    law = records.joint_record_prob(model, args.j, args.n, **_kw(args))
    _emit(args, "joint-prob", _law_settings(args, j=args.j, n=args.n),
          _LAW_COLUMNS, [_law_row(law)])
    return _finish(args, [law])


def _cmd_joint_cdf(args) -> int:
    model = _parse_model(args)
    law = records.joint_record_cdf(model, args.j, args.n, args.x1, args.x2, **_kw(args))
    _emit(args, "joint-cdf",
          _law_settings(args, j=args.j, n=args.n, x1=args.x1, x2=args.x2),
          _LAW_COLUMNS, [_law_row(law)])
    return _finish(args, [law])


def _cmd_cons_joint_prob(args) -> int:
    model = _parse_model(args)
    law = records.consecutive_joint_record_prob(model, args.j, args.n, **_kw(args))
    _emit(args, "cons-joint-prob", _law_settings(args, j=args.j, n=args.n),
          _LAW_COLUMNS, [_law_row(law)])
    return _finish(args, [law])


def _cmd_cons_joint_cdf(args) -> int:
    model = _parse_model(args)
    law = records.consecutive_joint_record_cdf(
        model, args.j, args.n, args.x1, args.x2, **_kw(args)
    )
    _emit(args, "cons-joint-cdf",
          _law_settings(args, j=args.j, n=args.n, x1=args.x1, x2=args.x2),
          _LAW_COLUMNS, [_law_row(law)])
    return _finish(args, [law])


def _cmd_complete_prob(args) -> int:
    model = _parse_cross(args)
    law = multivariate.complete_record_probability(model, args.n, **_kw(args))
    _emit(args, "complete-prob", _law_settings(args, n=args.n),
          _LAW_COLUMNS, [_law_row(law)])
    return _finish(args, [law])


def _cmd_complete_cdf(args) -> int:
    model = _parse_cross(args)
    x = _parse_floats(args.x, "--x")
    law = multivariate.complete_record_cdf(model, args.n, x, **_kw(args))
    _emit(args, "complete-cdf", _law_settings(args, n=args.n, x=args.x),
          _LAW_COLUMNS, [_law_row(law)])
    return _finish(args, [law])


def _cmd_joint_complete_prob(args) -> int:
    model = _parse_cross(args)
    law = multivariate.joint_complete_record_prob(model, args.j, args.n, **_kw(args))
    _emit(args, "joint-complete-prob", _law_settings(args, j=args.j, n=args.n),
          _LAW_COLUMNS, [_law_row(law)])
    return _finish(args, [law])


def _cmd_joint_complete_cdf(args) -> int:
    model = _parse_cross(args)
    x1 = _parse_floats(args.x1, "--x1")
    x2 = _parse_floats(args.x2, "--x2")
    law = multivariate.joint_complete_record_cdf(
        model, args.j, args.n, x1, x2, **_kw(args)
    )
    _emit(args, "joint-complete-cdf",
          _law_settings(args, j=args.j, n=args.n, x1=args.x1, x2=args.x2),
          _LAW_COLUMNS, [_law_row(law)])
    return _finish(args, [law])


def _cmd_theta(args) -> int:
    chosen = [
        args.chernick_m is not None,
        args.stable_coeffs is not None,
        args.hsing_deltas is not None,
    ]
    if sum(chosen) != 1:
        raise ValidationError(
            "theta needs exactly one of --chernick-m, --stable-coeffs, --hsing-deltas"
        )
    if args.chernick_m is not None:
        est = asymptotic.chernick_theta(args.chernick_m)
        settings = {"chernick_m": args.chernick_m}
    elif args.stable_coeffs is not None:
        if args.stable_alpha is None:
            raise ValidationError("--stable-coeffs needs --stable-alpha")
        est = asymptotic.stable_ma_theta(
            _parse_floats(args.stable_coeffs, "--stable-coeffs"),
            args.stable_alpha,
            args.stable_kappa,
        )
        settings = {
            "stable_coeffs": args.stable_coeffs,
            "stable_alpha": args.stable_alpha,
            "stable_kappa": args.stable_kappa,
        }
    else:
        deltas: dict[int, float] = {}
        for pair in args.hsing_deltas.split(","):
            lag_txt, _, value_txt = pair.partition(":")
            try:
                deltas[int(lag_txt)] = float(value_txt)
            except ValueError:
                raise ValidationError(
                    f"--hsing-deltas entries must be LAG:VALUE, got {pair!r}"
                )
        est = asymptotic.hsing_theta(
            deltas, tol=_parse_tol(args.tol) or 1e-8, seed=args.seed
        )
        settings = {"hsing_deltas": args.hsing_deltas, "tol": args.tol,
                    "seed": args.seed}
    gev = est.gev
    _emit(args, "theta", settings,
          ["theta", "provenance", "abs_error", "gev_gamma", "gev_loc", "gev_scale"],
          [(est.theta, est.provenance, est.abs_error,
            gev.gamma if gev else math.nan,
            gev.loc if gev else math.nan,
            gev.scale if gev else math.nan)])
    return 0


def _cmd_gev(args) -> int:
    if args.family == "gumbel":
        spec = asymptotic.GevSpec.gumbel()
    elif args.family == "frechet":
        spec = asymptotic.GevSpec.frechet(args.param)
    elif args.family == "negative-weibull":
        spec = asymptotic.GevSpec.negative_weibull(args.param)
    else:
        spec = asymptotic.GevSpec(args.gamma, args.loc, args.scale)
    xs = _parse_floats(args.x, "--x")
    rows = [(x, asymptotic.gev_cdf(x, spec, theta=args.theta)) for x in xs]
    _emit(args, "gev",
          {"family": args.family or "custom", "param": args.param,
           "gamma": spec.gamma, "loc": spec.loc, "scale": spec.scale,
           "theta": args.theta, "x": args.x},
          ["x", "cdf"], rows)
    return 0


def _parse_process(args) -> simulate.SimStudy:
    spec = args.process
    name, _, rest = spec.partition(":")
    if name == "chernick":
        process = simulate.ChernickProcess(int(rest))
    elif name == "stable-ma":
        coeff_txt, _, tail = rest.partition(":")
        alpha_txt, _, kappa_txt = tail.partition(":")
        if not alpha_txt:
            raise ValidationError(
                "stable-ma process spec is stable-ma:C1,C2,...:ALPHA[:KAPPA]"
            )
        process = simulate.StableMaProcess(
            tuple(_parse_floats(coeff_txt, "--process stable-ma")),
            float(alpha_txt),
            float(kappa_txt) if kappa_txt else 0.0,
        )
    elif name == "cross" or getattr(args, "cross_file", None) or getattr(args, "d", None):
        process = _parse_cross(args)
    else:
        process = _parse_model(argparse.Namespace(
            model=spec, model_file=None, jitter=args.jitter))
    return simulate.SimStudy(process, n=args.n, n_paths=args.paths, seed=args.seed)


def _cmd_simulate(args) -> int:
    study = _parse_process(args)
    keep_paths = args.estimate_theta or args.dump is not None
    if keep_paths and study.n * study.n_paths > 50_000_000:
        raise ValidationError(
            "keeping paths for --estimate-theta/--dump needs n * paths <= 5e7"
        )
    stats = simulate.simulate_records(study, keep_paths=keep_paths)
    settings = {"process": args.process, "n": args.n, "paths": args.paths,
                "seed": args.seed}
    if args.estimate_theta:
        est = simulate.empirical_extremal_index(
            stats.paths, r=args.r, q=args.q, seed=args.seed
        )
        settings.update({
            "theta_hat": est.theta,
            "theta_lo": est.ci[0],
            "theta_hi": est.ci[1],
            "r": int(est.details["r"]),
            "q": args.q,
        })
    if args.dump is not None:
        np.save(args.dump, stats.paths)
        settings["dump"] = args.dump
    rows = [
        (i + 1, stats.record_rate[i], stats.record_se[i])
        for i in range(stats.n)
    ]
    _emit(args, "simulate", settings, ["index", "rate", "se"], rows)
    return 0


# ---------------------------------------------------------------------------
# validate


def _check(rows, name, value, reference, bound) -> None:
    diff = abs(value - reference)
    rows.append((name, value, reference, diff, bound,
                 "pass" if diff <= bound else "FAIL"))


def _suite_iid(args, rows) -> None:
    model = CorrelationModel.iid()
    kw = _kw(args)
    for n in range(2, args.n_max + 1):
        _check(rows, f"record-prob[n={n}]",
               records.record_probability(model, n, **kw).value, 1.0 / n, 1e-4)
        _check(rows, f"t2-pmf[n={n}]",
               records.second_record_time_pmf(model, n, **kw).value,
               1.0 / (n * (n - 1)), 1e-4)
    if args.n_max >= 3:
        _check(rows, "arrival[2,3]",
               records.arrival_times_joint(model, [2, 3], **kw).value, 1.0 / 6, 1e-4)
        _check(rows, "record-cdf[n=3,x=0]",
               records.record_value_cdf(model, 3, 0.0, **kw).value, 0.125, 1e-4)
    if args.n_max >= 4:
        _check(rows, "joint-prob[2,4]",
               records.joint_record_prob(model, 2, 4, **kw).value, 0.125, 1e-4)
        _check(rows, "cons-joint-prob[2,4]",
               records.consecutive_joint_record_prob(model, 2, 4, **kw).value,
               1.0 / 12, 1e-4)
    harmonic = sum(1.0 / k for k in range(1, args.n_max + 1))
    _check(rows, f"expected-records[h={args.n_max}]",
           records.expected_records(model, horizon=args.n_max, **kw).partial_sum,
           harmonic, 1e-3)


def _suite_mc(args, rows) -> None:
    model = _parse_model(args)
    kw = _kw(args)
    horizon = min(args.n_max, 8)
    study = simulate.SimStudy(model, n=horizon, n_paths=200_000, seed=args.seed + 1)
    stats = simulate.simulate_records(study, keep_indicators=True)
    for n in range(2, horizon + 1):
        law = records.record_probability(model, n, **kw)
        bound = 3.0 * (stats.record_se[n - 1] + law.abs_error)
        _check(rows, f"mc-record-prob[n={n}]",
               law.value, stats.record_rate[n - 1], bound)
    for n in (3, min(4, horizon)):
        law = records.second_record_time_pmf(model, n, **kw)
        rate = stats.arrival_pmf(2, n)
        se = math.sqrt(max(rate * (1 - rate), 1e-12) / stats.n_paths)
        _check(rows, f"mc-t2-pmf[n={n}]", law.value, rate, 3.0 * (se + law.abs_error))
    j, n = 2, min(4, horizon)
    law = records.joint_record_prob(model, j, n, **kw)
    both = (stats.indicators[:, j - 1] & stats.indicators[:, n - 1]).mean()
    se = math.sqrt(max(both * (1 - both), 1e-12) / stats.n_paths)
    _check(rows, f"mc-joint-prob[{j},{n}]", law.value, both, 3.0 * (se + law.abs_error))
    res = records.expected_records(model, horizon=horizon, **kw)
    _check(rows, f"mc-expected-records[h={horizon}]",
           res.partial_sum, stats.expected_count,
           3.0 * (stats.expected_count_se + res.abs_error))


def _suite_mvn(args, rows) -> None:
    for rho in (-0.9, -0.5, 0.0, 0.5, 0.9):
        closed = 0.25 + math.asin(rho) / (2.0 * math.pi)
        _check(rows, f"orthant-identity[rho={rho}]",
               bvn_cdf(0.0, 0.0, rho), closed, 1e-6)
    cov = np.eye(3) + np.ones((3, 3))
    res = mvn_cdf(MvnProblem.lower_orthant(upper=np.zeros(3), cov=cov),
                  tol=1e-6, seed=args.seed)
    _check(rows, "tri-orthant[I+11T]", res.value, 0.25, 1e-5)
    model = CorrelationModel.ar1(0.5)
    law = records.record_probability(model, 6, tol=1e-6, seed=args.seed)
    stats = simulate.simulate_records(
        simulate.SimStudy(model, n=6, n_paths=400_000, seed=args.seed + 2)
    )
    bound = 3.0 * (stats.record_se[5] + law.abs_error)
    _check(rows, "dim5-orthant-vs-mc", law.value, stats.record_rate[5], bound)


def _cmd_validate(args) -> int:
    rows: list[tuple] = []
    suites = ("iid", "mc", "mvn") if args.suite == "all" else (args.suite,)
    for suite in suites:
        {"iid": _suite_iid, "mc": _suite_mc, "mvn": _suite_mvn}[suite](args, rows)
    _emit(args, "validate",
          _law_settings(args, suite=args.suite, n_max=args.n_max),
          ["check", "value", "reference", "diff", "bound", "status"], rows)
    failures = [row for row in rows if row[-1] == "FAIL"]
    if failures:
        print(f"validate: {len(failures)} of {len(rows)} checks failed",
              file=sys.stderr)
        return 3
    return 0


# ---------------------------------------------------------------------------
# parser assembly


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", default="auto",
                        help="target absolute tolerance, or 'auto'")
    common.add_argument("--seed", type=int, default=0, help="root RNG seed")
    common.add_argument("--max-dim", type=int, default=DEFAULT_MAX_DIM,
                        dest="max_dim", help="integration dimension cap")
    common.add_argument("--out", default="-", help="output path ('-' = stdout)")
    common.add_argument("--format", choices=("csv", "pretty"), default="csv")
    common.add_argument("--jitter", type=float, default=0.0,
                        help="add jitter*I to file-loaded matrices before validation")
    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--model", default="iid",
                       help="iid | ar1:PHI | eq:RHO | tab:R1,R2,... | gamma-identity:C")
    model.add_argument("--model-file", dest="model_file",
                       help="CSV: 'lag,value' table or explicit matrix")
    cross = argparse.ArgumentParser(add_help=False)
    cross.add_argument("--cross-file", dest="cross_file",
                       help="lag-stamped d x d CSV block sections")
    cross.add_argument("--d", type=int, help="components (with --model temporal part)")
    cross.add_argument("--cross-rho", dest="cross_rho", type=float, default=0.0,
                       help="constant cross-correlation for --d models")

    parser = argparse.ArgumentParser(
        prog="recordlab",
        description="Exact and simulated record laws for dependent sequences.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, parents, **kw):
        p = sub.add_parser(name, parents=parents, **kw)
        p.set_defaults(func=func)
        return p

    p = add("record-prob", _cmd_record_prob, [common, model],
            help="probability that observation n is a record")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--n-max", dest="n_max", type=int,
                   help="emit a table for n = 2..n_max instead")
    p = add("record-cdf", _cmd_record_cdf, [common, model],
            help="cdf of the record value at time n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", required=True, help="comma-separated evaluation points")
    p = add("arrival-times", _cmd_arrival_times, [common, model],
            help="P(T(2)=j2, ..., T(k)=jk)")
    p.add_argument("--times", required=True, help="comma-separated arrival times")
    p = add("t2-pmf", _cmd_t2_pmf, [common, model],
            help="pmf of the second record time")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--n-max", dest="n_max", type=int)
    p = add("increment-cdf", _cmd_increment_cdf, [common, model],
            help="cdf of the first record increment (x > 0)")
    p.add_argument("--x", required=True)
    p.add_argument("--max-terms", dest="max_terms", type=int, default=500)
    p = add("increment2-cdf", _cmd_increment2_cdf, [common, model],
            help="cdf of the second record increment (x > 0)")
    p.add_argument("--x", required=True)
    p.add_argument("--max-terms", dest="max_terms", type=int, default=500)
    p = add("expected-records", _cmd_expected_records, [common, model],
            help="partial sums and classification of the expected record count")
    p.add_argument("--horizon", type=int, default=30)
    for name, func in (("joint-prob", _cmd_joint_prob),
                       ("cons-joint-prob", _cmd_cons_joint_prob)):
        p = add(name, func, [common, model], help=f"{name} at times j and n")
        p.add_argument("--j", type=int, required=True)
        p.add_argument("--n", type=int, required=True)
    for name, func in (("joint-cdf", _cmd_joint_cdf),
                       ("cons-joint-cdf", _cmd_cons_joint_cdf)):
        p = add(name, func, [common, model], help=f"{name} at times j and n")
        p.add_argument("--j", type=int, required=True)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--x1", type=float, required=True)
        p.add_argument("--x2", type=float, required=True)
    p = add("complete-prob", _cmd_complete_prob, [common, model, cross],
            help="complete-record probability at time n (d components)")
    p.add_argument("--n", type=int, required=True)
    p = add("complete-cdf", _cmd_complete_cdf, [common, model, cross],
            help="cdf of the complete-record value vector")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", required=True, help="d comma-separated thresholds")
    p = add("joint-complete-prob", _cmd_joint_complete_prob, [common, model, cross],
            help="P(complete records at j and n)")
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p = add("joint-complete-cdf", _cmd_joint_complete_cdf, [common, model, cross],
            help="joint cdf of the two complete-record value vectors")
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x1", required=True)
    p.add_argument("--x2", required=True)
    p = add("theta", _cmd_theta, [common],
            help="closed-form extremal index for a worked process family")
    p.add_argument("--chernick-m", dest="chernick_m", type=int)
    p.add_argument("--stable-coeffs", dest="stable_coeffs")
    p.add_argument("--stable-alpha", dest="stable_alpha", type=float)
    p.add_argument("--stable-kappa", dest="stable_kappa", type=float, default=0.0)
    p.add_argument("--hsing-deltas", dest="hsing_deltas",
                   help="comma-separated LAG:VALUE pairs (inf allowed)")
    p = add("gev", _cmd_gev, [common],
            help="generalized extreme-value cdf G(x)**theta")
    p.add_argument("--family", choices=("gumbel", "frechet", "negative-weibull"))
    p.add_argument("--param", type=float, default=1.0,
                   help="alpha or beta for the parametric families")
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--loc", type=float, default=0.0)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--x", required=True)
    p = add("simulate", _cmd_simulate, [common, model, cross],
            help="Monte-Carlo record rates for any process family")
    p.add_argument("--process", default="iid",
                   help="model spec | chernick:M | stable-ma:C1,C2:ALPHA[:KAPPA] | cross")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--paths", type=int, required=True)
    p.add_argument("--estimate-theta", dest="estimate_theta", action="store_true")
    p.add_argument("--r", type=int, help="runs-estimator block length")
    p.add_argument("--q", type=float, default=0.95, help="threshold quantile")
    p.add_argument("--dump", help="save raw paths to this .npy file")
    p = add("validate", _cmd_validate, [common, model],
            help="closed-form vs oracle cross-checks")
    p.add_argument("--suite", choices=("iid", "mc", "mvn", "all"), default="iid")
    p.add_argument("--n-max", dest="n_max", type=int, default=6)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (TailNotConverged, DegenerateNormalization, AcceptanceTooLow) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (RecordLabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
