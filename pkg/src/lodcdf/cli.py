"""Command-line front end.

Subcommands:

* ``estimate`` -- fit one or all CDF estimators to a data file and emit the
  step function (optionally evaluated at chosen points) with standard errors;
* ``compare``  -- product-limit vs RHR-MLE side by side, per-jump ratios,
  tie flags, and mean estimates under both leftover policies;
* ``simulate`` -- one Monte Carlo study, JSON output;
* ``sweep``    -- a parameter sweep of studies, plot-ready CSV output.

Exit codes: 0 ok, 2 I/O or usage, 3 malformed input data, 4 fully censored
dataset, 5 invalid study parameters, 6 every replication degenerate.

All output is assembled in memory and written in one shot, so a failing run
never leaves a partial file behind. Numbers in CSV are printed with 7
significant digits; JSON carries full precision. A NaN variance is printed
as "unstable" in CSV and null in JSON. The LODCDF_SEED environment variable
supplies the default seed for simulate/sweep.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .data import AllCensoredError, IngestError, ingest, tally
from .estimators import (
    StepCdf,
    crhf_exp_cdf,
    eval_cdf,
    greenwood_variance,
    mean_from_cdf,
    product_limit_cdf,
    rhr_mle_cdf,
    rhr_variance,
)
from .simulation import (
    InvalidParameterError,
    SimConfig,
    StudyDegenerateError,
    run_study,
    sweep,
)

METHODS = ("product-limit", "rhr-mle", "crhf-exp")


def _fmt(x: float | None) -> str:
    """7 significant digits; NaN becomes the word 'unstable', None is empty
    (a column the method does not provide)."""
    if x is None:
        return ""
    if isinstance(x, float) and math.isnan(x):
        return "unstable"
    return format(float(x), ".7g")


def _json_safe(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def _stderr_of(variance: float | None) -> float | None:
    if variance is None:
        return None
    return math.sqrt(variance) if not math.isnan(variance) else float("nan")


def _fit(table, method: str) -> StepCdf:
    if method == "product-limit":
        return greenwood_variance(table, product_limit_cdf(table))
    if method == "rhr-mle":
        return rhr_variance(table, rhr_mle_cdf(table))
    if method == "crhf-exp":
        return crhf_exp_cdf(table)
    raise ValueError(f"unknown method {method!r}")


def _parse_floats(text: str, *, flag: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise InvalidParameterError(f"{flag} expects comma-separated numbers, got {text!r}")
    if not values:
        raise InvalidParameterError(f"{flag} expects at least one number")
    return values


def _default_seed() -> int:
    raw = os.environ.get("LODCDF_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise InvalidParameterError(f"LODCDF_SEED must be an integer, got {raw!r}")


def _emit(text: str, output: str | None) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


# ---------------------------------------------------------------- estimate


def _estimate_csv_single(f: StepCdf, eval_points: list[float] | None, n: int) -> str:
    lines = [
        f"# method: {f.method}",
        f"# n: {n}",
        f"# lower_value: {_fmt(f.lower_value)}",
    ]
    if f.lower_variance is not None:
        lines.append(f"# lower_variance: {_fmt(f.lower_variance)}")
    lines.append("t,estimate,variance,stderr")
    points = eval_points if eval_points is not None else [float(t) for t in f.support]
    for t in points:
        est, var = eval_cdf(f, t)
        lines.append(f"{_fmt(t)},{_fmt(est)},{_fmt(var)},{_fmt(_stderr_of(var))}")
    return "\n".join(lines) + "\n"


def _estimate_csv_all(fits: dict[str, StepCdf], eval_points: list[float] | None, n: int) -> str:
    pl, rhr, crhf = fits["product-limit"], fits["rhr-mle"], fits["crhf-exp"]
    lines = ["# method: all", f"# n: {n}"]
    if eval_points is not None:
        # Report layout: t, both estimates, both standard errors.
        lines.append("t,product_limit,rhr_mle,se_product_limit,se_rhr_mle")
        for t in eval_points:
            e1, v1 = eval_cdf(pl, t)
            e2, v2 = eval_cdf(rhr, t)
            lines.append(
                f"{_fmt(t)},{_fmt(e1)},{_fmt(e2)},"
                f"{_fmt(_stderr_of(v1))},{_fmt(_stderr_of(v2))}"
            )
    else:
        lines.append(f"# lower_value: {_fmt(pl.lower_value)},{_fmt(rhr.lower_value)},{_fmt(crhf.lower_value)}")
        lines.append("t,product_limit,rhr_mle,crhf_exp,se_product_limit,se_rhr_mle")
        for k, t in enumerate(pl.support):
            lines.append(
                f"{_fmt(t)},{_fmt(pl.values[k])},{_fmt(rhr.values[k])},{_fmt(crhf.values[k])},"
                f"{_fmt(_stderr_of(float(pl.variances[k])))},{_fmt(_stderr_of(float(rhr.variances[k])))}"
            )
    return "\n".join(lines) + "\n"


def _step_json(f: StepCdf) -> dict:
    out = {
        "method": f.method,
        "lower_value": f.lower_value,
        "lower_variance": _json_safe(f.lower_variance),
        "support": [float(t) for t in f.support],
        "values": [float(v) for v in f.values],
    }
    if f.variances is not None:
        out["variances"] = [_json_safe(float(v)) for v in f.variances]
        out["stderr"] = [_json_safe(_stderr_of(float(v))) for v in f.variances]
    return out


def _estimate_json(fits: dict[str, StepCdf], eval_points: list[float] | None, n: int) -> str:
    doc: dict = {"n": n, "estimates": [_step_json(f) for f in fits.values()]}
    if eval_points is not None:
        rows = []
        for t in eval_points:
            row: dict = {"t": t}
            for name, f in fits.items():
                est, var = eval_cdf(f, t)
                row[name] = est
                row[f"{name}_variance"] = _json_safe(var)
            rows.append(row)
        doc["eval"] = rows
    return json.dumps(doc, indent=2) + "\n"


def cmd_estimate(args: argparse.Namespace) -> int:
    dataset = ingest(args.input)
    table = tally(dataset)
    eval_points = _parse_floats(args.eval_points, flag="--eval-points") if args.eval_points else None
    names = METHODS if args.method == "all" else (args.method,)
    fits = {name: _fit(table, name) for name in names}
    if args.format == "json":
        text = _estimate_json(fits, eval_points, dataset.n)
    elif args.method == "all":
        text = _estimate_csv_all(fits, eval_points, dataset.n)
    else:
        text = _estimate_csv_single(fits[args.method], eval_points, dataset.n)
    _emit(text, args.output)
    return 0


# ---------------------------------------------------------------- compare


def cmd_compare(args: argparse.Namespace) -> int:
    dataset = ingest(args.input)
    table = tally(dataset)
    pl = product_limit_cdf(table)
    rhr = rhr_mle_cdf(table)
    # A jump is flagged when censored observations share its value; those
    # are exactly the points where the two estimators can disagree.
    exact_mask = table.exact >= 1
    tie = table.censored[exact_mask] >= 1
    ratio = rhr.values / pl.values
    means = {
        policy: (mean_from_cdf(pl, policy), mean_from_cdf(rhr, policy))
        for policy in ("at-first-exact", "at-zero")
    }
    if args.format == "json":
        doc = {
            "n": dataset.n,
            "rows": [
                {
                    "t": float(pl.support[k]),
                    "product_limit": float(pl.values[k]),
                    "rhr_mle": float(rhr.values[k]),
                    "ratio": float(ratio[k]),
                    "tie": bool(tie[k]),
                }
                for k in range(pl.jump_count)
            ],
            "means": {
                policy: {"product_limit": a, "rhr_mle": b, "diff": a - b}
                for policy, (a, b) in means.items()
            },
        }
        text = json.dumps(doc, indent=2) + "\n"
    else:
        lines = [f"# n: {dataset.n}"]
        for policy, (a, b) in means.items():
            lines.append(
                f"# mean[{policy}]: product_limit={_fmt(a)} rhr_mle={_fmt(b)} diff={_fmt(a - b)}"
            )
        lines.append("t,product_limit,rhr_mle,ratio,tie")
        for k in range(pl.jump_count):
            lines.append(
                f"{_fmt(pl.support[k])},{_fmt(pl.values[k])},{_fmt(rhr.values[k])},"
                f"{_fmt(ratio[k])},{int(tie[k])}"
            )
        text = "\n".join(lines) + "\n"
    _emit(text, args.output)
    return 0


# ---------------------------------------------------------------- simulate


def _config_dict(cfg: SimConfig) -> dict:
    doc = asdict(cfg)
    doc["lods"] = list(cfg.lods)
    return doc


def _sim_config(args: argparse.Namespace, *, m_default: int = 1000) -> SimConfig:
    if args.mu is None or args.sigma is None:
        raise InvalidParameterError("simulate requires --mu and --sigma")
    return SimConfig(
        mu=args.mu,
        sigma=args.sigma,
        scheme=args.scheme,
        lods=tuple(_parse_floats(args.lods, flag="--lods")),
        mu_c=args.mu_c,
        sigma_c=args.sigma_c,
        n=args.n,
        m=args.m if args.m is not None else m_default,
        seed=args.seed if args.seed is not None else _default_seed(),
    )


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _sim_config(args)
    result = run_study(cfg, jobs=args.jobs)
    doc = {
        "config": _config_dict(cfg),
        "n_pairs": result.n_pairs,
        "n_degenerate": result.n_degenerate,
        "mean_diff": result.mean_diff,
        "se_diff": _json_safe(result.se_diff),
    }
    if args.full:
        doc["pairs"] = [
            [int(rep), float(a), float(b)]
            for rep, a, b in zip(result.indices, result.ks_product_limit, result.ks_rhr_mle)
        ]
    _emit(json.dumps(doc, indent=2) + "\n", args.output)
    return 0


# ---------------------------------------------------------------- sweep


def _parse_grid(text: str) -> tuple[str, np.ndarray]:
    """Parse NAME=START:STOP:COUNT into (name, inclusive grid)."""
    if "=" not in text:
        raise InvalidParameterError(f"--grid expects NAME=START:STOP:COUNT, got {text!r}")
    name, _, spec = text.partition("=")
    name = name.strip()
    parts = spec.split(":")
    if len(parts) != 3:
        raise InvalidParameterError(f"--grid expects NAME=START:STOP:COUNT, got {text!r}")
    try:
        start, stop = float(parts[0]), float(parts[1])
        count = int(parts[2])
    except ValueError:
        raise InvalidParameterError(f"--grid expects numeric START:STOP and integer COUNT, got {text!r}")
    if count < 1:
        raise InvalidParameterError(f"--grid COUNT must be at least 1, got {count}")
    return name, np.linspace(start, stop, count)


def cmd_sweep(args: argparse.Namespace) -> int:
    fixed: dict[str, float] = {}
    for item in args.fix or []:
        if "=" not in item:
            raise InvalidParameterError(f"--fix expects NAME=VALUE, got {item!r}")
        name, _, raw = item.partition("=")
        name = name.strip()
        if name not in ("mu", "sigma", "mu_c", "sigma_c"):
            raise InvalidParameterError(f"--fix accepts mu, sigma, mu_c, sigma_c; got {name!r}")
        try:
            fixed[name] = float(raw)
        except ValueError:
            raise InvalidParameterError(f"--fix expects a numeric value, got {item!r}")
    param, grid = _parse_grid(args.grid)
    if param not in ("mu", "sigma"):
        raise InvalidParameterError(f"--grid accepts mu or sigma, got {param!r}")
    if param in fixed:
        raise InvalidParameterError(f"{param} cannot be both fixed and swept")
    # The swept parameter needs a placeholder value so the base config
    # validates; every study overrides it.
    base_fields = {"mu": 0.0, "sigma": 1.0}
    base_fields.update(fixed)
    base = SimConfig(
        mu=base_fields["mu"],
        sigma=base_fields["sigma"],
        scheme=args.scheme,
        lods=tuple(_parse_floats(args.lods, flag="--lods")),
        mu_c=base_fields.get("mu_c", 0.0),
        sigma_c=base_fields.get("sigma_c", 1.0),
        n=args.n,
        m=args.m if args.m is not None else 1000,
        seed=args.seed if args.seed is not None else _default_seed(),
    )
    results = sweep(base, param, grid, jobs=args.jobs)
    lines = [f"# sweep: {param}"]
    cfg_doc = _config_dict(base)
    del cfg_doc[param]
    parts = " ".join(f"{k}={cfg_doc[k]}" for k in sorted(cfg_doc))
    lines.append(f"# config: {parts}")
    lines.append("param,mean_diff,n_pairs,n_degenerate")
    for res in results:
        value = getattr(res.config, param)
        lines.append(f"{_fmt(value)},{_fmt(res.mean_diff)},{res.n_pairs},{res.n_degenerate}")
    _emit("\n".join(lines) + "\n", args.output)
    return 0


# ---------------------------------------------------------------- wiring


def _add_sim_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mu", type=float, default=None, help="log-normal location of the lifetimes")
    p.add_argument("--sigma", type=float, default=None, help="log-normal scale of the lifetimes")
    p.add_argument("--scheme", choices=("time", "random"), default="time")
    p.add_argument("--lods", default="0.5,1,2", help="comma-separated LODs for the time scheme")
    p.add_argument("--mu-c", dest="mu_c", type=float, default=0.0, help="censoring location (random scheme)")
    p.add_argument("--sigma-c", dest="sigma_c", type=float, default=1.0, help="censoring scale (random scheme)")
    p.add_argument("--n", type=int, default=50, help="sample size per replication")
    p.add_argument("--m", type=int, default=None, help="replication count (default 1000)")
    p.add_argument("--seed", type=int, default=None, help="study seed (default: LODCDF_SEED or 0)")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers (same output for any value)")
    p.add_argument("--output", default=None, help="write here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lodcdf",
        description="Nonparametric CDF estimation for left-censored (limit-of-detection) data.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_est = sub.add_parser("estimate", help="fit an estimator to a data file")
    p_est.add_argument("input", help="CSV file of value,detected rows")
    p_est.add_argument("--method", choices=METHODS + ("all",), default="product-limit")
    p_est.add_argument("--eval-points", default=None, help="comma-separated t values to evaluate at")
    p_est.add_argument("--format", choices=("csv", "json"), default="csv")
    p_est.add_argument("--output", default=None, help="write here instead of stdout")
    p_est.set_defaults(func=cmd_estimate)

    p_cmp = sub.add_parser("compare", help="product-limit vs RHR-MLE on a data file")
    p_cmp.add_argument("input", help="CSV file of value,detected rows")
    p_cmp.add_argument("--format", choices=("csv", "json"), default="csv")
    p_cmp.add_argument("--output", default=None, help="write here instead of stdout")
    p_cmp.set_defaults(func=cmd_compare)

    p_sim = sub.add_parser("simulate", help="one Monte Carlo study (JSON)")
    _add_sim_flags(p_sim)
    p_sim.add_argument("--full", action="store_true", help="include the per-replication pair list")
    p_sim.set_defaults(func=cmd_simulate)

    p_sw = sub.add_parser("sweep", help="study per grid point of mu or sigma (CSV)")
    _add_sim_flags(p_sw)
    p_sw.add_argument("--fix", action="append", default=None, metavar="NAME=VALUE",
                      help="fix a parameter (mu, sigma, mu_c, sigma_c); repeatable")
    p_sw.add_argument("--grid", required=True, metavar="NAME=START:STOP:COUNT",
                      help="inclusive grid for the swept parameter (mu or sigma)")
    p_sw.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"lodcdf: {exc}", file=sys.stderr)
        return 2
    except IngestError as exc:
        print(f"lodcdf: {exc}", file=sys.stderr)
        return 3
    except AllCensoredError as exc:
        print(f"lodcdf: {exc}", file=sys.stderr)
        return 4
    except InvalidParameterError as exc:
        print(f"lodcdf: {exc}", file=sys.stderr)
        return 5
    except StudyDegenerateError as exc:
        print(f"lodcdf: {exc}", file=sys.stderr)
        return 6


if __name__ == "__main__":
    sys.exit(main())
