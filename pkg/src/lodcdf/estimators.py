"""Nonparametric CDF estimators for left-censored samples.

All estimators are step functions jumping only at the distinct exact values
x*_(1) < ... < x*_(l). Writing d* for the exact count at a jump value, q* for
the censored count tied to the same value, and y* for the number of
observations at or below it, the three estimates of F(t) are products over
the jump values above t:

* product-limit:            prod (1 - d*/y*)
* reversed-hazard-rate MLE: prod (1 - d*/(y* - q*))
* cumulative-reversed-hazard exponential: prod exp(-d*/y*)

The three differ only through ties (q* >= 1) and the exp(-u) >= 1-u gap; in
particular the first two coincide on any sample where no censored value
equals an exact value.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

from .data import AllCensoredError, ExactTallyTable, TallyTable, exact_tally

__all__ = [
    "StepCdf",
    "RhrTable",
    "product_limit_cdf",
    "rhr_mle_cdf",
    "crhf_exp_cdf",
    "greenwood_variance",
    "rhr_variance",
    "rhr_table",
    "eval_cdf",
    "mean_from_cdf",
    "quantile_from_cdf",
    "LeftoverPolicy",
]

# Products switch to log-space accumulation when any nonzero factor drops
# below this; exact zeros are handled exactly by either path.
LOG_PRODUCT_THRESHOLD = 1e-8

LeftoverPolicy = Literal["at-first-exact", "at-zero"]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class StepCdf:
    """Right-continuous step CDF estimate.

    ``values[k]`` is the estimate at and after ``support[k]``; ``lower_value``
    is the estimate everywhere below ``support[0]``. The last value is 1 by
    construction (empty product). Variances are attached per jump by the
    variance operations and stay None until then; ``lower_variance`` covers
    the region below the first jump and may be NaN where the underlying sum
    degenerates (reported as "unstable" by the CLI).
    """

    support: np.ndarray
    values: np.ndarray
    lower_value: float
    method: str
    variances: np.ndarray | None = None
    lower_variance: float | None = None

    def __post_init__(self):
        support = _frozen(np.asarray(self.support, dtype=np.float64))
        values = _frozen(np.asarray(self.values, dtype=np.float64))
        if support.size == 0 or support.size != values.size:
            raise ValueError("support and values must share a positive length")
        if support.size > 1 and not np.all(np.diff(support) > 0):
            raise ValueError("support must be strictly increasing")
        if np.any(values < 0) or np.any(values > 1):
            raise ValueError("CDF values must lie in [0, 1]")
        if values.size > 1 and np.any(np.diff(values) < 0):
            raise ValueError("CDF values must be non-decreasing")
        if not 0.0 <= self.lower_value <= values[0]:
            raise ValueError("lower_value must lie in [0, F at first jump]")
        variances = self.variances
        if variances is not None:
            variances = _frozen(np.asarray(variances, dtype=np.float64))
            if variances.size != support.size:
                raise ValueError("variances must align with the support")
            if np.any(variances[np.isfinite(variances)] < 0):
                raise ValueError("variances must be >= 0")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "lower_value", float(self.lower_value))
        object.__setattr__(self, "variances", variances)

    @property
    def jump_count(self) -> int:
        return int(self.support.size)


@dataclass(frozen=True)
class RhrTable:
    """Reversed-hazard-rate estimates r̂ at every distinct value with an exact count."""

    values: np.ndarray
    rates: np.ndarray

    def __post_init__(self):
        values = _frozen(np.asarray(self.values, dtype=np.float64))
        rates = _frozen(np.asarray(self.rates, dtype=np.float64))
        if values.size != rates.size or values.size == 0:
            raise ValueError("values and rates must share a positive length")
        if np.any(rates <= 0) or np.any(rates > 1):
            raise ValueError("each rate must lie in (0, 1]")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "rates", rates)


def _exact_rows(table: TallyTable | ExactTallyTable) -> ExactTallyTable:
    if isinstance(table, ExactTallyTable):
        return table
    return exact_tally(table)


def _tail_products(factors: np.ndarray) -> tuple[np.ndarray, float]:
    """Suffix products of a factor sequence.

    Returns (levels, lower) with levels[k] = prod(factors[k+1:]) and
    lower = prod(factors). Accumulates in log space only when some nonzero
    factor is below LOG_PRODUCT_THRESHOLD; both paths agree to 1e-12
    relative on nonzero results and are exact on zeros.
    """
    positive = factors[factors > 0.0]
    if positive.size and float(positive.min()) < LOG_PRODUCT_THRESHOLD:
        with np.errstate(divide="ignore"):
            logs = np.log(factors)
        running = np.cumsum(logs[::-1])[::-1]
        suffix = np.exp(running)
    else:
        suffix = np.cumprod(factors[::-1])[::-1]
    levels = np.append(suffix[1:], 1.0)
    return levels, float(suffix[0])


def product_limit_cdf(table: TallyTable | ExactTallyTable) -> StepCdf:
    """Product-limit estimate of the CDF from a left-censored tally.

    At each jump value the estimate is the product, over all exact values
    strictly above it, of (1 - d*/y*); above the last exact value the
    product is empty and the estimate is 1. ``lower_value`` (below the
    first jump) includes every factor and is 0 exactly when the smallest
    distinct value is exact-only.
    """
    rows = _exact_rows(table)
    factors = 1.0 - rows.exact / rows.at_or_below
    levels, lower = _tail_products(factors)
    return StepCdf(rows.values, levels, lower, "product-limit")


def rhr_mle_cdf(table: TallyTable | ExactTallyTable) -> StepCdf:
    """Maximum-likelihood CDF estimate built from reversed-hazard rates.

    Identical in form to the product-limit estimate except that censored
    observations tied to a jump value leave its denominator: the factor at
    a jump is (1 - d*/(y* - q*)), i.e. censored values equal to an exact
    value are treated as sitting just above it. On tie-free samples this
    estimator and the product-limit one are the same function.
    """
    rows = _exact_rows(table)
    factors = 1.0 - rows.exact / (rows.at_or_below - rows.censored)
    levels, lower = _tail_products(factors)
    return StepCdf(rows.values, levels, lower, "rhr-mle")


def crhf_exp_cdf(table: TallyTable | ExactTallyTable) -> StepCdf:
    """Exponentiated cumulative-reversed-hazard CDF estimate.

    Replaces each product-limit factor (1 - d*/y*) by exp(-d*/y*), so the
    estimate is exp(-sum of d*/y* above t): strictly positive everywhere
    and pointwise >= the product-limit estimate.
    """
    rows = _exact_rows(table)
    terms = rows.exact / rows.at_or_below
    running = np.cumsum(terms[::-1])[::-1]
    levels = np.exp(-np.append(running[1:], 0.0))
    return StepCdf(rows.values, levels, float(np.exp(-running[0])), "crhf-exp")


def greenwood_variance(table: TallyTable | ExactTallyTable, f: StepCdf) -> StepCdf:
    """Greenwood-type variance for a product-limit StepCdf.

    var at a jump = F̂² · sum over exact values above it of d*/(y*(y*-d*)).
    The only possible degenerate term (y* = d*, first exact value with
    nothing below) reaches only the region below the first jump, where the
    estimate itself is 0; that 0·inf case is reported as NaN ("unstable").
    """
    rows = _exact_rows(table)
    if f.method != "product-limit" or f.support.size != rows.values.size \
            or not np.array_equal(f.support, rows.values):
        raise ValueError("f must be the product-limit StepCdf of the same tally")
    with np.errstate(divide="ignore"):
        terms = rows.exact / (rows.at_or_below * (rows.at_or_below - rows.exact))
    running = np.cumsum(terms[::-1])[::-1]
    tail = np.append(running[1:], 0.0)
    with np.errstate(invalid="ignore"):
        variances = f.values**2 * tail
        lower_variance = f.lower_value**2 * float(running[0])
    return replace(f, variances=variances, lower_variance=lower_variance)


def rhr_variance(table: TallyTable | ExactTallyTable, f: StepCdf) -> StepCdf:
    """Delta-method variance for the reversed-hazard-rate MLE StepCdf.

    var at a jump = F̂⁽¹⁾² · sum over exact values above it of
    d*_j/(y*_{j-1}(y*_j - q*_j)), where y*_{j-1} is the cumulative count at
    the previous exact value (0 before the first). The j=1 term divides by
    zero and reaches only the region below the first jump; the variance
    there is defined as 0 (the estimator is degenerate at the bottom).
    """
    rows = _exact_rows(table)
    if f.method != "rhr-mle" or f.support.size != rows.values.size \
            or not np.array_equal(f.support, rows.values):
        raise ValueError("f must be the rhr-mle StepCdf of the same tally")
    prev_cum = np.concatenate(([0], rows.at_or_below[:-1]))
    with np.errstate(divide="ignore"):
        terms = rows.exact / (prev_cum * (rows.at_or_below - rows.censored))
    running = np.cumsum(terms[::-1])[::-1]
    tail = np.append(running[1:], 0.0)
    variances = f.values**2 * tail
    return replace(f, variances=variances, lower_variance=0.0)


def rhr_table(table: TallyTable) -> RhrTable:
    """Reversed-hazard-rate MLEs r̂ = d/(y - q) at each value with d >= 1."""
    rows = _exact_rows(table)
    return RhrTable(rows.values, rows.exact / (rows.at_or_below - rows.censored))


def eval_cdf(f: StepCdf, t: float) -> tuple[float, float | None]:
    """Evaluate a StepCdf at t (right-continuous); returns (estimate, variance).

    The variance half is None when the StepCdf carries no variances.
    """
    idx = int(np.searchsorted(f.support, t, side="right")) - 1
    if idx < 0:
        return f.lower_value, f.lower_variance
    variance = float(f.variances[idx]) if f.variances is not None else None
    return float(f.values[idx]), variance


def mean_from_cdf(f: StepCdf, leftover_policy: LeftoverPolicy = "at-first-exact") -> float:
    """Mean of the step distribution.

    The mass below the first jump (lower_value) has no observed location;
    `at-first-exact` stacks it on the first jump value, `at-zero` places it
    at 0. The two bracket any answer a substitution rule could give.
    """
    if leftover_policy not in ("at-first-exact", "at-zero"):
        raise ValueError(f"unknown leftover policy {leftover_policy!r}")
    masses = np.diff(f.values, prepend=f.lower_value)
    mean = float(np.dot(f.support, masses))
    if leftover_policy == "at-first-exact":
        mean += float(f.support[0]) * f.lower_value
    return mean


def quantile_from_cdf(f: StepCdf, p: float) -> float:
    """Smallest jump value t with F̂(t) >= p, for p in (0, 1]."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p!r}")
    idx = int(np.searchsorted(f.values, p, side="left"))
    return float(f.support[idx])
