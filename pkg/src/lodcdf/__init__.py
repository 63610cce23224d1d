"""Nonparametric CDF estimation for left-censored (limit-of-detection) data.

The package estimates the distribution of a positive quantity when some
observations are only known to lie at or below a detection limit. It ships
a product-limit estimator, a reversed-hazard-rate maximum-likelihood
estimator, an exponentiated cumulative-reversed-hazard estimator, variance
formulas for the first two, substitution baselines, an independent
Kaplan-Meier-on-negated-data oracle, and a Monte Carlo engine comparing
the estimators on simulated log-normal data.
"""

from .baselines import (
    KmCurve,
    SubstitutionStrategy,
    ecdf,
    km_negation_oracle,
    km_survival,
    perturb_censored_ties,
    substitution_mean,
)
from .data import (
    AllCensoredError,
    Dataset,
    ExactTallyTable,
    IngestError,
    Observation,
    TallyTable,
    exact_tally,
    ingest,
    tally,
)
from .estimators import (
    LeftoverPolicy,
    RhrTable,
    StepCdf,
    crhf_exp_cdf,
    eval_cdf,
    greenwood_variance,
    mean_from_cdf,
    product_limit_cdf,
    quantile_from_cdf,
    rhr_mle_cdf,
    rhr_table,
    rhr_variance,
)
from .simulation import (
    InvalidParameterError,
    SimConfig,
    StudyDegenerateError,
    StudyResult,
    apply_random_censoring,
    apply_time_censoring,
    ks_distance,
    run_study,
    sample_lognormal,
    substream,
    sweep,
)

__version__ = "0.1.0"

__all__ = [
    "AllCensoredError",
    "Dataset",
    "ExactTallyTable",
    "IngestError",
    "InvalidParameterError",
    "KmCurve",
    "LeftoverPolicy",
    "Observation",
    "RhrTable",
    "SimConfig",
    "StepCdf",
    "StudyDegenerateError",
    "StudyResult",
    "SubstitutionStrategy",
    "TallyTable",
    "apply_random_censoring",
    "apply_time_censoring",
    "crhf_exp_cdf",
    "ecdf",
    "eval_cdf",
    "exact_tally",
    "greenwood_variance",
    "ingest",
    "km_negation_oracle",
    "km_survival",
    "ks_distance",
    "mean_from_cdf",
    "perturb_censored_ties",
    "product_limit_cdf",
    "quantile_from_cdf",
    "rhr_mle_cdf",
    "rhr_table",
    "rhr_variance",
    "run_study",
    "sample_lognormal",
    "substitution_mean",
    "substream",
    "sweep",
    "tally",
]
