"""Caption metric evaluation: lexical metrics, correlation protocols and metric ensembles."""

from ._core import (
    CapevalError,
    ConfigError,
    DataError,
    NumericalError,
    cv_r2,
    fit_ensemble,
    forward_select,
    kendall_tau_b,
    kendall_tau_c,
    load_dataset_summary,
    ngrams,
    ols_fit,
    pearson,
    run_cli,
    score_ensemble,
    score_texts,
    stem,
    table2_model,
    table2_model_json,
    tokenize,
)

__all__ = [
    "CapevalError",
    "ConfigError",
    "DataError",
    "NumericalError",
    "cv_r2",
    "fit_ensemble",
    "forward_select",
    "kendall_tau_b",
    "kendall_tau_c",
    "load_dataset_summary",
    "ngrams",
    "ols_fit",
    "pearson",
    "run_cli",
    "score_ensemble",
    "score_texts",
    "stem",
    "table2_model",
    "table2_model_json",
    "tokenize",
]
