"""Mahalanobis metric learning with orthogonality-promoting regularizers."""

import json

from ._odml import (
    OdmlError,
    balance_score,
    check_trace_lemmas,
    compactness_score,
    f_curve,
    f_inverse,
    grad_convex,
    load_csv,
    omega_convex,
    omega_nonconvex,
    prox_matrix,
    prox_scalar,
    psd_factorize,
    run_cli,
    sym_eig,
    synth_generate,
    wright_omega,
)
from . import _odml

__all__ = [
    "OdmlError",
    "balance_score",
    "check_trace_lemmas",
    "compactness_score",
    "evaluate_metric",
    "f_curve",
    "f_inverse",
    "grad_convex",
    "load_csv",
    "omega_convex",
    "omega_nonconvex",
    "prox_matrix",
    "prox_scalar",
    "psd_factorize",
    "run_cli",
    "sym_eig",
    "synth_generate",
    "train_mdml",
    "train_pdml",
    "wright_omega",
]


def train_mdml(x, y, **config):
    """Train a Mahalanobis metric. Keyword arguments follow the `train`
    section of the CLI config, e.g. regularizer={"name": "CVND", "gamma": 0.1}."""
    return _odml.train_mdml(x, list(y), json.dumps(config))


def train_pdml(x, y, **config):
    """Train a projection matrix with a nonconvex regularizer (SFN/VND/LDD)."""
    return _odml.train_pdml(x, list(y), json.dumps(config))


def evaluate_metric(metric, x_train, y_train, x_test, y_test, frequent_threshold=1000):
    """Retrieval report as a dict."""
    return json.loads(
        _odml.evaluate_metric(
            metric, x_train, list(y_train), x_test, list(y_test), frequent_threshold
        )
    )
