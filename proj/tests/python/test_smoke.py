import json
import math

import numpy as np
import pytest

import odml


def blobs(seed=0):
    x, y = odml.synth_generate(3, 4, [30, 30, 6], sphere_radius=3.0, seed=seed)
    return np.asarray(x), np.asarray(y)


def test_sym_eig_matches_numpy():
    rng = np.random.default_rng(1)
    g = rng.standard_normal((5, 5))
    m = g + g.T
    values, vectors = odml.sym_eig(m)
    assert np.allclose(np.sort(values)[::-1], np.sort(np.linalg.eigvalsh(m))[::-1])
    assert np.allclose(vectors @ np.diag(values) @ vectors.T, m)


def test_wright_omega_fixed_point():
    for z in (-3.0, 0.0, 1.0, 10.0):
        w = odml.wright_omega(z)
        assert math.isclose(w + math.log(w), z, abs_tol=1e-12)


def test_prox_scalar_stationarity_sfn():
    lt, eta, gamma = 2.0, 0.5, 1.0
    x = odml.prox_scalar("SFN", lt, eta, gamma)
    # d/dx [(x - lt)^2 / (2 eta) + gamma ((x - 1)^2 + x)] = 0
    assert math.isclose((x - lt) / eta + gamma * (2 * (x - 1) + 1), 0.0, abs_tol=1e-12)


def test_convex_regularizer_at_identity():
    assert math.isclose(odml.omega_convex("CSFN", np.eye(3)), 3.0)


def test_train_mdml_returns_psd_metric():
    x, y = blobs()
    r = odml.train_mdml(x, y, max_epochs=3, regularizer={"name": "CVND", "gamma": 0.1})
    assert np.all(np.linalg.eigvalsh(r["matrix"]) >= -1e-10)
    assert json.loads(r["model_json"])["dim"] == 4
    report = odml.evaluate_metric(r["matrix"], x, y, x, y, frequent_threshold=20)
    assert 0.0 <= report["auc_all"] <= 1.0


def test_train_pdml_shape():
    x, y = blobs()
    r = odml.train_pdml(x, y, npv=2, max_epochs=2, regularizer={"name": "LDD", "gamma": 0.01})
    assert r["matrix"].shape == (2, 4)


def test_errors_raise_odml_error():
    with pytest.raises(odml.OdmlError):
        odml.f_inverse(1.0)
    assert issubclass(odml.OdmlError, ValueError)


def test_f_curve_anchor():
    assert odml.f_curve(1.0) == 2.0


def test_run_cli_usage_error():
    code, out, err = odml.run_cli(["train"])
    assert code == 1
    assert json.loads(err)["exit_code"] == 1
