import math

import numpy as np
import pytest

import elmsol


@pytest.fixture(scope="module")
def bench():
    data = elmsol.gen_synth(count=600, seed=7, noise=0.05)
    train, test = elmsol.split(data, 0.75, 7)
    return data, train, test


def test_split_sizes(bench):
    data, train, test = bench
    assert len(data) == 600
    assert len(train) == 450 and len(test) == 150


def test_train_predict_roundtrip(bench, tmp_path):
    _, train, test = bench
    model = elmsol.train(elmsol.ElmConfig(hidden_nodes=20, seed=3), train)
    x = test.features()
    assert x.shape == (150, 8)
    p = model.predict(x)
    assert p.shape == (150,)
    path = tmp_path / "m.json"
    model.save(path)
    back = elmsol.load_model(path)
    assert np.array_equal(back.predict(x), p)
    report = elmsol.evaluate(list(test.targets()), list(p))
    assert report["n"] == 150
    assert math.isclose(report["rmse"] ** 2, report["mse"], rel_tol=1e-12)


def test_ridge_matches_numpy():
    rng = np.random.default_rng(0)
    x = rng.uniform(-1, 1, (50, 8))
    t = rng.uniform(0, 1, (50, 1))
    model = elmsol.train_arrays(elmsol.ElmConfig(hidden_nodes=10, C=10.0, seed=1), x, t)
    h = model.hidden_matrix(x)
    ref = np.linalg.solve(h.T @ h + np.eye(10) / 10.0, h.T @ t)
    assert np.allclose(model.output_weights, ref, rtol=1e-8, atol=0)


def test_diagnostics_and_sensitivity(bench):
    data, _, _ = bench
    assert elmsol.critical_leverage(8, 1175) == pytest.approx(0.0229787, abs=1e-6)
    u = np.random.default_rng(1).normal(size=(40, 3))
    h = elmsol.hat_diagonal(u)
    assert h.sum() == pytest.approx(3.0)
    sens = elmsol.sensitivity(data)
    assert set(sens) == set(elmsol.FEATURE_NAMES)
    assert sens["pressure_mpa"] > 0


def test_sweep_selects_from_range(bench):
    _, train, test = bench
    selected, points = elmsol.sweep(train, test, "1:6", repeats=2)
    assert 1 <= selected <= 6
    assert len(points) == 12


def test_errors_are_typed(tmp_path):
    with pytest.raises(elmsol.IoError):
        elmsol.load_csv(tmp_path / "missing.csv")
    with pytest.raises(elmsol.ElmsolError):
        elmsol.ElmConfig(hidden_nodes=0)
