import math

import numpy as np
import pytest

import afm


def test_canonical_config_and_limits():
    config = afm.ModelConfig.canonical()
    assert config.r == 2
    np.testing.assert_allclose(config.limit_loadings_gram(), np.diag([2.0, 1.0]))
    panel = afm.simulate_panel(config, 50, 30)
    limit = afm.limit_objects(config, panel.loadings, panel.factors)
    np.testing.assert_array_equal(limit.p_lambda, np.eye(2))
    np.testing.assert_array_equal(limit.f_infinity, panel.factors)


def test_simulation_is_deterministic():
    config = afm.ModelConfig.canonical()
    a = afm.simulate_panel(config, 40, 20, replicate=1)
    b = afm.simulate_panel(config, 40, 20, replicate=1)
    np.testing.assert_array_equal(a.observations, b.observations)
    assert a.observations.shape == (20, 40)


def test_estimator_normalization():
    config = afm.ModelConfig.canonical()
    panel = afm.simulate_panel(config, 200, 200)
    est = afm.estimate_from_panel(panel.observations, 2)
    f = est.factors
    np.testing.assert_allclose(f.T @ f / f.shape[0], np.eye(2), atol=1e-8)
    h = afm.rotation_h(f, panel.factors)
    assert h.shape == (2, 2)


def test_population_eigensystem_and_npcs():
    config = afm.ModelConfig.canonical()
    loadings = afm.draw_loadings(config, 100)
    gamma_y, gamma_c = afm.population_covariances(loadings, afm.idio_covariance(config, 100))
    eig = afm.top_r_eigs(gamma_y, 2)
    assert eig.values[0] > eig.values[1] > 0
    np.testing.assert_allclose(eig.vectors @ eig.vectors.T, np.eye(2), atol=1e-10)
    ref = np.linalg.eigvalsh(gamma_y)[::-1][:2]
    np.testing.assert_allclose(eig.values, ref, rtol=1e-10)
    coef = afm.npc_coefficients(eig)
    assert coef.shape == (2, 100)


def test_slope_fit():
    xs = [1.0, 4.0, 16.0, 64.0]
    slope, stderr = afm.fit_loglog_slope([(x, 2.0 / math.sqrt(x)) for x in xs])
    assert slope == pytest.approx(-0.5)
    assert stderr < 1e-12


def test_errors_map_to_python_exceptions():
    config = afm.ModelConfig.canonical()
    with pytest.raises(ValueError):
        afm.draw_loadings(config, 5000)
    with pytest.raises(ValueError):
        afm.estimate_from_panel(np.zeros((3, 4)), 5)
    with pytest.raises(ValueError):
        afm.run_suite("bogus", config, [10, 20], 2)


def test_small_suite_runs():
    rows, verdicts = afm.run_suite("lemma1", afm.ModelConfig.canonical(), [20, 40, 80, 160], 2)
    assert rows and verdicts
    assert "lemma1" in afm.suite_names()
    weyl = [v for v in verdicts if v["metric"] == "lemma1.weyl_gap_1"]
    assert weyl and weyl[0]["passed"]
