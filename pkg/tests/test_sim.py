import numpy as np
import pytest

from interplpe.errors import InvalidParameter
from interplpe.numerics import RandomSource
from interplpe.sim import (SimulationConfig, adaptive_study, curve_samples, fit_loglog_slope,
                           generate, mse, rate_study, run_table_experiment, running_median,
                           target_f, target_g, tune_bandwidth)


def test_targets():
    assert target_f(1.0) == 0.0
    assert target_f(2.0) == 6.0
    assert target_g(0.0) == 1.0


def test_config_validation():
    with pytest.raises(InvalidParameter):
        SimulationConfig(noise_variance=-1)
    with pytest.raises(InvalidParameter):
        SimulationConfig(window=4)
    with pytest.raises(InvalidParameter):
        SimulationConfig(bandwidths=(1.0, 0.5))
    with pytest.raises(InvalidParameter):
        SimulationConfig(target="h")


def test_generate_noiseless():
    cfg = SimulationConfig(noise_variance=0.0)
    d = generate(cfg, RandomSource(1))
    np.testing.assert_array_equal(d.y, target_f(d.x[:, 0]))
    assert d.n == 80 and np.all(np.abs(d.x) <= 2)


def test_generate_deterministic():
    cfg = SimulationConfig()
    a, b = generate(cfg, RandomSource(9)), generate(cfg, RandomSource(9))
    np.testing.assert_array_equal(a.x, b.x)
    np.testing.assert_array_equal(a.y, b.y)


def test_generate_design_mean():
    d = generate(SimulationConfig(n=10_000), RandomSource(3))
    assert abs(d.x.mean()) <= 0.05


def test_mse_examples():
    assert mse(target_f, target_f, (-2, 2)) == 0.0
    assert mse(lambda x: target_f(x) + 0.1, target_f, (-2, 2)) == pytest.approx(0.01)
    assert mse(lambda x: target_f(x) + x, target_f, (-1, 1), 10001) == pytest.approx(1 / 3,
                                                                                      abs=1e-4)


def test_running_median_examples():
    v = np.array([3.0, 1.0, 4.0, 1.0, 5.0])
    np.testing.assert_array_equal(running_median(v, 1), v)
    np.testing.assert_array_equal(running_median([0, 100, 0, 0, 0], 3), [50, 0, 0, 0, 0])
    np.testing.assert_array_equal(running_median(np.full(9, 2.5), 5), np.full(9, 2.5))
    with pytest.raises(InvalidParameter):
        running_median(v, 2)


def test_running_median_against_loop():
    rng = np.random.default_rng(0)
    v = rng.normal(size=50)
    w = 3
    loop = [np.median(v[max(0, i - w):i + w + 1]) for i in range(50)]
    np.testing.assert_allclose(running_median(v, 7), loop)


def test_tune_single_candidate():
    cfg = SimulationConfig(replications=2, grid_size=101)
    assert tune_bandwidth(cfg, [0.7]).h == 0.7


def test_tune_interior_bandwidth_wins():
    cfg = SimulationConfig(replications=20, grid_size=201, seed=4)
    res = tune_bandwidth(cfg, [0.01, 0.5, 5.0])
    m = dict(zip(res.bandwidths, res.mean_mse))
    assert m[0.5] <= m[0.01]
    assert m[0.5] <= m[5.0]


def test_tune_noiseless_polynomial_ties_to_smallest():
    cfg = SimulationConfig(noise_variance=0.0, order=3, replications=2, grid_size=101)
    res = tune_bandwidth(cfg, [2.0, 4.0, 8.0])
    assert res.mse < 1e-20
    assert res.h == 2.0


def _noiseless_table():
    cfg = SimulationConfig(noise_variance=0.0, replications=2, grid_size=201,
                           bandwidths=(1.0, 3.0, 10.0))
    return run_table_experiment(cfg, targets=("f",))


def test_table_noiseless_raw_and_rect():
    for r in _noiseless_table().records:
        assert r.mse_raw < 1e-10 and r.mse_rect < 1e-10


def test_table_noiseless_smoothed():
    for r in _noiseless_table().records:
        assert r.mse_smooth < 1e-10


def test_table_report_contents():
    cfg = SimulationConfig(replications=2, grid_size=101, bandwidths=(0.5, 2.0, 8.0))
    rep = run_table_experiment(cfg)
    assert len(rep.records) == 6
    r = rep.record("k2", "g")
    assert r.h in cfg.bandwidths and r.h_rect in cfg.bandwidths
    d = rep.to_dict()
    assert d["config"]["seed"] == 0
    assert rep.to_json() == run_table_experiment(cfg).to_json()


def test_loglog_slope():
    n = np.array([100, 200, 400, 800])
    assert fit_loglog_slope(n, 3.0 * n ** -0.8) == pytest.approx(-0.8)
    assert fit_loglog_slope(n, np.full(4, 0.2)) == pytest.approx(0.0, abs=1e-12)


def test_rate_expected_slopes():
    r = rate_study(beta_nominal=1.0, n_list=(50, 100, 200, 400), replications=20, grid_size=101)
    assert r.expected_slope == pytest.approx(-2 / 3)
    assert r.order == 0
    r2 = rate_study(beta_nominal=2.0, n_list=(50, 100, 200, 400), replications=20, grid_size=101)
    assert r2.expected_slope == pytest.approx(-0.8)
    assert r2.order == 1
    assert r2.slope < 0


def test_rate_validation():
    with pytest.raises(InvalidParameter):
        rate_study(n_list=(100, 200), replications=20)
    with pytest.raises(InvalidParameter):
        rate_study(replications=5)


def test_adaptive_study_small():
    s = adaptive_study(n=60, replications=3, grid_size=101)
    assert len(s.adaptive_mse) == 3
    assert all(s.interpolates)
    assert s.candidate_mse.shape[0] == 3
    j, best = s.best_candidate
    assert best == s.candidate_mse.mean(axis=0)[j]


def test_curve_samples():
    out = curve_samples(target_f, target_f, (-1, 1), 5)
    assert out.shape == (5, 3)
    np.testing.assert_array_equal(out[:, 1], out[:, 2])
