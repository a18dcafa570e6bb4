import json
import math

import numpy as np
import pytest

from chaosfield.basis import BasisFamily
from chaosfield.chaos import ChaosExpansion
from chaosfield.errors import ConfigurationError, DomainError
from chaosfield.kernels import brownian_kernel, fbm_covariance, fbm_kernel_spec
from chaosfield.mc import (
    discrete_ito,
    discrete_ito_batch,
    discrete_strat,
    discrete_strat_batch,
    mc_compare,
    report_json,
    sample_batch,
    synthesize_path,
    synthesize_paths,
)
from chaosfield.multiindex import MultiIndex, Truncation


def test_sample_batch_reproducible():
    a = sample_batch(123, 8, 3)
    b = sample_batch(123, 8, 3)
    assert np.array_equal(a.z, b.z)
    assert a.seed == 123 and a.n_samples == 8 and a.modes == 3


def test_sample_batch_rows_independent_of_batch_size():
    # row i depends only on (seed, i), so growing the batch keeps old rows
    small = sample_batch(7, 4, 5)
    large = sample_batch(7, 16, 5)
    assert np.array_equal(small.z, large.z[:4])


def test_sample_batch_stats():
    batch = sample_batch(99, 20000, 2)
    assert abs(np.mean(batch.z)) < 0.02
    assert abs(np.std(batch.z) - 1.0) < 0.02


def test_sample_batch_rejects_bad_shape():
    with pytest.raises(DomainError):
        sample_batch(0, 0, 1)
    with pytest.raises(DomainError):
        sample_batch(0, 1, 0)


def test_synthesize_path_zero_sample():
    kernel = brownian_kernel(1.0)
    basis = BasisFamily("cosine", 1.0)
    path = synthesize_path(kernel, basis, Truncation(4, 1), np.zeros(4), [0.0, 0.5, 1.0])
    assert np.allclose(path, 0.0)


def test_synthesize_path_brownian_endpoint():
    # at t = T only M_1(T) = sqrt(T) survives, so X(T) = sqrt(T) z_1
    kernel = brownian_kernel(1.0)
    basis = BasisFamily("cosine", 1.0)
    z = np.array([1.7, -0.3, 0.4, 2.0])
    path = synthesize_path(kernel, basis, Truncation(4, 1), z, [1.0])
    assert path[0] == pytest.approx(1.7, abs=1e-12)


def test_synthesize_paths_matches_single():
    kernel = fbm_kernel_spec(0.75, 1.0)
    basis = BasisFamily("cosine", 1.0)
    trunc = Truncation(3, 1)
    batch = sample_batch(5, 4, 3)
    grid = np.linspace(0.0, 1.0, 9)
    all_paths = synthesize_paths(kernel, basis, trunc, batch, grid)
    for i in range(4):
        single = synthesize_path(kernel, basis, trunc, batch.z[i], grid)
        assert np.allclose(all_paths[i], single, atol=1e-12)


def test_synthesized_variance_tracks_covariance():
    # sample variance of X(t) approaches R(t, t) for enough modes and samples
    hurst = 0.75
    kernel = fbm_kernel_spec(hurst, 1.0)
    basis = BasisFamily("cosine", 1.0)
    trunc = Truncation(16, 1)
    batch = sample_batch(2024, 4000, 16)
    paths = synthesize_paths(kernel, basis, trunc, batch, [0.5, 1.0])
    analytic = fbm_covariance(hurst)
    for col, t in enumerate((0.5, 1.0)):
        assert np.var(paths[:, col]) == pytest.approx(analytic(t, t), rel=0.08)


def test_discrete_integrators_deterministic_cases():
    grid = np.linspace(0.0, 1.0, 101)
    y = grid.copy()
    # int_0^1 t dt = 1/2: midpoint rule is exact, left point has O(h) bias
    assert discrete_strat(grid, y) == pytest.approx(0.5, abs=1e-14)
    assert discrete_ito(grid, y) == pytest.approx(0.5 - 0.005, abs=1e-14)


def test_discrete_integrator_identity():
    # sum x dx relations: strat gives (x_N^2 - x_0^2)/2 exactly by telescoping
    rng = np.random.default_rng(2)
    x = np.cumsum(rng.standard_normal(200))
    assert discrete_strat(x, x) == pytest.approx((x[-1] ** 2 - x[0] ** 2) / 2, rel=1e-12)
    qv = float(np.sum(np.diff(x) ** 2))
    assert discrete_ito(x, x) == pytest.approx((x[-1] ** 2 - x[0] ** 2) / 2 - qv / 2, rel=1e-12)


def test_discrete_batch_matches_scalar():
    rng = np.random.default_rng(4)
    x = rng.standard_normal((6, 30))
    y = rng.standard_normal((6, 30))
    ito = discrete_ito_batch(x, y)
    strat = discrete_strat_batch(x, y)
    for i in range(6):
        assert ito[i] == pytest.approx(discrete_ito(x[i], y[i]), rel=1e-12)
        assert strat[i] == pytest.approx(discrete_strat(x[i], y[i]), rel=1e-12)


def test_paths_shape_mismatch_rejected():
    with pytest.raises(ConfigurationError):
        discrete_ito(np.zeros(5), np.zeros(6))


def test_mc_compare_exact_match_passes():
    batch = sample_batch(1, 50, 2)
    f = ChaosExpansion(Truncation(2, 1), {MultiIndex.eps(1): 2.0, MultiIndex.zero(): 1.0})
    oracle = 1.0 + 2.0 * batch.z[:, 0]
    report = mc_compare(f, oracle, batch)
    assert report["pass"] is True
    assert report["statistic"] == 0.0
    assert report["seed"] == 1 and report["n"] == 50


def test_mc_compare_detects_bias():
    batch = sample_batch(1, 2000, 1)
    f = ChaosExpansion(Truncation(1, 0), {MultiIndex.zero(): 1.0})
    oracle = np.zeros(2000)  # chaos mean 1 vs oracle 0: off by ~ infinity sigma
    report = mc_compare(f, oracle, batch)
    assert report["pass"] is False
    assert report["statistic"] == pytest.approx(1.0)


def test_mc_compare_shape_check():
    batch = sample_batch(1, 10, 1)
    f = ChaosExpansion(Truncation(1, 0))
    with pytest.raises(ConfigurationError):
        mc_compare(f, np.zeros(9), batch)


def test_report_json_deterministic():
    batch = sample_batch(3, 100, 2)
    f = ChaosExpansion(Truncation(2, 1), {MultiIndex.eps(2): -1.0})
    oracle = -batch.z[:, 1] + 1e-4
    a = report_json(mc_compare(f, oracle, batch))
    b = report_json(mc_compare(f, oracle, batch))
    assert a == b
    parsed = json.loads(a)
    assert list(parsed) == ["statistic", "stderr", "tolerance", "pass", "seed", "n"]
    assert isinstance(parsed["statistic"], float)
    assert isinstance(parsed["pass"], bool)


def test_strat_sum_matches_chaos_oracle():
    # midpoint sums of the truncated Brownian path reproduce the Stratonovich
    # chaos integral (W_K(T)^2)/2 sample by sample up to the telescoping error
    from chaosfield.chaos import HValuedChaos, chaos_eval
    from chaosfield.integrals import brownian_path_integrand, strat_integral

    basis = BasisFamily("cosine", 1.0)
    trunc = Truncation(4, 2)
    eta = brownian_path_integrand(trunc, basis)
    f = strat_integral(eta)
    kernel = brownian_kernel(1.0)
    batch = sample_batch(10, 64, 4)
    grid = np.linspace(0.0, 1.0, 513)
    paths = synthesize_paths(kernel, basis, trunc, batch, grid)
    sums = discrete_strat_batch(paths, paths)
    vals = chaos_eval(f, batch.z)
    assert np.max(np.abs(sums - vals)) < 1e-12
