import math

import numpy as np
import pytest
from scipy.integrate import quad

from chaosfield.basis import BasisFamily
from chaosfield.errors import DomainError, InvalidCovarianceError
from chaosfield.kernels import (
    StepFunction,
    brownian_covariance,
    brownian_kernel,
    covariance_from_kernel,
    fbm_c_h,
    fbm_covariance,
    fbm_k1,
    fbm_kernel,
    fbm_kernel_dt,
    fbm_kernel_spec,
    grid_kernel_from_csv,
    hr_gram,
    k1_empirical,
    k_mk,
    kstar_apply,
    kstar_apply_step,
    m_tilde,
    op_norm_bound,
    op_norm_estimate,
)


def test_step_function():
    f = StepFunction((0.0, 0.5, 1.0), (2.0, -1.0))
    assert f(0.25) == 2.0
    assert f(0.5) == 2.0  # right-continuous break ownership: (0, 0.5]
    assert f(0.75) == -1.0
    assert f(0.0) == 0.0
    assert f(1.5) == 0.0
    with pytest.raises(ValueError):
        StepFunction((0.0, 1.0), (1.0, 2.0))


def test_brownian_kstar_identity_on_steps():
    kernel = brownian_kernel(1.0)
    step = StepFunction((0.0, 0.3, 0.7, 1.0), (1.0, -2.0, 0.5))
    image = kstar_apply_step(kernel, step)
    for s in (0.1, 0.3, 0.5, 0.9):
        assert image(s) == pytest.approx(step(s), abs=1e-14)


def test_brownian_kstar_apply_identity():
    kernel = brownian_kernel(1.0)
    image = kstar_apply(kernel, lambda s: np.cos(3.0 * np.asarray(s)))
    for s in (0.2, 0.8):
        assert image(s) == pytest.approx(math.cos(3.0 * s), abs=1e-13)


def test_fbm_c_h_value():
    hurst = 0.75
    expected = math.sqrt(
        2 * hurst * math.gamma(1.5 - hurst) / (math.gamma(hurst + 0.5) * math.gamma(2 - 2 * hurst))
    )
    assert fbm_c_h(hurst) == pytest.approx(expected, rel=1e-14)
    with pytest.raises(DomainError):
        fbm_c_h(0.4)


@pytest.mark.parametrize("hurst", [0.6, 0.75, 0.9])
def test_fbm_kernel_against_adaptive_quadrature(hurst):
    c = fbm_c_h(hurst) * (hurst - 0.5)
    for t, s in ((0.8, 0.3), (1.0, 0.05), (0.5, 0.45)):
        ref, _ = quad(
            lambda tau: (tau - s) ** (hurst - 1.5) * tau ** (hurst - 0.5),
            s,
            t,
            points=[s],
            limit=200,
        )
        expected = c * s ** (0.5 - hurst) * ref
        assert fbm_kernel(hurst, t, s) == pytest.approx(expected, rel=1e-9)


def test_fbm_kernel_dt_matches_finite_difference():
    hurst, t, s = 0.75, 0.7, 0.2
    h = 1e-6
    fd = (fbm_kernel(hurst, t + h, s) - fbm_kernel(hurst, t - h, s)) / (2 * h)
    assert fbm_kernel_dt(hurst, t, s) == pytest.approx(fd, rel=1e-6)


def test_fbm_k1_values():
    assert fbm_k1(0.75, 1.0) == pytest.approx(1.5, rel=1e-14)
    assert fbm_k1(0.75, 4.0) == pytest.approx(3.0, rel=1e-14)
    assert fbm_k1(0.501, 1.0) == pytest.approx(1.0, abs=1e-2)


def test_k1_empirical_below_analytic_bound():
    kernel = fbm_kernel_spec(0.75, 1.0)
    emp = k1_empirical(kernel)
    assert emp <= fbm_k1(0.75, 1.0) + 1e-6


def test_fbm_kstar_step_matches_kernel_difference():
    kernel = fbm_kernel_spec(0.75, 1.0)
    step = StepFunction((0.2, 0.6), (1.0,))
    image = kstar_apply_step(kernel, step)
    # (K* chi_(a,b])(s) = K(b, s) - K(a, s) for s <= a, K(b, s) on (a, b]
    s = 0.1
    assert image(s) == pytest.approx(
        fbm_kernel(0.75, 0.6, s) - fbm_kernel(0.75, 0.2, s), rel=1e-8
    )
    s = 0.4
    assert image(s) == pytest.approx(fbm_kernel(0.75, 0.6, s), rel=1e-8)
    assert image(0.9) == 0.0


def test_fbm_kmk_hook_matches_generic():
    kernel = fbm_kernel_spec(0.75, 1.0)
    basis = BasisFamily("cosine", 1.0)
    generic = kernel.__class__(**{
        **kernel.__dict__,
        "kmk_hook": None,
        "kmk_factor_hook": None,
        "mtilde_hook": None,
    })
    for k in (1, 3):
        for s in (0.3, 0.8):
            assert k_mk(kernel, basis, k, s) == pytest.approx(
                k_mk(generic, basis, k, s), rel=1e-7, abs=1e-8
            )


def test_fbm_mtilde_first_mode_analytic():
    # int_0^T K(T,s) ds has a closed Beta-function form by Fubini
    hurst, big_t = 0.75, 1.0
    kernel = fbm_kernel_spec(hurst, big_t)
    basis = BasisFamily("cosine", big_t)
    b = math.gamma(1.5 - hurst) * math.gamma(hurst - 0.5) / math.gamma(1.0)
    expected = (
        fbm_c_h(hurst) * (hurst - 0.5) * b * big_t**hurst / (hurst + 0.5)
    )
    assert m_tilde(kernel, basis, 1, big_t) == pytest.approx(expected, rel=1e-12)


def test_covariance_from_kernel():
    assert covariance_from_kernel(brownian_kernel(1.0), 0.4, 0.9) == pytest.approx(0.4)
    kernel = fbm_kernel_spec(0.7, 1.0)
    analytic = fbm_covariance(0.7)
    assert covariance_from_kernel(kernel, 0.8, 0.5) == pytest.approx(
        analytic(0.8, 0.5), abs=1e-4
    )


def test_op_norm_bound():
    assert op_norm_bound(0.0, 1.5) == pytest.approx(math.sqrt(1.5))
    assert op_norm_bound(1.0, 1.5) == pytest.approx(math.sqrt(5.0))
    with pytest.raises(DomainError):
        op_norm_bound(-1.0, 0.0)


def test_op_norm_estimates():
    assert op_norm_estimate(brownian_kernel(1.0), 128) == pytest.approx(1.0, abs=1e-6)
    kernel = fbm_kernel_spec(0.75, 1.0)
    est = op_norm_estimate(kernel, 128)
    assert est <= op_norm_bound(0.0, fbm_k1(0.75, 1.0))


def test_hr_gram():
    g = hr_gram(brownian_covariance(), [0.25, 0.5, 1.0])
    assert g[0, 2] == 0.25
    assert np.all(np.linalg.eigvalsh(g) >= -1e-12)
    bad = lambda t, s: -1.0 if t != s else 0.0  # noqa: E731
    from chaosfield.kernels import CovarianceFunction

    with pytest.raises(InvalidCovarianceError):
        hr_gram(CovarianceFunction(bad), [0.0, 1.0])


def test_grid_kernel_from_csv(tmp_path):
    # tabulate the Brownian indicator kernel on a grid
    grid = np.linspace(0.0, 1.0, 21)
    path = tmp_path / "kernel.csv"
    with open(path, "w") as fh:
        fh.write("t_s," + ",".join(repr(float(s)) for s in grid) + "\n")
        for t in grid:
            vals = [1.0 if s <= t else 0.0 for s in grid]
            fh.write(repr(float(t)) + "," + ",".join(repr(v) for v in vals) + "\n")
    kernel = grid_kernel_from_csv(path)
    assert kernel.adapted
    assert kernel.eval(0.85, 0.3) == pytest.approx(1.0)
    assert kernel.eval(0.3, 0.85) == 0.0
    assert kernel.diag_limit(0.5) == pytest.approx(1.0)
