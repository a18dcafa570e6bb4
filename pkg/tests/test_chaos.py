import math

import numpy as np
import pytest

from chaosfield.chaos import (
    ChaosExpansion,
    HValuedChaos,
    chaos_eval,
    malliavin_derivative,
    truncate_expansion,
    wick_exp_first_chaos,
    wick_product,
    xi_alpha_eval,
)
from chaosfield.errors import ConfigurationError, DimensionError
from chaosfield.multiindex import MultiIndex, Truncation


def test_constant_and_mean():
    trunc = Truncation(2, 2)
    f = ChaosExpansion.constant(trunc, 3.0)
    assert f.mean == 3.0
    assert f.norm_squared() == 9.0


def test_coeff_outside_truncation_rejected():
    trunc = Truncation(2, 1)
    with pytest.raises(ConfigurationError):
        ChaosExpansion(trunc, {MultiIndex.from_dense([1, 1]): 1.0})


def test_arithmetic():
    trunc = Truncation(2, 2)
    f = ChaosExpansion(trunc, {MultiIndex.eps(1): 2.0})
    g = ChaosExpansion(trunc, {MultiIndex.eps(1): 1.0, MultiIndex.eps(2): -1.0})
    h = f + g.scale(2.0)
    assert h.get(MultiIndex.eps(1)) == 4.0
    assert h.get(MultiIndex.eps(2)) == -2.0
    assert (h - h).norm_squared() == 0.0


def test_dense_roundtrip():
    trunc = Truncation(2, 2)
    f = ChaosExpansion(trunc, {MultiIndex.eps(2): 1.5, MultiIndex.single(1, 2): -0.5})
    g = ChaosExpansion.from_dense(trunc, f.dense())
    assert g.coeffs == f.coeffs


def test_json_roundtrip():
    trunc = Truncation(3, 2)
    f = ChaosExpansion(
        trunc, {MultiIndex.zero(): 1.0, MultiIndex.eps(1).add_eps(3): 0.25}
    )
    g = ChaosExpansion.from_json(f.to_json())
    assert g.trunc == trunc
    assert g.coeffs == f.coeffs


def test_wick_product_basis_rule():
    # xi_alpha wick xi_beta = sqrt((a+b)!/(a!b!)) xi_{alpha+beta}
    trunc = Truncation(1, 5)
    f = ChaosExpansion.basis_element(trunc, MultiIndex.single(1, 2))
    g = ChaosExpansion.basis_element(trunc, MultiIndex.single(1, 3))
    prod = wick_product(f, g)
    expected = math.sqrt(math.factorial(5) / (math.factorial(2) * math.factorial(3)))
    assert prod.get(MultiIndex.single(1, 5)) == pytest.approx(expected, rel=1e-14)


def test_wick_product_mean_multiplicative():
    # means multiply: the zero-index coefficient is the product of means
    trunc = Truncation(2, 2)
    f = ChaosExpansion(trunc, {MultiIndex.zero(): 2.0, MultiIndex.eps(1): 1.0})
    g = ChaosExpansion(trunc, {MultiIndex.zero(): -3.0, MultiIndex.eps(2): 0.5})
    assert wick_product(f, g).mean == pytest.approx(-6.0)


def test_wick_product_dropped_mass():
    trunc = Truncation(1, 1)
    f = ChaosExpansion.basis_element(trunc, MultiIndex.eps(1))
    prod, dropped = wick_product(f, f, return_dropped=True)
    # xi_1 wick xi_1 = sqrt(2) xi_{2 eps_1}, entirely outside order 1
    assert prod.coeffs == {}
    assert dropped == pytest.approx(2.0)


def test_wick_exponential_coefficients():
    trunc = Truncation(2, 3)
    c = np.array([0.5, -2.0])
    f = wick_exp_first_chaos(c, trunc)
    assert f.mean == 1.0
    alpha = MultiIndex.from_dense([1, 2])
    expected = 0.5 * (-2.0) ** 2 / math.sqrt(math.factorial(1) * math.factorial(2))
    assert f.get(alpha) == pytest.approx(expected, rel=1e-14)


def test_wick_exp_is_exponential_under_wick_product():
    # e^{wick c.xi} wick e^{wick d.xi} = e^{wick (c+d).xi} up to truncation
    trunc = Truncation(2, 4)
    c = np.array([0.3, 0.1])
    d = np.array([-0.2, 0.4])
    lhs = wick_product(wick_exp_first_chaos(c, trunc), wick_exp_first_chaos(d, trunc))
    rhs = wick_exp_first_chaos(c + d, trunc)
    err = max(
        abs(lhs.get(a) - rhs.get(a)) for a in set(lhs.coeffs) | set(rhs.coeffs)
    )
    assert err < 1e-14


def test_xi_alpha_eval_hermite():
    z = np.array([1.3, -0.4])
    alpha = MultiIndex.single(1, 2)
    # H_2(z)/sqrt(2!) = (z^2 - 1)/sqrt(2)
    assert xi_alpha_eval(alpha, z) == pytest.approx((1.3**2 - 1) / math.sqrt(2))
    with pytest.raises(DimensionError):
        xi_alpha_eval(MultiIndex.eps(5), z)


def test_chaos_eval_matches_sum():
    trunc = Truncation(2, 3)
    rng = np.random.default_rng(0)
    coeffs = {
        MultiIndex.from_dense([2, 1]): 0.7,
        MultiIndex.eps(2): -1.2,
        MultiIndex.zero(): 0.3,
    }
    f = ChaosExpansion(trunc, coeffs)
    z = rng.standard_normal((5, 2))
    direct = sum(c * xi_alpha_eval(a, z) for a, c in coeffs.items())
    assert chaos_eval(f, z) == pytest.approx(direct)


def test_malliavin_derivative_annihilates():
    trunc = Truncation(2, 3)
    f = ChaosExpansion.basis_element(trunc, MultiIndex.from_dense([2, 1]))
    d = malliavin_derivative(f)
    # D at beta = alpha - eps_k has weight sqrt(alpha_k)
    assert d.row(MultiIndex.from_dense([1, 1]))[0] == pytest.approx(math.sqrt(2))
    assert d.row(MultiIndex.from_dense([2, 0]))[1] == pytest.approx(1.0)
    assert d.norm_squared() == pytest.approx(3.0)


def test_truncate_expansion():
    big = Truncation(2, 3)
    small = Truncation(2, 1)
    f = ChaosExpansion(big, {MultiIndex.zero(): 1.0, MultiIndex.single(1, 3): 2.0})
    g = truncate_expansion(f, small)
    assert g.trunc == small
    assert g.coeffs == {MultiIndex.zero(): 1.0}


def test_hvalued_json_roundtrip():
    trunc = Truncation(2, 1)
    arr = np.array([[0.0, 1.0], [2.0, 0.0], [0.0, -0.5]])
    eta = HValuedChaos(trunc, arr)
    eta2 = HValuedChaos.from_dict(eta.to_dict())
    assert np.array_equal(eta.coeffs, eta2.coeffs)
    assert eta2.norm_squared() == pytest.approx(1.0 + 4.0 + 0.25)
