"""Ito-Skorokhod and Stratonovich integrals as coefficient transforms.

Both integrals act on an HValuedChaos integrand eta with coefficients
eta[alpha, k].  The Ito integral raises the chaos order by one (creation
operator); the Stratonovich integral adds the Malliavin trace term
(annihilation), so the two differ exactly by that trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .basis import BasisFamily, QuadratureRule, DEFAULT_RULE, inner_product, quad_singular
from .chaos import ChaosExpansion, HValuedChaos, truncate_expansion
from .errors import DomainError
from .kernels import KernelSpec, kmk_factor
from .multiindex import MultiIndex, Truncation, enumerate_multiindices, index_map


def ito_integral(eta: HValuedChaos) -> ChaosExpansion:
    """B(eta) with coefficient sum_k sqrt(alpha_k) eta[alpha - eps_k, k].

    The output lives on the truncation (K, N + 1): integrating a chaos-order-N
    integrand produces order N + 1.
    """
    trunc = eta.trunc
    out_trunc = Truncation(trunc.modes, trunc.max_order + 1)
    out: dict = {}
    alphas = enumerate_multiindices(trunc)
    for i, alpha in enumerate(alphas):
        row = eta.coeffs[i]
        for k in range(1, trunc.modes + 1):
            v = row[k - 1]
            if v == 0.0:
                continue
            gamma = alpha.add_eps(k)
            out[gamma] = out.get(gamma, 0.0) + math.sqrt(gamma.get(k)) * v
    return ChaosExpansion(out_trunc, {a: c for a, c in out.items() if c != 0.0})


def malliavin_trace(eta: HValuedChaos) -> ChaosExpansion:
    """Trace term sum_alpha (eta_alpha, D xi_alpha): coefficient at beta is
    sum_k sqrt(beta_k + 1) eta[beta + eps_k, k]."""
    trunc = eta.trunc
    out: dict = {}
    alphas = enumerate_multiindices(trunc)
    for i, alpha in enumerate(alphas):
        row = eta.coeffs[i]
        for k, a in alpha.entries:
            v = row[k - 1]
            if v == 0.0:
                continue
            beta = alpha.sub_eps(k)
            out[beta] = out.get(beta, 0.0) + math.sqrt(a) * v
    return ChaosExpansion(trunc, {a: c for a, c in out.items() if c != 0.0})


def strat_integral(eta: HValuedChaos) -> ChaosExpansion:
    """Stratonovich integral: creation plus annihilation parts.

    Coefficient at alpha is
        sum_k (sqrt(alpha_k) eta[alpha - eps_k, k]
               + sqrt(alpha_k + 1) eta[alpha + eps_k, k]).
    The output is kept on the input truncation (K, N); creation terms of
    order N + 1 fall outside and are dropped.
    """
    trunc = eta.trunc
    out: dict = {}
    alphas = enumerate_multiindices(trunc)
    for i, alpha in enumerate(alphas):
        row = eta.coeffs[i]
        for k in range(1, trunc.modes + 1):
            v = row[k - 1]
            if v == 0.0:
                continue
            up = alpha.add_eps(k)
            if trunc.contains(up):
                out[up] = out.get(up, 0.0) + math.sqrt(up.get(k)) * v
            a = alpha.get(k)
            if a >= 1:
                down = alpha.sub_eps(k)
                out[down] = out.get(down, 0.0) + math.sqrt(a) * v
    return ChaosExpansion(trunc, {a: c for a, c in out.items() if c != 0.0})


def strat_via_trace(eta: HValuedChaos) -> ChaosExpansion:
    """Stratonovich via the trace identity: truncated Ito plus Malliavin trace."""
    ito = truncate_expansion(ito_integral(eta), eta.trunc)
    return ito + malliavin_trace(eta)


@lru_cache(maxsize=256)
def _localization_gram(basis: BasisFamily, modes: int, t: float, rule: QuadratureRule) -> np.ndarray:
    """Gram matrix G[j, k] = int_0^t m_{j+1}(s) m_{k+1}(s) ds."""
    if t == 0.0:
        return np.zeros((modes, modes))
    xs, ws = rule.nodes_weights(0.0, t)
    vals = np.array([basis.eval(k, xs) for k in range(1, modes + 1)])
    return (vals * ws) @ vals.T


def localize_integrand(
    eta: HValuedChaos, t: float, rule: QuadratureRule = DEFAULT_RULE
) -> HValuedChaos:
    """Multiply the integrand by the indicator of [0, t], in coefficients.

    New coefficients eta'[alpha, j] = sum_k eta[alpha, k] (m_k chi_t, m_j).
    """
    basis = eta.basis
    if basis is None:
        raise DomainError("localization needs the integrand's basis reference")
    if t < 0 or t > basis.horizon + 1e-12:
        raise DomainError(f"t outside [0, {basis.horizon}]")
    gram = _localization_gram(basis, eta.trunc.modes, float(min(t, basis.horizon)), rule)
    return HValuedChaos(eta.trunc, eta.coeffs @ gram.T, basis)


def kernel_pairing_matrix(
    kernel: KernelSpec,
    basis: BasisFamily,
    modes: int,
    rule: QuadratureRule = DEFAULT_RULE,
) -> np.ndarray:
    """Matrix C[j, k] = int_0^T m_{j+1}(t) (K m_{k+1})(t) dt."""
    big_t = basis.horizon
    c = np.empty((modes, modes))
    for k in range(1, modes + 1):
        gamma0, psi = kmk_factor(kernel, basis, k)

        def column(s):
            s = np.atleast_1d(np.asarray(s, dtype=float))
            mj = np.array([basis.eval(j, s) for j in range(1, modes + 1)])
            return mj * np.asarray(psi(s), dtype=float)[None, :]

        if gamma0 != 0.0:
            # integrate each row of the matrix-valued integrand
            # u = s^(gamma0+1) absorbs the s^gamma0 weight: s^gamma0 ds = p du
            p = 1.0 / (gamma0 + 1.0)
            u_max = big_t ** (gamma0 + 1.0)
            xs, ws = rule.nodes_weights(0.0, u_max)
            c[:, k - 1] = p * (column(xs**p) @ ws)
        else:
            xs, ws = rule.nodes_weights(0.0, big_t)
            c[:, k - 1] = column(xs) @ ws
    return c


def field_ito_integral(
    eta: HValuedChaos, kernel: KernelSpec, rule: QuadratureRule = DEFAULT_RULE
) -> ChaosExpansion:
    """Ito integral against the Gaussian field with kernel K: B(K* eta).

    Rows are transformed by eta~[alpha, k] = int eta_alpha(t) (K m_k)(t) dt,
    then the white-noise Ito transform is applied.
    """
    basis = eta.basis
    if basis is None:
        raise DomainError("field integration needs the integrand's basis reference")
    c = kernel_pairing_matrix(kernel, basis, eta.trunc.modes, rule)
    transformed = HValuedChaos(eta.trunc, eta.coeffs @ c, basis)
    return ito_integral(transformed)


@dataclass(frozen=True)
class AdmissibilityReport:
    """Truncated admissibility sum and the top-shell mass fraction."""

    weighted_mass: float
    tail_ratio: float


def admissibility_diagnostic(eta: HValuedChaos) -> AdmissibilityReport:
    """sum_alpha |alpha| ||eta_alpha||^2 over the truncation, with tail ratio.

    The weighted sum is the truncated form of the admissibility condition for
    the Ito integral; the tail ratio (order-N shell mass over total mass)
    indicates whether the truncation has converged.
    """
    trunc = eta.trunc
    alphas = enumerate_multiindices(trunc)
    sq = np.sum(eta.coeffs**2, axis=1)
    orders = np.array([a.order() for a in alphas])
    total = float(np.sum(sq))
    weighted = float(np.sum(orders * sq))
    top = float(np.sum(sq[orders == trunc.max_order]))
    ratio = top / total if total > 0 else 0.0
    return AdmissibilityReport(weighted, ratio)


def brownian_path_integrand(
    trunc: Truncation, basis: BasisFamily, rule: QuadratureRule = DEFAULT_RULE
) -> HValuedChaos:
    """The truncated Brownian path W_K(t) = sum_k M_k(t) xi_k as an integrand.

    Coefficients eta[eps_k, j] = (M_k, m_j).
    """
    modes = trunc.modes
    coeffs = np.zeros((trunc.size(), modes))
    imap = index_map(trunc)
    xs, ws = rule.nodes_weights(0.0, basis.horizon)
    m_vals = np.array([basis.eval(j, xs) for j in range(1, modes + 1)])
    for k in range(1, modes + 1):
        big_m = np.asarray(basis.antideriv(k, xs), dtype=float)
        coeffs[imap[MultiIndex.eps(k)]] = m_vals @ (ws * big_m)
    return HValuedChaos(trunc, coeffs, basis)
