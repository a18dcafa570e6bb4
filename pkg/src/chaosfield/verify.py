"""Self-verification suites: algebra, integrals, sde, fbm, mc.

Each suite returns a report dict {"suite": name, "pass": bool, "checks":
[{"name", "pass", "value", "tolerance"}, ...]} aggregating the library's
exact identities and oracle comparisons.
"""

from __future__ import annotations

import math

import numpy as np

from .basis import BasisFamily
from .chaos import ChaosExpansion, wick_exp_first_chaos, wick_product
from .errors import ConfigurationError
from .hermite import hermite
from .integrals import (
    brownian_path_integrand,
    ito_integral,
    strat_integral,
    strat_via_trace,
)
from .kernels import (
    brownian_kernel,
    covariance_from_kernel,
    fbm_covariance,
    fbm_k1,
    fbm_kernel_spec,
    k1_empirical,
    op_norm_bound,
    op_norm_estimate,
)
from .mc import (
    discrete_strat_batch,
    mc_compare,
    sample_batch,
    synthesize_paths,
)
from .multiindex import MultiIndex, Truncation
from .sde import solve_closed_form, solve_picard


def _check(name: str, value: float, tolerance: float) -> dict:
    return {
        "name": name,
        "pass": bool(value <= tolerance),
        "value": float(value),
        "tolerance": float(tolerance),
    }


def _mc_check(name: str, report: dict) -> dict:
    return {
        "name": name,
        "pass": report["pass"],
        "value": abs(report["statistic"]),
        "tolerance": report["tolerance"],
    }


def _wrap(name: str, checks: list) -> dict:
    return {"suite": name, "pass": all(c["pass"] for c in checks), "checks": checks}


def _w_squared_coeffs(trunc: Truncation, basis: BasisFamily) -> ChaosExpansion:
    """Chaos coefficients of W_K(T)^2 / 2."""
    modes = trunc.modes
    mt = np.array([basis.antideriv(k, basis.horizon) for k in range(1, modes + 1)])
    coeffs = {MultiIndex.zero(): float(np.sum(mt**2)) / 2.0}
    for k in range(1, modes + 1):
        coeffs[MultiIndex.single(k, 2)] = mt[k - 1] ** 2 * math.sqrt(2.0) / 2.0
        for j in range(1, k):
            coeffs[MultiIndex.eps(j).add_eps(k)] = mt[j - 1] * mt[k - 1]
    return ChaosExpansion(Truncation(modes, max(trunc.max_order, 2)), coeffs)


def hermite_orthogonality_error(n_max: int = 10, quad_points: int = 40) -> float:
    """max over n, m of |E[H_n H_m] - n! delta_nm| / sqrt(n! m!) by quadrature."""
    x, w = np.polynomial.hermite_e.hermegauss(quad_points)
    w = w / math.sqrt(2.0 * math.pi)
    h = np.array([hermite(n, x) for n in range(n_max + 1)])
    gram = (h * w) @ h.T
    target = np.diag([float(math.factorial(n)) for n in range(n_max + 1)])
    scale = np.sqrt(
        np.outer(
            [math.factorial(n) for n in range(n_max + 1)],
            [math.factorial(n) for n in range(n_max + 1)],
        )
    )
    return float(np.max(np.abs(gram - target) / scale))


def wick_hermite_error(total_max: int = 12) -> float:
    """max error in H_n(xi_1) wick H_m(xi_1) = H_{n+m}(xi_1), coefficientwise.

    In normalized coordinates H_n(xi_1) = sqrt(n!) xi_{n eps_1}, and the Wick
    product reproduces sqrt((n+m)!) xi_{(n+m) eps_1} exactly.
    """
    trunc = Truncation(1, total_max)
    worst = 0.0
    for n in range(total_max + 1):
        for m in range(total_max + 1 - n):
            f = ChaosExpansion(trunc, {MultiIndex.single(1, n): math.sqrt(math.factorial(n))})
            g = ChaosExpansion(trunc, {MultiIndex.single(1, m): math.sqrt(math.factorial(m))})
            prod = wick_product(f, g)
            target = ChaosExpansion(
                trunc, {MultiIndex.single(1, n + m): math.sqrt(math.factorial(n + m))}
            )
            scale = math.sqrt(math.factorial(n + m))
            err = max(
                abs(prod.get(a) - target.get(a))
                for a in set(prod.coeffs) | set(target.coeffs)
            )
            worst = max(worst, err / scale)
    return worst


def suite_algebra() -> dict:
    checks = [
        _check("hermite-orthogonality", hermite_orthogonality_error(), 1e-8),
        _check("wick-hermite-identity", wick_hermite_error(), 1e-12),
    ]
    trunc = Truncation(4, 6)
    we = wick_exp_first_chaos(np.array([0.3, -0.2, 0.1, 0.4]), trunc)
    checks.append(_check("wick-exponential-unit-mean", abs(we.mean - 1.0), 1e-14))
    return _wrap("algebra", checks)


def suite_integrals(modes: int = 16) -> dict:
    basis = BasisFamily("cosine", 1.0)
    trunc = Truncation(modes, 2)
    eta = brownian_path_integrand(trunc, basis)
    mt = np.array([basis.antideriv(k, 1.0) for k in range(1, modes + 1)])
    s_k = float(np.sum(mt**2))
    target = _w_squared_coeffs(trunc, basis)

    f_ito = ito_integral(eta)
    ito_err = max(
        abs(f_ito.get(a) - (target.get(a) if a.order() > 0 else 0.0))
        for a in set(f_ito.coeffs) | {a for a in target.coeffs if a.order() > 0}
    )
    iso_err = abs(f_ito.norm_squared() - s_k**2 / 2.0)

    f_strat = strat_integral(eta)
    strat_err = max(
        abs(f_strat.get(a) - target.get(a))
        for a in set(f_strat.coeffs) | set(target.coeffs)
    )
    f_trace = strat_via_trace(eta)
    trace_err = max(
        abs(f_strat.get(a) - f_trace.get(a))
        for a in set(f_strat.coeffs) | set(f_trace.coeffs)
    )
    checks = [
        _check("ito-truncated-identity", ito_err, 1e-10),
        _check("ito-isometry", iso_err, 1e-10),
        _check("strat-truncated-identity", strat_err, 1e-10),
        _check("strat-equals-ito-plus-trace", trace_err, 1e-14),
    ]
    return _wrap("integrals", checks)


def suite_sde() -> dict:
    basis = BasisFamily("cosine", 1.0)
    trunc = Truncation(8, 4)
    grid = np.linspace(0.0, 1.0, 65)
    checks = []
    for name, kernel in (
        ("brownian", brownian_kernel(1.0)),
        ("fbm-h075", fbm_kernel_spec(0.75, 1.0)),
    ):
        closed = solve_closed_form(kernel, basis, trunc, grid)
        picard = solve_picard(kernel, basis, trunc, grid)
        disc = float(np.max(np.abs(closed.coeffs - picard.coeffs)))
        checks.append(_check(f"closed-vs-picard-{name}", disc, 1e-8))
    sol = solve_closed_form(
        brownian_kernel(1.0), basis, Truncation(8, 8), np.array([0.0, 1.0])
    )
    checks.append(
        _check("second-moment-vs-exp", abs(sol.second_moment(1.0) - math.e), 1e-3)
    )
    return _wrap("sde", checks)


def suite_fbm() -> dict:
    checks = [
        _check("k1-analytic-h075", abs(fbm_k1(0.75, 1.0) - 1.5), 1e-12),
        _check("k1-limit-near-half", abs(fbm_k1(0.501, 1.0) - 1.0), 1e-2),
    ]
    for hurst in (0.6, 0.75, 0.9):
        kernel = fbm_kernel_spec(hurst, 1.0)
        emp = k1_empirical(kernel)
        bound = fbm_k1(hurst, 1.0)
        checks.append(_check(f"k1-empirical-h{hurst}", emp, bound + 1e-6))
        est = op_norm_estimate(kernel, 512)
        checks.append(_check(f"op-norm-h{hurst}", est, op_norm_bound(0.0, bound)))
    est_b = op_norm_estimate(brownian_kernel(1.0), 512)
    checks.append(_check("op-norm-brownian", abs(est_b - 1.0), 1e-6))
    kernel = fbm_kernel_spec(0.7, 1.0)
    analytic = fbm_covariance(0.7)
    ts = np.linspace(0.2, 1.0, 5)
    cov_err = max(
        abs(covariance_from_kernel(kernel, t, s) - analytic(t, s)) for t in ts for s in ts
    )
    checks.append(_check("covariance-vs-analytic-h07", cov_err, 1e-4))
    return _wrap("fbm", checks)


def suite_mc(seed: int = 20260824, n_samples: int = 10000) -> dict:
    basis = BasisFamily("cosine", 1.0)
    kernel = brownian_kernel(1.0)
    checks = []

    # Stratonovich chaos result vs midpoint-rule oracle on truncated paths
    trunc = Truncation(16, 2)
    eta = brownian_path_integrand(trunc, basis)
    f_strat = strat_integral(eta)
    batch = sample_batch(seed, n_samples, 16)
    grid = np.linspace(0.0, 1.0, 513)
    paths = synthesize_paths(kernel, basis, trunc, batch, grid)
    strat_report = mc_compare(f_strat, discrete_strat_batch(paths, paths), batch)
    checks.append(_mc_check("strat-vs-midpoint-oracle", strat_report))

    # SDE solution samples vs the lognormal form exp(X - R/2)
    trunc = Truncation(8, 12)
    sol = solve_closed_form(kernel, basis, trunc, np.array([1.0]))
    batch = sample_batch(seed + 1, n_samples, 8)
    mt = sol.mtilde[0]
    oracle = np.exp(batch.z @ mt - 0.5 * float(np.sum(mt**2)))
    diffs = sol.sample(1.0, batch.z) - oracle
    mean = float(np.mean(diffs))
    stderr = float(np.std(diffs, ddof=1) / math.sqrt(len(diffs)))
    checks.append(
        {
            "name": "sde-sample-vs-lognormal",
            "pass": bool(abs(mean) <= 3.0 * stderr),
            "value": abs(mean),
            "tolerance": 3.0 * stderr,
        }
    )
    return _wrap("mc", checks)


SUITES = {
    "algebra": suite_algebra,
    "integrals": suite_integrals,
    "sde": suite_sde,
    "fbm": suite_fbm,
    "mc": suite_mc,
}


def run_suite(name: str) -> dict:
    if name not in SUITES:
        raise ConfigurationError(
            f"unknown suite {name!r}; choose from {sorted(SUITES)}"
        )
    return SUITES[name]()
