"""Volterra kernels and the operator K* they induce on L2((0, T)).

A KernelSpec packages the pointwise kernel K(t, s), its diagonal limit
K(s+, s), the t-derivative K1(t, s), and singularity metadata.  Shipped
kernels: the Brownian kernel (K* = identity), the fractional Brownian motion
kernel for Hurst index H in (1/2, 1), and kernels interpolated from a CSV
grid.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import gamma as gamma_fn

from .basis import (
    BasisFamily,
    QuadratureRule,
    DEFAULT_RULE,
    jacobi01,
    quad_singular,
    quad_singular_smooth,
)
from .errors import DomainError, InvalidCovarianceError, UnsupportedKernelError


# ---------------------------------------------------------------------------
# step functions


@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant function: value values[i] on (breaks[i], breaks[i+1]]."""

    breaks: tuple
    values: tuple

    def __post_init__(self):
        if len(self.breaks) != len(self.values) + 1:
            raise ValueError("need one more breakpoint than values")
        if any(b >= c for b, c in zip(self.breaks, self.breaks[1:])):
            raise ValueError("breakpoints must be strictly increasing")

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        idx = np.searchsorted(self.breaks, s, side="left") - 1
        inside = (idx >= 0) & (idx < len(self.values)) & (s > self.breaks[0])
        vals = np.where(inside, np.take(self.values, np.clip(idx, 0, len(self.values) - 1)), 0.0)
        return vals if vals.ndim else float(vals)


# ---------------------------------------------------------------------------
# kernel specification


@dataclass
class KernelSpec:
    """Volterra kernel with derivative data and singularity metadata.

    ``singularity`` is the algebraic exponent of K1(t, s) in (t - s) as
    t -> s+ (None when K1 is regular there); ``origin_exponent`` the exponent
    of K(t, s) in s as s -> 0.  Optional hooks supply exact expressions used
    by integrators when available:

    - ``kmk_hook(basis, k, s)``     -> values of (K m_k)(s)
    - ``kmk_factor_hook(basis, k)`` -> (gamma0, psi) with (K m_k)(s) = s^gamma0 psi(s)
    - ``mtilde_hook(basis, k, t)``  -> int_0^t (K m_k)(s) ds
    - ``eval_ts_hook(t_sorted, s)`` -> K(t_i, s) for an ascending array of t

    ``dt_smooth`` gives K1(t, s) with the diagonal factor (t - s)^singularity
    divided out; quadratures near the diagonal use it so the singular factor
    is handled analytically.
    """

    name: str
    horizon: float
    adapted: bool
    eval: object  # callable (t, s) -> float
    diag_limit: object  # callable (s,) -> float
    dt_eval: object = None  # callable (t, s) -> float
    dt_smooth: object = None  # callable (t, s) -> K1(t,s) * (t-s)^(-singularity)
    singularity: float = None
    origin_exponent: float = 0.0
    params: dict = field(default_factory=dict)
    kmk_hook: object = None
    kmk_factor_hook: object = None
    mtilde_hook: object = None
    eval_ts_hook: object = None

    def eval_ts(self, t_sorted, s: float):
        """K(t, s) for an ascending array of t values."""
        if self.eval_ts_hook is not None:
            return self.eval_ts_hook(t_sorted, s)
        return np.array([self.eval(t, s) for t in np.atleast_1d(t_sorted)], dtype=float)


# ---------------------------------------------------------------------------
# Brownian kernel


def brownian_kernel(horizon: float = 1.0) -> KernelSpec:
    """K(t, s) = chi_{[0,t]}(s): the associated process is Brownian motion."""

    def evaluate(t, s):
        return 1.0 if s <= t else 0.0

    spec = KernelSpec(
        name="brownian",
        horizon=horizon,
        adapted=True,
        eval=evaluate,
        diag_limit=lambda s: 1.0,
        dt_eval=lambda t, s: 0.0,
        singularity=None,
        origin_exponent=0.0,
    )
    spec.kmk_hook = lambda basis, k, s: np.asarray(basis.eval(k, s), dtype=float)
    spec.kmk_factor_hook = lambda basis, k: (0.0, lambda s: np.asarray(basis.eval(k, s), dtype=float))
    spec.mtilde_hook = lambda basis, k, t: basis.antideriv(k, t)
    spec.eval_ts_hook = lambda t_sorted, s: (np.atleast_1d(t_sorted) >= s).astype(float)
    return spec


# ---------------------------------------------------------------------------
# fractional Brownian motion kernel, H > 1/2


def _check_hurst(hurst: float):
    if not 0.5 < hurst < 1.0:
        raise DomainError("Hurst index must lie in (1/2, 1)")


def fbm_c_h(hurst: float) -> float:
    """Normalizing constant C_H of the fBm Volterra kernel."""
    _check_hurst(hurst)
    return math.sqrt(
        2.0 * hurst * gamma_fn(1.5 - hurst) / (gamma_fn(hurst + 0.5) * gamma_fn(2.0 - 2.0 * hurst))
    )


def fbm_k1(hurst: float, horizon: float) -> float:
    """Analytic bound K_1(T) for the fBm kernel operator."""
    _check_hurst(hurst)
    return (
        hurst
        * (2.0 * hurst - 1.0)
        * gamma_fn(hurst - 0.5)
        / gamma_fn(hurst + 0.5)
        * horizon ** (2.0 * hurst - 1.0)
    )




def fbm_kernel(hurst: float, t: float, s: float, rule: QuadratureRule = DEFAULT_RULE) -> float:
    """fBm Volterra kernel K(t, s) for 0 < s <= t."""
    _check_hurst(hurst)
    if s <= 0 or t < s:
        raise DomainError("require 0 < s <= t")
    if t == s:
        return 0.0
    c = fbm_c_h(hurst) * (hurst - 0.5)
    inner = quad_singular_smooth(
        lambda tau: tau ** (hurst - 0.5), s, t, hurst - 1.5, rule
    )
    return c * s ** (0.5 - hurst) * inner


def fbm_kernel_dt(hurst: float, t: float, s: float) -> float:
    """dK/dt for the fBm kernel, 0 < s < t."""
    _check_hurst(hurst)
    if s <= 0 or t <= s:
        raise DomainError("require 0 < s < t")
    c = fbm_c_h(hurst) * (hurst - 0.5)
    return c * s ** (0.5 - hurst) * (t - s) ** (hurst - 1.5) * t ** (hurst - 0.5)


def fbm_kernel_spec(hurst: float, horizon: float = 1.0, jacobi_nodes: int = 48) -> KernelSpec:
    """KernelSpec for fractional Brownian motion with Hurst index in (1/2, 1)."""
    _check_hurst(hurst)
    c = fbm_c_h(hurst) * (hurst - 0.5)

    def evaluate(t, s):
        return fbm_kernel(hurst, t, s)

    def dt_evaluate(t, s):
        return fbm_kernel_dt(hurst, t, s)

    def dt_smooth_evaluate(t, s):
        return c * s ** (0.5 - hurst) * t ** (hurst - 0.5)

    def eval_ts(t_sorted, s):
        # incremental in t: singular first segment, smooth continuation
        t_sorted = np.atleast_1d(np.asarray(t_sorted, dtype=float))
        out = np.zeros_like(t_sorted)
        above = t_sorted > s
        if not np.any(above):
            return out
        ts = t_sorted[above]
        vals = np.empty_like(ts)
        first = quad_singular_smooth(
            lambda tau: tau ** (hurst - 0.5),
            s,
            ts[0],
            hurst - 1.5,
            QuadratureRule(panels=4, nodes=12),
        )
        vals[0] = first
        if len(ts) > 1:
            x, w = np.polynomial.legendre.leggauss(6)
            lo, hi = ts[:-1], ts[1:]
            half = 0.5 * (hi - lo)
            mid = 0.5 * (hi + lo)
            nodes = mid[:, None] + half[:, None] * x[None, :]
            seg = np.sum(
                (nodes - s) ** (hurst - 1.5) * nodes ** (hurst - 0.5) * w[None, :],
                axis=1,
            ) * half
            vals[1:] = first + np.cumsum(seg)
        out[above] = c * s ** (0.5 - hurst) * vals
        return out

    def psi(basis: BasisFamily, k: int):
        """Smooth factor in (K m_k)(s) = s^(H - 1/2) psi(s); Beta-weight quadrature."""
        v, w = jacobi01(jacobi_nodes, hurst - 1.5, 0.5 - hurst)

        def values(s):
            s = np.asarray(s, dtype=float)
            scalar = s.ndim == 0
            ss = np.atleast_1d(s)
            mk = np.asarray(basis.eval(k, ss[:, None] * v[None, :]), dtype=float)
            out = c * mk @ w
            return float(out[0]) if scalar else out

        return values

    def kmk(basis, k, s):
        p = psi(basis, k)
        s = np.asarray(s, dtype=float)
        val = np.atleast_1d(s) ** (hurst - 0.5) * np.atleast_1d(p(s))
        return float(val[0]) if s.ndim == 0 else val

    def mtilde(basis, k, t):
        # int_0^t s^(H-1/2) psi(s) ds, Gauss-Jacobi in the scaled variable
        if t <= 0:
            return 0.0
        p = psi(basis, k)
        wnodes, ww = jacobi01(jacobi_nodes, 0.0, hurst - 0.5)
        return float(t ** (hurst + 0.5) * np.dot(ww, p(t * wnodes)))

    spec = KernelSpec(
        name="fbm",
        horizon=horizon,
        adapted=True,
        eval=evaluate,
        diag_limit=lambda s: 0.0,
        dt_eval=dt_evaluate,
        dt_smooth=dt_smooth_evaluate,
        singularity=hurst - 1.5,
        origin_exponent=0.5 - hurst,
        params={"hurst": hurst},
        kmk_hook=kmk,
        mtilde_hook=mtilde,
        eval_ts_hook=eval_ts,
    )
    spec.kmk_factor_hook = lambda basis, k: (hurst - 0.5, psi(basis, k))
    return spec


# ---------------------------------------------------------------------------
# grid-interpolated kernels


def grid_kernel_from_csv(path, name: str = "custom-grid") -> KernelSpec:
    """Kernel interpolated bilinearly from a CSV matrix.

    Layout: first row holds the s-grid (first cell blank or a label), first
    column the t-grid, cell (i, j) the value K(t_i, s_j).
    """
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    s_grid = np.array([float(x) for x in rows[0][1:]])
    t_grid = np.array([float(r[0]) for r in rows[1:]])
    values = np.array([[float(x) for x in r[1:]] for r in rows[1:]])
    if values.shape != (len(t_grid), len(s_grid)):
        raise ValueError("grid CSV shape mismatch")
    from scipy.interpolate import RegularGridInterpolator

    interp = RegularGridInterpolator(
        (t_grid, s_grid), values, bounds_error=False, fill_value=None
    )
    horizon = float(max(t_grid[-1], s_grid[-1]))
    adapted = bool(np.allclose(values[np.less.outer(t_grid, s_grid)], 0.0, atol=1e-12))
    h = float(np.min(np.diff(t_grid)))

    def evaluate(t, s):
        if adapted and s > t:
            return 0.0
        return float(interp([[t, s]])[0])

    def diag_limit(s):
        return evaluate(min(s + 0.5 * h, horizon), s)

    def dt_evaluate(t, s):
        lo, hi = max(t - 0.5 * h, s), min(t + 0.5 * h, horizon)
        if hi <= lo:
            return 0.0
        return (evaluate(hi, s) - evaluate(lo, s)) / (hi - lo)

    return KernelSpec(
        name=name,
        horizon=horizon,
        adapted=adapted,
        eval=evaluate,
        diag_limit=diag_limit,
        dt_eval=dt_evaluate,
        singularity=None,
        origin_exponent=0.0,
    )


# ---------------------------------------------------------------------------
# the operator K*


def kstar_apply_step(kernel: KernelSpec, step: StepFunction):
    """K* applied to a step function; valid for adapted kernels.

    On s in (s_i, s_{i+1}]:
        a_i K(s_{i+1}, s) + sum_{k>i} a_k (K(s_{k+1}, s) - K(s_k, s));
    zero outside (s_0, s_N].
    """
    if not kernel.adapted:
        raise UnsupportedKernelError("step-function formula requires an adapted kernel")
    breaks = np.asarray(step.breaks, dtype=float)
    values = np.asarray(step.values, dtype=float)

    def k_at(t: float, s: float) -> float:
        return kernel.eval(t, s) if t >= s else 0.0

    def apply(s: float) -> float:
        if s <= 0.0 or s > breaks[-1]:
            return 0.0
        if s <= breaks[0]:
            # below the support: only the nonlocal part survives
            kvals = np.array([k_at(b, s) for b in breaks])
            return float(np.dot(values, np.diff(kvals)))
        i = int(np.searchsorted(breaks, s, side="left")) - 1
        upper = np.array([k_at(b, s) for b in breaks[i + 1 :]])
        out = values[i] * upper[0]
        out += float(np.dot(values[i + 1 :], np.diff(upper)))
        return float(out)

    return apply


def kstar_apply(kernel: KernelSpec, f, rule: QuadratureRule = DEFAULT_RULE):
    """K* f for continuous f: s -> K(s+, s) f(s) + int_s^T f(t) K1(t, s) dt."""
    if kernel.dt_eval is None:
        raise UnsupportedKernelError(f"kernel {kernel.name!r} lacks derivative data")
    big_t = kernel.horizon

    def apply(s: float) -> float:
        local = kernel.diag_limit(s) * float(np.asarray(f(s)))
        if s >= big_t:
            return local

        if kernel.singularity is not None and kernel.dt_smooth is not None:

            def smooth(t):
                t = np.atleast_1d(np.asarray(t, dtype=float))
                return np.array(
                    [float(np.asarray(f(ti))) * kernel.dt_smooth(ti, s) for ti in t]
                )

            tail = quad_singular_smooth(smooth, s, big_t, kernel.singularity, rule)
        else:

            def integrand(t):
                t = np.atleast_1d(np.asarray(t, dtype=float))
                return np.array(
                    [float(np.asarray(f(ti))) * kernel.dt_eval(ti, s) for ti in t]
                )

            if kernel.singularity is not None:
                tail = quad_singular(integrand, s, big_t, kernel.singularity, rule)
            else:
                tail = rule.integrate(integrand, s, big_t)
        return local + tail

    return apply


# ---------------------------------------------------------------------------
# diagnostics: K1 bound, operator norms


def k1_empirical(
    kernel: KernelSpec,
    horizon: float = None,
    t_grid: int = 256,
    rule: QuadratureRule = None,
    refine_tol: float = 1e-6,
    max_refinements: int = 3,
) -> float:
    """sup over t of int_0^t K(T, s) K1(t, s) ds, on a refining t-grid."""
    if kernel.dt_eval is None:
        raise UnsupportedKernelError(f"kernel {kernel.name!r} lacks derivative data")
    big_t = kernel.horizon if horizon is None else horizon
    rule = rule or QuadratureRule(panels=6, nodes=12)

    # cache K(T, .) through an interpolated smooth factor phi(s) = K(T,s) * s^(-g0)
    g0 = kernel.origin_exponent
    s_fine = np.linspace(0.0, big_t, 1025)[1:]
    phi_vals = np.array([kernel.eval(big_t, s) * s ** (-g0) for s in s_fine])

    def k_upper(s):
        s = np.asarray(s, dtype=float)
        return np.interp(s, s_fine, phi_vals) * s**g0

    def integral_at(t: float) -> float:
        if t <= 0:
            return 0.0

        def integrand(s):
            s = np.atleast_1d(np.asarray(s, dtype=float))
            return k_upper(s) * np.array([kernel.dt_eval(t, si) for si in s])

        mid = 0.5 * t
        if g0 != 0.0:
            low = quad_singular(integrand, 0.0, mid, 2.0 * g0, rule, endpoint="lower")
        else:
            low = rule.integrate(integrand, 0.0, mid)
        if kernel.singularity is not None and kernel.dt_smooth is not None:

            def smooth(s):
                s = np.atleast_1d(np.asarray(s, dtype=float))
                return k_upper(s) * np.array([kernel.dt_smooth(t, si) for si in s])

            high = quad_singular_smooth(smooth, mid, t, kernel.singularity, rule, endpoint="upper")
        elif kernel.singularity is not None:
            high = quad_singular(integrand, mid, t, kernel.singularity, rule, endpoint="upper")
        else:
            high = rule.integrate(integrand, mid, t)
        return low + high

    n = t_grid
    best = max(integral_at(t) for t in np.linspace(big_t / n, big_t, n))
    for _ in range(max_refinements):
        n *= 2
        new = max(integral_at(t) for t in np.linspace(big_t / n, big_t, n))
        if abs(new - best) < refine_tol:
            best = max(best, new)
            break
        best = max(best, new)
    return best


def op_norm_bound(k0: float, k1: float) -> float:
    """Analytic bound on ||K*|| from the diagonal bound K0 and integral bound K1."""
    if k0 < 0 or k1 < 0:
        raise DomainError("K0 and K1 must be non-negative")
    if k0 > 0:
        return math.sqrt(2.0 * (k0 * k0 + k1))
    return math.sqrt(k1)


def discretize_kstar(kernel: KernelSpec, n_grid: int) -> np.ndarray:
    """Matrix of K* restricted to step functions on a uniform n-cell grid.

    Row i gives (K* f)(s_i) at cell midpoints for f piecewise constant on the
    cells; this is the step-function formula evaluated cellwise.
    """
    if not kernel.adapted:
        raise UnsupportedKernelError("discretization implemented for adapted kernels")
    big_t = kernel.horizon
    edges = np.linspace(0.0, big_t, n_grid + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    a = np.zeros((n_grid, n_grid))
    for i, s in enumerate(mids):
        kvals = kernel.eval_ts(edges[i + 1 :], s)
        a[i, i] = kvals[0]
        if len(kvals) > 1:
            a[i, i + 1 :] = np.diff(kvals)
    return a


def op_norm_estimate(
    kernel: KernelSpec, n_grid: int = 512, tol: float = 1e-8, max_iter: int = 5000
) -> float:
    """Largest singular value of the discretized K*, by power iteration on A^T A."""
    a = discretize_kstar(kernel, n_grid)
    b = a.T @ a
    rng = np.random.default_rng(12345)
    v = rng.standard_normal(n_grid)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = b @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v_new = w / nw
        lam_new = float(v_new @ (b @ v_new))
        if abs(lam_new - lam) <= tol * max(lam_new, 1.0):
            return math.sqrt(max(lam_new, 0.0))
        lam, v = lam_new, v_new
    return math.sqrt(max(lam, 0.0))


# ---------------------------------------------------------------------------
# covariance functions


@dataclass(frozen=True)
class CovarianceFunction:
    """Symmetric positive-semidefinite covariance R(t, s)."""

    fn: object
    name: str = "custom"

    def __call__(self, t, s):
        return self.fn(t, s)


def brownian_covariance() -> CovarianceFunction:
    return CovarianceFunction(lambda t, s: np.minimum(t, s), "brownian")


def fbm_covariance(hurst: float) -> CovarianceFunction:
    _check_hurst(hurst)

    def r(t, s):
        h2 = 2.0 * hurst
        return 0.5 * (np.abs(t) ** h2 + np.abs(s) ** h2 - np.abs(t - s) ** h2)

    return CovarianceFunction(r, f"fbm(H={hurst})")


def covariance_from_kernel(
    kernel: KernelSpec, t: float, s: float, rule: QuadratureRule = DEFAULT_RULE
) -> float:
    """E X(t) X(s) = int_0^min(t,s) K(t, tau) K(s, tau) d tau for adapted kernels."""
    if not kernel.adapted:
        raise UnsupportedKernelError("covariance formula requires an adapted kernel")
    upper = min(t, s)
    if upper <= 0:
        return 0.0

    def integrand(tau):
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        return np.array(
            [kernel.eval(t, x) * kernel.eval(s, x) for x in tau]
        )

    g0 = kernel.origin_exponent
    if g0 != 0.0:
        return quad_singular(integrand, 0.0, upper, 2.0 * g0, rule)
    return rule.integrate(integrand, 0.0, upper)


def hr_gram(r: CovarianceFunction, times, psd_tol: float = 1e-10) -> np.ndarray:
    """Gram matrix G_ij = R(t_i, t_j) with a positive-semidefiniteness check."""
    times = np.asarray(times, dtype=float)
    g = np.array([[float(r(ti, tj)) for tj in times] for ti in times])
    if not np.allclose(g, g.T, atol=1e-12):
        raise InvalidCovarianceError("covariance Gram matrix is not symmetric")
    eigmin = float(np.linalg.eigvalsh(g)[0])
    scale = max(1.0, float(np.max(np.abs(g))))
    if eigmin < -psd_tol * scale:
        raise InvalidCovarianceError(f"minimum eigenvalue {eigmin} below tolerance")
    return g


# ---------------------------------------------------------------------------
# kernel-basis pairings


def m_tilde(
    kernel: KernelSpec,
    basis: BasisFamily,
    k: int,
    t: float,
    rule: QuadratureRule = DEFAULT_RULE,
) -> float:
    """M~_k(t) = int_0^t (K m_k)(s) ds = int K(t, s) m_k(s) ds."""
    if t == 0:
        return 0.0
    if kernel.mtilde_hook is not None:
        return kernel.mtilde_hook(basis, k, t)
    if not kernel.adapted:
        raise UnsupportedKernelError("generic m_tilde implemented for adapted kernels")

    def integrand(s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        return np.array([kernel.eval(t, x) for x in s]) * np.asarray(
            basis.eval(k, s), dtype=float
        )

    g0 = kernel.origin_exponent
    if g0 != 0.0:
        return quad_singular(integrand, 0.0, t, g0, rule)
    return rule.integrate(integrand, 0.0, t)


def k_mk(kernel: KernelSpec, basis: BasisFamily, k: int, s):
    """(K m_k)(s): the kernel image of a basis function, vectorized over s."""
    if kernel.kmk_hook is not None:
        return kernel.kmk_hook(basis, k, s)
    if kernel.dt_eval is None:
        raise UnsupportedKernelError(f"kernel {kernel.name!r} lacks derivative data")
    rule = QuadratureRule(panels=4, nodes=12)

    def scalar(x: float) -> float:
        local = kernel.diag_limit(x) * float(np.asarray(basis.eval(k, x)))
        if x <= 0:
            return local

        def integrand(tau):
            tau = np.atleast_1d(np.asarray(tau, dtype=float))
            return np.asarray(basis.eval(k, tau), dtype=float) * np.array(
                [kernel.dt_eval(x, ti) for ti in tau]
            )

        if kernel.singularity is not None and kernel.dt_smooth is not None:
            gam, g0 = kernel.singularity, kernel.origin_exponent
            # two-sided Jacobi weight tau^g0 (x - tau)^gam, both exponents exact
            v, w = jacobi01(min(rule.panels * rule.nodes, 96), gam, g0)
            tau = x * v
            vals = np.asarray(basis.eval(k, tau), dtype=float) * np.array(
                [kernel.dt_smooth(x, ti) for ti in tau]
            )
            vals = vals * tau ** (-g0) if g0 != 0.0 else vals
            tail = x ** (g0 + gam + 1.0) * float(np.dot(w, vals))
        elif kernel.singularity is not None:
            tail = quad_singular(integrand, 0.0, x, kernel.singularity, rule, endpoint="upper")
        else:
            tail = rule.integrate(integrand, 0.0, x)
        return local + tail

    s = np.asarray(s, dtype=float)
    if s.ndim == 0:
        return scalar(float(s))
    return np.array([scalar(float(x)) for x in s])


def kmk_factor(kernel: KernelSpec, basis: BasisFamily, k: int):
    """(gamma0, psi) with (K m_k)(s) = s^gamma0 * psi(s) and psi smooth at 0."""
    if kernel.kmk_factor_hook is not None:
        return kernel.kmk_factor_hook(basis, k)
    return 0.0, lambda s: k_mk(kernel, basis, k, s)
