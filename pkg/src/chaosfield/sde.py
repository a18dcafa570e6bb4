"""The linear Wick SDE u(t) = 1 + X_t(u), X the field with kernel K.

In chaos coefficients the equation is a triangular Volterra system

    u_alpha(t) = 1_{alpha = 0} + sum_k sqrt(alpha_k) int_0^t u_{alpha-eps_k}(s) m~_k(s) ds,

with m~_k = K m_k.  The closed form is the Wick exponential
u_alpha(t) = prod_k M~_k(t)^{alpha_k} / sqrt(alpha!) with M~_k(t) the
antiderivative of m~_k.  The Picard solver integrates the system directly by
collocation, giving an independent check.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .basis import BasisFamily, QuadratureRule
from .chaos import ChaosExpansion
from .errors import ConfigurationError, DomainError
from .hermite import hermite_table
from .basis import jacobi01
from .kernels import KernelSpec, kmk_factor, m_tilde
from .multiindex import Truncation, enumerate_multiindices, index_map


@dataclass(frozen=True)
class PropagatorSolution:
    """Chaos coefficients u_alpha(t_i) of the propagator on a time grid.

    ``coeffs`` has shape (len(times), trunc.size()); rows follow ``times``,
    columns the enumeration order of ``trunc``.  ``mtilde`` holds M~_k(t_i)
    with shape (len(times), modes).
    """

    trunc: Truncation
    basis: BasisFamily
    kernel_name: str
    times: np.ndarray
    coeffs: np.ndarray
    mtilde: np.ndarray

    def _time_index(self, t: float) -> int:
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > 1e-10:
            raise DomainError(f"time {t} not on the solution grid")
        return i

    def at(self, t: float) -> ChaosExpansion:
        """Solution at a grid time as a ChaosExpansion."""
        return ChaosExpansion.from_dense(self.trunc, self.coeffs[self._time_index(t)])

    def second_moment(self, t: float) -> float:
        """E u(t)^2 = sum_alpha u_alpha(t)^2 within the truncation."""
        row = self.coeffs[self._time_index(t)]
        return float(np.dot(row, row))

    def sample(self, t: float, z: np.ndarray) -> np.ndarray:
        """Evaluate u(t) at Gaussian samples z of shape (n, K) or (K,)."""
        return sample_wick_exponential(self.mtilde[self._time_index(t)], z, self.trunc.max_order)

    def export_csv(self, path, sidecar_path) -> None:
        """Write rows (t, alpha-id, coefficient) and an id -> multi-index sidecar."""
        alphas = enumerate_multiindices(self.trunc)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "alpha_id", "coefficient"])
            for i, t in enumerate(self.times):
                for j in range(len(alphas)):
                    writer.writerow([repr(float(t)), j, repr(float(self.coeffs[i, j]))])
        sidecar = {str(j): [[k, a] for k, a in alpha.entries] for j, alpha in enumerate(alphas)}
        with open(sidecar_path, "w") as fh:
            json.dump(sidecar, fh, sort_keys=True)


def _check_interpretation(interpretation: str):
    if interpretation == "ito":
        return
    if interpretation == "stratonovich":
        raise ConfigurationError(
            "the Stratonovich form couples each coefficient to higher-order ones, "
            "so the system is not triangular; only the Ito interpretation is solved"
        )
    raise ConfigurationError(f"unknown interpretation {interpretation!r}")


def _mtilde_table(kernel: KernelSpec, basis: BasisFamily, modes: int, times) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    out = np.empty((len(times), modes))
    for k in range(1, modes + 1):
        out[:, k - 1] = [m_tilde(kernel, basis, k, t) for t in times]
    return out


def sample_wick_exponential(mtilde_row: np.ndarray, z, max_order: int) -> np.ndarray:
    """Truncated Wick exponential sum_{|alpha| <= N} prod_k c_k^{a_k} H_{a_k}(z_k)/a_k!.

    Dynamic programming over modes keeps the cost linear in K instead of
    enumerating the index set.
    """
    c = np.asarray(mtilde_row, dtype=float)
    z = np.asarray(z, dtype=float)
    one_sample = z.ndim == 1
    zz = z[None, :] if one_sample else z
    if zz.shape[1] < len(c):
        raise DomainError("sample vector shorter than the mode count")
    n = zz.shape[0]
    dp = np.zeros((max_order + 1, n))
    dp[0] = 1.0
    for k in range(len(c)):
        table = hermite_table(max_order, zz[:, k])
        powers = np.array([c[k] ** a / math.factorial(a) for a in range(max_order + 1)])
        new = np.zeros_like(dp)
        for order in range(max_order + 1):
            for a in range(order + 1):
                new[order] += dp[order - a] * powers[a] * table[a]
        dp = new
    out = dp.sum(axis=0)
    return float(out[0]) if one_sample else out


def solve_closed_form(
    kernel: KernelSpec,
    basis: BasisFamily,
    trunc: Truncation,
    grid,
    interpretation: str = "ito",
) -> PropagatorSolution:
    """Wick-exponential solution u_alpha(t) = prod_k M~_k(t)^{alpha_k} / sqrt(alpha!)."""
    _check_interpretation(interpretation)
    times = np.asarray(grid, dtype=float)
    mt = _mtilde_table(kernel, basis, trunc.modes, times)
    alphas = enumerate_multiindices(trunc)
    coeffs = np.empty((len(times), len(alphas)))
    for j, alpha in enumerate(alphas):
        col = np.ones(len(times))
        for k, a in alpha.entries:
            col = col * mt[:, k - 1] ** a
        coeffs[:, j] = col * math.exp(-alpha.factorial_sqrt_log())
    return PropagatorSolution(trunc, basis, kernel.name, times, coeffs, mt)


# ---------------------------------------------------------------------------
# Picard / collocation solver


def _barycentric_weights(nodes: np.ndarray) -> np.ndarray:
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / np.prod(diff, axis=1)


def _lagrange_eval(nodes: np.ndarray, bw: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Matrix L[j, m] = ell_j(x_m) for the Lagrange basis on ``nodes``."""
    x = np.atleast_1d(x)
    d = x[None, :] - nodes[:, None]
    exact = d == 0.0
    d = np.where(exact, 1.0, d)
    terms = bw[:, None] / d
    denom = np.sum(terms, axis=0)
    out = terms / denom[None, :]
    hit = exact.any(axis=0)
    if np.any(hit):
        out[:, hit] = exact[:, hit].astype(float)
    return out


class _CollocationGrid:
    """Graded composite Gauss-Legendre collocation mesh on [0, T]."""

    def __init__(self, horizon: float, panels: int, nodes: int, grading: float):
        self.horizon = horizon
        self.panels = panels
        self.nodes = nodes
        self.edges = horizon * (np.arange(panels + 1) / panels) ** grading
        x, w = np.polynomial.legendre.leggauss(nodes)
        self.ref_nodes = x
        lo, hi = self.edges[:-1], self.edges[1:]
        self.half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        self.panel_nodes = mid[:, None] + self.half[:, None] * x[None, :]
        self.all_nodes = self.panel_nodes.ravel()
        self.bw = [_barycentric_weights(self.panel_nodes[p]) for p in range(panels)]

    def interp_matrix(self, times: np.ndarray) -> np.ndarray:
        """E[i, m] mapping node values to values at ``times`` panelwise."""
        n = self.panels * self.nodes
        out = np.zeros((len(times), n))
        idx = np.clip(np.searchsorted(self.edges, times, side="right") - 1, 0, self.panels - 1)
        for p in range(self.panels):
            sel = np.nonzero(idx == p)[0]
            if len(sel) == 0:
                continue
            l = _lagrange_eval(self.panel_nodes[p], self.bw[p], times[sel])
            out[sel, p * self.nodes : (p + 1) * self.nodes] = l.T
        return out


def _integration_matrix(
    grid: _CollocationGrid, gamma0: float, psi, sub_nodes: int = 32
) -> np.ndarray:
    """Lower-triangular W with (W v)[m] = int_0^{x_m} v~(s) m~(s) ds.

    v~ is the panelwise Lagrange interpolant of the node values v and
    m~(s) = s^gamma0 psi(s).  The first panel uses a Gauss-Jacobi rule for the
    s^gamma0 weight; later panels use plain Gauss-Legendre.
    """
    p_count, q = grid.panels, grid.nodes
    n = p_count * q
    xg, wg = np.polynomial.legendre.leggauss(sub_nodes)
    vj, wj = jacobi01(sub_nodes, 0.0, gamma0) if gamma0 != 0.0 else (None, None)
    w = np.zeros((n, n))
    full = np.zeros((p_count, q))  # full-panel integrals of each ell_j

    def partial(p: int, upper: float) -> np.ndarray:
        """Row of int_{a_p}^{upper} ell_j(s) m~(s) ds over local j."""
        a = grid.edges[p]
        if upper <= a:
            return np.zeros(q)
        if p == 0 and gamma0 != 0.0 and a == 0.0:
            s = upper * vj
            weights = upper ** (gamma0 + 1.0) * wj
            mt = np.asarray(psi(s), dtype=float)
        else:
            half = 0.5 * (upper - a)
            s = a + half * (xg + 1.0)
            weights = half * wg
            mt = s**gamma0 * np.asarray(psi(s), dtype=float)
        l = _lagrange_eval(grid.panel_nodes[p], grid.bw[p], s)
        return l @ (weights * mt)

    for p in range(p_count):
        full[p] = partial(p, grid.edges[p + 1])
        for i in range(q):
            row = p * q + i
            w[row, p * q : (p + 1) * q] = partial(p, grid.panel_nodes[p, i])
            for prev in range(p):
                w[row, prev * q : (prev + 1) * q] = full[prev]
    return w


def solve_picard(
    kernel: KernelSpec,
    basis: BasisFamily,
    trunc: Truncation,
    grid,
    iterations: int = 1,
    interpretation: str = "ito",
    panels: int = 48,
    nodes: int = 12,
    grading: float = 3.0,
) -> PropagatorSolution:
    """Solve the triangular coefficient system by induction on |alpha|.

    Product-integration collocation: each u_alpha is represented by its values
    at graded composite Gauss-Legendre nodes, and the Volterra integral is a
    precomputed lower-triangular matrix per mode.  ``iterations`` multiplies
    the panel count for refinement studies.
    """
    _check_interpretation(interpretation)
    if iterations < 1:
        raise ConfigurationError("iterations must be >= 1")
    times = np.asarray(grid, dtype=float)
    cgrid = _CollocationGrid(basis.horizon, panels * iterations, nodes, grading)
    w_k = []
    for k in range(1, trunc.modes + 1):
        gamma0, psi = kmk_factor(kernel, basis, k)
        w_k.append(_integration_matrix(cgrid, gamma0, psi))

    alphas = enumerate_multiindices(trunc)
    imap = index_map(trunc)
    n_nodes = len(cgrid.all_nodes)
    u = np.zeros((len(alphas), n_nodes))
    u[0] = 1.0
    for j, alpha in enumerate(alphas):
        if alpha.order() == 0:
            continue
        acc = np.zeros(n_nodes)
        for k, a in alpha.entries:
            prev = imap[alpha.sub_eps(k)]
            acc += math.sqrt(a) * (w_k[k - 1] @ u[prev])
        u[j] = acc

    e = cgrid.interp_matrix(times)
    coeffs = (e @ u.T)
    mt = _mtilde_table(kernel, basis, trunc.modes, times)
    return PropagatorSolution(trunc, basis, kernel.name, times, coeffs, mt)


def second_moment(sol: PropagatorSolution, t: float) -> float:
    return sol.second_moment(t)
