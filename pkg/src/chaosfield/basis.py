"""Orthonormal bases of L2((0, T)) and quadrature rules.

Two families with closed-form antiderivatives are provided: a cosine family
whose first element is the constant 1/sqrt(T), and shifted Legendre
polynomials.  Both satisfy M_k(T) = 0 for k >= 2, which keeps truncated
integral identities simple.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError


@lru_cache(maxsize=None)
def _leggauss(n: int):
    return np.polynomial.legendre.leggauss(n)


@lru_cache(maxsize=None)
def jacobi01(n: int, a: float, b: float):
    """Nodes/weights for int_0^1 (1-v)^a v^b f(v) dv = sum w_i f(v_i)."""
    from scipy.special import roots_jacobi

    with np.errstate(invalid="ignore", divide="ignore"):
        x, w = roots_jacobi(n, a, b)
    return (x + 1.0) / 2.0, w * 2.0 ** (-(a + b + 1.0))


@dataclass(frozen=True)
class QuadratureRule:
    """Composite Gauss-Legendre rule: ``panels`` equal panels of ``nodes`` points."""

    panels: int = 8
    nodes: int = 16
    tolerance: float = 1e-10

    def nodes_weights(self, a: float, b: float):
        """Nodes and weights on [a, b]; exact for degree <= 2*nodes-1 per panel."""
        x, w = _leggauss(self.nodes)
        edges = np.linspace(a, b, self.panels + 1)
        lo, hi = edges[:-1], edges[1:]
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        xs = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        ws = (half[:, None] * w[None, :]).ravel()
        return xs, ws

    def integrate(self, f, a: float, b: float) -> float:
        if b == a:
            return 0.0
        xs, ws = self.nodes_weights(a, b)
        return float(np.dot(ws, np.asarray(f(xs), dtype=float)))


DEFAULT_RULE = QuadratureRule()


@dataclass(frozen=True)
class BasisFamily:
    """Orthonormal basis {m_k} of L2((0, T)) with closed-form antiderivatives M_k."""

    kind: str  # "cosine" | "legendre"
    horizon: float = 1.0

    def __post_init__(self):
        if self.kind not in ("cosine", "legendre"):
            raise DomainError(f"unknown basis kind {self.kind!r}")
        if self.horizon <= 0:
            raise DomainError("horizon must be positive")

    def _check(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < -1e-12) or np.any(t > self.horizon + 1e-12):
            raise DomainError(f"t outside [0, {self.horizon}]")
        return np.clip(t, 0.0, self.horizon)

    def eval(self, k: int, t):
        """m_k(t); k >= 1."""
        if k < 1:
            raise DomainError("basis index k must be >= 1")
        t = self._check(t)
        big_t = self.horizon
        if self.kind == "cosine":
            if k == 1:
                return np.full_like(t, 1.0 / math.sqrt(big_t)) if t.ndim else 1.0 / math.sqrt(big_t)
            val = math.sqrt(2.0 / big_t) * np.cos((k - 1) * math.pi * t / big_t)
        else:
            x = 2.0 * t / big_t - 1.0
            coef = [0.0] * (k - 1) + [1.0]
            val = math.sqrt((2 * k - 1) / big_t) * np.polynomial.legendre.legval(x, coef)
        return val if val.ndim else float(val)

    def antideriv(self, k: int, t):
        """M_k(t) = int_0^t m_k(s) ds in closed form."""
        if k < 1:
            raise DomainError("basis index k must be >= 1")
        t = self._check(t)
        big_t = self.horizon
        if self.kind == "cosine":
            if k == 1:
                val = t / math.sqrt(big_t)
            else:
                freq = (k - 1) * math.pi / big_t
                val = math.sqrt(2.0 / big_t) * np.sin(freq * t) / freq
        else:
            x = 2.0 * t / big_t - 1.0
            n = k - 1
            scale = math.sqrt((2 * k - 1) / big_t) * big_t / 2.0
            if n == 0:
                val = scale * (x + 1.0)
            else:
                # int_{-1}^{x} P_n = (P_{n+1}(x) - P_{n-1}(x)) / (2n + 1)
                up = [0.0] * (n + 1) + [1.0]
                down = [0.0] * (n - 1) + [1.0]
                val = scale * (
                    np.polynomial.legendre.legval(x, up)
                    - np.polynomial.legendre.legval(x, down)
                ) / (2 * n + 1)
        return val if np.asarray(val).ndim else float(val)


def basis_eval(basis: BasisFamily, k: int, t):
    return basis.eval(k, t)


def basis_antideriv(basis: BasisFamily, k: int, t):
    return basis.antideriv(k, t)


def inner_product(f, g, rule: QuadratureRule = DEFAULT_RULE, horizon: float = 1.0) -> float:
    """Quadrature approximation of int_0^T f(t) g(t) dt."""
    return rule.integrate(lambda t: np.asarray(f(t)) * np.asarray(g(t)), 0.0, horizon)


def localize_coeff(f, t: float, k: int, basis: BasisFamily, rule: QuadratureRule = DEFAULT_RULE) -> float:
    """(f * chi_t, m_k) = int_0^t f(s) m_k(s) ds."""
    if t < 0 or t > basis.horizon + 1e-12:
        raise DomainError(f"t outside [0, {basis.horizon}]")
    if t == 0:
        return 0.0
    return rule.integrate(lambda s: np.asarray(f(s)) * np.asarray(basis.eval(k, s)), 0.0, t)


def quad_singular(
    f,
    a: float,
    b: float,
    gamma: float,
    rule: QuadratureRule = DEFAULT_RULE,
    endpoint: str = "lower",
) -> float:
    """Integrate f over [a, b] where f has an algebraic endpoint singularity.

    f(tau) = (tau - a)^gamma * g(tau) with g smooth (endpoint="lower"), or
    (b - tau)^gamma * g(tau) (endpoint="upper"), gamma in (-1, 0].  The power
    substitution u = (distance)^(gamma+1) regularizes the integrand; Gauss
    nodes never touch the endpoint.
    """
    if gamma <= -1.0:
        raise DomainError("exponent must be > -1 for an integrable singularity")
    if b <= a:
        return 0.0
    p = 1.0 / (gamma + 1.0)
    u_max = (b - a) ** (gamma + 1.0)
    if endpoint == "lower":
        def h(u):
            return np.asarray(f(a + u**p), dtype=float) * u ** (p - 1.0)
    elif endpoint == "upper":
        def h(u):
            return np.asarray(f(b - u**p), dtype=float) * u ** (p - 1.0)
    else:
        raise ValueError("endpoint must be 'lower' or 'upper'")
    xs, ws = rule.nodes_weights(0.0, u_max)
    return float(p * np.dot(ws, h(xs)))


def quad_singular_smooth(
    g,
    a: float,
    b: float,
    gamma: float,
    rule: QuadratureRule = DEFAULT_RULE,
    endpoint: str = "lower",
) -> float:
    """Integrate (distance)^gamma * g(tau) over [a, b], g the smooth cofactor.

    Gauss-Jacobi quadrature with the weight v^gamma built in: the singular
    factor is exact and never reconstructed by subtraction, so the result
    converges spectrally in the number of nodes for analytic g, and stays
    accurate when the endpoint sits far from zero.
    """
    if gamma <= -1.0:
        raise DomainError("exponent must be > -1 for an integrable singularity")
    if b <= a:
        return 0.0
    n = min(rule.panels * rule.nodes, 96)
    v, w = jacobi01(n, 0.0, gamma)
    if endpoint == "lower":
        pos = a + (b - a) * v
    elif endpoint == "upper":
        pos = b - (b - a) * v
    else:
        raise ValueError("endpoint must be 'lower' or 'upper'")
    return float((b - a) ** (gamma + 1.0) * np.dot(w, np.asarray(g(pos), dtype=float)))
