"""Monte Carlo oracle: sampling, path synthesis, discrete-time integrators.

Sampling uses counter-based Philox streams keyed by (seed, sample index), so
each sample row is reproducible independently of batch size or ordering.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .basis import BasisFamily
from .chaos import ChaosExpansion, chaos_eval
from .errors import ConfigurationError, DomainError
from .kernels import KernelSpec, m_tilde
from .multiindex import Truncation


@dataclass(frozen=True)
class SampleBatch:
    """Reproducible (n, K) matrix of iid standard normals."""

    seed: int
    z: np.ndarray

    @property
    def n_samples(self) -> int:
        return self.z.shape[0]

    @property
    def modes(self) -> int:
        return self.z.shape[1]


def sample_batch(seed: int, n: int, modes: int) -> SampleBatch:
    """Draw an (n, modes) batch; row i comes from the Philox stream (seed, i)."""
    if n < 1 or modes < 1:
        raise DomainError("need n >= 1 and modes >= 1")
    z = np.empty((n, modes))
    for i in range(n):
        rng = np.random.Generator(np.random.Philox(key=np.array([seed, i], dtype=np.uint64)))
        z[i] = rng.standard_normal(modes)
    return SampleBatch(seed, z)


def synthesize_path(
    kernel: KernelSpec, basis: BasisFamily, trunc: Truncation, z_row, grid
) -> np.ndarray:
    """Truncated associated process X(t_i) = sum_{k <= K} M~_k(t_i) z_k."""
    z_row = np.asarray(z_row, dtype=float)
    if z_row.shape[0] < trunc.modes:
        raise DomainError("sample row shorter than the mode count")
    grid = np.asarray(grid, dtype=float)
    mt = np.array(
        [[m_tilde(kernel, basis, k, t) for k in range(1, trunc.modes + 1)] for t in grid]
    )
    return mt @ z_row[: trunc.modes]


def synthesize_paths(
    kernel: KernelSpec, basis: BasisFamily, trunc: Truncation, batch: SampleBatch, grid
) -> np.ndarray:
    """All batch paths at once; shape (n_samples, len(grid))."""
    grid = np.asarray(grid, dtype=float)
    mt = np.array(
        [[m_tilde(kernel, basis, k, t) for k in range(1, trunc.modes + 1)] for t in grid]
    )
    return batch.z[:, : trunc.modes] @ mt.T


def _check_paths(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ConfigurationError("integrand and integrator paths must share a grid")
    return x, y


def discrete_ito(x, y) -> float:
    """Left-point Riemann sum sum_i X(t_i) (Y(t_{i+1}) - Y(t_i))."""
    x, y = _check_paths(x, y)
    return float(np.sum(x[..., :-1] * np.diff(y, axis=-1), axis=-1))


def discrete_strat(x, y) -> float:
    """Midpoint rule sum_i (X(t_i) + X(t_{i+1}))/2 * (Y(t_{i+1}) - Y(t_i))."""
    x, y = _check_paths(x, y)
    mid = 0.5 * (x[..., :-1] + x[..., 1:])
    return float(np.sum(mid * np.diff(y, axis=-1), axis=-1))


def discrete_ito_batch(x, y) -> np.ndarray:
    x, y = _check_paths(x, y)
    return np.sum(x[:, :-1] * np.diff(y, axis=1), axis=1)


def discrete_strat_batch(x, y) -> np.ndarray:
    x, y = _check_paths(x, y)
    return np.sum(0.5 * (x[:, :-1] + x[:, 1:]) * np.diff(y, axis=1), axis=1)


def mc_compare(
    chaos_result: ChaosExpansion,
    oracle_values,
    batch: SampleBatch,
    sigma_tolerance: float = 3.0,
) -> dict:
    """Compare chaos_eval(F, Z) against per-sample oracle values.

    The statistic is the mean difference; the gate is
    |mean difference| <= sigma_tolerance * stderr.  Pairwise summation keeps
    the reduction deterministic.
    """
    oracle_values = np.asarray(oracle_values, dtype=float)
    if oracle_values.shape != (batch.n_samples,):
        raise ConfigurationError("oracle values must be one per sample")
    diffs = chaos_eval(chaos_result, batch.z) - oracle_values
    mean = float(np.mean(diffs))
    stderr = float(np.std(diffs, ddof=1) / math.sqrt(len(diffs))) if len(diffs) > 1 else 0.0
    tolerance = sigma_tolerance * stderr
    return {
        "statistic": mean,
        "stderr": stderr,
        "tolerance": tolerance,
        "pass": bool(abs(mean) <= tolerance or (stderr == 0.0 and mean == 0.0)),
        "seed": batch.seed,
        "n": batch.n_samples,
    }


def report_json(report: dict) -> str:
    """Deterministic JSON serialization of an mc_compare report."""
    ordered = {k: report[k] for k in ("statistic", "stderr", "tolerance", "pass", "seed", "n")}
    return json.dumps(ordered)
