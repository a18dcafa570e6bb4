"""Multi-indices and truncated index sets for chaos expansions.

A multi-index is a finitely supported sequence of non-negative integers
alpha = (alpha_1, alpha_2, ...).  It labels one basis element of the chaos
space.  Only the non-zero entries are stored, as a sorted tuple of
(position, value) pairs with positions starting at 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache


@dataclass(frozen=True)
class MultiIndex:
    """Sparse multi-index; ``entries`` is a sorted tuple of (k, a_k) pairs.

    Positions k are >= 1 and strictly increasing, stored values strictly
    positive.  Two equal multi-indices always have identical tuples, so
    equality and hashing come from the dataclass.
    """

    entries: tuple = ()

    def __post_init__(self):
        last = 0
        for k, a in self.entries:
            if k <= last:
                raise ValueError("positions must be strictly increasing and >= 1")
            if a <= 0 or a != int(a):
                raise ValueError("stored values must be positive integers")
            last = k

    @staticmethod
    def zero() -> "MultiIndex":
        return MultiIndex(())

    @staticmethod
    def eps(k: int) -> "MultiIndex":
        """Unit multi-index with a single 1 at position k."""
        return MultiIndex(((k, 1),))

    @staticmethod
    def single(k: int, n: int) -> "MultiIndex":
        """n * eps_k."""
        if n == 0:
            return MultiIndex(())
        return MultiIndex(((k, n),))

    @staticmethod
    def from_dense(values) -> "MultiIndex":
        """Build from a dense sequence (alpha_1, alpha_2, ...)."""
        return MultiIndex(tuple((k + 1, int(a)) for k, a in enumerate(values) if a))

    def dense(self, length: int):
        """Dense tuple of the first ``length`` entries."""
        out = [0] * length
        for k, a in self.entries:
            if k > length:
                raise ValueError(f"support position {k} exceeds length {length}")
            out[k - 1] = a
        return tuple(out)

    def get(self, k: int) -> int:
        for pos, a in self.entries:
            if pos == k:
                return a
        return 0

    @property
    def max_support(self) -> int:
        return self.entries[-1][0] if self.entries else 0

    def order(self) -> int:
        """|alpha| = sum of the entries."""
        return sum(a for _, a in self.entries)

    def factorial_log(self) -> float:
        """log(alpha!) = sum_k log(alpha_k!)."""
        return sum(math.lgamma(a + 1) for _, a in self.entries)

    def factorial_sqrt_log(self) -> float:
        """(1/2) log(alpha!), so that exp of it equals sqrt(alpha!)."""
        return 0.5 * self.factorial_log()

    def add(self, other: "MultiIndex") -> "MultiIndex":
        """Entrywise sum alpha + beta."""
        merged = dict(self.entries)
        for k, a in other.entries:
            merged[k] = merged.get(k, 0) + a
        return MultiIndex(tuple(sorted(merged.items())))

    def sub_eps(self, k: int):
        """alpha - eps_k, or None when alpha_k = 0 (coefficient is zero downstream)."""
        out = []
        found = False
        for pos, a in self.entries:
            if pos == k:
                found = True
                if a > 1:
                    out.append((pos, a - 1))
            else:
                out.append((pos, a))
        if not found:
            return None
        return MultiIndex(tuple(out))

    def add_eps(self, k: int) -> "MultiIndex":
        return self.add(MultiIndex.eps(k))

    def __str__(self):
        if not self.entries:
            return "0"
        return "+".join(f"{a}e{k}" if a > 1 else f"e{k}" for k, a in self.entries)


def mi_order(alpha: MultiIndex) -> int:
    return alpha.order()


def mi_factorial_sqrt_log(alpha: MultiIndex) -> float:
    return alpha.factorial_sqrt_log()


def mi_add(alpha: MultiIndex, beta: MultiIndex) -> MultiIndex:
    return alpha.add(beta)


def mi_sub_eps(alpha: MultiIndex, k: int):
    return alpha.sub_eps(k)


@dataclass(frozen=True)
class Truncation:
    """Finite chaos space: ``modes`` basis functions, chaos order up to ``max_order``.

    The truncated index set I(K, N) = { alpha : supp(alpha) in {1..K}, |alpha| <= N }
    has binomial(N + K, K) elements.
    """

    modes: int
    max_order: int

    def __post_init__(self):
        if self.modes < 1:
            raise ValueError("modes must be a positive integer")
        if self.max_order < 0:
            raise ValueError("max_order must be non-negative")

    def size(self) -> int:
        return math.comb(self.max_order + self.modes, self.modes)

    def contains(self, alpha: MultiIndex) -> bool:
        return alpha.max_support <= self.modes and alpha.order() <= self.max_order


@lru_cache(maxsize=None)
def _enumerate(modes: int, max_order: int):
    """All dense tuples of length ``modes`` with sum <= max_order, graded order.

    Within a grade, ties are broken so that weight on earlier positions comes
    first (eps_1 before eps_2), i.e. descending lexicographic on the dense tuple.
    """

    def compositions(length, total):
        # all tuples of given length summing to exactly total
        if length == 1:
            yield (total,)
            return
        for first in range(total, -1, -1):
            for rest in compositions(length - 1, total - first):
                yield (first,) + rest

    out = []
    for n in range(max_order + 1):
        out.extend(compositions(modes, n))
    return tuple(out)


def enumerate_multiindices(trunc: Truncation):
    """Ordered list of all multi-indices in I(K, N); deterministic."""
    return [MultiIndex.from_dense(d) for d in _enumerate(trunc.modes, trunc.max_order)]


@lru_cache(maxsize=None)
def index_map(trunc: Truncation):
    """Map MultiIndex -> position in the enumeration order."""
    return {alpha: i for i, alpha in enumerate(enumerate_multiindices(trunc))}
