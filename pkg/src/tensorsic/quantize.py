"""Scalar quantizers that turn lagged Re/Im inputs into tensor indices.

Indices are zero-based: a codebook with ``I`` centroids maps to ``0..I-1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .signal import as_range, lagged


@dataclass(frozen=True)
class Codebook:
    centroids: np.ndarray

    def __post_init__(self):
        c = np.array(self.centroids, dtype=np.float64).reshape(-1)
        if c.size < 2:
            raise ValueError("a codebook needs at least 2 levels")
        if not np.all(np.isfinite(c)) or np.any(np.diff(c) <= 0):
            raise ValueError("centroids must be finite and strictly ascending")
        c.flags.writeable = False
        object.__setattr__(self, "centroids", c)
        mid = (c[1:] + c[:-1]) / 2
        mid.flags.writeable = False
        object.__setattr__(self, "_mid", mid)

    @property
    def I(self) -> int:
        return self.centroids.size

    def index(self, v) -> np.ndarray:
        """Nearest-centroid index; ties go to the lower index, out-of-range values clamp."""
        return np.searchsorted(self._mid, v, side="left")

    def dequantize(self, idx) -> np.ndarray:
        return self.centroids[idx]


def quantize_index(codebook: Codebook, v: float) -> int:
    return int(codebook.index(v))


def _lloyd_partition(sorted_v, centroids):
    mid = (centroids[1:] + centroids[:-1]) / 2
    # boundaries[j] = first sample assigned to level j+1
    return np.searchsorted(sorted_v, mid, side="right")


def train_kmeans_1d(values, I: int, seed=None, max_iter: int = 1000) -> Codebook:
    """One-dimensional k-means (Lloyd) with quantile initialization.

    Centroid ``j`` starts at the ``(j + 1/2)/I`` quantile of the distinct
    values and the iteration runs until no assignment changes. The result
    is deterministic; ``seed`` is accepted for interface symmetry and is
    unused by the quantile initializer.
    """
    if I < 2:
        raise ValueError("I must be >= 2")
    v = np.sort(np.asarray(values, dtype=np.float64).reshape(-1))
    if not np.all(np.isfinite(v)):
        raise ValueError("values must be finite")
    distinct = np.unique(v)
    if distinct.size < I:
        raise ValueError(f"need at least {I} distinct values, got {distinct.size}")

    q = (np.arange(I) + 0.5) / I
    c = np.quantile(v, q, method="inverted_cdf")
    if np.any(np.diff(c) <= 0):
        c = np.quantile(distinct, q, method="inverted_cdf")
    if np.any(np.diff(c) <= 0):
        c = distinct[np.round(q * (distinct.size - 1)).astype(int)]

    csum = np.concatenate([[0.0], np.cumsum(v)])
    bounds = None
    for _ in range(max_iter):
        new_bounds = _lloyd_partition(v, c)
        if bounds is not None and np.array_equal(new_bounds, bounds):
            break
        bounds = new_bounds
        lo = np.concatenate([[0], bounds])
        hi = np.concatenate([bounds, [v.size]])
        count = hi - lo
        filled = count > 0
        c = c.copy()
        c[filled] = (csum[hi[filled]] - csum[lo[filled]]) / count[filled]
    return Codebook(c)


@dataclass(frozen=True)
class QuantizerBank:
    """Codebooks in input-vector order: Re lag 0, Im lag 0, Re lag 1, ..."""

    codebooks: tuple

    def __post_init__(self):
        books = tuple(self.codebooks)
        if len(books) == 0 or len(books) % 2:
            raise ValueError("a bank holds 2L codebooks")
        object.__setattr__(self, "codebooks", books)

    @property
    def L(self) -> int:
        return len(self.codebooks) // 2

    @property
    def levels(self) -> tuple[int, ...]:
        return tuple(cb.I for cb in self.codebooks)

    def to_list(self) -> list:
        return [[float(c) for c in cb.centroids] for cb in self.codebooks]

    @classmethod
    def from_list(cls, data) -> "QuantizerBank":
        return cls(tuple(Codebook(np.array(c)) for c in data))

    def to_json(self) -> str:
        return json.dumps(self.to_list())

    @classmethod
    def from_json(cls, s: str) -> "QuantizerBank":
        return cls.from_list(json.loads(s))


def input_components(tx, index, L: int) -> np.ndarray:
    """Real matrix ``[Re x[n], Im x[n], Re x[n-1], ...]``, one row per ``n``."""
    lag = lagged(np.asarray(tx, dtype=np.complex128), index, L)
    out = np.empty((lag.shape[0], 2 * L))
    out[:, 0::2] = lag.real
    out[:, 1::2] = lag.imag
    return out


def train_bank(tx, index, L: int, I, seed=None) -> QuantizerBank:
    """Train one codebook per input dimension on the samples in ``index``.

    ``I`` is a level count shared by every lag or a sequence of per-lag counts.
    """
    levels = [I] * L if np.isscalar(I) else list(I)
    if len(levels) != L:
        raise ValueError("need one level count per lag")
    tx = np.asarray(tx, dtype=np.complex128)
    comps = input_components(tx, as_range(index, tx.size), L)
    return QuantizerBank(tuple(
        train_kmeans_1d(comps[:, d], int(levels[d // 2]), seed) for d in range(2 * L)
    ))


def input_indices(tx, index, bank: QuantizerBank) -> np.ndarray:
    """Integer matrix of quantized inputs, shape ``(len(index), 2L)``."""
    tx = np.asarray(tx, dtype=np.complex128)
    comps = input_components(tx, as_range(index, tx.size), bank.L)
    return np.stack([cb.index(comps[:, d]) for d, cb in enumerate(bank.codebooks)], axis=1)


def build_input_indices(tx, n: int, bank: QuantizerBank) -> np.ndarray:
    return input_indices(tx, range(n, n + 1), bank)[0]
