"""Linear FIR self-interference canceller fitted by least squares."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .signal import as_range, as_signal, lagged


class RankDeficientError(np.linalg.LinAlgError):
    """Regressor matrix lacks full column rank."""

    def __init__(self, message, columns):
        super().__init__(message)
        self.columns = list(columns)


@dataclass(frozen=True)
class LinearModel:
    """FIR taps ``h[0..L-1]``; the estimate is ``sum_l h[l] x[n-l]``."""

    taps: np.ndarray

    def __post_init__(self):
        taps = np.array(self.taps, dtype=np.complex128).reshape(-1)
        if taps.size < 1 or not np.all(np.isfinite(taps)):
            raise ValueError("need at least one finite tap")
        taps.flags.writeable = False
        object.__setattr__(self, "taps", taps)

    @property
    def L(self) -> int:
        return self.taps.size

    def to_dict(self) -> dict:
        return {"L": self.L, "taps": [[float(t.real), float(t.imag)] for t in self.taps]}

    @classmethod
    def from_dict(cls, d: dict) -> "LinearModel":
        taps = [complex(re, im) for re, im in d["taps"]]
        if len(taps) != d["L"]:
            raise ValueError("tap count does not match L")
        return cls(np.array(taps))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, s: str) -> "LinearModel":
        return cls.from_dict(json.loads(s))


def fit_range(index: range, memory: int) -> range:
    """Regression targets for ``index``: its first ``memory - 1`` samples are dropped."""
    return range(index.start + memory - 1, index.stop)


def solve_ls(A: np.ndarray, b: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    """Full-rank least squares via pivoted QR.

    Raises :class:`RankDeficientError` listing the degenerate column indices
    when the numerical rank of ``A`` is below its column count.
    """
    Q, R, piv = scipy.linalg.qr(A, mode="economic", pivoting=True)
    d = np.abs(np.diag(R))
    rank = int(np.sum(d > rtol * d[0])) if d.size and d[0] > 0 else 0
    if rank < A.shape[1]:
        bad = sorted(int(c) for c in piv[rank:])
        raise RankDeficientError(f"regressor rank {rank} < {A.shape[1]}; degenerate columns {bad}", bad)
    return scipy.linalg.solve_triangular(R, Q.conj().T @ b)[np.argsort(piv)]


def fit_linear(tx, rx, index, L: int) -> LinearModel:
    """Least-squares fit of an ``L``-tap linear canceller on ``index``."""
    if L < 1:
        raise ValueError("L must be >= 1")
    tx = as_signal(tx, "tx")
    rx = as_signal(rx, "rx")
    if tx.size != rx.size:
        raise ValueError("tx and rx lengths differ")
    index = as_range(index, tx.size)
    if len(index) < 10 * L:
        raise ValueError(f"need at least {10 * L} samples to fit L={L}, got {len(index)}")
    rows = fit_range(index, L)
    A = lagged(tx, rows, L)
    try:
        taps = solve_ls(A, rx[rows.start:rows.stop])
    except RankDeficientError as exc:
        raise RankDeficientError(f"degenerate lags {exc.columns}", exc.columns) from None
    return LinearModel(taps)


def predict_linear(model: LinearModel, tx, index=None) -> np.ndarray:
    """Linear SI estimate over ``index``; lags before sample 0 read as zero."""
    tx = as_signal(tx, "tx")
    index = as_range(index, tx.size)
    return lagged(tx, index, model.L) @ model.taps
