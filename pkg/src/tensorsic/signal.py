"""Complex baseband signals, the cancellation metric and dataset ingestion.

Signals are plain one-dimensional ``complex128`` numpy arrays. Index sets are
contiguous Python ``range`` objects.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

#: Returned by :func:`cancellation_db` when the residual energy is exactly zero.
PERFECT_CANCELLATION = math.inf

CSV_HEADER = ("tx_re", "tx_im", "rx_re", "rx_im")


class DatasetError(ValueError):
    """Raised for malformed or inconsistent dataset files."""


def as_signal(x, name="signal") -> np.ndarray:
    """Validate and convert ``x`` to a read-only 1-D complex128 array."""
    arr = np.array(x, dtype=np.complex128, copy=True).reshape(-1)
    if arr.size < 1:
        raise ValueError(f"{name} must contain at least one sample")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite samples")
    arr.flags.writeable = False
    return arr


def as_range(index, n: int) -> range:
    """Normalize an index set to a contiguous ``range`` within ``[0, n)``."""
    if index is None:
        return range(n)
    if isinstance(index, slice):
        index = range(*index.indices(n))
    if not isinstance(index, range) or index.step != 1:
        raise TypeError("index set must be a contiguous range or slice")
    if index.start < 0 or index.stop > n:
        raise IndexError(f"range {index} outside signal of length {n}")
    return index


def lagged(x: np.ndarray, index: range, lags: int) -> np.ndarray:
    """Return the ``(len(index), lags)`` matrix with entries ``x[n - l]``.

    Lags reaching before the start of ``x`` read as zero.
    """
    n = np.arange(index.start, index.stop)
    out = np.zeros((n.size, lags), dtype=np.complex128)
    for l in range(lags):
        src = n - l
        ok = src >= 0
        out[ok, l] = x[src[ok]]
    return out


def energy(x) -> float:
    return float(np.sum(np.abs(x) ** 2))


def cancellation_db(received, estimate, index=None) -> float:
    """Cancellation in dB of ``estimate`` against ``received`` over ``index``.

    Returns ``10*log10(sum |y|^2 / sum |y - yhat|^2)``, or
    :data:`PERFECT_CANCELLATION` if the residual is exactly zero.

    Examples
    --------
    >>> cancellation_db([1, 1j], [0.9, 0.9j])  # doctest: +ELLIPSIS
    20.0...
    """
    y = np.asarray(received, dtype=np.complex128).reshape(-1)
    yhat = np.asarray(estimate, dtype=np.complex128).reshape(-1)
    if y.shape != yhat.shape:
        raise ValueError(f"length mismatch: {y.size} received vs {yhat.size} estimated")
    index = as_range(index, y.size)
    if len(index) == 0:
        raise ValueError("empty range")
    y = y[index.start:index.stop]
    yhat = yhat[index.start:index.stop]
    num = energy(y)
    if num == 0.0:
        raise ValueError("received signal has zero energy over the range")
    den = energy(y - yhat)
    if den == 0.0:
        return PERFECT_CANCELLATION
    return 10.0 * math.log10(num / den)


def format_db(value: float) -> str:
    """Render a dB value for reports; the perfect-cancellation sentinel becomes ``"inf"``."""
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(float(value))


def split_dataset(n: int, fractions=(0.8, 0.1, 0.1)) -> tuple[range, range, range]:
    """Contiguous train/validation/test ranges of sizes floor(0.8n), floor(0.1n), rest."""
    if len(fractions) != 3 or any(f < 0 for f in fractions) or sum(fractions) > 1 + 1e-12:
        raise ValueError(f"invalid split fractions {fractions}")
    n_train = int(math.floor(fractions[0] * n + 1e-9))
    n_val = int(math.floor(fractions[1] * n + 1e-9))
    n_test = n - n_train - n_val
    if min(n_train, n_val, n_test) < 1:
        raise ValueError(f"n={n} too small for non-empty train/validation/test splits")
    a, b = n_train, n_train + n_val
    return range(0, a), range(a, b), range(b, n)


@dataclass(frozen=True)
class SiDataset:
    """Paired transmit/receive signals with a time-contiguous split."""

    tx: np.ndarray
    rx: np.ndarray
    train: range
    val: range
    test: range

    def __post_init__(self):
        if self.tx.shape != self.rx.shape:
            raise DatasetError(f"tx length {self.tx.size} != rx length {self.rx.size}")
        ranges = (self.train, self.val, self.test)
        if ranges[0].start != 0 or ranges[-1].stop != self.tx.size or any(
            a.stop != b.start for a, b in zip(ranges, ranges[1:])
        ):
            raise DatasetError("splits must be ordered, disjoint and cover all samples")

    @classmethod
    def from_signals(cls, tx, rx, fractions=(0.8, 0.1, 0.1)) -> "SiDataset":
        tx = as_signal(tx, "tx")
        rx = as_signal(rx, "rx")
        if tx.size != rx.size:
            raise DatasetError(f"tx length {tx.size} != rx length {rx.size}")
        return cls(tx, rx, *split_dataset(tx.size, fractions))

    def __len__(self) -> int:
        return self.tx.size

    def split(self, name: str) -> range:
        return {"train": self.train, "val": self.val, "test": self.test}[name]


def _infer_format(path: Path) -> str:
    return "csv" if path.suffix.lower() == ".csv" else "bin"


def load_dataset(path, format: str | None = None, fractions=(0.8, 0.1, 0.1)) -> SiDataset:
    """Read a dataset file.

    ``format`` is ``"csv"`` (header ``tx_re,tx_im,rx_re,rx_im``) or ``"bin"``
    (little-endian float64, interleaved in the same column order). When
    omitted it is inferred from the file extension.
    """
    path = Path(path)
    fmt = format or _infer_format(path)
    if fmt == "csv":
        tx, rx = _read_csv(path)
    elif fmt == "bin":
        raw = np.fromfile(path, dtype="<f8")
        if raw.size % 4:
            raise DatasetError(f"{path}: {raw.size} float64 values, not divisible by 4")
        data = raw.reshape(-1, 4)
        tx = data[:, 0] + 1j * data[:, 1]
        rx = data[:, 2] + 1j * data[:, 3]
    else:
        raise ValueError(f"unknown dataset format {fmt!r}")
    if tx.size != rx.size:
        raise DatasetError(f"{path}: tx length {tx.size} != rx length {rx.size}")
    if not (np.all(np.isfinite(tx)) and np.all(np.isfinite(rx))):
        raise DatasetError(f"{path}: non-finite samples")
    return SiDataset.from_signals(tx, rx, fractions)


def _read_csv(path: Path) -> tuple[np.ndarray, np.ndarray]:
    # Blank cell pairs mark a shorter column, so unequal lengths are detectable.
    cols = ([], [])
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
            raise DatasetError(f"{path}: expected header {','.join(CSV_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise DatasetError(f"{path}:{lineno}: expected 4 columns, got {len(row)}")
            for k, col in enumerate(cols):
                re_s, im_s = row[2 * k].strip(), row[2 * k + 1].strip()
                if not re_s and not im_s:
                    continue
                try:
                    col.append(complex(float(re_s), float(im_s)))
                except ValueError as exc:
                    raise DatasetError(f"{path}:{lineno}: {exc}") from None
    return np.array(cols[0], dtype=np.complex128), np.array(cols[1], dtype=np.complex128)


def save_dataset(path, tx, rx, format: str | None = None) -> None:
    """Write ``tx``/``rx`` in one of the formats read by :func:`load_dataset`."""
    path = Path(path)
    tx = as_signal(tx, "tx")
    rx = as_signal(rx, "rx")
    if tx.size != rx.size:
        raise DatasetError("tx and rx must have equal length")
    data = np.column_stack([tx.real, tx.imag, rx.real, rx.imag])
    fmt = format or _infer_format(path)
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            writer.writerows([repr(float(v)) for v in row] for row in data)
    elif fmt == "bin":
        data.astype("<f8").tofile(path)
    else:
        raise ValueError(f"unknown dataset format {fmt!r}")
