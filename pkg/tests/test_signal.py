import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tensorsic.signal import (PERFECT_CANCELLATION, DatasetError, SiDataset, cancellation_db,
                              format_db, load_dataset, save_dataset, split_dataset)


def test_cancellation_hand_example():
    assert cancellation_db([1 + 0j, 1j], [0.9 + 0j, 0.9j]) == pytest.approx(20.0, abs=1e-12)


def test_cancellation_zero_estimate_is_zero_db():
    y = np.array([1 + 2j, -3j, 0.5])
    assert cancellation_db(y, np.zeros(3)) == 0.0


def test_cancellation_perfect_sentinel():
    y = np.array([1 + 2j, -3j])
    assert cancellation_db(y, y) == PERFECT_CANCELLATION
    assert format_db(cancellation_db(y, y)) == "inf"


def test_cancellation_range():
    y = np.array([1, 1, 5])
    yhat = np.array([0.9, 0.9, 0])
    assert cancellation_db(y, yhat, range(0, 2)) == pytest.approx(20.0)


@pytest.mark.parametrize("y, yhat, index", [
    ([1, 2], [1], None),
    ([1, 2], [1, 2], range(1, 1)),
    ([0, 0], [1, 1], None),
])
def test_cancellation_errors(y, yhat, index):
    with pytest.raises(ValueError):
        cancellation_db(y, yhat, index)


complex_arrays = st.lists(
    st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False), min_size=1, max_size=30)


@settings(max_examples=60, deadline=None)
@given(complex_arrays, st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3), st.integers(0, 2**31))
def test_cancellation_scale_invariant(y, c, seed):
    y = np.array(y)
    if np.sum(np.abs(y) ** 2) < 1e-12:
        return
    yhat = y + np.random.default_rng(seed).standard_normal(y.size) * 0.1
    ref = cancellation_db(y, yhat)
    assert cancellation_db(c * y, c * yhat) == pytest.approx(ref, abs=1e-9)


def test_split_examples():
    assert split_dataset(20480) == (range(0, 16384), range(16384, 18432), range(18432, 20480))
    assert split_dataset(10) == (range(0, 8), range(8, 9), range(9, 10))
    with pytest.raises(ValueError):
        split_dataset(5)


@given(st.integers(10, 100000))
def test_split_properties(n):
    tr, va, te = split_dataset(n)
    assert tr.start == 0 and tr.stop == va.start and va.stop == te.start and te.stop == n
    assert len(tr) == math.floor(0.8 * n) and len(va) == math.floor(0.1 * n)
    assert min(len(tr), len(va), len(te)) >= 1


def _pairs(n, seed=0):
    rng = np.random.default_rng(seed)
    return rng.standard_normal(n) + 1j * rng.standard_normal(n), rng.standard_normal(n) + 1j * rng.standard_normal(n)


@pytest.mark.parametrize("fmt", ["csv", "bin"])
def test_dataset_round_trip(tmp_path, fmt):
    tx, rx = _pairs(20480)
    path = tmp_path / f"data.{fmt}"
    save_dataset(path, tx, rx)
    ds = load_dataset(path, fmt)
    assert np.array_equal(ds.tx, tx) and np.array_equal(ds.rx, rx)
    assert (len(ds.train), len(ds.val), len(ds.test)) == (16384, 2048, 2048)


def test_csv_header_required(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("a,b,c,d\n1,2,3,4\n")
    with pytest.raises(DatasetError):
        load_dataset(path)


def test_csv_length_mismatch(tmp_path):
    path = tmp_path / "d.csv"
    rows = "\n".join(["1,0,1,0"] * 11 + ["1,0,,"])
    path.write_text("tx_re,tx_im,rx_re,rx_im\n" + rows + "\n")
    with pytest.raises(DatasetError, match="length"):
        load_dataset(path)


def test_csv_nan(tmp_path):
    path = tmp_path / "d.csv"
    rows = ["1,0,1,0"] * 12
    rows[3] = "nan,0,1,0"
    path.write_text("tx_re,tx_im,rx_re,rx_im\n" + "\n".join(rows) + "\n")
    with pytest.raises(DatasetError, match="non-finite"):
        load_dataset(path)


def test_bin_not_divisible_by_four(tmp_path):
    path = tmp_path / "d.bin"
    np.arange(42, dtype="<f8").tofile(path)
    with pytest.raises(DatasetError):
        load_dataset(path)


def test_dataset_rejects_unequal_signals():
    with pytest.raises(DatasetError):
        SiDataset.from_signals(np.ones(20), np.ones(21))
