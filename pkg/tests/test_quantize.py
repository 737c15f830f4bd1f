import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tensorsic.quantize import (Codebook, QuantizerBank, build_input_indices, quantize_index,
                                train_bank, train_kmeans_1d)


def _is_lloyd_fixed_point(values, cb):
    idx = cb.index(values)
    for j in range(cb.I):
        if np.any(idx == j):
            c = values[idx == j].mean()
            if abs(c - cb.centroids[j]) > 1e-9 * max(1, abs(c)):
                return False
    return True


def test_separable_clusters():
    cb = train_kmeans_1d([-1, -1, 1, 1], 2)
    np.testing.assert_array_equal(cb.centroids, [-1, 1])


def test_uniform_optimum():
    v = np.random.default_rng(0).random(20000)
    cb = train_kmeans_1d(v, 4)
    np.testing.assert_allclose(cb.centroids, [0.125, 0.375, 0.625, 0.875], atol=0.05)
    assert _is_lloyd_fixed_point(v, cb)


def test_level_count_errors():
    with pytest.raises(ValueError):
        train_kmeans_1d([0, 1, 2], 1)
    with pytest.raises(ValueError):
        train_kmeans_1d([0, 0, 1, 1], 3)


def test_deterministic():
    v = np.random.default_rng(1).standard_normal(5000)
    assert np.array_equal(train_kmeans_1d(v, 16, 0).centroids, train_kmeans_1d(v, 16, 0).centroids)


def test_quantize_examples():
    # zero-based indices
    cb = Codebook([-1.0, 1.0])
    assert quantize_index(cb, -0.9) == 0
    assert quantize_index(cb, 0.0) == 0  # tie goes low
    assert quantize_index(Codebook([0.0, 1.0, 2.0]), 5.0) == 2
    assert quantize_index(Codebook([0.0, 1.0, 2.0]), -3.0) == 0


def test_codebook_invariants():
    with pytest.raises(ValueError):
        Codebook([1.0])
    with pytest.raises(ValueError):
        Codebook([1.0, 1.0])


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 12), st.integers(0, 1000))
def test_own_centroid_and_monotone(I, seed):
    v = np.random.default_rng(seed).standard_normal(500)
    cb = train_kmeans_1d(v, I)
    assert list(cb.index(cb.centroids)) == list(range(I))
    probe = np.sort(np.random.default_rng(seed + 1).uniform(-5, 5, 200))
    assert np.all(np.diff(cb.index(probe)) >= 0)
    assert _is_lloyd_fixed_point(np.sort(v), cb)


def test_mse_non_increasing_in_levels():
    v = np.random.default_rng(2).standard_normal(4000)
    mse = []
    for I in (2, 4, 8, 16, 32, 64):
        cb = train_kmeans_1d(v, I)
        mse.append(np.mean((v - cb.dequantize(cb.index(v))) ** 2))
    assert all(b <= a for a, b in zip(mse, mse[1:]))


def test_input_indices_examples():
    books = (Codebook([-1.0, 1.0]), Codebook([-1.0, 1.0]))
    bank = QuantizerBank(books)
    np.testing.assert_array_equal(build_input_indices([0.9 - 0.9j], 0, bank), [1, 0])

    bank2 = QuantizerBank((Codebook([-1.0, 0.5, 2.0]),) * 4)
    x = np.full(5, 0.7 + 0.7j)
    idx = build_input_indices(x, 3, bank2)
    assert len(set(idx.tolist())) == 1

    # lag-1 of sample 0 reads zero, whose nearest centroid is 0.5
    idx0 = build_input_indices(np.full(3, 1.9 + 1.9j), 0, bank2)
    np.testing.assert_array_equal(idx0, [2, 2, 1, 1])


def test_train_bank_per_dimension():
    rng = np.random.default_rng(3)
    x = rng.standard_normal(3000) + 3j * rng.standard_normal(3000)
    bank = train_bank(x, range(3000), 2, 8)
    assert bank.L == 2 and bank.levels == (8, 8, 8, 8)
    # imaginary codebook spans the wider spread
    assert np.ptp(bank.codebooks[1].centroids) > 2 * np.ptp(bank.codebooks[0].centroids)


def test_bank_json():
    bank = train_bank(np.random.default_rng(4).standard_normal(500) * (1 + 1j), range(500), 1, 4)
    bank2 = QuantizerBank.from_json(bank.to_json())
    for a, b in zip(bank.codebooks, bank2.codebooks):
        assert np.array_equal(a.centroids, b.centroids)
