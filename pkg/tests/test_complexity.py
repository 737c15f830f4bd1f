import numpy as np
import pytest

from tensorsic.complexity import (NN_REFERENCE, CostReport, csid_cost, csid_schedule_cost, linear_cost,
                                  measured_cost, poly_cost)
from tensorsic.csid import CsidModel
from tensorsic.linear import LinearModel
from tensorsic.poly import PolyModel, n_basis
from tensorsic.quantize import train_bank
from tensorsic.synth import SynthConfig, generate_ofdm


@pytest.fixture(scope="module")
def probe():
    return generate_ofdm(SynthConfig(n_carriers=64, n_symbols=2, seed=9))


def _csid_model(probe, F, L, I):
    rng = np.random.default_rng(F + L + I)
    bank = train_bank(probe, range(probe.size), L, I)
    factors = tuple(rng.standard_normal((I, F)) + 1j * rng.standard_normal((I, F)) for _ in range(2 * L))
    return CsidModel(factors, bank, LinearModel(rng.standard_normal(L) + 1j * rng.standard_normal(L)))


def test_csid_table_values():
    assert csid_cost(4, 2, 32).counts() == (78, 47, 1028)


def test_csid_small_and_memory():
    assert csid_cost(1, 1, 2).counts() == (10, 4, 10)
    assert csid_cost(5, 2, 64).memory == 2564
    assert csid_cost(2, 2, [8, 16]).memory == 2 * (2 * (8 + 8 + 16 + 16) + 2)


def test_poly_table_values():
    assert poly_cost(7, 3).counts() == (418, 180, 120)
    assert poly_cost(1, 1).counts() == (12, 6, 4)
    with pytest.raises(ValueError):
        poly_cost(4, 2)


def test_linear_values():
    assert linear_cost(2).counts() == (12, 6, 4)
    assert linear_cost(1).counts()[:2] == (5, 3)


@pytest.mark.parametrize("L", [1, 2, 3, 5])
def test_poly_order_one_memory_is_linear_memory(L):
    # the widely linear basis carries x and conj(x), so the memory doubles
    assert poly_cost(1, L).memory == 2 * linear_cost(L).memory
    assert poly_cost(1, L).memory == 2 * n_basis(1, L)


@pytest.mark.parametrize("F, L", [(1, 1), (4, 2), (5, 2), (3, 3)])
def test_csid_additions_decompose(F, L):
    tensor_adds = 5 * F * (2 * L - 1) + 2 * (F - 1)
    assert csid_cost(F, L).additions - tensor_adds == linear_cost(L).additions


@pytest.mark.parametrize("L", [1, 2, 3, 4])
def test_measured_linear(probe, L):
    m = LinearModel(np.arange(1, L + 1) * (1 - 0.5j))
    assert measured_cost(m, probe).counts() == linear_cost(L).counts()


@pytest.mark.parametrize("P, L", [(1, 1), (3, 2), (7, 3), (5, 4)])
def test_measured_poly(probe, P, L):
    rng = np.random.default_rng(P * L)
    K = n_basis(P, L)
    m = PolyModel(P, L, rng.standard_normal(K) + 1j * rng.standard_normal(K))
    assert measured_cost(m, probe, n=50).counts() == poly_cost(P, L).counts()


@pytest.mark.parametrize("F, L, I", [(1, 1, 2), (4, 2, 32), (5, 2, 64), (2, 3, 8)])
def test_measured_csid_matches_schedule(probe, F, L, I):
    m = _csid_model(probe, F, L, I)
    got = measured_cost(m, probe, n=40)
    assert got.counts() == csid_schedule_cost(F, L, I).counts()
    assert got.additions == csid_cost(F, L, I).additions
    assert got.memory == csid_cost(F, L, I).memory


def test_measured_rejects_unknown(probe):
    with pytest.raises(TypeError):
        measured_cost(object(), probe)


def test_cost_report_csv():
    row = csid_cost(4, 2, 32).to_csv()
    assert row.splitlines() == ["canceller,params,additions,multiplications,memory",
                                "csid,F=4;L=2;I=32,78,47,1028"]
    with pytest.raises(ValueError):
        CostReport("x", -1, 0, 0)


def test_nn_reference_constants():
    assert (NN_REFERENCE["additions"], NN_REFERENCE["multiplications"], NN_REFERENCE["memory"]) == (82, 60, 58)
