"""Widely linear memory polynomial canceller.

Basis terms are ``x[n-l]**q * conj(x[n-l])**(p-q)`` for odd ``p <= P``,
``0 <= q <= p`` and ``0 <= l < L``. The canonical order is ascending ``l``,
then ``p``, then ``q``; serialized models and basis vectors use it.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .linear import fit_range
from .signal import as_range, as_signal, lagged


def basis_keys(P: int, L: int) -> list[tuple[int, int, int]]:
    """Canonical ``(p, q, l)`` ordering of the basis."""
    _check_order(P, L)
    return [(p, q, l) for l in range(L) for p in range(1, P + 1, 2) for q in range(p + 1)]


def n_basis(P: int, L: int) -> int:
    return L * sum(p + 1 for p in range(1, P + 1, 2))


def _check_order(P, L):
    if P < 1 or P % 2 == 0:
        raise ValueError(f"P must be odd and >= 1, got {P}")
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")


def _monomials(v: np.ndarray, P: int) -> np.ndarray:
    # columns in (p, q) order for a single lag
    cols = [v**q * np.conj(v) ** (p - q) for p in range(1, P + 1, 2) for q in range(p + 1)]
    return np.stack(cols, axis=-1)


def basis_matrix(x, index, P: int, L: int) -> np.ndarray:
    """Rows of basis values for each ``n`` in ``index`` (zero before sample 0)."""
    _check_order(P, L)
    x = np.asarray(x, dtype=np.complex128)
    index = as_range(index, x.size)
    lag = lagged(x, index, L)
    return np.concatenate([_monomials(lag[:, l], P) for l in range(L)], axis=1)


def poly_basis(x, n: int, P: int, L: int) -> np.ndarray:
    """Basis values at time ``n`` in canonical order."""
    return basis_matrix(x, range(n, n + 1), P, L)[0]


@dataclass(frozen=True)
class PolyModel:
    P: int
    L: int
    coef: np.ndarray  # canonical basis order

    def __post_init__(self):
        _check_order(self.P, self.L)
        coef = np.array(self.coef, dtype=np.complex128).reshape(-1)
        if coef.size != n_basis(self.P, self.L):
            raise ValueError(f"expected {n_basis(self.P, self.L)} coefficients, got {coef.size}")
        coef.flags.writeable = False
        object.__setattr__(self, "coef", coef)

    @property
    def coefficients(self) -> dict[tuple[int, int, int], complex]:
        return dict(zip(basis_keys(self.P, self.L), (complex(c) for c in self.coef)))

    @classmethod
    def from_coefficients(cls, coefficients: dict, P: int, L: int) -> "PolyModel":
        keys = basis_keys(P, L)
        unknown = set(coefficients) - set(keys)
        if unknown:
            raise ValueError(f"keys outside the (P={P}, L={L}) basis: {sorted(unknown)}")
        return cls(P, L, np.array([coefficients.get(k, 0) for k in keys]))

    def to_dict(self) -> dict:
        return {
            "P": self.P,
            "L": self.L,
            "coefficients": {
                f"{p},{q},{l}": [float(c.real), float(c.imag)]
                for (p, q, l), c in self.coefficients.items()
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PolyModel":
        coefs = {
            tuple(int(v) for v in key.split(",")): complex(re, im)
            for key, (re, im) in d["coefficients"].items()
        }
        return cls.from_coefficients(coefs, d["P"], d["L"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, s: str) -> "PolyModel":
        return cls.from_dict(json.loads(s))


def fit_poly(tx, rx, index, P: int, L: int) -> PolyModel:
    """Least-squares fit of the memory polynomial on ``index``.

    A rank-deficient basis (e.g. constant-envelope input) triggers a
    ``RuntimeWarning`` naming the collinear terms; the minimum-norm solution
    is returned.
    """
    tx = as_signal(tx, "tx")
    rx = as_signal(rx, "rx")
    if tx.size != rx.size:
        raise ValueError("tx and rx lengths differ")
    index = as_range(index, tx.size)
    K = n_basis(P, L)
    if len(index) < 10 * K:
        raise ValueError(f"need at least {10 * K} samples for {K} basis terms, got {len(index)}")
    rows = fit_range(index, L)
    A = basis_matrix(tx, rows, P, L)
    b = rx[rows.start:rows.stop]

    # column scaling keeps high-order terms comparable for the rank test
    scale = np.linalg.norm(A, axis=0)
    scale[scale == 0] = 1.0
    As = A / scale
    R, piv = scipy.linalg.qr(As, mode="r", pivoting=True)
    d = np.abs(np.diag(R))
    rank = int(np.sum(d > 1e-10 * d[0]))
    if rank < K:
        keys = basis_keys(P, L)
        collinear = sorted(keys[int(c)] for c in piv[rank:])
        warnings.warn(f"polynomial basis is rank deficient ({rank}/{K}); collinear terms {collinear}",
                      RuntimeWarning, stacklevel=2)
    coef, *_ = np.linalg.lstsq(As, b, rcond=1e-10)
    return PolyModel(P, L, coef / scale)


def predict_poly(model: PolyModel, tx, index=None) -> np.ndarray:
    tx = as_signal(tx, "tx")
    index = as_range(index, tx.size)
    return basis_matrix(tx, index, model.P, model.L) @ model.coef
