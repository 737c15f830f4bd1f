"""Two-stage canceller: linear FIR followed by a low-rank tensor over quantized inputs."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .linear import LinearModel, fit_range, predict_linear
from .ops import OpCounter
from .quantize import QuantizerBank, input_indices, train_bank
from .signal import as_range, as_signal, cancellation_db
from .tensor import AlsResult, als, cpd_eval, cpd_values


@dataclass(frozen=True)
class TrainConfig:
    F: int
    I: int | tuple = 32
    mu: float = 0.0
    rho: float = 1e-3
    max_sweeps: int = 50
    tol: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.F < 1:
            raise ValueError("F must be >= 1")
        if self.mu < 0 or self.rho < 0:
            raise ValueError("mu and rho must be non-negative")
        if self.tol <= 0:
            raise ValueError("tol must be positive")


@dataclass(frozen=True)
class CsidModel:
    factors: tuple
    bank: QuantizerBank
    linear: LinearModel
    history: tuple = ()

    def __post_init__(self):
        factors = tuple(np.array(A, dtype=np.complex128) for A in self.factors)
        if len(factors) != 2 * self.bank.L:
            raise ValueError("need one factor matrix per quantized input")
        if len({A.shape[1] for A in factors}) != 1:
            raise ValueError("factor matrices must share the rank")
        for A, I in zip(factors, self.bank.levels):
            if A.shape[0] != I or not np.all(np.isfinite(A)):
                raise ValueError("factor rows must match codebook levels and be finite")
            A.flags.writeable = False
        object.__setattr__(self, "factors", factors)

    @property
    def F(self) -> int:
        return self.factors[0].shape[1]

    @property
    def L(self) -> int:
        return self.bank.L

    @property
    def levels(self) -> tuple[int, ...]:
        return self.bank.levels

    def to_dict(self) -> dict:
        return {
            "F": self.F,
            "L": self.L,
            "levels": list(self.levels),
            "factors": [[[[float(v.real), float(v.imag)] for v in row] for row in A]
                        for A in self.factors],
            "codebooks": self.bank.to_list(),
            "linear": self.linear.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CsidModel":
        factors = tuple(
            np.array([[complex(re, im) for re, im in row] for row in A], dtype=np.complex128)
            .reshape(len(A), d["F"])
            for A in d["factors"]
        )
        model = cls(factors, QuantizerBank.from_list(d["codebooks"]), LinearModel.from_dict(d["linear"]))
        if model.L != d["L"] or list(model.levels) != list(d["levels"]):
            raise ValueError("serialized L/levels inconsistent with contents")
        return model

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, s: str) -> "CsidModel":
        return cls.from_dict(json.loads(s))


def train_csid(tx, rx, index, config: TrainConfig, linear: LinearModel) -> CsidModel:
    """Fit the tensor stage to the residual left by ``linear`` on ``index``.

    The quantizer bank (one codebook per Re/Im input of each lag, ``L`` taken
    from the linear model) is trained on the same samples, then held fixed
    while the factors are fitted by :func:`tensorsic.tensor.als`.
    """
    tx = as_signal(tx, "tx")
    rx = as_signal(rx, "rx")
    index = as_range(index, tx.size)
    L = linear.L
    rows = fit_range(index, L)
    targets = rx[rows.start:rows.stop] - predict_linear(linear, tx, rows)
    bank = train_bank(tx, index, L, config.I, config.seed)
    idx = input_indices(tx, rows, bank)
    res: AlsResult = als(idx, targets, bank.levels, config.F, rho=config.rho, mu=config.mu,
                         max_sweeps=config.max_sweeps, tol=config.tol, seed=config.seed)
    return CsidModel(tuple(res.factors), bank, linear, tuple(res.history))


def predict_csid(model: CsidModel, tx, index=None) -> np.ndarray:
    """Tensor-stage estimate (excluding the linear stage) over ``index``."""
    tx = as_signal(tx, "tx")
    index = as_range(index, tx.size)
    return cpd_values(model.factors, input_indices(tx, index, model.bank))


def predict_total(model: CsidModel, tx, index=None) -> np.ndarray:
    tx = as_signal(tx, "tx")
    index = as_range(index, tx.size)
    return predict_linear(model.linear, tx, index) + predict_csid(model, tx, index)


def cancel_full(model: CsidModel, tx, rx, index=None):
    """Cancel ``rx`` over ``index``.

    Returns ``(residual, nl_db, total_db)``: the residual after both stages,
    the tensor stage's cancellation of the post-linear residual, and the
    overall cancellation of ``rx``.
    """
    tx = as_signal(tx, "tx")
    rx = as_signal(rx, "rx")
    index = as_range(index, tx.size)
    y = rx[index.start:index.stop]
    lin = predict_linear(model.linear, tx, index)
    nl = predict_csid(model, tx, index)
    residual = y - lin - nl
    return residual, cancellation_db(y - lin, nl), cancellation_db(y, lin + nl)


def eval_counted(model: CsidModel, tx, n: int, counter: OpCounter) -> complex:
    """One output sample through both stages, tallying real operations.

    Quantization (comparisons only) is not counted, nor is the sum of the two
    stage outputs: it folds into the subtraction from the received sample,
    which no canceller's count includes.
    """
    tx = as_signal(tx, "tx")
    window = [complex(tx[n - l]) if n - l >= 0 else 0j for l in range(model.L)]
    lin = counter.dot(model.linear.taps, window)
    idx = input_indices(tx, range(n, n + 1), model.bank)[0]
    nl = cpd_eval(model.factors, idx, counter)
    return lin + nl
