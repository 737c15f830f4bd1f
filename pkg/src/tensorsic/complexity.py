"""Per-sample inference cost of each canceller in real operations and memory.

Conventions: a complex multiplication costs 3 real multiplications and 5 real
additions, a complex addition 2 real additions, and each stored complex
parameter 2 memory locations.

The polynomial canceller is costed as a linear combiner over its ``K`` basis
terms: ``K`` complex multiplications by the coefficients and ``K - 1``
complex additions. Basis terms at lag ``l`` are the lag-0 terms of sample
``n - l`` and are carried in a delay line; like quantization in the tensor
canceller, their generation is outside the count.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .csid import CsidModel, eval_counted, predict_total
from .linear import LinearModel
from .ops import OpCounter
from .poly import PolyModel, basis_matrix, n_basis
from .signal import as_signal

#: Reference figures of the equi-performance neural network canceller (L=2, 8 hidden units).
NN_REFERENCE = {"canc_db": 13.3, "L": 2, "hidden": 8, "additions": 82, "multiplications": 60, "memory": 58}


@dataclass(frozen=True)
class CostReport:
    canceller: str
    additions: int
    multiplications: int
    memory: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("additions", "multiplications", "memory"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v}")

    def counts(self) -> tuple[int, int, int]:
        return self.additions, self.multiplications, self.memory

    def params_str(self) -> str:
        return ";".join(f"{k}={v}" for k, v in self.params.items())

    def csv_row(self) -> list:
        return [self.canceller, self.params_str(), self.additions, self.multiplications, self.memory]

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if header:
            w.writerow(["canceller", "params", "additions", "multiplications", "memory"])
        w.writerow(self.csv_row())
        return buf.getvalue()


def linear_cost(L: int) -> CostReport:
    if L < 1:
        raise ValueError("L must be >= 1")
    return CostReport("linear", 7 * L - 2, 3 * L, 2 * L, {"L": L})


def poly_cost(P: int, L: int) -> CostReport:
    if P < 1 or P % 2 == 0:
        raise ValueError(f"P must be odd and >= 1, got {P}")
    if L < 1:
        raise ValueError("L must be >= 1")
    K = n_basis(P, L)
    return CostReport("poly", 7 * K - 2, 3 * K, 2 * K, {"P": P, "L": L})


def _levels(L, levels):
    levels = [levels] * L if np.isscalar(levels) else list(levels)
    if len(levels) != L:
        raise ValueError("need one level count per lag")
    return levels


def csid_cost(F: int, L: int, levels=32) -> CostReport:
    """Published closed forms for the two-stage tensor canceller.

    ``levels`` is one level count per lag (or a single shared count); both the
    real and imaginary input of a lag use it.
    """
    if F < 1 or L < 1:
        raise ValueError("F and L must be >= 1")
    lv = _levels(L, levels)
    adds = F * (10 * L - 3) + 7 * L - 4
    mults = (6 * F + 1) * L - 3
    memory = 2 * (F * sum(2 * I for I in lv) + L)
    return CostReport("csid", adds, mults, memory, {"F": F, "L": L, "I": lv[0] if len(set(lv)) == 1 else lv})


def csid_schedule_cost(F: int, L: int, levels=32) -> CostReport:
    """Cost of the evaluation schedule actually executed.

    ``F (2L - 1)`` complex multiplications and ``F - 1`` complex additions in
    the tensor stage plus the ``L``-tap linear stage.
    """
    ref = csid_cost(F, L, levels)
    cmul = F * (2 * L - 1)
    cadd = F - 1
    lin = linear_cost(L)
    return CostReport("csid", lin.additions + 5 * cmul + 2 * cadd, lin.multiplications + 3 * cmul,
                      ref.memory, ref.params)


def model_memory(model) -> int:
    """Real memory locations occupied by a model's parameters."""
    if isinstance(model, LinearModel):
        return 2 * model.L
    if isinstance(model, PolyModel):
        return 2 * model.coef.size
    if isinstance(model, CsidModel):
        return 2 * (sum(A.size for A in model.factors) + model.linear.L)
    raise TypeError(f"no memory accounting for {type(model).__name__}")


def measured_cost(model, probe, n: int | None = None) -> CostReport:
    """Count the real operations of one instrumented prediction at sample ``n``.

    The instrumented value is checked against the vectorized predictor so the
    counted path is the computation it claims to be.
    """
    x = as_signal(probe, "probe")
    n = x.size - 1 if n is None else n
    counter = OpCounter()
    if isinstance(model, LinearModel):
        window = [complex(x[n - l]) if n - l >= 0 else 0j for l in range(model.L)]
        value = counter.dot(model.taps, window)
        ref = complex(np.dot(model.taps, window))
        tag, params = "linear", {"L": model.L}
    elif isinstance(model, PolyModel):
        basis = basis_matrix(x, range(n, n + 1), model.P, model.L)[0]
        value = counter.dot(model.coef, basis)
        ref = complex(basis @ model.coef)
        tag, params = "poly", {"P": model.P, "L": model.L}
    elif isinstance(model, CsidModel):
        value = eval_counted(model, x, n, counter)
        ref = complex(predict_total(model, x, range(n, n + 1))[0])
        lv = model.levels[0::2]
        tag, params = "csid", {"F": model.F, "L": model.L, "I": lv[0] if len(set(lv)) == 1 else list(lv)}
    else:
        raise TypeError(f"instrumentation unavailable for {type(model).__name__}")
    if not np.isclose(value, ref, rtol=1e-9, atol=1e-12 * max(1.0, abs(ref))):
        raise AssertionError(f"instrumented value {value} != reference {ref}")
    return CostReport(tag, counter.adds, counter.mults, model_memory(model), params)
