"""Complex CP tensors over quantized indices and their regularized ALS fit.

A rank-``F`` tensor with ``N`` modes is held as a list of factor matrices
``A[n]`` of shape ``(I_n, F)``; entry ``(i_1, ..., i_N)`` is
``sum_f prod_n A[n][i_n, f]``.

The fit minimizes

    sum_m |y_m - X(i_m)|^2 + rho * sum_n ||A_n||_F^2 + mu * sum_n ||T A_n||_F^2

where ``T`` takes first differences between adjacent rows with a zero row
padded at both ends, so ``T^H T`` is the second-difference matrix
``tridiag(-1, 2, -1)``. Rows are updated one at a time (Gauss-Seidel over
levels, modes in order), each update being the exact minimizer of the
objective in that row.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse

from .ops import OpCounter

log = logging.getLogger(__name__)


def cpd_eval(factors, idx, counter: OpCounter | None = None) -> complex:
    """Evaluate one tensor entry.

    Uses ``F * (N - 1)`` complex multiplications and ``F - 1`` complex
    additions; pass an :class:`OpCounter` to tally them in real operations.
    """
    if len(idx) != len(factors):
        raise ValueError(f"expected {len(factors)} indices, got {len(idx)}")
    rows = []
    for A, i in zip(factors, idx):
        if not 0 <= i < A.shape[0]:
            raise IndexError(f"index {i} outside 0..{A.shape[0] - 1}")
        rows.append(A[i])
    F = rows[0].shape[0]
    if counter is None:
        return complex(cpd_values(factors, np.asarray(idx, dtype=np.intp)[None, :])[0])
    acc = None
    for f in range(F):
        term = complex(rows[0][f])
        for r in rows[1:]:
            term = counter.mul(term, complex(r[f]))
        acc = term if acc is None else counter.add(acc, term)
    return acc


def cpd_values(factors, indices: np.ndarray) -> np.ndarray:
    """Vectorized :func:`cpd_eval` for an ``(M, N)`` index matrix.

    Products are formed mode by mode and summed over ``f`` left to right with
    separate real operations, so every entry is rounded identically
    regardless of how many entries are evaluated together.
    """
    rows = factors[0][indices[:, 0]]
    re, im = rows.real.copy(), rows.imag.copy()
    for n in range(1, len(factors)):
        rows = factors[n][indices[:, n]]
        br, bi = rows.real, rows.imag
        re, im = re * br - im * bi, re * bi + im * br
    acc_re, acc_im = re[:, 0].copy(), im[:, 0].copy()
    for f in range(1, re.shape[1]):
        acc_re += re[:, f]
        acc_im += im[:, f]
    return acc_re + 1j * acc_im


def smoothness(A: np.ndarray) -> float:
    """``||T A||_F^2`` with zero rows padded above and below ``A``."""
    pad = np.vstack([np.zeros((1, A.shape[1])), A, np.zeros((1, A.shape[1]))])
    return float(np.sum(np.abs(np.diff(pad, axis=0)) ** 2))


def objective(factors, indices, targets, rho: float, mu: float) -> float:
    r = targets - cpd_values(factors, indices)
    val = float(np.sum(np.abs(r) ** 2))
    val += rho * sum(float(np.sum(np.abs(A) ** 2)) for A in factors)
    if mu:
        val += mu * sum(smoothness(A) for A in factors)
    return val


def init_factors(levels, F: int, scale: float, rng: np.random.Generator) -> list[np.ndarray]:
    """Circularly symmetric complex Gaussian factors with per-entry std ``scale``."""
    return [
        scale * (rng.standard_normal((I, F)) + 1j * rng.standard_normal((I, F))) / np.sqrt(2)
        for I in levels
    ]


@dataclass
class AlsResult:
    factors: list
    history: list = field(default_factory=list)  # objective before the first and after each sweep
    sweeps: int = 0
    converged: bool = False


def _onehot(idx: np.ndarray, I: int) -> scipy.sparse.csr_matrix:
    M = idx.size
    return scipy.sparse.csr_matrix((np.ones(M), (idx, np.arange(M))), shape=(I, M))


def als(indices, targets, levels, F: int, rho: float = 0.0, mu: float = 0.0,
        max_sweeps: int = 50, tol: float = 1e-6, init=None, seed=0) -> AlsResult:
    """Fit a rank-``F`` complex CP tensor to ``targets`` at ``indices``.

    Parameters
    ----------
    indices : (M, N) int array
        Zero-based tensor index of every training sample.
    targets : (M,) complex array
    levels : sequence of int
        Row count of each factor matrix.
    F : int
        Tensor rank.
    rho, mu : float
        Ridge and smoothness weights, shared by all modes.
    max_sweeps, tol :
        Stop after ``max_sweeps`` full sweeps or when the relative objective
        change of a sweep falls below ``tol``.
    init : list of arrays, optional
        Starting factors; drawn with :func:`init_factors` when omitted, with
        entry scale chosen so the initial output matches the target RMS.
    seed : int or Generator
    """
    if F < 1:
        raise ValueError("F must be >= 1")
    if rho < 0 or mu < 0:
        raise ValueError("rho and mu must be non-negative")
    if tol <= 0:
        raise ValueError("tol must be positive")
    indices = np.asarray(indices, dtype=np.intp)
    targets = np.asarray(targets, dtype=np.complex128)
    M, N = indices.shape
    levels = [int(I) for I in levels]
    if len(levels) != N or targets.shape != (M,):
        raise ValueError("indices, targets and levels disagree")
    if np.any(indices < 0) or np.any(indices >= np.array(levels)):
        raise IndexError("index outside factor row range")

    if init is None:
        rng = np.random.default_rng(seed)
        rms = np.sqrt(np.mean(np.abs(targets) ** 2)) if M else 0.0
        scale = (rms / F) ** (1.0 / N) if rms > 0 else 1e-3
        factors = init_factors(levels, F, scale, rng)
    else:
        factors = [np.array(A, dtype=np.complex128, copy=True) for A in init]
        if [A.shape for A in factors] != [(I, F) for I in levels]:
            raise ValueError("init factor shapes do not match levels and F")

    onehots = [_onehot(indices[:, n], levels[n]) for n in range(N)]
    diag = rho + 2 * mu
    eye = np.eye(F)
    result = AlsResult(factors)
    prev = objective(factors, indices, targets, rho, mu)
    result.history.append(prev)

    for sweep in range(max_sweeps):
        for k in range(N):
            Q = np.ones((M, F), dtype=np.complex128)
            for n in range(N):
                if n != k:
                    Q *= factors[n][indices[:, n]]
            outer = (Q.conj()[:, :, None] * Q[:, None, :]).reshape(M, F * F)
            G = np.asarray(onehots[k] @ outer).reshape(levels[k], F, F)
            b = np.asarray(onehots[k] @ (Q.conj() * targets[:, None]))
            A = factors[k]
            for i in range(levels[k]):
                rhs = b[i].copy()
                if mu:
                    if i > 0:
                        rhs += mu * A[i - 1]
                    if i + 1 < levels[k]:
                        rhs += mu * A[i + 1]
                lhs = G[i] + diag * eye
                if diag == 0 and np.linalg.matrix_rank(lhs) < F:
                    raise np.linalg.LinAlgError(
                        f"singular row system at mode {k}, level {i} with rho = mu = 0")
                A[i] = np.linalg.solve(lhs, rhs)
        cur = objective(factors, indices, targets, rho, mu)
        result.history.append(cur)
        result.sweeps = sweep + 1
        log.debug("sweep %d objective %.6e", sweep + 1, cur)
        change = abs(prev - cur) / max(abs(prev), np.finfo(float).tiny)
        prev = cur
        if change < tol:
            result.converged = True
            break
    return result
