"""Real-operation counting for instrumented evaluation paths."""

from __future__ import annotations


class OpCounter:
    """Complex arithmetic on ``(re, im)`` float pairs that tallies real operations.

    Multiplication uses the three-multiplication form
    ``ab = (aR bR - aI bI) + j((aR + aI)(bR + bI) - aR bR - aI bI)``
    (3 real multiplications, 5 real additions); complex addition costs two
    real additions. Subtractions count as additions.
    """

    __slots__ = ("adds", "mults")

    def __init__(self):
        self.adds = 0
        self.mults = 0

    def mul(self, a: complex, b: complex) -> complex:
        ar, ai, br, bi = a.real, a.imag, b.real, b.imag
        rr = ar * br
        ii = ai * bi
        s = (ar + ai) * (br + bi)
        self.mults += 3
        self.adds += 5
        return complex(rr - ii, s - rr - ii)

    def add(self, a: complex, b: complex) -> complex:
        self.adds += 2
        return complex(a.real + b.real, a.imag + b.imag)

    def dot(self, coef, values) -> complex:
        """``sum_k coef[k] * values[k]`` with ``K`` multiplies and ``K - 1`` additions."""
        acc = None
        for c, v in zip(coef, values):
            term = self.mul(complex(c), complex(v))
            acc = term if acc is None else self.add(acc, term)
        return 0j if acc is None else acc
