"""Exact arithmetic: F_p, A = F_p[t], F = F_p(t) inside K = F_p((1/t)), integer Smith forms."""
from .poly import Poly, all_polys, fq_inv, is_prime
from .kfield import (INF, KElem, SingularMatrix, diag, identity, is_integral, kmat, mat_det,
                     mat_eq, mat_inverse, mat_mul, pi_expansion, rref, transpose, truncate_below,
                     valuation)
from .intmat import (SNFResult, Subquotient, det, elementary_divisors, kernel_basis, matmul,
                     rank, smith_normal_form, subquotient, xgcd)


class FqElem:
    """Residue mod a prime p (thin wrapper; most code works with plain ints)."""

    __slots__ = ("value", "p")

    def __init__(self, value: int, p: int):
        self.p = p
        self.value = value % p

    def _v(self, o):
        if isinstance(o, FqElem):
            if o.p != self.p:
                raise ValueError("characteristic mismatch")
            return o.value
        return o % self.p

    def __add__(self, o):
        return FqElem(self.value + self._v(o), self.p)

    __radd__ = __add__

    def __sub__(self, o):
        return FqElem(self.value - self._v(o), self.p)

    def __rsub__(self, o):
        return FqElem(self._v(o) - self.value, self.p)

    def __mul__(self, o):
        return FqElem(self.value * self._v(o), self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FqElem(-self.value, self.p)

    def inv(self) -> "FqElem":
        return FqElem(fq_inv(self.value, self.p), self.p)

    def __truediv__(self, o):
        return self * FqElem(self._v(o), self.p).inv()

    def __eq__(self, o):
        if isinstance(o, FqElem):
            return self.p == o.p and self.value == o.value
        if isinstance(o, int):
            return self.value == o % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __repr__(self):
        return "%d (mod %d)" % (self.value, self.p)


__all__ = [
    "FqElem", "Poly", "KElem", "INF", "SingularMatrix", "SNFResult", "Subquotient",
    "all_polys", "fq_inv", "is_prime", "diag", "identity", "is_integral", "kmat", "mat_det",
    "mat_eq", "mat_inverse", "mat_mul", "pi_expansion", "rref", "transpose", "truncate_below",
    "valuation", "det", "elementary_divisors", "kernel_basis", "matmul", "rank",
    "smith_normal_form", "subquotient", "xgcd",
]
