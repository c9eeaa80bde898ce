"""Rational functions F = F_p(t) viewed inside K = F_p((1/t)), and matrices over them.

The uniformizer is pi = 1/t and the valuation is v(x) = deg(den) - deg(num).
"""
from __future__ import annotations

import math
from typing import Sequence

from .poly import Poly, c_add, c_divmod, c_gcd, c_mul, c_scale, fq_inv

INF = math.inf


class SingularMatrix(ValueError):
    pass


class KElem:
    """Reduced fraction num/den with den monic."""

    __slots__ = ("num", "den", "p")

    def __init__(self, num: Poly, den: Poly | None = None):
        p = num.p
        if den is None:
            den = Poly._raw((1,), p)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        self.p = p
        if num.is_zero():
            self.num, self.den = num, Poly._raw((1,), p)
            return
        nc, dc = num.c, den.c
        if len(dc) > 1 and not any(dc[:-1]):
            # den = c t^k: the gcd is the largest power of t dividing num
            z = 0
            while not nc[z]:
                z += 1
            m = min(z, len(dc) - 1)
            nc, dc = nc[m:], dc[m:]
        elif len(dc) > 1:
            g = c_gcd(nc, dc, p)
            if len(g) > 1:
                nc = c_divmod(nc, g, p)[0]
                dc = c_divmod(dc, g, p)[0]
        lc = dc[-1]
        if lc != 1:
            inv = fq_inv(lc, p)
            nc, dc = c_scale(nc, inv, p), c_scale(dc, inv, p)
        self.num, self.den = Poly._raw(nc, p), Poly._raw(dc, p)

    @classmethod
    def _raw(cls, nc: tuple, dc: tuple, p: int) -> "KElem":
        obj = cls.__new__(cls)
        obj.num, obj.den, obj.p = Poly._raw(nc, p), Poly._raw(dc, p), p
        return obj

    @classmethod
    def const(cls, a: int, p: int) -> "KElem":
        return cls(Poly.const(a, p))

    @classmethod
    def t(cls, p: int, k: int = 1) -> "KElem":
        """t^k for any integer k (negative k gives powers of pi)."""
        if k >= 0:
            return cls._raw((0,) * k + (1,), (1,), p)
        return cls._raw((1,), (0,) * (-k) + (1,), p)

    @classmethod
    def pi(cls, p: int, k: int = 1) -> "KElem":
        return cls.t(p, -k)

    @classmethod
    def of(cls, x, p: int) -> "KElem":
        if isinstance(x, KElem):
            return x
        if isinstance(x, Poly):
            return cls(x)
        if isinstance(x, int):
            return cls.const(x, p)
        raise TypeError(type(x))

    def is_zero(self) -> bool:
        return not self.num.c

    def __bool__(self) -> bool:
        return bool(self.num.c)

    def is_poly(self) -> bool:
        return len(self.den.c) == 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, KElem):
            if isinstance(other, (int, Poly)):
                other = KElem.of(other, self.p)
            else:
                return NotImplemented
        return self.num.c == other.num.c and self.den.c == other.den.c

    def __hash__(self) -> int:
        return hash((self.num.c, self.den.c, self.p))

    def _k(self, other) -> "KElem":
        return other if isinstance(other, KElem) else KElem.of(other, self.p)

    def __add__(self, other):
        o = self._k(other)
        p = self.p
        if self.den.c == o.den.c:
            return KElem(Poly._raw(c_add(self.num.c, o.num.c, p), p), self.den)
        num = c_add(c_mul(self.num.c, o.den.c, p), c_mul(o.num.c, self.den.c, p), p)
        return KElem(Poly._raw(num, p), Poly._raw(c_mul(self.den.c, o.den.c, p), p))

    __radd__ = __add__

    def __neg__(self):
        return KElem._raw(c_scale(self.num.c, -1, self.p), self.den.c, self.p)

    def __sub__(self, other):
        return self + (-self._k(other))

    def __rsub__(self, other):
        return self._k(other) + (-self)

    def __mul__(self, other):
        o = self._k(other)
        p = self.p
        if not self.num.c or not o.num.c:
            return KElem._raw((), (1,), p)
        if len(self.den.c) == 1 and len(o.den.c) == 1:
            return KElem._raw(c_mul(self.num.c, o.num.c, p), (1,), p)
        return KElem(Poly._raw(c_mul(self.num.c, o.num.c, p), p),
                     Poly._raw(c_mul(self.den.c, o.den.c, p), p))

    __rmul__ = __mul__

    def inv(self) -> "KElem":
        if not self.num.c:
            raise ZeroDivisionError("inverse of 0")
        return KElem(self.den, self.num)

    def __truediv__(self, other):
        return self * self._k(other).inv()

    def __rtruediv__(self, other):
        return self._k(other) * self.inv()

    def __pow__(self, k: int):
        if k < 0:
            return self.inv() ** (-k)
        out = KElem.const(1, self.p)
        for _ in range(k):
            out = out * self
        return out

    def to_json(self) -> dict:
        return {"num": list(self.num.c), "den": list(self.den.c)}

    def __repr__(self) -> str:
        if self.is_poly():
            return repr(self.num)
        return "(%r)/(%r)" % (self.num, self.den)


def valuation(x: KElem):
    """v_inf(x) = deg den - deg num; +inf at zero."""
    if x.is_zero():
        return INF
    return x.den.deg - x.num.deg


def pi_expansion(x: KElem, n: int) -> tuple[int, tuple[int, ...]]:
    """Laurent coefficients of x in pi = 1/t up to pi^n.

    Returns (lo, coeffs) where coeffs[j] is the coefficient of pi^(lo + j)
    and lo = v(x).  If x = 0 or v(x) > n the coefficient tuple is empty.
    """
    if x.is_zero():
        return (n + 1, ())
    p = x.p
    v = x.den.deg - x.num.deg
    if v > n:
        return (v, ())
    # x = pi^v * rev(num)(pi) / rev(den)(pi), and rev(den)(0) = lc(den) = 1
    nr = x.num.c[::-1]
    dr = x.den.c[::-1]
    length = n - v + 1
    out = []
    rem = list(nr) + [0] * max(0, length - len(nr))
    for k in range(length):
        c = rem[k] % p
        out.append(c)
        if c:
            for j in range(1, len(dr)):
                if k + j < length:
                    rem[k + j] = (rem[k + j] - c * dr[j]) % p
    return (v, tuple(out))


def truncate_below(x: KElem, a: int) -> KElem:
    """The finite Laurent polynomial made of the pi-terms of x with exponent < a."""
    if x.is_zero():
        return x
    lo, co = pi_expansion(x, a - 1)
    p = x.p
    acc = KElem._raw((), (1,), p)
    for j, c in enumerate(co):
        if c:
            acc = acc + KElem.pi(p, lo + j) * c
    return acc


def is_integral(x: KElem) -> bool:
    return x.is_zero() or x.num.deg <= x.den.deg


# --- matrices ---------------------------------------------------------------

MatK = list  # list of rows of KElem


def kmat(rows, p: int) -> list[list[KElem]]:
    return [[KElem.of(x, p) for x in r] for r in rows]


def identity(d: int, p: int) -> list[list[KElem]]:
    one, zero = KElem.const(1, p), KElem.const(0, p)
    return [[one if i == j else zero for j in range(d)] for i in range(d)]


def diag(entries: Sequence, p: int) -> list[list[KElem]]:
    d = len(entries)
    zero = KElem.const(0, p)
    return [[KElem.of(entries[i], p) if i == j else zero for j in range(d)] for i in range(d)]


def mat_mul(a, b) -> list[list]:
    n, m, k = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        ai = a[i]
        for j in range(k):
            acc = None
            for l in range(m):
                x, y = ai[l], b[l][j]
                if x and y:
                    term = x * y
                    acc = term if acc is None else acc + term
            row.append(acc if acc is not None else ai[0] * 0)
        out.append(row)
    return out


def mat_eq(a, b) -> bool:
    return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def mat_det(m) -> KElem:
    a = [list(r) for r in m]
    n = len(a)
    p = a[0][0].p
    det = KElem.const(1, p)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c]), None)
        if piv is None:
            return KElem.const(0, p)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det = det * a[c][c]
        inv = a[c][c].inv()
        for r in range(c + 1, n):
            if a[r][c]:
                f = a[r][c] * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return det


def mat_inverse(m) -> list[list[KElem]]:
    """Gauss-Jordan inverse over F; raises SingularMatrix."""
    n = len(m)
    p = m[0][0].p
    a = [list(r) + identity(n, p)[i] for i, r in enumerate(m)]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c]), None)
        if piv is None:
            raise SingularMatrix("matrix is singular")
        a[c], a[piv] = a[piv], a[c]
        inv = a[c][c].inv()
        a[c] = [x * inv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [r[n:] for r in a]


def transpose(m) -> list[list]:
    return [list(r) for r in zip(*m)]


def rref(rows, p: int) -> tuple[tuple[KElem, ...], ...]:
    """Reduced row echelon form of a list of row vectors over F (zero rows dropped)."""
    a = [list(r) for r in rows]
    if not a:
        return ()
    ncol = len(a[0])
    r0 = 0
    for c in range(ncol):
        piv = next((r for r in range(r0, len(a)) if a[r][c]), None)
        if piv is None:
            continue
        a[r0], a[piv] = a[piv], a[r0]
        inv = a[r0][c].inv()
        a[r0] = [x * inv for x in a[r0]]
        for r in range(len(a)):
            if r != r0 and a[r][c]:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[r0])]
        r0 += 1
        if r0 == len(a):
            break
    return tuple(tuple(r) for r in a[:r0])
