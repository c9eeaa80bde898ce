"""Polynomials over the prime field F_p.

Coefficient tuples are stored lowest degree first and carry no trailing
zeros, so equality of normalized objects is equality of tuples.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


@lru_cache(maxsize=None)
def inverse_table(p: int) -> tuple[int, ...]:
    inv = [0] * p
    for a in range(1, p):
        inv[a] = pow(a, p - 2, p)
    return tuple(inv)


def fq_inv(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError("0 has no inverse in F_%d" % p)
    return inverse_table(p)[a]


# --- raw coefficient-tuple arithmetic ---------------------------------------

def _trim(c: list[int]) -> tuple[int, ...]:
    n = len(c)
    while n and c[n - 1] == 0:
        n -= 1
    return tuple(c[:n])


def c_add(a: Sequence[int], b: Sequence[int], p: int) -> tuple[int, ...]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] = (out[i] + x) % p
    return _trim(out)


def c_sub(a: Sequence[int], b: Sequence[int], p: int) -> tuple[int, ...]:
    n = max(len(a), len(b))
    out = [0] * n
    for i, x in enumerate(a):
        out[i] = x
    for i, x in enumerate(b):
        out[i] = (out[i] - x) % p
    return _trim(out)


def c_mul(a: Sequence[int], b: Sequence[int], p: int) -> tuple[int, ...]:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return _trim([v % p for v in out])


def c_scale(a: Sequence[int], s: int, p: int) -> tuple[int, ...]:
    s %= p
    if s == 0:
        return ()
    return tuple((x * s) % p for x in a)


def c_shift(a: Sequence[int], k: int) -> tuple[int, ...]:
    """Multiply by t^k (k >= 0)."""
    if not a:
        return ()
    return (0,) * k + tuple(a)


def c_divmod(a: Sequence[int], b: Sequence[int], p: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    db = len(b) - 1
    if len(r) - 1 < db:
        return (), tuple(a)
    inv = fq_inv(b[-1], p)
    qc = [0] * (len(r) - db)
    for k in range(len(r) - 1, db - 1, -1):
        c = r[k] % p
        if c == 0:
            continue
        c = (c * inv) % p
        qc[k - db] = c
        off = k - db
        for j in range(db + 1):
            r[off + j] = (r[off + j] - c * b[j]) % p
    return _trim(qc), _trim([x % p for x in r[:db]])


def c_monic(a: Sequence[int], p: int) -> tuple[int, ...]:
    if not a:
        return ()
    return c_scale(a, fq_inv(a[-1], p), p)


def c_gcd(a: Sequence[int], b: Sequence[int], p: int) -> tuple[int, ...]:
    a, b = tuple(a), tuple(b)
    while b:
        a, b = b, c_divmod(a, b, p)[1]
    return c_monic(a, p)


# --- the Poly class ---------------------------------------------------------

class Poly:
    """Element of A = F_p[t]."""

    __slots__ = ("c", "p")

    def __init__(self, coeffs: Iterable[int], p: int):
        self.p = p
        self.c = _trim([x % p for x in coeffs])

    @classmethod
    def _raw(cls, c: tuple[int, ...], p: int) -> "Poly":
        obj = cls.__new__(cls)
        obj.c = c
        obj.p = p
        return obj

    @classmethod
    def const(cls, a: int, p: int) -> "Poly":
        return cls((a,), p)

    @classmethod
    def t(cls, p: int, k: int = 1) -> "Poly":
        return cls._raw((0,) * k + (1,), p)

    @classmethod
    def parse(cls, s: str, p: int) -> "Poly":
        """Parse strings like 't^2+t+1', '2t+1', '1'."""
        s = s.replace(" ", "").replace("*", "")
        if not s:
            raise ValueError("empty polynomial string")
        terms = s.replace("-", "+-").split("+")
        acc: dict[int, int] = {}
        for k, term in enumerate(terms):
            if not term:
                if k == 0 and s.startswith("-"):
                    continue
                raise ValueError("dangling sign in %r" % s)
            sign = 1
            if term.startswith("-"):
                sign, term = -1, term[1:]
            if "t" in term:
                coef, _, rest = term.partition("t")
                c = int(coef) if coef else 1
                if rest.startswith("^"):
                    e = int(rest[1:])
                elif rest == "":
                    e = 1
                else:
                    raise ValueError("bad term %r" % term)
            else:
                c, e = int(term), 0
            acc[e] = acc.get(e, 0) + sign * c
        n = max(acc) + 1 if acc else 0
        return cls([acc.get(i, 0) for i in range(n)], p)

    @property
    def deg(self) -> int:
        """Degree, with deg 0 = -1 by convention."""
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    def lc(self) -> int:
        return self.c[-1] if self.c else 0

    def coeff(self, k: int) -> int:
        return self.c[k] if 0 <= k < len(self.c) else 0

    def __bool__(self) -> bool:
        return bool(self.c)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self.c == _trim([other % self.p])
        return isinstance(other, Poly) and self.p == other.p and self.c == other.c

    def __hash__(self) -> int:
        return hash((self.c, self.p))

    def _coerce(self, other) -> tuple[int, ...]:
        if isinstance(other, Poly):
            if other.p != self.p:
                raise ValueError("characteristic mismatch")
            return other.c
        if isinstance(other, int):
            return _trim([other % self.p])
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Poly._raw(c_add(self.c, o, self.p), self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Poly._raw(c_sub(self.c, o, self.p), self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Poly._raw(c_sub(o, self.c, self.p), self.p)

    def __neg__(self):
        return Poly._raw(c_scale(self.c, -1, self.p), self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Poly._raw(c_mul(self.c, o, self.p), self.p)

    __rmul__ = __mul__

    def __divmod__(self, other):
        o = self._coerce(other)
        q, r = c_divmod(self.c, o, self.p)
        return Poly._raw(q, self.p), Poly._raw(r, self.p)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __pow__(self, k: int):
        out = Poly._raw((1,), self.p)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def shift(self, k: int) -> "Poly":
        return Poly._raw(c_shift(self.c, k), self.p)

    def monic(self) -> "Poly":
        return Poly._raw(c_monic(self.c, self.p), self.p)

    def gcd(self, other: "Poly") -> "Poly":
        return Poly._raw(c_gcd(self.c, other.c, self.p), self.p)

    def truncate(self, n: int) -> "Poly":
        """Terms of degree < n."""
        return Poly._raw(_trim(list(self.c[:max(n, 0)])), self.p)

    def __call__(self, x: int) -> int:
        acc = 0
        for a in reversed(self.c):
            acc = (acc * x + a) % self.p
        return acc

    def to_json(self) -> list[int]:
        return list(self.c)

    def __repr__(self) -> str:
        if not self.c:
            return "0"
        parts = []
        for k in range(len(self.c) - 1, -1, -1):
            a = self.c[k]
            if not a:
                continue
            if k == 0:
                parts.append(str(a))
            else:
                mon = "t" if k == 1 else "t^%d" % k
                parts.append(mon if a == 1 else "%d%s" % (a, mon))
        return "+".join(parts)


def all_polys(p: int, max_deg: int) -> list[Poly]:
    """Every polynomial of degree <= max_deg, zero included."""
    out = [Poly._raw((), p)]
    n = max_deg + 1
    if n <= 0:
        return out
    for code in range(1, p ** n):
        digits = []
        x = code
        while x:
            digits.append(x % p)
            x //= p
        out.append(Poly._raw(tuple(digits), p))
    return out
