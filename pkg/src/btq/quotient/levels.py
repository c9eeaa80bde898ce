"""Level structures: the residue ring A/m and the finite group G = rho(GL_d(A)) in GL_d(A/m)."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..exactring.poly import Poly, all_polys, is_prime


class SearchBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class GroupSpec:
    """Gamma_I = ker(GL_d(A) -> GL_d(A/m)); m = 1 means GL_d(A)."""

    q: int
    d: int
    m: tuple[int, ...] = (1,)

    def __post_init__(self):
        if not is_prime(self.q):
            raise ValueError("q must be prime, got %d" % self.q)
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if not any(self.m):
            raise ValueError("ideal generator must be nonzero")

    @classmethod
    def parse(cls, q: int, d: int, ideal: str) -> "GroupSpec":
        m = Poly.parse(ideal, q).monic()
        return cls(q, d, m.c)

    @property
    def modulus(self) -> Poly:
        return Poly(self.m, self.q)

    @property
    def level(self) -> int:
        return len(self.m) - 1

    def ideal_str(self) -> str:
        return repr(self.modulus)


class ResidueRing:
    """A/m with elements coded as integers (base-q coefficient digits)."""

    def __init__(self, q: int, m: Poly):
        self.q, self.m = q, m
        self.k = m.deg
        self.size = q ** self.k
        self.elems = [self.decode(x) for x in range(self.size)]
        self.add = [[self.encode(a + b) for b in self.elems] for a in self.elems]
        self.mul = [[self.encode(a * b) for b in self.elems] for a in self.elems]
        self.neg = [self.encode(-a) for a in self.elems]

    def encode(self, f: Poly) -> int:
        if self.k == 0:
            return 0
        r = f % self.m if f.deg >= self.k else f
        code = 0
        for c in reversed(r.c):
            code = code * self.q + c
        return code

    def decode(self, x: int) -> Poly:
        digits = []
        for _ in range(self.k):
            digits.append(x % self.q)
            x //= self.q
        return Poly(digits, self.q)

    def const(self, c: int) -> int:
        return self.encode(Poly.const(c, self.q))

    def low_degree(self, n: int) -> list[int]:
        """Codes of residues of polynomials of degree < n."""
        if n <= 0:
            return [0]
        if n >= self.k:
            return list(range(self.size))
        return [self.encode(f) for f in all_polys(self.q, n - 1)]


class LevelGroup:
    """G = image of GL_d(A) in GL_d(A/m), with explicit lifts to GL_d(A).

    Elements are tuples of d*d residue codes (row-major); index order equals
    lexicographic order of the tuples.
    """

    def __init__(self, spec: GroupSpec, max_size: int = 200000):
        self.spec = spec
        self.q, self.d = spec.q, spec.d
        self.R = ResidueRing(spec.q, spec.modulus)
        q, d = self.q, self.d
        one, zero = Poly.const(1, q), Poly.const(0, q)
        ident = tuple(self.R.const(int(i == j)) for i in range(d) for j in range(d))
        gens = []
        if self.R.k > 0:
            for i in range(d):
                for j in range(d):
                    if i == j:
                        continue
                    for e in range(self.R.k):
                        L = [[one if a == b else zero for b in range(d)] for a in range(d)]
                        L[i][j] = Poly.t(q, e)
                        gens.append(L)
            gen = _primitive_root(q)
            if q > 2:
                L = [[one if a == b else zero for b in range(d)] for a in range(d)]
                L[0][0] = Poly.const(gen, q)
                gens.append(L)
        gen_codes = [self.rho(L) for L in gens]
        lifts = {ident: [[one if a == b else zero for b in range(d)] for a in range(d)]}
        frontier = [ident]
        while frontier:
            nxt = []
            for g in frontier:
                for s, L in zip(gen_codes, gens):
                    h = self.mul_codes(g, s)
                    if h not in lifts:
                        lifts[h] = _pmul(lifts[g], L)
                        nxt.append(h)
                        if len(lifts) > max_size:
                            raise SearchBudgetExceeded("level group larger than %d" % max_size)
            frontier = nxt
        self.elems = sorted(lifts)
        self.index = {g: i for i, g in enumerate(self.elems)}
        self.lifts = [lifts[g] for g in self.elems]
        self.identity = self.index[ident]
        self._inv: list[int] | None = None

    def __len__(self) -> int:
        return len(self.elems)

    def rho(self, M: Sequence[Sequence[Poly]]) -> tuple[int, ...]:
        enc = self.R.encode
        return tuple(enc(x) for r in M for x in r)

    def rho_index(self, M) -> int:
        return self.index[self.rho(M)]

    def mul_codes(self, a: tuple, b: tuple) -> tuple:
        d = self.d
        add, mul = self.R.add, self.R.mul
        out = []
        for i in range(d):
            for j in range(d):
                acc = 0
                for l in range(d):
                    acc = add[acc][mul[a[i * d + l]][b[l * d + j]]]
                out.append(acc)
        return tuple(out)

    def mul(self, i: int, j: int) -> int:
        return self.index[self.mul_codes(self.elems[i], self.elems[j])]

    def inverse(self, i: int) -> int:
        if self._inv is None:
            from ..bundles import poly_mat_inverse
            self._inv = [self.rho_index(poly_mat_inverse(L)) for L in self.lifts]
        return self._inv[i]

    def det_unit_count(self) -> int:
        """|{g in GL_d(A/m) : det g in F_q^x}| by brute force (for checks)."""
        import itertools
        d, R = self.d, self.R
        units = {R.const(c) for c in range(1, self.q)}
        count = 0
        for entries in itertools.product(range(R.size), repeat=d * d):
            if _det_code(entries, d, R) in units:
                count += 1
        return count

    def det_code(self, g: tuple) -> int:
        return _det_code(g, self.d, self.R)


def _det_code(g, d, R) -> int:
    if d == 1:
        return g[0]
    add, mul, neg = R.add, R.mul, R.neg
    acc = 0
    for j in range(d):
        minor = [g[r * d + c] for r in range(1, d) for c in range(d) if c != j]
        term = mul[g[j]][_det_code(minor, d - 1, R)]
        acc = add[acc][term if j % 2 == 0 else neg[term]]
    return acc


def _pmul(a, b):
    d = len(a)
    p = a[0][0].p
    out = []
    for i in range(d):
        row = []
        for j in range(d):
            acc = Poly._raw((), p)
            for l in range(d):
                if a[i][l].c and b[l][j].c:
                    acc = acc + a[i][l] * b[l][j]
            row.append(acc)
        out.append(row)
    return out


def _primitive_root(q: int) -> int:
    for g in range(2, q):
        if all(pow(g, (q - 1) // f, q) != 1 for f in range(2, q) if (q - 1) % f == 0 and is_prime(f)):
            return g
    return 1
