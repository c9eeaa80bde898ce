"""Homology of finite groups with coefficients in a sign character, via the normalized bar complex.

C_n is free on n-tuples [h_1|...|h_n] of non-identity elements and, for the
right action m.h = chi(h) m on Z_chi,

    d[h_1|...|h_n] = chi(h_1)[h_2|...|h_n]
                     + sum_{0<i<n} (-1)^i [...|h_i h_{i+1}|...]
                     + (-1)^n [h_1|...|h_{n-1}],

where a tuple containing the identity is zero.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Sequence

from .exactring.intmat import elementary_divisors
from .exactring.poly import Poly
from .simplicial import GroupInvariants


class BudgetExceeded(RuntimeError):
    pass


class NoFiltrationFound(RuntimeError):
    pass


class FiniteGroup:
    """A finite group given by its multiplication table on indices 0..n-1."""

    def __init__(self, table: Sequence[Sequence[int]], labels: Sequence | None = None, check: bool = True):
        self.table = [list(r) for r in table]
        self.n = len(self.table)
        self.labels = list(labels) if labels is not None else list(range(self.n))
        ids = [e for e in range(self.n) if all(self.table[e][x] == x for x in range(self.n))]
        if not ids:
            raise ValueError("no identity element")
        self.identity = ids[0]
        self.inv = [next(y for y in range(self.n) if self.table[x][y] == self.identity) for x in range(self.n)]
        if check:
            self.check_axioms()

    def __len__(self) -> int:
        return self.n

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def check_axioms(self, samples: int = 2000) -> None:
        n = self.n
        for r in itertools.chain(self.table, zip(*self.table)):
            if sorted(r) != list(range(n)):
                raise ValueError("table is not a Latin square")
        triples = itertools.product(range(n), repeat=3) if n ** 3 <= samples else (
            ((7 * i) % n, (13 * i + 1) % n, (31 * i + 2) % n) for i in range(samples))
        for a, b, c in triples:
            if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]]:
                raise ValueError("multiplication is not associative")

    # -- constructors --------------------------------------------------------------
    @classmethod
    def from_elements(cls, elems: Sequence[Hashable], mul: Callable) -> "FiniteGroup":
        index = {e: k for k, e in enumerate(elems)}
        table = []
        for a in elems:
            row = []
            for b in elems:
                c = mul(a, b)
                if c not in index:
                    raise ValueError("element set is not closed under multiplication")
                row.append(index[c])
            table.append(row)
        return cls(table, elems)

    @classmethod
    def from_matrices(cls, mats: Iterable[Sequence[Sequence[Poly]]]) -> "FiniteGroup":
        """A group of matrices over A = F_p[t] (entries Poly)."""
        mats = list(mats)
        p = mats[0][0][0].p
        keys = sorted({_mkey(m) for m in mats})

        def mul(a, b):
            A, B = _unkey(a, p), _unkey(b, p)
            d = len(A)
            return tuple(tuple(sum((A[i][k] * B[k][j] for k in range(d)), Poly._raw((), p)).c
                               for j in range(d)) for i in range(d))

        return cls.from_elements(keys, mul)

    @classmethod
    def generated(cls, gens: Sequence[Hashable], mul: Callable, identity: Hashable,
                  max_order: int = 4096) -> "FiniteGroup":
        seen = {identity}
        frontier = [identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = mul(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
                        if len(seen) > max_order:
                            raise BudgetExceeded("generated group exceeds %d elements" % max_order)
            frontier = nxt
        return cls.from_elements(sorted(seen), mul)

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        return cls([[(a + b) % n for b in range(n)] for a in range(n)])

    @classmethod
    def elementary_abelian(cls, p: int, k: int) -> "FiniteGroup":
        elems = list(itertools.product(range(p), repeat=k))
        return cls.from_elements(elems, lambda a, b: tuple((x + y) % p for x, y in zip(a, b)))

    @classmethod
    def heisenberg(cls, p: int) -> "FiniteGroup":
        """Unipotent upper-triangular 3x3 matrices over F_p, as (a, b, c) = [[1,a,c],[0,1,b],[0,0,1]]."""
        elems = list(itertools.product(range(p), repeat=3))
        return cls.from_elements(elems, lambda x, y: ((x[0] + y[0]) % p, (x[1] + y[1]) % p,
                                                      (x[2] + y[2] + x[0] * y[1]) % p))

    @classmethod
    def dihedral(cls, n: int) -> "FiniteGroup":
        elems = [(r, s) for s in range(2) for r in range(n)]

        def mul(a, b):
            return ((a[0] + (b[0] if a[1] == 0 else -b[0])) % n, (a[1] + b[1]) % 2)
        return cls.from_elements(elems, mul)

    def product(self, other: "FiniteGroup") -> "FiniteGroup":
        elems = [(a, b) for a in range(self.n) for b in range(other.n)]
        return FiniteGroup.from_elements(elems, lambda x, y: (self.table[x[0]][y[0]], other.table[x[1]][y[1]]))

    # -- structure -------------------------------------------------------------------
    def element_order(self, x: int) -> int:
        k, y = 1, x
        while y != self.identity:
            y = self.table[y][x]
            k += 1
        return k

    def prime_power(self) -> tuple[int, int] | None:
        """(p, k) with |H| = p^k, or None; the trivial group gives (1, 0)."""
        n = self.n
        if n == 1:
            return 1, 0
        p = next(f for f in range(2, n + 1) if n % f == 0)
        k = 0
        while n % p == 0:
            n //= p
            k += 1
        return (p, k) if n == 1 else None

    def closure(self, gens: Iterable[int]) -> frozenset[int]:
        out = {self.identity}
        frontier = [self.identity]
        gens = list(gens)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.table[x][g]
                    if y not in out:
                        out.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(out)

    def frattini(self, sub: frozenset[int], p: int) -> frozenset[int]:
        """Phi(S) = [S, S] S^p for a p-subgroup S."""
        t, inv = self.table, self.inv
        gens = {t[t[inv[a]][inv[b]]][t[a][b]] for a in sub for b in sub}
        for a in sub:
            y = self.identity
            for _ in range(p):
                y = t[y][a]
            gens.add(y)
        return self.closure(gens)

    def frattini_series(self) -> list[frozenset[int]]:
        pk = self.prime_power()
        if pk is None:
            raise NoFiltrationFound("group order %d is not a prime power" % self.n)
        series = [frozenset(range(self.n))]
        while len(series[-1]) > 1:
            series.append(self.frattini(series[-1], pk[0]))
        return series

    def filtration_length(self) -> int:
        return len(self.frattini_series()) - 1


def _mkey(m) -> tuple:
    return tuple(tuple(x.c for x in r) for r in m)


def _unkey(k, p: int):
    return [[Poly._raw(c, p) for c in r] for r in k]


# --- characters ------------------------------------------------------------------------

@dataclass(frozen=True)
class SignCharacter:
    values: tuple[int, ...]

    @classmethod
    def trivial(cls, H: FiniteGroup) -> "SignCharacter":
        return cls((1,) * H.n)

    def __call__(self, x: int) -> int:
        return self.values[x]

    def is_trivial(self) -> bool:
        return all(v == 1 for v in self.values)

    def check(self, H: FiniteGroup) -> None:
        for a in range(H.n):
            for b in range(H.n):
                if self.values[H.table[a][b]] != self.values[a] * self.values[b]:
                    raise ValueError("not multiplicative")


def sign_characters(H: FiniteGroup) -> list[SignCharacter]:
    """All homomorphisms H -> {+1, -1}."""
    gens = _generators(H)
    out = []
    for signs in itertools.product((1, -1), repeat=len(gens)):
        vals = {H.identity: 1}
        frontier = [H.identity]
        ok = True
        while frontier and ok:
            nxt = []
            for x in frontier:
                for g, s in zip(gens, signs):
                    y = H.table[x][g]
                    v = vals[x] * s
                    if y not in vals:
                        vals[y] = v
                        nxt.append(y)
                    elif vals[y] != v:
                        ok = False
                        break
                if not ok:
                    break
            frontier = nxt
        if ok:
            chi = SignCharacter(tuple(vals[x] for x in range(H.n)))
            try:
                chi.check(H)
            except ValueError:
                continue
            if chi not in out:
                out.append(chi)
    return out


def _generators(H: FiniteGroup) -> list[int]:
    gens: list[int] = []
    span = frozenset([H.identity])
    for x in range(H.n):
        if x not in span:
            gens.append(x)
            span = H.closure(gens)
    return gens


# --- bar complex ------------------------------------------------------------------------

def bar_boundary(H: FiniteGroup, chi: SignCharacter, n: int) -> tuple[dict, int, int]:
    """Sparse d_n : C_n -> C_{n-1} of the normalized bar complex, with (rows, cols)."""
    nonid = [x for x in range(H.n) if x != H.identity]
    m = len(nonid)
    pos = {x: k for k, x in enumerate(nonid)}

    def idx(tup):
        k = 0
        for x in tup:
            k = k * m + pos[x]
        return k

    rows = m ** (n - 1) if n >= 1 else 0
    cols = m ** n
    out: dict[int, dict[int, int]] = {}
    if n == 0:
        return out, 0, 1
    t, e = H.table, H.identity
    for j, tup in enumerate(itertools.product(nonid, repeat=n)):
        col: dict[int, int] = {}

        def add(face, c):
            if c and all(x != e for x in face):
                r = idx(face)
                col[r] = col.get(r, 0) + c

        add(tup[1:], chi(tup[0]))
        for i in range(1, n):
            add(tup[:i - 1] + (t[tup[i - 1]][tup[i]],) + tup[i + 1:], (-1) ** i)
        add(tup[:-1], (-1) ** n)
        col = {r: c for r, c in col.items() if c}
        if col:
            out[j] = col
    return out, rows, cols


def group_homology(H: FiniteGroup, chi: SignCharacter | None = None, s: int = 1,
                   max_cells: int = 60000) -> GroupInvariants:
    """H_s(H, Z_chi) from the normalized bar complex truncated at degree s+1."""
    chi = chi or SignCharacter.trivial(H)
    m = H.n - 1
    if s < 0:
        return GroupInvariants(0, ())
    if m ** (s + 1) > max_cells:
        raise BudgetExceeded("bar complex C_%d has %d cells (cap %d)" % (s + 1, m ** (s + 1), max_cells))
    size = m ** s
    d_in, _, _ = bar_boundary(H, chi, s) if s >= 1 else ({}, 0, 1)
    d_out, _, _ = bar_boundary(H, chi, s + 1)
    r_in = len(elementary_divisors(d_in)) if d_in else 0
    divs = elementary_divisors(d_out) if d_out else []
    free = size - r_in - len(divs)
    return GroupInvariants(free, tuple(x for x in divs if x > 1))


def _kills(inv: GroupInvariants, n: int) -> bool:
    return inv.free == 0 and all(n % x == 0 for x in inv.torsion)


@dataclass
class BoundVerdict:
    order: int
    p: int
    s: int
    length: int
    bound: int
    homology: GroupInvariants
    character_trivial: bool
    holds: bool

    def to_json(self) -> dict:
        return {"order": self.order, "p": self.p, "s": self.s, "length": self.length, "bound": self.bound,
                "free_rank": self.homology.free, "torsion": list(self.homology.torsion),
                "character_trivial": self.character_trivial, "holds": self.holds}


def exponent_bound_check(H: FiniteGroup, chi: SignCharacter | None, s: int,
                         length: int | None = None) -> BoundVerdict:
    """Does p^(1 + s(l - 1)) annihilate H_s(H, chi)?"""
    chi = chi or SignCharacter.trivial(H)
    pk = H.prime_power()
    if pk is None:
        raise NoFiltrationFound("not a p-group")
    p = pk[0]
    ell = H.filtration_length() if length is None else length
    hom = group_homology(H, chi, s)
    if H.n == 1:
        return BoundVerdict(1, 1, s, 0, 1, hom, chi.is_trivial(), _kills(hom, 1))
    bound = p ** (1 + s * (ell - 1))
    return BoundVerdict(H.n, p, s, ell, bound, hom, chi.is_trivial(), _kills(hom, bound))


def corollary_bound_check(H: FiniteGroup, chi: SignCharacter | None, s: int, d: int) -> BoundVerdict:
    """The GL_d version: the filtration has length <= d-1, so p^(1 + s(d-2)) kills H_s."""
    v = exponent_bound_check(H, chi, s, length=max(d - 1, 1))
    if H.n > 1 and H.filtration_length() > d - 1:
        v.holds = False
    return v


# --- harvesting stabilizers from quotient JSON ---------------------------------------------

def harvest(doc: dict, max_order: int = 16) -> list[tuple[str, FiniteGroup]]:
    """Stabilizer groups (with element lists) of order <= max_order from a quotient document."""
    p = doc["group"]["q"]
    seen: dict[tuple, str] = {}
    out = []
    for cell in doc["simplices"]:
        elems = cell.get("stabilizer_elements")
        if not elems or len(elems) > max_order:
            continue
        mats = [[[Poly(c, p) for c in row] for row in m] for m in elems]
        key = tuple(sorted(_mkey(m) for m in mats))
        if key in seen:
            continue
        name = "dim%d/id%d" % (cell["dim"], cell["id"])
        seen[key] = name
        out.append((name, FiniteGroup.from_matrices(mats)))
    return out


def harvest_file(path: str, max_order: int = 16) -> list[tuple[str, FiniteGroup]]:
    with open(path) as fh:
        return harvest(json.load(fh), max_order)
