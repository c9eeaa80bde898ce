"""The Bruhat-Tits building of PGL_d over K = F_p((1/t)) in the lattice model.

A lattice is stored as the O-span of the columns of an invertible matrix over
F = F_p(t).  Vertices are homothety classes, identified by a canonical
column-Hermite form over O (LatticeClassKey).  Simplices are chains
L_0 > L_1 > ... > L_i > pi L_0, stored as a base lattice plus a flag of
subspaces of the residue space L_0 / pi L_0.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .exactring.kfield import (KElem, SingularMatrix, mat_det, mat_mul, pi_expansion,
                               truncate_below, valuation)
from .simplicial import Chain, LazyComplex


class DegenerateBasis(ValueError):
    pass


class NotTopDimensional(ValueError):
    pass


# --- canonical forms -----------------------------------------------------------

def hermite_form(g, p: int) -> tuple[list[list[KElem]], list[int]]:
    """Column Hermite form of g over O: g * u = H with H upper triangular,
    H[i][i] = pi^a_i and H[r][j] (r < j) a pi-polynomial with exponents < a_r."""
    d = len(g)
    M = [list(r) for r in g]
    a = [0] * d
    for i in range(d - 1, -1, -1):
        best, bv = None, None
        for j in range(i + 1):
            x = M[i][j]
            if x:
                v = valuation(x)
                if bv is None or v < bv:
                    best, bv = j, v
        if best is None:
            raise SingularMatrix("lattice matrix is singular")
        if best != i:
            for r in range(d):
                M[r][i], M[r][best] = M[r][best], M[r][i]
        unit = KElem.pi(p, bv) / M[i][i]
        if unit != 1:
            for r in range(i + 1):
                if M[r][i]:
                    M[r][i] = M[r][i] * unit
        M[i][i] = KElem.pi(p, bv)
        a[i] = bv
        for j in range(i):
            if M[i][j]:
                c = M[i][j] * KElem.t(p, bv)  # M[i][j] / pi^bv, integral
                for r in range(i):
                    if M[r][i]:
                        M[r][j] = M[r][j] - c * M[r][i]
                M[i][j] = KElem.const(0, p)
    for i in range(d - 1, -1, -1):
        for j in range(i + 1, d):
            x = M[i][j]
            if not x:
                continue
            r = truncate_below(x, a[i])
            if r == x:
                continue
            c = (x - r) * KElem.t(p, a[i])
            for rr in range(i):
                if M[rr][i]:
                    M[rr][j] = M[rr][j] - c * M[rr][i]
            M[i][j] = r
    return M, a


def _expansion_terms(x: KElem, a: int) -> tuple[tuple[int, int], ...]:
    if x.is_zero():
        return ()
    lo, co = pi_expansion(x, a - 1)
    return tuple((lo + k, c) for k, c in enumerate(co) if c)


@dataclass(frozen=True, order=True)
class LatticeClassKey:
    """Canonical identifier of a homothety class of O-lattices."""

    a: tuple[int, ...]
    off: tuple[tuple[tuple[int, int], ...], ...]  # upper entries (i<j) row-major, as (exp, coeff)
    p: int

    @property
    def d(self) -> int:
        return len(self.a)

    def matrix(self) -> list[list[KElem]]:
        d, p = self.d, self.p
        M = [[KElem.const(0, p) for _ in range(d)] for _ in range(d)]
        k = 0
        for i in range(d):
            M[i][i] = KElem.pi(p, self.a[i])
            for j in range(i + 1, d):
                acc = KElem.const(0, p)
                for e, c in self.off[k]:
                    acc = acc + KElem.pi(p, e) * c
                M[i][j] = acc
                k += 1
        return M

    def __str__(self) -> str:
        head = ",".join(str(x) for x in self.a)
        body = ";".join(".".join("%x:%x" % (e, c) for e, c in terms) for terms in self.off)
        return "%s|%s" % (head, body)

    @classmethod
    def from_string(cls, s: str, p: int) -> "LatticeClassKey":
        head, _, body = s.partition("|")
        a = tuple(int(x) for x in head.split(","))
        off = []
        for chunk in body.split(";") if a and len(a) > 1 else []:
            terms = []
            for tok in chunk.split(".") if chunk else []:
                e, c = tok.split(":")
                terms.append((int(e, 16), int(c, 16)))
            off.append(tuple(terms))
        return cls(a, tuple(off), p)


def vertex_key(g, p: int | None = None) -> LatticeClassKey:
    """Canonical key of the class of the lattice spanned by the columns of g."""
    if p is None:
        p = g[0][0].p
    H, a = hermite_form(g, p)
    d = len(a)
    s = sum(a)
    shift = -(s // d)
    off = []
    for i in range(d):
        for j in range(i + 1, d):
            terms = _expansion_terms(H[i][j], a[i])
            off.append(tuple((e + shift, c) for e, c in terms))
    return LatticeClassKey(tuple(x + shift for x in a), tuple(off), p)


# --- residue spaces, subspaces, flags ----------------------------------------------

@lru_cache(maxsize=None)
def subspaces(p: int, d: int, k: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """All k-dimensional subspaces of F_p^d as RREF row tuples."""
    out = []
    for pivots in itertools.combinations(range(d), k):
        free = [(r, c) for r in range(k) for c in range(pivots[r] + 1, d) if c not in pivots]
        for vals in itertools.product(range(p), repeat=len(free)):
            rows = [[0] * d for _ in range(k)]
            for r, c in enumerate(pivots):
                rows[r][c] = 1
            for (r, c), v in zip(free, vals):
                rows[r][c] = v
            out.append(tuple(tuple(r) for r in rows))
    return tuple(out)


@lru_cache(maxsize=None)
def proper_subspaces(p: int, d: int) -> tuple:
    return tuple(W for k in range(1, d) for W in subspaces(p, d, k))


def rref_fp(rows: Iterable[Sequence[int]], p: int) -> tuple[tuple[int, ...], ...]:
    a = [[x % p for x in r] for r in rows]
    if not a:
        return ()
    ncol = len(a[0])
    r0 = 0
    for c in range(ncol):
        piv = next((r for r in range(r0, len(a)) if a[r][c]), None)
        if piv is None:
            continue
        a[r0], a[piv] = a[piv], a[r0]
        inv = pow(a[r0][c], p - 2, p)
        a[r0] = [(x * inv) % p for x in a[r0]]
        for r in range(len(a)):
            if r != r0 and a[r][c]:
                f = a[r][c]
                a[r] = [(x - f * y) % p for x, y in zip(a[r], a[r0])]
        r0 += 1
        if r0 == len(a):
            break
    return tuple(tuple(r) for r in a[:r0])


def flags(p: int, d: int, length: int) -> list[tuple]:
    """Strictly decreasing chains W_1 > ... > W_length of proper nonzero subspaces."""
    subs = proper_subspaces(p, d)

    def contains(big, small) -> bool:
        return len(rref_fp(list(big) + list(small), p)) == len(big)

    out = []

    def rec(chain):
        if len(chain) == length:
            out.append(tuple(chain))
            return
        for W in subs:
            if chain and (len(W) >= len(chain[-1]) or not contains(chain[-1], W)):
                continue
            rec(chain + [W])

    rec([])
    return out


def lattice_of_subspace(base, W: Sequence[Sequence[int]], p: int) -> list[list[KElem]]:
    """Matrix of L_W = base * B_W, where L_W / pi L = W in the residue space of base."""
    d = len(base)
    pivots = [next(c for c, x in enumerate(r) if x) for r in W]
    cols = [[KElem.const(x, p) for x in r] for r in W]
    pi = KElem.pi(p)
    zero = KElem.const(0, p)
    for c in range(d):
        if c not in pivots:
            cols.append([pi if r == c else zero for r in range(d)])
    B = [[cols[j][i] for j in range(d)] for i in range(d)]
    return mat_mul(base, B)


@dataclass(frozen=True)
class BTSimplex:
    """Base lattice (columns of `base`) plus a flag in its residue space."""

    base: tuple
    flag: tuple
    p: int

    @classmethod
    def make(cls, base, flag, p: int) -> "BTSimplex":
        return cls(tuple(tuple(r) for r in base), tuple(flag), p)

    @property
    def dim(self) -> int:
        return len(self.flag)

    def vertex_mats(self) -> list[list[list[KElem]]]:
        base = [list(r) for r in self.base]
        return [base] + [lattice_of_subspace(base, W, self.p) for W in self.flag]

    def keys(self) -> list[LatticeClassKey]:
        return [vertex_key(m, self.p) for m in self.vertex_mats()]


def neighbors(v: LatticeClassKey) -> list[LatticeClassKey]:
    base = v.matrix()
    return [vertex_key(lattice_of_subspace(base, W, v.p), v.p) for W in proper_subspaces(v.p, v.d)]


def flag_simplices(v: LatticeClassKey, i: int) -> list[BTSimplex]:
    base = v.matrix()
    return [BTSimplex.make(base, f, v.p) for f in flags(v.p, v.d, i)]


# --- apartments ---------------------------------------------------------------------

def normalize_coord(n: Sequence[int]) -> tuple[int, ...]:
    """Representative of n modulo Z(1,...,1) with coordinate sum in {0, ..., d-1}."""
    d = len(n)
    s = sum(n) // d
    return tuple(x - s for x in n)


def basis_matrix(basis: Sequence[Sequence], p: int) -> list[list[KElem]]:
    """Columns = the basis vectors (given as rows)."""
    rows = [[KElem.of(x, p) for x in r] for r in basis]
    d = len(rows)
    if any(len(r) != d for r in rows):
        raise DegenerateBasis("need d vectors of length d")
    M = [[rows[j][i] for j in range(d)] for i in range(d)]
    if mat_det(M).is_zero():
        raise DegenerateBasis("basis vectors are linearly dependent")
    return M


def apartment_lattice(basis_mat, n: Sequence[int], p: int) -> list[list[KElem]]:
    d = len(n)
    return [[basis_mat[i][j] * KElem.pi(p, n[j]) for j in range(d)] for i in range(d)]


def apartment_vertex(basis: Sequence[Sequence], n: Sequence[int], p: int) -> LatticeClassKey:
    return vertex_key(apartment_lattice(basis_matrix(basis, p), n, p), p)


def chamber_chain(n: Sequence[int], w: Sequence[int]) -> list[tuple[int, ...]]:
    """Vertices n < n + e_w1 < ... of the chamber (n, w), as lifts (length d)."""
    cur = list(n)
    out = [tuple(cur)]
    for k in w[:-1]:
        cur[k] += 1
        out.append(tuple(cur))
    return out


def lift_chain(vertices: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Lifts n_0 < n_1 < ... < n_i < n_0 + (1,...,1) of an apartment simplex."""
    base = vertices[0]
    lifts = []
    for x in vertices:
        k = -min(xi - bi for xi, bi in zip(x, base))
        m = tuple(xi + k for xi in x)
        if max(mi - bi for mi, bi in zip(m, base)) > 1:
            raise ValueError("coordinates do not form an apartment simplex")
        lifts.append(m)
    lifts.sort(key=sum)
    for u, v in zip(lifts, lifts[1:]):
        if not all(a <= b for a, b in zip(u, v)) or u == v:
            raise ValueError("coordinates do not form an apartment simplex")
    return lifts


def e_vector(sigma: Sequence[Sequence[int]], x: Sequence[int]) -> tuple[int, ...]:
    """e(sigma, x) = lift(x) - lift(predecessor of x) around the cyclic chain."""
    lifts = lift_chain(sigma)
    xn = normalize_coord(x)
    for k, m in enumerate(lifts):
        if normalize_coord(m) == xn:
            prev = lifts[k - 1] if k else tuple(c - 1 for c in lifts[-1])
            return tuple(a - b for a, b in zip(m, prev))
    raise ValueError("x is not a vertex of sigma")


def fundamental_orientation(sigma: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """The ordering x_1, ..., x_d of a chamber with e(sigma, x_i) = e_i (normalized coords)."""
    d = len(sigma[0])
    if len(sigma) != d:
        raise NotTopDimensional("orientation [sigma] needs a top-dimensional simplex")
    out: list = [None] * d
    for x in sigma:
        e = e_vector(sigma, x)
        out[e.index(1)] = normalize_coord(x)
    return out


def chambers_through(n: Sequence[int]) -> list[tuple[tuple[int, ...], ...]]:
    """All apartment chambers containing vertex n, as sorted normalized vertex tuples."""
    d = len(n)
    out = set()
    for w in itertools.permutations(range(d)):
        out.add(tuple(sorted(normalize_coord(m) for m in chamber_chain(n, w))))
    return sorted(out)


def window_chambers(W: Iterable[Sequence[int]]) -> list[tuple[tuple[int, ...], ...]]:
    Wn = {normalize_coord(x) for x in W}
    out = set()
    for n in Wn:
        for ch in chambers_through(n):
            if all(v in Wn for v in ch):
                out.add(ch)
    return sorted(out)


def beta_window(basis, W: Iterable[Sequence[int]], p: int | None = None) -> Chain:
    """The fundamental class restricted to chambers with all vertices in W.

    With basis=None chains are keyed by sorted tuples of normalized coordinates;
    otherwise by sorted tuples of vertex-key strings of the apartment of the basis.
    """
    W = list(W)
    chain = Chain(len(W[0]) - 1 if W else 0, support=frozenset(normalize_coord(x) for x in W))
    if not W:
        return chain
    bm = basis_matrix(basis, p) if basis is not None else None
    for ch in window_chambers(W):
        order = fundamental_orientation(list(ch))
        if bm is None:
            chain.add_oriented(ch, order, 1)
        else:
            names = [str(vertex_key(apartment_lattice(bm, x, p), p)) for x in order]
            chain.add_oriented(tuple(sorted(names)), names, 1)
    return chain


def interior_faces(W: Iterable[Sequence[int]]) -> list[tuple]:
    """(d-2)-simplices all of whose apartment cofaces lie inside the window."""
    Wn = {normalize_coord(x) for x in W}
    faces = set()
    for ch in window_chambers(Wn):
        for k in range(len(ch)):
            faces.add(ch[:k] + ch[k + 1:])
    out = []
    for f in faces:
        cofaces = [c for c in chambers_through(f[0]) if set(f) <= set(c)]
        if all(all(v in Wn for v in c) for c in cofaces):
            out.append(f)
    return sorted(out)


def cofaces_in_apartment(face: Sequence[Sequence[int]]) -> list[tuple]:
    f = [normalize_coord(x) for x in face]
    return [c for c in chambers_through(f[0]) if set(f) <= set(c)]


APARTMENT = LazyComplex()
