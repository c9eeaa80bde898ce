"""Vertices as vector bundles on P^1: Birkhoff factorization, splitting types,
Harder-Narasimhan polygons, truncations and the HN flag.

Dictionary: the lattice L = g O^d at infinity glued with A^d at the finite
places gives a bundle whose global sections are A^d meet L.  The line
lattice pi^e O therefore yields a line bundle of degree -e (the lattice t O
has the two sections 1, t).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .building import LatticeClassKey
from .exactring.kfield import (KElem, SingularMatrix, is_integral, mat_det, mat_eq, mat_mul,
                               rref, valuation)
from .exactring.poly import Poly, fq_inv

PolyMat = list  # list of rows of Poly


def poly_identity(d: int, p: int) -> list[list[Poly]]:
    return [[Poly.const(int(i == j), p) for j in range(d)] for i in range(d)]


def poly_mat_mul(a, b) -> list[list[Poly]]:
    p = a[0][0].p
    n, m, k = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(k):
            acc = Poly._raw((), p)
            for l in range(m):
                x, y = a[i][l], b[l][j]
                if x.c and y.c:
                    acc = acc + x * y
            row.append(acc)
        out.append(row)
    return out


def poly_det(a) -> Poly:
    """Determinant by Laplace expansion (d is small)."""
    n = len(a)
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    acc = Poly._raw((), a[0][0].p)
    for j in range(n):
        if not a[0][j].c:
            continue
        minor = [row[:j] + row[j + 1:] for row in a[1:]]
        term = a[0][j] * poly_det(minor)
        acc = acc + term if j % 2 == 0 else acc - term
    return acc


def poly_mat_inverse(a) -> list[list[Poly]]:
    """Inverse of a matrix in GL_d(A) (adjugate over the unit determinant)."""
    n = len(a)
    p = a[0][0].p
    det = poly_det(a)
    if det.deg != 0:
        raise SingularMatrix("matrix is not in GL_d(A)")
    inv = fq_inv(det.c[0], p)
    if n == 1:
        return [[Poly.const(inv, p)]]
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(a) if k != i]
            c = poly_det(minor) * inv
            out[j][i] = c if (i + j) % 2 == 0 else -c
    return out


def to_kmat(a) -> list[list[KElem]]:
    return [[KElem(x) for x in r] for r in a]


@dataclass
class BirkhoffWitness:
    """u * diag(pi^e_1, ..., pi^e_d) * k = h with u in GL_d(A), k in GL_d(O), e descending."""

    u: list[list[Poly]]
    e: tuple[int, ...]
    k: list[list[KElem]]
    u_inv: list[list[Poly]]

    @property
    def degrees(self) -> tuple[int, ...]:
        """Summand degrees in the column order of u (deg = -e)."""
        return tuple(-x for x in self.e)


def _row_degree(row) -> int:
    return max(x.deg for x in row)


def birkhoff(h, p: int | None = None, certify: bool = True) -> BirkhoffWitness:
    """Factor h in GL_d(F) as u * diag(pi^e) * k (u in GL_d(A), k in GL_d(O))."""
    if p is None:
        p = h[0][0].p
    d = len(h)
    # common denominator c: c*h has polynomial entries
    c = Poly.const(1, p)
    for r in h:
        for x in r:
            if x.den.deg > 0:
                g = c.gcd(x.den)
                c = c * (x.den // g)
    P = [[(x.num * (c // x.den)) for x in r] for r in h]
    U = poly_identity(d, p)
    Ui = poly_identity(d, p)
    while True:
        r = [_row_degree(row) for row in P]
        if min(r) < 0:
            raise SingularMatrix("zero row in Birkhoff reduction")
        L = [[P[i][j].coeff(r[i]) for j in range(d)] for i in range(d)]
        lam = _left_kernel_vector(L, p)
        if lam is None:
            break
        cand = [i for i in range(d) if lam[i]]
        i0 = max(cand, key=lambda i: (r[i], -i))
        inv0 = fq_inv(lam[i0], p)
        for i in cand:
            if i == i0:
                continue
            coef = Poly.const(lam[i] * inv0, p).shift(r[i0] - r[i])
            P[i0] = [a + coef * b for a, b in zip(P[i0], P[i])]
            U[i0] = [a + coef * b for a, b in zip(U[i0], U[i])]
            for row in Ui:
                row[i] = row[i] - row[i0] * coef
    r = [_row_degree(row) for row in P]
    e = [c.deg - ri for ri in r]
    order = sorted(range(d), key=lambda i: (-e[i], i))
    u = [[Ui[i][j] for j in order] for i in range(d)]
    u_inv = [U[j] for j in order]
    e_sorted = tuple(e[j] for j in order)
    # k = diag(pi^-e) u^-1 h
    uh = mat_mul(to_kmat(u_inv), h)
    k = [[x * KElem.t(p, e_sorted[i]) for x in uh[i]] for i in range(d)]
    w = BirkhoffWitness(u, e_sorted, k, u_inv)
    if certify:
        _certify(w, h, p)
    return w


def _certify(w: BirkhoffWitness, h, p: int) -> None:
    d = len(h)
    if poly_det(w.u).deg != 0:
        raise AssertionError("Birkhoff u is not unimodular")
    if not all(is_integral(x) for r in w.k for x in r) or valuation(mat_det(w.k)) != 0:
        raise AssertionError("Birkhoff k is not in GL_d(O)")
    D = [[KElem.pi(p, w.e[i]) if i == j else KElem.const(0, p) for j in range(d)] for i in range(d)]
    if not mat_eq(mat_mul(mat_mul(to_kmat(w.u), D), w.k), h):
        raise AssertionError("Birkhoff factorization does not reproduce the input")


def _left_kernel_vector(L, p: int):
    """A nonzero lam with lam^T L = 0 over F_p, or None if L is invertible."""
    d = len(L)
    # row-reduce [L | I]; a zero row on the left gives lam on the right
    a = [list(L[i]) + [int(i == j) for j in range(d)] for i in range(d)]
    r0 = 0
    for col in range(d):
        piv = next((r for r in range(r0, d) if a[r][col] % p), None)
        if piv is None:
            continue
        a[r0], a[piv] = a[piv], a[r0]
        inv = fq_inv(a[r0][col], p)
        a[r0] = [(x * inv) % p for x in a[r0]]
        for r in range(d):
            if r != r0 and a[r][col] % p:
                f = a[r][col]
                a[r] = [(x - f * y) % p for x, y in zip(a[r], a[r0])]
        r0 += 1
    if r0 == d:
        return None
    return [x % p for x in a[r0][d:]]


# --- splitting types and polygons -------------------------------------------------

def _matrix_of(v, p=None):
    if isinstance(v, LatticeClassKey):
        return v.matrix(), v.p
    return v, (p if p is not None else v[0][0].p)


def bundle_degrees(g, p: int | None = None) -> tuple[int, ...]:
    """Unnormalized summand degrees of the bundle of the lattice g O^d, sorted descending."""
    m, p = _matrix_of(g, p)
    return tuple(sorted(birkhoff(m, p).degrees, reverse=True))


@dataclass(frozen=True)
class SplittingType:
    a: tuple[int, ...]

    @classmethod
    def normalized(cls, degrees: Sequence[int]) -> "SplittingType":
        s = sorted(degrees, reverse=True)
        lo = s[-1]
        return cls(tuple(x - lo for x in s))

    @property
    def d(self) -> int:
        return len(self.a)

    def delta(self) -> tuple[int, ...]:
        return tuple(self.a[i] - self.a[i + 1] for i in range(self.d - 1))

    def polygon(self) -> "Polygon":
        return Polygon.from_degrees(self.a)

    def to_json(self) -> list[int]:
        return list(self.a)


@dataclass(frozen=True)
class Polygon:
    p: tuple[int, ...]      # p(0..d)
    delta: tuple[int, ...]  # delta(1..d-1)

    @classmethod
    def from_degrees(cls, degrees: Sequence[int]) -> "Polygon":
        a = sorted(degrees, reverse=True)
        pts = [0]
        for x in a:
            pts.append(pts[-1] + x)
        delta = tuple(a[i] - a[i + 1] for i in range(len(a) - 1))
        return cls(tuple(pts), delta)

    def is_convex(self) -> bool:
        p = self.p
        return all(2 * p[i] - p[i - 1] - p[i + 1] >= 0 for i in range(1, len(p) - 1))


def splitting_type(v, p: int | None = None) -> SplittingType:
    return SplittingType.normalized(bundle_degrees(v, p))


def polygon(v, p: int | None = None) -> Polygon:
    return Polygon.from_degrees(bundle_degrees(v, p))


def in_truncation(v, alpha: int, D: Sequence[int] | None = None) -> bool:
    """Membership of v in the truncation: some Delta p(i) >= alpha, or all i in D."""
    st = v if isinstance(v, SplittingType) else (
        SplittingType(tuple(v)) if isinstance(v, tuple) else splitting_type(v))
    delta = st.delta()
    if D is None:
        return any(x >= alpha for x in delta)
    return all(delta[i - 1] >= alpha for i in D)


def hn_flag(v, p: int | None = None) -> list[tuple[tuple[KElem, ...], ...]]:
    """The HN flag in F^d: spans of the top-degree summands at the strict descents.

    Each subspace is returned in reduced row echelon form (rows = basis vectors).
    """
    m, p = _matrix_of(v, p)
    w = birkhoff(m, p)
    degs = w.degrees
    d = len(degs)
    order = sorted(range(d), key=lambda j: (-degs[j], j))
    sd = [degs[j] for j in order]
    out = []
    for i in range(1, d):
        if sd[i - 1] > sd[i]:
            vecs = [[KElem(w.u[r][order[c]]) for r in range(d)] for c in range(i)]
            out.append(rref(vecs, p))
    return out


def representative(st: SplittingType, p: int) -> list[list[KElem]]:
    """The standard vertex of a type: diag(t^a_1, ..., t^a_d)."""
    d = st.d
    return [[KElem.t(p, st.a[i]) if i == j else KElem.const(0, p) for j in range(d)] for i in range(d)]


def h0(degrees: Sequence[int]) -> int:
    """dim of global sections of O(a_1) + ... + O(a_d) on P^1."""
    return sum(max(a + 1, 0) for a in degrees)


def sections_dimension(g, p: int, max_deg: int) -> int:
    """Brute-force dim of A^d meet g O^d over polynomials of degree <= max_deg."""
    from itertools import product

    from .exactring.kfield import mat_inverse
    d = len(g)
    gi = mat_inverse(g)
    count = 0
    n = (max_deg + 1) * d
    for coeffs in product(range(p), repeat=n):
        vec = [KElem(Poly(coeffs[k * (max_deg + 1):(k + 1) * (max_deg + 1)], p)) for k in range(d)]
        if all(is_integral(sum((gi[i][j] * vec[j] for j in range(d)), KElem.const(0, p)))
               for i in range(d)):
            count += 1
    # count = p^dim
    dim = 0
    while p ** dim < count:
        dim += 1
    return dim
