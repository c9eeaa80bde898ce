"""GL_d(A)-orbits of simplices: standard vertices, parabolic residue actions and canonical forms.

Every vertex is GL_d(A)-equivalent to exactly one standard vertex
v_a = diag(t^a_1, ..., t^a_d) O^d with a_1 >= ... >= a_d = 0.  Its stabilizer
consists of the s in GL_d(A) with deg s_ij <= a_i - a_j (zero when a_i < a_j);
on the residue space it acts through the parabolic P_a(F_q).  A simplex
based at v_a is a flag in F_q^d, so GL_d(A)-orbits of simplices are pairs
(a, P_a-orbit of a flag), minimized over the choice of base vertex.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from ..building import hermite_form, lattice_of_subspace, rref_fp
from ..bundles import birkhoff
from ..exactring.kfield import KElem, pi_expansion
from ..exactring.poly import Poly, fq_inv

Flag = tuple  # tuple of subspaces (RREF row tuples), dimensions strictly decreasing


def type_matrix(a: Sequence[int], p: int) -> list[list[KElem]]:
    d = len(a)
    return [[KElem.t(p, a[i]) if i == j else KElem.const(0, p) for j in range(d)] for i in range(d)]


def blocks_of(a: Sequence[int]) -> tuple[int, ...]:
    """Block label per index: runs of equal entries of a (a sorted descending)."""
    out, b = [], 0
    for i in range(len(a)):
        if i and a[i] != a[i - 1]:
            b += 1
        out.append(b)
    return tuple(out)


def _fq_det(M: Sequence[Sequence[int]], p: int) -> int:
    a = [list(r) for r in M]
    n = len(a)
    det = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] % p), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det = det * a[c][c] % p
        inv = fq_inv(a[c][c], p)
        for r in range(c + 1, n):
            if a[r][c] % p:
                f = a[r][c] * inv % p
                a[r] = [(x - f * y) % p for x, y in zip(a[r], a[c])]
    return det % p


def fq_mat_inv(M: Sequence[Sequence[int]], p: int) -> tuple[tuple[int, ...], ...]:
    n = len(M)
    a = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(M)]
    for c in range(n):
        piv = next(r for r in range(c, n) if a[r][c] % p)
        a[c], a[piv] = a[piv], a[c]
        inv = fq_inv(a[c][c], p)
        a[c] = [(x * inv) % p for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] % p:
                f = a[r][c]
                a[r] = [(x - f * y) % p for x, y in zip(a[r], a[c])]
    return tuple(tuple(r[n:]) for r in a)


@lru_cache(maxsize=None)
def parabolic(blocks: tuple[int, ...], p: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """All invertible block-upper-triangular matrices over F_p for the block labels."""
    d = len(blocks)
    free = [(i, j) for i in range(d) for j in range(d) if blocks[i] <= blocks[j]]
    out = []
    for vals in itertools.product(range(p), repeat=len(free)):
        M = [[0] * d for _ in range(d)]
        for (i, j), v in zip(free, vals):
            M[i][j] = v
        if _fq_det(M, p):
            out.append(tuple(tuple(r) for r in M))
    return tuple(out)


def act_on_subspace(P: Sequence[Sequence[int]], W: Sequence[Sequence[int]], p: int) -> tuple:
    d = len(P)
    vecs = [[sum(P[i][k] * w[k] for k in range(d)) % p for i in range(d)] for w in W]
    return rref_fp(vecs, p)


def act_on_flag(P, flag: Flag, p: int) -> Flag:
    return tuple(act_on_subspace(P, W, p) for W in flag)


@lru_cache(maxsize=None)
def canonical_flag(blocks: tuple[int, ...], flag: Flag, p: int) -> tuple[Flag, tuple]:
    """Minimal element of the P_a-orbit of a flag and an element of P_a reaching it."""
    best, arg = None, None
    for P in parabolic(blocks, p):
        img = act_on_flag(P, flag, p)
        if best is None or img < best:
            best, arg = img, P
    return best, arg


@lru_cache(maxsize=None)
def flag_stabilizer(blocks: tuple[int, ...], flag: Flag, p: int) -> tuple:
    return tuple(P for P in parabolic(blocks, p) if act_on_flag(P, flag, p) == flag)


def lift_parabolic(P: Sequence[Sequence[int]], a: Sequence[int], p: int) -> list[list[Poly]]:
    """The element s = g_a P g_a^-1 of Stab(v_a): s_ij = P_ij t^(a_i - a_j)."""
    d = len(a)
    return [[Poly.const(P[i][j], p).shift(a[i] - a[j]) if P[i][j] else Poly._raw((), p)
             for j in range(d)] for i in range(d)]


@dataclass
class Standardized:
    a: tuple[int, ...]           # splitting type, normalized min 0
    h: list[list[Poly]]          # h * L = v_a (as classes)
    h_inv: list[list[Poly]]


def standardize(mat, p: int) -> Standardized:
    """Move a vertex lattice to its standard vertex v_a by an element of GL_d(A)."""
    w = birkhoff(mat, p)
    d = len(mat)
    degs = w.degrees  # ascending, since e is descending
    order = list(range(d - 1, -1, -1))
    lo = degs[0]
    a = tuple(degs[j] - lo for j in order)
    h = [w.u_inv[j] for j in order]
    h_inv = [[w.u[i][j] for j in order] for i in range(d)]
    return Standardized(a, h, h_inv)


def _poly_to_k(M):
    return [[KElem(x) for x in r] for r in M]


def _kmul(a, b):
    d = len(a)
    zero = KElem.const(0, a[0][0].p)
    out = []
    for i in range(d):
        row = []
        for j in range(len(b[0])):
            acc = zero
            for l in range(d):
                x, y = a[i][l], b[l][j]
                if x and y:
                    acc = acc + x * y
            row.append(acc)
        out.append(row)
    return out


def residue_subspace(a: Sequence[int], h, mat, p: int) -> tuple:
    """Subspace W of the residue space of v_a with h * mat ~ L_W (mat adjacent to h^-1 v_a)."""
    d = len(a)
    ginv_h = [[KElem.pi(p, a[i]) * KElem(h[i][j]) if h[i][j] else KElem.const(0, p)
               for j in range(d)] for i in range(d)]
    N = _kmul(ginv_h, mat)
    H, e = hermite_form(N, p)
    j = -min(e)
    if max(e) + j > 1:
        raise ValueError("lattices are not adjacent")
    vecs = []
    for i in range(d):
        if e[i] + j != 0:
            continue
        v = [0] * d
        v[i] = 1
        for r in range(i):
            x = H[r][i]
            if x:
                lo, co = pi_expansion(x, -j)
                k = -j - lo
                if 0 <= k < len(co):
                    v[r] = co[k]
        vecs.append(v)
    return rref_fp(vecs, p)


def simplex_lattices(a: Sequence[int], flag: Flag, p: int) -> list[list[list[KElem]]]:
    base = type_matrix(a, p)
    return [base] + [lattice_of_subspace(base, W, p) for W in flag]


OrbitKey = tuple  # (a, flag)


@dataclass
class Canonical:
    key: OrbitKey
    h: list[list[Poly]]      # sigma = h * sigma_0
    base_index: int          # which input vertex became the base


def canonicalize(mats: Sequence, p: int, std: Sequence[Standardized] | None = None) -> Canonical:
    """GL_d(A)-orbit key of the simplex with the given vertex lattices, and h with sigma = h sigma_0."""
    if std is None:
        std = [standardize(m, p) for m in mats]
    best = None
    for k, s in enumerate(std):
        subs = [residue_subspace(s.a, s.h, m, p) for l, m in enumerate(mats) if l != k]
        flag = tuple(sorted(subs, key=len, reverse=True))
        cf, P = canonical_flag(blocks_of(s.a), flag, p)
        key = (s.a, cf)
        if best is None or key < best[0]:
            best = (key, k, P)
    key, k, P = best
    a = key[0]
    s_inv = lift_parabolic(fq_mat_inv(P, p), a, p)
    h = _pmul(std[k].h_inv, s_inv)
    return Canonical(key, h, k)


def _pmul(a, b):
    d = len(a)
    p = a[0][0].p
    out = []
    for i in range(d):
        row = []
        for j in range(len(b[0])):
            acc = Poly._raw((), p)
            for l in range(d):
                if a[i][l].c and b[l][j].c:
                    acc = acc + a[i][l] * b[l][j]
            row.append(acc)
        out.append(row)
    return out


def stab_order(key: OrbitKey, p: int) -> int:
    """|Stab_{GL_d(A)}(sigma_0)| = |Stab_{P_a}(flag)| * q^(sum over a_i > a_j of a_i - a_j)."""
    a, flag = key
    d = len(a)
    extra = sum(a[i] - a[j] for i in range(d) for j in range(d) if a[i] > a[j])
    return len(flag_stabilizer(blocks_of(a), flag, p)) * p ** extra
