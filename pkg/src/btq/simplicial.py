"""Generalized simplicial complexes, orientations, chains and their homology.

A simplex of dimension i has an ordered tuple of i+1 vertex ids (ascending,
the reference orientation) and, for i >= 1, the ids of its codimension-one
faces indexed by the position of the omitted vertex.  Two simplices may share
a vertex set, which is what makes the complex "generalized".

Boundary sign rule: omitting the vertex at 1-based position k of an ordering
contributes (-1)^k times the induced ordering of the face.  This is the
negative of the textbook convention; homology is unaffected.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd
from typing import Callable, Iterable, Mapping, Sequence

from .exactring.intmat import Subquotient, elementary_divisors, subquotient


class NotSubcomplex(ValueError):
    pass


class InfiniteChainGroup(ValueError):
    pass


class NotFinite(ValueError):
    pass


class InvalidComplex(ValueError):
    pass


def perm_parity(seq: Sequence) -> int:
    """+1 for an even arrangement of distinct sortable items, -1 for odd."""
    s = list(seq)
    sign = 1
    seen = [False] * len(s)
    order = sorted(range(len(s)), key=lambda k: s[k])
    pos = {k: r for r, k in enumerate(order)}
    perm = [pos[k] for k in range(len(s))]
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def face_sign(ordering: Sequence, v) -> tuple[int, tuple]:
    """The torsor map s_v: ordering -> (sign, ordering of the face without v)."""
    k = list(ordering).index(v) + 1
    return (-1) ** k, tuple(x for x in ordering if x != v)


@dataclass(frozen=True)
class Orientation:
    """An orientation of a simplex as a parity against the ascending reference order."""

    dim: int
    sid: int
    parity: int = 1

    @classmethod
    def from_ordering(cls, dim: int, sid: int, ordering: Sequence) -> "Orientation":
        return cls(dim, sid, perm_parity(ordering))

    def flipped(self) -> "Orientation":
        return Orientation(self.dim, self.sid, -self.parity)


class Complex:
    """A finite generalized simplicial complex."""

    def __init__(self, verts: Sequence[Sequence[tuple[int, ...]]],
                 faces: Sequence[Sequence[tuple[int, ...]]] | None = None,
                 check: bool = True):
        self.verts: list[list[tuple[int, ...]]] = [[tuple(v) for v in layer] for layer in verts]
        while self.verts and not self.verts[-1]:
            self.verts.pop()
        if faces is None:
            faces = self._faces_from_vertex_sets()
        self.faces: list[list[tuple[int, ...]]] = [[tuple(f) for f in layer] for layer in faces]
        if len(self.faces) < len(self.verts):
            self.faces += [[] for _ in range(len(self.verts) - len(self.faces))]
        if check:
            self.check_axioms()

    # -- construction ------------------------------------------------------
    @classmethod
    def from_simplices(cls, simplices: Iterable[Iterable[int]]) -> "Complex":
        """Strict complex: closure of the given vertex sets."""
        layers: dict[int, set[tuple[int, ...]]] = {}
        for s in simplices:
            s = tuple(sorted(set(s)))
            for k in range(1, len(s) + 1):
                for f in itertools.combinations(s, k):
                    layers.setdefault(k - 1, set()).add(f)
        top = max(layers) if layers else -1
        return cls([sorted(layers.get(i, ())) for i in range(top + 1)])

    def _faces_from_vertex_sets(self) -> list[list[tuple[int, ...]]]:
        out: list[list[tuple[int, ...]]] = [[() for _ in self.verts[0]]] if self.verts else []
        for i in range(1, len(self.verts)):
            index = {}
            for sid, vs in enumerate(self.verts[i - 1]):
                if vs in index:
                    raise InvalidComplex("vertex sets are not unique in dimension %d" % (i - 1))
                index[vs] = sid
            layer = []
            for vs in self.verts[i]:
                layer.append(tuple(index[vs[:k] + vs[k + 1:]] for k in range(len(vs))))
            out.append(layer)
        return out

    def check_axioms(self) -> None:
        for i, layer in enumerate(self.verts):
            for sid, vs in enumerate(layer):
                if len(vs) != i + 1 or list(vs) != sorted(set(vs)):
                    raise InvalidComplex("simplex %d/%d has bad vertex tuple %r" % (i, sid, vs))
                if i == 0:
                    continue
                fs = self.faces[i][sid]
                if len(fs) != i + 1:
                    raise InvalidComplex("simplex %d/%d lacks faces" % (i, sid))
                for k, f in enumerate(fs):
                    if self.verts[i - 1][f] != vs[:k] + vs[k + 1:]:
                        raise InvalidComplex("face map disagrees with vertex map at %d/%d" % (i, sid))
                if i >= 2:
                    # (sigma x V') x V'' = sigma x V'': omitting two vertices in either order
                    for k, l in itertools.combinations(range(i + 1), 2):
                        a = self.faces[i - 1][fs[k]][l - 1]
                        b = self.faces[i - 1][fs[l]][k]
                        if a != b:
                            raise InvalidComplex("face maps are not compatible at %d/%d" % (i, sid))

    # -- queries -----------------------------------------------------------
    @property
    def dim(self) -> int:
        return len(self.verts) - 1

    def count(self, i: int) -> int:
        return len(self.verts[i]) if 0 <= i < len(self.verts) else 0

    def counts(self) -> list[int]:
        return [len(layer) for layer in self.verts]

    def vertices_of(self, i: int, sid: int) -> tuple[int, ...]:
        return self.verts[i][sid]

    def face(self, i: int, sid: int, subset: Iterable[int]) -> int:
        """Id of the face sigma x V' for V' a nonempty subset of V(sigma)."""
        sub = set(subset)
        vs = self.verts[i][sid]
        if not sub or not sub <= set(vs):
            raise ValueError("subset is not a nonempty subset of V(sigma)")
        while len(vs) > len(sub):
            k = next(k for k, v in enumerate(vs) if v not in sub)
            sid = self.faces[i][sid][k]
            i -= 1
            vs = self.verts[i][sid]
        return sid

    def is_strict(self) -> bool:
        return all(len(set(layer)) == len(layer) for layer in self.verts)

    def euler_characteristic(self) -> int:
        return sum((-1) ** i * n for i, n in enumerate(self.counts()))

    # -- boundary ----------------------------------------------------------
    def boundary_sparse(self, i: int, rows: Mapping[int, int] | None = None,
                        cols: Sequence[int] | None = None) -> dict[int, dict[int, int]]:
        """d_i as {column: {row: value}}; optional row/column restriction with reindexing."""
        out: dict[int, dict[int, int]] = {}
        if i < 1 or i > self.dim:
            return out
        col_ids = range(self.count(i)) if cols is None else cols
        for j, sid in enumerate(col_ids):
            col: dict[int, int] = {}
            for k, f in enumerate(self.faces[i][sid]):
                r = f if rows is None else rows.get(f)
                if r is None:
                    continue
                col[r] = col.get(r, 0) + (-1) ** (k + 1)
            col = {r: x for r, x in col.items() if x}
            if col:
                out[j] = col
        return out

    def boundary_matrix(self, i: int) -> list[list[int]]:
        """Dense matrix of d_i : C_i -> C_{i-1} in reference orientations."""
        m, n = self.count(i - 1), self.count(i)
        M = [[0] * n for _ in range(m)]
        for j, col in self.boundary_sparse(i).items():
            for r, x in col.items():
                M[r][j] = x
        return M


@dataclass
class Chain:
    """Finitely supported chain relative to reference orientations."""

    dim: int
    coeffs: dict = field(default_factory=dict)
    support: object = None  # optional window description for BM chains

    def add_oriented(self, key, ordering: Sequence | None, value: int = 1) -> None:
        """Add value * [key with the given vertex ordering]."""
        sign = 1 if ordering is None else perm_parity(ordering)
        v = self.coeffs.get(key, 0) + sign * value
        if v:
            self.coeffs[key] = v
        else:
            self.coeffs.pop(key, None)

    def __add__(self, other: "Chain") -> "Chain":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            nv = out.get(k, 0) + v
            if nv:
                out[k] = nv
            else:
                out.pop(k, None)
        return Chain(self.dim, out)

    def __neg__(self) -> "Chain":
        return Chain(self.dim, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def scale(self, c: int) -> "Chain":
        return Chain(self.dim, {k: c * v for k, v in self.coeffs.items()} if c else {})

    def is_zero(self) -> bool:
        return not self.coeffs

    def to_json(self) -> dict:
        return {"dim": self.dim, "entries": [[k, v] for k, v in sorted(self.coeffs.items())]}

    def vector(self, index: Mapping, n: int) -> list[int]:
        vec = [0] * n
        for k, v in self.coeffs.items():
            vec[index[k]] += v
        return vec


def boundary(c: Complex, ch: Chain) -> Chain:
    out = Chain(ch.dim - 1)
    if ch.dim == 0:
        return out
    for sid, x in ch.coeffs.items():
        for k, f in enumerate(c.faces[ch.dim][sid]):
            out.add_oriented(f, None, (-1) ** (k + 1) * x)
    return out


class LazyComplex:
    """A strict, possibly infinite complex given by a face callback on vertex tuples.

    Chains are keyed by sorted vertex tuples.  Boundary matrices need an explicit window.
    """

    def __init__(self, vertex_faces: Callable[[tuple], Iterable[tuple]] | None = None):
        self.vertex_faces = vertex_faces

    def boundary_chain(self, ch: Chain) -> Chain:
        out = Chain(ch.dim - 1)
        for key, x in ch.coeffs.items():
            for k in range(len(key)):
                out.add_oriented(key[:k] + key[k + 1:], None, (-1) ** (k + 1) * x)
        return out

    def boundary_matrix(self, i: int, window: Sequence[tuple] | None = None,
                        face_window: Sequence[tuple] | None = None) -> list[list[int]]:
        if window is None:
            raise InfiniteChainGroup("an infinite complex needs a finite window")
        faces = face_window
        if faces is None:
            faces = sorted({s[:k] + s[k + 1:] for s in window for k in range(len(s))})
        idx = {f: r for r, f in enumerate(faces)}
        M = [[0] * len(window) for _ in faces]
        for j, s in enumerate(window):
            for k in range(len(s)):
                r = idx.get(s[:k] + s[k + 1:])
                if r is not None:
                    M[r][j] += (-1) ** (k + 1)
        return M


# --- subcomplexes and homology ---------------------------------------------

class Subcomplex:
    """A subset of simplex ids per dimension of an ambient complex, closed under faces."""

    def __init__(self, ambient: Complex, ids: Mapping[int, Iterable[int]]):
        self.ambient = ambient
        self.ids = {i: set(ids.get(i, ())) for i in range(ambient.dim + 1)}
        for i in range(1, ambient.dim + 1):
            for sid in self.ids[i]:
                if not set(ambient.faces[i][sid]) <= self.ids[i - 1]:
                    raise NotSubcomplex("simplex %d/%d has a face outside the subcomplex" % (i, sid))

    @classmethod
    def from_complex(cls, ambient: Complex, sub: Complex) -> "Subcomplex":
        """Match a strict subcomplex by vertex sets."""
        ids: dict[int, set[int]] = {}
        for i in range(sub.dim + 1):
            index = {vs: sid for sid, vs in enumerate(ambient.verts[i])} if i <= ambient.dim else {}
            for vs in sub.verts[i]:
                if vs not in index:
                    raise NotSubcomplex("simplex %r not in ambient complex" % (vs,))
                ids.setdefault(i, set()).add(index[vs])
        return cls(ambient, ids)

    @classmethod
    def empty(cls, ambient: Complex) -> "Subcomplex":
        return cls(ambient, {})

    def relative_ids(self, i: int) -> list[int]:
        if i < 0 or i > self.ambient.dim:
            return []
        return [s for s in range(self.ambient.count(i)) if s not in self.ids[i]]


def _coerce_sub(c: Complex, sub) -> Subcomplex:
    if sub is None:
        return Subcomplex.empty(c)
    if isinstance(sub, Subcomplex):
        if sub.ambient is not c:
            raise NotSubcomplex("subcomplex belongs to another complex")
        return sub
    if isinstance(sub, Complex):
        return Subcomplex.from_complex(c, sub)
    return Subcomplex(c, sub)


def relative_boundary(c: Complex, sub: Subcomplex, i: int) -> tuple[list[list[int]], list[int], list[int]]:
    """Dense matrix of d_i on relative chains plus the row and column id lists."""
    cols = sub.relative_ids(i)
    rows = sub.relative_ids(i - 1)
    ridx = {r: k for k, r in enumerate(rows)}
    M = [[0] * len(cols) for _ in rows]
    for j, col in c.boundary_sparse(i, rows=ridx, cols=cols).items():
        for r, x in col.items():
            M[r][j] = x
    return M, rows, cols


def relative_boundary_sparse(c: Complex, sub: Subcomplex, i: int):
    cols = sub.relative_ids(i)
    rows = sub.relative_ids(i - 1)
    ridx = {r: k for k, r in enumerate(rows)}
    return c.boundary_sparse(i, rows=ridx, cols=cols), rows, cols


@dataclass(frozen=True)
class GroupInvariants:
    """A finitely generated abelian group Z^free + sum Z/t (torsion t > 1).

    For rational coefficients only `free` is meaningful.
    """

    free: int
    torsion: tuple[int, ...] = ()

    def primary(self) -> tuple[int, tuple[int, ...]]:
        """Free rank and sorted prime-power torsion decomposition (canonical form)."""
        parts = []
        for t in self.torsion:
            x, f = t, 2
            while x > 1:
                if x % f == 0:
                    pe = 1
                    while x % f == 0:
                        x //= f
                        pe *= f
                    parts.append(pe)
                f += 1
        return self.free, tuple(sorted(parts))

    def order(self) -> int | None:
        if self.free:
            return None
        out = 1
        for t in self.torsion:
            out *= t
        return out

    def is_zero(self) -> bool:
        return self.free == 0 and not self.torsion

    def isomorphic(self, other: "GroupInvariants") -> bool:
        return self.primary() == other.primary()

    def __repr__(self) -> str:
        parts = ["Z^%d" % self.free] if self.free else []
        parts += ["Z/%d" % t for t in self.torsion]
        return " + ".join(parts) if parts else "0"


def _complex_mats(c: Complex, sub: Subcomplex) -> tuple[list[int], dict[int, dict]]:
    sizes = [len(sub.relative_ids(i)) for i in range(c.dim + 1)]
    mats = {i: relative_boundary_sparse(c, sub, i)[0] for i in range(1, c.dim + 1)}
    return sizes, mats


def _dense(sp: dict[int, dict[int, int]], m: int, n: int) -> list[list[int]]:
    M = [[0] * n for _ in range(m)]
    for j, col in sp.items():
        for r, x in col.items():
            M[r][j] = x
    return M


def _rank_mod_p(sp: dict[int, dict[int, int]], p: int) -> int:
    rows: list[dict[int, int]] = []
    by_col: dict[int, dict[int, int]] = {}
    for j, col in sp.items():
        for r, x in col.items():
            if x % p:
                by_col.setdefault(r, {})[j] = x % p
    rows = list(by_col.values())
    rank = 0
    pivots: dict[int, dict[int, int]] = {}
    for row in rows:
        row = dict(row)
        while row:
            c = min(row)
            if c not in pivots:
                inv = pow(row[c], p - 2, p)
                pivots[c] = {k: (v * inv) % p for k, v in row.items()}
                rank += 1
                break
            f = row[c]
            for k, v in pivots[c].items():
                nv = (row.get(k, 0) - f * v) % p
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
    return rank


def _is_prime(n: int) -> bool:
    return n > 1 and all(n % k for k in range(2, int(n ** 0.5) + 1))


def chain_homology(sizes: Sequence[int], mats: Mapping[int, dict], i: int, coeff="Z") -> GroupInvariants:
    """H_i of the complex with chain ranks `sizes` and sparse differentials mats[i]: C_i -> C_{i-1}."""
    n = sizes[i] if 0 <= i < len(sizes) else 0
    d_in = mats.get(i, {})
    d_out = mats.get(i + 1, {})
    if coeff == "Z":
        r_in = len(elementary_divisors(d_in)) if d_in else 0
        divs = elementary_divisors(d_out) if d_out else []
        return GroupInvariants(n - r_in - len(divs), tuple(x for x in divs if x > 1))
    if coeff == "Q":
        r_in = len(elementary_divisors(d_in)) if d_in else 0
        r_out = len(elementary_divisors(d_out)) if d_out else 0
        return GroupInvariants(n - r_in - r_out)
    m = int(coeff)
    if m < 2:
        raise ValueError("coefficient group Z/%d" % m)
    if _is_prime(m):
        dim = n - _rank_mod_p(d_in, m) - _rank_mod_p(d_out, m)
        return GroupInvariants(0, (m,) * dim)
    # C (x) Z/m is quasi-isomorphic to the cone of multiplication by m on C
    cs, cm = _cone(sizes, mats, m)
    return chain_homology(cs, cm, i, "Z")


def _cone(sizes: Sequence[int], mats: Mapping[int, dict], m: int):
    """D_i = C_i + C_{i-1}, d(x, y) = (dx + m y, -dy)."""
    top = len(sizes)
    cs = [(sizes[i] if i < top else 0) + (sizes[i - 1] if i >= 1 else 0) for i in range(top + 1)]
    cm: dict[int, dict] = {}
    for i in range(1, top + 1):
        nxi = sizes[i] if i < top else 0
        nxm = sizes[i - 1]
        col_map: dict[int, dict[int, int]] = {}
        # x part: d_i x into C_{i-1} part of D_{i-1}
        for j, col in mats.get(i, {}).items():
            col_map[j] = dict(col)
        # y part (C_{i-1}): m*y into C_{i-1} (x-part of D_{i-1}), -d_{i-1} y into C_{i-2} (offset)
        for j in range(nxm):
            col = {j: m}
            for r, x in mats.get(i - 1, {}).get(j, {}).items():
                col[nxm + r] = -x
            col_map[nxi + j] = col
        cm[i] = {j: c for j, c in col_map.items() if c}
    return cs, cm


def _transpose_sparse(sp: Mapping[int, dict[int, int]]) -> dict[int, dict[int, int]]:
    out: dict[int, dict[int, int]] = {}
    for j, col in sp.items():
        for r, x in col.items():
            out.setdefault(r, {})[j] = x
    return out


def _coeff_key(M):
    if M in ("Z", "Q"):
        return M
    if isinstance(M, str) and M.startswith("Z/"):
        return int(M[2:])
    return int(M)


def homology(c: Complex, i: int, M="Z", sub=None) -> GroupInvariants:
    """H_i(c, sub; M) for M in {"Z", "Q", n} (n meaning Z/n)."""
    s = _coerce_sub(c, sub)
    sizes, mats = _complex_mats(c, s)
    if i < 0 or i > c.dim:
        return GroupInvariants(0)
    return chain_homology(sizes, mats, i, _coeff_key(M))


def cohomology(c: Complex, i: int, M="Z", sub=None) -> GroupInvariants:
    """H^i(c, sub; M), computed from the transposed (cochain) complex."""
    s = _coerce_sub(c, sub)
    sizes, mats = _complex_mats(c, s)
    top = len(sizes) - 1
    if i < 0 or i > top:
        return GroupInvariants(0)
    # reindex: cochain degree k sits at chain position top - k
    csizes = [sizes[top - k] for k in range(top + 1)]
    cmats = {top - k + 1: _transpose_sparse(mats[k]) for k in range(1, top + 1)}
    # cmats[j] maps position j (degree top-j+1... ) -> position j-1
    return chain_homology(csizes, cmats, top - i, _coeff_key(M))


@dataclass
class RelativeHomology:
    dim: int
    invariants: GroupInvariants
    chain_ids: list[int]          # relative i-simplex ids, in vector order
    generators: list[list[int]]   # representing relative cycles (torsion first, then free)
    cycle_basis: list[list[int]]  # Z-basis of relative i-cycles


def relative_homology(c: Complex, sub, i: int, basis: bool = True) -> RelativeHomology:
    s = _coerce_sub(c, sub)
    cols = s.relative_ids(i)
    n = len(cols)
    d_in = relative_boundary(c, s, i)[0] if i >= 1 else []
    d_out = relative_boundary(c, s, i + 1)[0] if i + 1 <= c.dim else []
    d_in = d_in if d_in and n else None
    d_out = d_out if d_out and d_out[0] else None
    sq: Subquotient = subquotient(d_in, d_out, n, want_generators=basis)
    inv = GroupInvariants(sq.free_rank, tuple(sq.torsion))
    return RelativeHomology(i, inv, cols, sq.generators, sq.cycle_basis)


# --- universal coefficients ---------------------------------------------------

def _tensor(h: GroupInvariants, m) -> GroupInvariants:
    if m == "Q":
        return GroupInvariants(h.free)
    tors = [m] * h.free + [gcd(t, m) for t in h.torsion]
    return GroupInvariants(0, tuple(t for t in tors if t > 1))


def _tor(h: GroupInvariants, m) -> GroupInvariants:
    if m == "Q":
        return GroupInvariants(0)
    return GroupInvariants(0, tuple(g for g in (gcd(t, m) for t in h.torsion) if g > 1))


def _split_over_field(parts: Iterable[GroupInvariants], m) -> GroupInvariants:
    free = sum(x.free for x in parts)
    tors = tuple(t for x in parts for t in x.torsion)
    return GroupInvariants(free if m == "Q" else 0, tors)


@dataclass
class UCTReport:
    coefficient: str
    rows: list[dict]

    @property
    def ok(self) -> bool:
        return all(r["homology_ok"] and r["cohomology_ok"] for r in self.rows)


def universal_coeff_check(c: Complex, M) -> UCTReport:
    """Compute both sides of the homology and cohomology universal coefficient sequences."""
    m = _coeff_key(M)
    hz = [homology(c, i, "Z") for i in range(c.dim + 1)]
    rows = []
    for i in range(c.dim + 1):
        lhs = homology(c, i, m)
        ten = _tensor(hz[i], m)
        tor = _tor(hz[i - 1], m) if i >= 1 else GroupInvariants(0)
        rhs = _split_over_field([ten, tor], m)
        clhs = cohomology(c, i, m)
        hom = _tensor(hz[i], m)  # Hom(Z^r + sum Z/t, Z/m) has the same invariants as the tensor
        ext = _tor(hz[i - 1], m) if i >= 1 else GroupInvariants(0)  # Ext(Z/t, Z/m) = Z/gcd
        crhs = _split_over_field([hom, ext], m)
        h_ok = lhs.isomorphic(rhs)
        c_ok = clhs.isomorphic(crhs)
        if m != "Q":
            # exactness of 0 -> H_i (x) M -> H_i(M) -> Tor(H_{i-1}, M) -> 0 on orders
            h_ok = h_ok and lhs.order() == ten.order() * tor.order()
            c_ok = c_ok and clhs.order() == ext.order() * hom.order()
        rows.append({"i": i, "H": lhs, "tensor": ten, "tor": tor, "H^": clhs,
                     "ext": ext, "hom": hom, "homology_ok": h_ok, "cohomology_ok": c_ok})
    return UCTReport(str(M), rows)


# --- finite maps ---------------------------------------------------------------

class FiniteMap:
    """A simplicial map: vertex map plus (for generalized targets) explicit simplex maps."""

    def __init__(self, source: Complex, target: Complex, vertex_map: Mapping[int, int],
                 simplex_maps: Sequence[Mapping[int, int]] | None = None):
        self.source, self.target = source, target
        self.f0 = dict(vertex_map)
        if simplex_maps is None:
            simplex_maps = []
            for i in range(source.dim + 1):
                index = {vs: sid for sid, vs in enumerate(target.verts[i])} if i <= target.dim else {}
                layer = {}
                for sid, vs in enumerate(source.verts[i]):
                    img = tuple(sorted(self.f0[v] for v in vs))
                    if len(set(img)) != len(img):
                        raise NotFinite("vertex map is not injective on a simplex")
                    if img not in index:
                        raise ValueError("image of %r is not a simplex of the target" % (vs,))
                    layer[sid] = index[img]
                simplex_maps.append(layer)
        self.fi = [dict(x) for x in simplex_maps]
        for i, layer in enumerate(self.fi):
            for sid, tid in layer.items():
                img = [self.f0[v] for v in source.verts[i][sid]]
                if len(set(img)) != len(img) or sorted(img) != list(target.verts[i][tid]):
                    raise NotFinite("vertex compatibility fails for simplex %d/%d" % (i, sid))


def pushforward_finite(f: FiniteMap, ch: Chain, window: Iterable | None = None) -> Chain:
    """f_* on a finite chain; the sign is the parity of the image ordering."""
    out = Chain(ch.dim)
    for sid, x in ch.coeffs.items():
        tid = f.fi[ch.dim][sid]
        img = [f.f0[v] for v in f.source.verts[ch.dim][sid]]
        out.add_oriented(tid, img, x)
    return out


# --- the barycentric sphere -------------------------------------------------------

def barycentric_sphere(B: Sequence) -> tuple[Complex, Chain, list[frozenset]]:
    """Order complex of proper nonempty subsets of B and its fundamental (d-2)-cycle.

    Returns the complex, the fundamental chain and the list of vertex subsets
    (vertex id = index in that list).
    """
    B = list(B)
    d = len(B)
    if d < 2:
        raise ValueError("need |B| >= 2")
    pos = {b: k for k, b in enumerate(B)}
    subsets = [frozenset(s) for k in range(1, d) for s in itertools.combinations(B, k)]
    subsets.sort(key=lambda s: (len(s), sorted(pos[b] for b in s)))
    vid = {s: k for k, s in enumerate(subsets)}
    chains = []
    for g in itertools.permutations(B):
        chains.append(tuple(vid[frozenset(g[:k])] for k in range(1, d)))
    c = Complex.from_simplices(chains)
    index = {vs: sid for sid, vs in enumerate(c.verts[d - 2])}
    fund = Chain(d - 2)
    for g in itertools.permutations(B):
        chain = tuple(vid[frozenset(g[:k])] for k in range(1, d))
        sgn = perm_parity([pos[b] for b in g])
        fund.add_oriented(index[tuple(sorted(chain))], chain, sgn)
    return c, fund, subsets
