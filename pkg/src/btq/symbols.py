"""Modular symbols: pushforwards of apartment fundamental classes into the quotient pair.

For an F-basis with matrix B (columns = basis vectors) the apartment vertex
n is the lattice B diag(pi^n) O^d.  Its chambers carry the e-vector
orientation; the symbol is the sum of the oriented images of the chambers
that land outside the truncation.

Unimodular bases (B in GL_d(A)) are handled by translating the standard
apartment: the image of B diag(pi^n) is rho(B) applied to the image of
diag(pi^n), so the symbol depends only on rho(B) in G.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Iterator, Sequence

from .building import apartment_lattice, chamber_chain, fundamental_orientation, normalize_coord
from .bundles import poly_det
from .exactring.intmat import elementary_divisors
from .exactring.kfield import KElem
from .exactring.poly import Poly, all_polys, c_gcd
from .quotient.build import QuotientComplex, simplex_in_truncation
from .quotient.orbits import canonicalize, standardize
from .quotient.pair import PairHomology, pair_homology
from .simplicial import Chain, boundary, perm_parity


class EnumerationIncomplete(RuntimeError):
    pass


class NonStabilized(RuntimeError):
    pass


class RankDeficient(RuntimeError):
    pass


def bound_constants(d: int, p: int, q0: int | None = None) -> tuple[int, int]:
    """(e(d), N(d)) with e(d) = (d-2)(1 + (d-1)(d-2)/2) and N(d) = prod_{i<=d} (q0^i - 1)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    q0 = p if q0 is None else q0
    e = (d - 2) * (2 + (d - 1) * (d - 2)) // 2
    return e, prod(q0 ** i - 1 for i in range(1, d + 1))


# --- bases ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BasisTuple:
    """d vectors over A (denominators cleared row by row, which the symbol ignores)."""

    rows: tuple[tuple[Poly, ...], ...]
    p: int

    @classmethod
    def of(cls, rows: Sequence[Sequence], p: int) -> "BasisTuple":
        out = []
        for r in rows:
            ks = [KElem.of(x, p) for x in r]
            den = Poly.const(1, p)
            for x in ks:
                g = den.gcd(x.den)
                den = den * (x.den // g)
            out.append(tuple((x * KElem(den)).num for x in ks))
        return cls(tuple(out), p)

    @property
    def d(self) -> int:
        return len(self.rows)

    def matrix(self) -> list[list[Poly]]:
        """B with the vectors as columns."""
        return [[self.rows[j][i] for j in range(self.d)] for i in range(self.d)]

    def det(self) -> Poly:
        return poly_det(self.matrix())

    def is_degenerate(self) -> bool:
        return self.det().deg < 0

    def permuted(self, perm: Sequence[int]) -> "BasisTuple":
        return BasisTuple(tuple(self.rows[k] for k in perm), self.p)

    def scaled(self, i: int, a: Poly) -> "BasisTuple":
        rows = list(self.rows)
        rows[i] = tuple(a * x for x in rows[i])
        return BasisTuple(tuple(rows), self.p)

    def acted(self, g: Sequence[Sequence[Poly]]) -> "BasisTuple":
        """Rows v_j replaced by g v_j."""
        d = self.d
        zero = Poly._raw((), self.p)
        rows = tuple(tuple(sum((g[i][k] * v[k] for k in range(d)), zero) for i in range(d))
                     for v in self.rows)
        return BasisTuple(rows, self.p)

    def to_json(self) -> list[list[str]]:
        return [[repr(x) for x in r] for r in self.rows]


@dataclass
class RelativeClass:
    """Chamber-coordinate vector of a relative cycle; equal vectors mean equal classes."""

    vector: tuple[int, ...]
    alpha: int
    basis: BasisTuple | None = None

    def __eq__(self, other) -> bool:
        return isinstance(other, RelativeClass) and self.vector == other.vector and self.alpha == other.alpha

    def __add__(self, other: "RelativeClass") -> "RelativeClass":
        return RelativeClass(tuple(a + b for a, b in zip(self.vector, other.vector)), self.alpha)

    def __neg__(self) -> "RelativeClass":
        return RelativeClass(tuple(-a for a in self.vector), self.alpha)

    def __sub__(self, other: "RelativeClass") -> "RelativeClass":
        return self + (-other)

    def is_zero(self) -> bool:
        return not any(self.vector)


# --- the pushforward engine ----------------------------------------------------------

def _region(d: int, spread: int) -> Iterator[tuple[int, ...]]:
    """Apartment vertices (last coordinate 0) with max - min <= spread."""
    for rest in itertools.product(range(-spread, spread + 1), repeat=d - 1):
        n = rest + (0,)
        if max(n) - min(n) <= spread:
            yield n


def _chambers_in(d: int, spread: int) -> list[tuple[tuple[int, ...], ...]]:
    out = set()
    for n in _region(d, spread):
        for w in itertools.permutations(range(d)):
            ch = [normalize_coord(m) for m in chamber_chain(n, w)]
            if max(max(v) - min(v) for v in ch) <= spread:
                out.add(tuple(sorted(ch)))
    return sorted(out)


class SymbolEngine:
    """Pushes apartment classes into one quotient pair."""

    def __init__(self, Q: QuotientComplex, H: PairHomology | None = None):
        self.Q = Q
        self.d, self.p = Q.d, Q.p
        self.H = H or pair_homology(Q)
        self.pos = {sid: k for k, sid in enumerate(self.H.chambers)}
        self.bound = Q.alpha + 2 * (self.d - 1)
        self._standard = None
        self._memo: dict[tuple, tuple[int, ...]] = {}

    # spread bound for relative chambers of the apartment of B with deg det B = delta
    def spread(self, delta: int) -> int:
        return (self.d - 1) * (self.bound - 1) + delta

    def _standard_data(self):
        """Relative chambers of the standard apartment with their orbit data, computed once."""
        if self._standard is not None:
            return self._standard
        Q, p, G = self.Q, self.p, self.Q.G
        out = []
        for ch in _chambers_in(self.d, self.spread(0)):
            order = fundamental_orientation(list(ch))
            types = [_type_of(x) for x in order]
            if simplex_in_truncation(types, Q.alpha):
                continue
            mats = [_std_lattice(x, p) for x in order]
            std = [standardize(m, p) for m in mats]
            c = canonicalize(mats, p, std)
            verts = [(s.a, G.rho_index(s.h_inv)) for s in std]
            out.append((c.key, G.rho_index(c.h), verts))
        self._standard = out
        return out

    def unimodular_vector(self, u: int) -> tuple[int, ...]:
        """Symbol vector of any basis matrix B in GL_d(A) with rho(B) = G.elems[u]."""
        Q, G = self.Q, self.Q.G
        top = self.d - 1
        vec = [0] * self.H.n
        for key, h, verts in self._standard_data():
            sid = Q.simplex_id(top, key, G.mul(u, h))
            ids = [Q.vertex_id(a, G.mul(u, r)) for a, r in verts]
            vec[self.pos[sid]] += perm_parity(ids)
        return tuple(vec)

    def chain(self, basis: BasisTuple, general: bool = False) -> Chain:
        """The pushed-forward chain on relative chambers (quotient chamber ids as keys).

        general=True bypasses the unimodular shortcut (used to cross-check it).
        """
        top = self.d - 1
        ch = Chain(top)
        if basis.is_degenerate():
            return ch
        B = basis.matrix()
        det = poly_det(B)
        if det.deg == 0 and not general:
            vec = self.unimodular_vector(self.Q.G.rho_index(B))
            return Chain(top, {self.H.chambers[k]: v for k, v in enumerate(vec) if v})
        Q, p = self.Q, self.p
        bm = [[KElem(x) for x in r] for r in B]
        S = self.spread(det.deg)
        std_cache: dict = {}

        def std_of(x):
            if x not in std_cache:
                std_cache[x] = standardize(apartment_lattice(bm, x, p), p)
            return std_cache[x]

        for cham in _chambers_in(self.d, S):
            order = fundamental_orientation(list(cham))
            std = [std_of(x) for x in order]
            if simplex_in_truncation([s.a for s in std], Q.alpha):
                continue
            mats = [apartment_lattice(bm, x, p) for x in order]
            loc = Q.locate(mats, std)
            if loc is None:
                raise EnumerationIncomplete("apartment chamber outside the emitted quotient")
            ids = [Q.locate_vertex(m, s) for m, s in zip(mats, std)]
            ch.add_oriented(loc[1], ids, 1)
        return ch

    def vector(self, basis: BasisTuple, general: bool = False) -> tuple[int, ...]:
        key = (basis, general)
        if key in self._memo:
            return self._memo[key]
        ch = self.chain(basis, general)
        vec = [0] * self.H.n
        for sid, v in ch.coeffs.items():
            if sid not in self.pos:
                raise AssertionError("symbol chain touches a truncation chamber")
            vec[self.pos[sid]] += v
        if len(self._memo) > 4096:
            self._memo.clear()
        self._memo[key] = vec = tuple(vec)
        return vec

    def symbol(self, basis: BasisTuple) -> RelativeClass:
        return RelativeClass(self.vector(basis), self.Q.alpha, basis)


def _type_of(x: Sequence[int]) -> tuple[int, ...]:
    a = sorted((-v for v in x), reverse=True)
    return tuple(v - a[-1] for v in a)


def _std_lattice(x: Sequence[int], p: int):
    d = len(x)
    return [[KElem.pi(p, x[i]) if i == j else KElem.const(0, p) for j in range(d)] for i in range(d)]


def _engine(Q: QuotientComplex) -> SymbolEngine:
    eng = getattr(Q, "_symbol_engine", None)
    if eng is None:
        eng = SymbolEngine(Q)
        Q._symbol_engine = eng
    return eng


def apartment_core_chain(basis, Q: QuotientComplex) -> Chain:
    b = basis if isinstance(basis, BasisTuple) else BasisTuple.of(basis, Q.p)
    return _engine(Q).chain(b)


def modular_symbol(basis, Q: QuotientComplex) -> RelativeClass:
    b = basis if isinstance(basis, BasisTuple) else BasisTuple.of(basis, Q.p)
    return _engine(Q).symbol(b)


def boundary_in_truncation(ch: Chain, Q: QuotientComplex) -> bool:
    """Relative-cycle property: the boundary lives on truncation faces only."""
    if ch.dim == 0:
        return True
    bd = boundary(Q.complex, ch)
    return all(Q.in_truncation(ch.dim - 1, f) for f in bd.coeffs)


# --- the MS lattice ------------------------------------------------------------------

@dataclass
class MSLattice:
    columns: list[tuple[int, ...]]
    divisors: list[int]
    stream: str
    stabilized: bool
    levels: list[dict] = field(default_factory=list)
    provenance: list = field(default_factory=list)
    certificate: str = ""

    @property
    def rank(self) -> int:
        return len(self.divisors)

    def contains(self, vec: Sequence[int]) -> bool:
        if not any(vec):
            return True
        return elementary_divisors([list(c) for c in self.columns] + [list(vec)]) == self.divisors


def _span_state(cols: list[tuple[int, ...]]) -> list[int]:
    return elementary_divisors([list(c) for c in cols]) if cols else []


def _lift_degree(L) -> int:
    return max(max(x.deg for x in r) for r in L)


def unimodular_stream(Q: QuotientComplex) -> Iterator[tuple[int, int]]:
    """(level, G-index) for G = rho(GL_d(A)), ordered by max entry degree of the stored lift."""
    G = Q.G
    order = sorted(range(len(G)), key=lambda u: (max(_lift_degree(G.lifts[u]), 0), u))
    for u in order:
        yield max(_lift_degree(G.lifts[u]), 0), u


def primitive_vectors(p: int, d: int, max_deg: int) -> list[tuple[Poly, ...]]:
    """Nonzero vectors in A^d of degree <= max_deg, coprime entries, first nonzero entry monic."""
    polys = all_polys(p, max_deg)
    out = []
    for v in itertools.product(polys, repeat=d):
        nz = [x for x in v if x.deg >= 0]
        if not nz or nz[0].c[-1] != 1:
            continue
        g = nz[0].c
        for x in nz[1:]:
            g = c_gcd(g, x.c, p)
        if len(g) == 1:
            out.append(tuple(v))
    return out


def all_bases_stream(p: int, d: int, max_deg: int) -> Iterator[tuple[int, BasisTuple]]:
    """Ordered bases of primitive vectors, by level = max entry degree."""
    by_level: dict[int, list] = {}
    for v in primitive_vectors(p, d, max_deg):
        by_level.setdefault(max(x.deg for x in v), []).append(v)
    seen: list = []
    for lev in sorted(by_level):
        seen.extend(by_level[lev])
        for tup in itertools.permutations(seen, d):
            if max(max(x.deg for x in v) for v in tup) != lev:
                continue
            b = BasisTuple(tuple(tup), p)
            if not b.is_degenerate():
                yield lev, b


_WORKER_ENGINE: SymbolEngine | None = None


def _init_worker(Q):
    global _WORKER_ENGINE
    _WORKER_ENGINE = SymbolEngine(Q)


def _worker_vector(b):
    return _WORKER_ENGINE.vector(b)


def ms_lattice(Q: QuotientComplex, stream: str = "unimodular", max_deg: int = 1,
               jobs: int = 1, quiet_levels: int = 2) -> MSLattice:
    """Accumulate symbol vectors level by level and report the span."""
    eng = _engine(Q)
    cols: list[tuple[int, ...]] = []
    prov: list = []
    levels: list[dict] = []
    if stream == "unimodular":
        seen_vecs = set()
        by_level: dict[int, list[int]] = {}
        for lev, u in unimodular_stream(Q):
            by_level.setdefault(lev, []).append(u)
        for lev in sorted(by_level):
            Q.budget.check("unimodular symbol stream")
            for u in by_level[lev]:
                v = eng.unimodular_vector(u)
                if v not in seen_vecs:
                    seen_vecs.add(v)
                    cols.append(v)
                    prov.append(u)
            levels.append({"level": lev, "generators": len(by_level[lev]), "divisors": _span_state(cols)})
        cert = "residue images cover G (%d elements)" % len(Q.G)
        stabilized = True
    elif stream == "all":
        batches: dict[int, list[BasisTuple]] = {}
        for lev, b in all_bases_stream(Q.p, Q.d, max_deg):
            batches.setdefault(lev, []).append(b)
        pool = ProcessPoolExecutor(jobs, initializer=_init_worker, initargs=(Q,)) if jobs > 1 else None
        try:
            for lev in sorted(batches):
                Q.budget.check("all-bases symbol stream")
                bs = batches[lev]
                vecs = list(pool.map(_worker_vector, bs, chunksize=8)) if pool else [eng.vector(b) for b in bs]
                for b, v in zip(bs, vecs):
                    if any(v):
                        cols.append(v)
                        prov.append(b.to_json())
                levels.append({"level": lev, "generators": len(bs), "divisors": _span_state(cols)})
        finally:
            if pool:
                pool.shutdown()
        quiet = 0
        for a, b in zip(levels, levels[1:]):
            quiet = quiet + 1 if a["divisors"] == b["divisors"] else 0
        stabilized = quiet >= quiet_levels - 1 and len(levels) >= quiet_levels
        cert = "span unchanged over %d consecutive levels" % (quiet + 1) if stabilized else \
            "no quiet levels up to degree %d" % max_deg
    else:
        raise ValueError("unknown stream %r" % stream)
    return MSLattice(cols, _span_state(cols), stream, stabilized, levels, prov, cert)


@dataclass
class IndexReport:
    rank_ms: int
    rank_h: int
    rank_ok: bool
    index: int | None          # None = infinite
    exponent: int | None
    divisors: list[int]


def index_and_exponent(L: MSLattice, H: PairHomology) -> IndexReport:
    """[H : MS] and the exponent of H/MS from the elementary divisors of the symbol matrix.

    H is saturated in the chamber lattice, so when the ranks agree H/MS is the
    torsion of Z^N / MS.
    """
    for c in L.columns:
        if not H.is_cycle(c):
            raise AssertionError("a symbol vector is not a relative cycle")
    ok = L.rank == H.rank
    if not ok:
        return IndexReport(L.rank, H.rank, False, None, None, list(L.divisors))
    tors = [x for x in L.divisors if x > 1]
    return IndexReport(L.rank, H.rank, True, prod(tors) if tors else 1, tors[-1] if tors else 1,
                       list(L.divisors))


def index_in_kernel_basis(L: MSLattice, H: PairHomology) -> int | None:
    """Cross-check: [H : MS] via coordinates in an explicit kernel basis."""
    if H.basis is None:
        raise ValueError("kernel basis required")
    coords = [H.coordinates(c) for c in L.columns]
    if not coords:
        return 1 if H.rank == 0 else None
    divs = elementary_divisors([list(c) for c in coords])
    if len(divs) != H.rank:
        return None
    return prod(divs)


# --- Ash-Rudolph relations ------------------------------------------------------------

def cocycle_sum(vectors: Sequence[Sequence], Q: QuotientComplex) -> RelativeClass:
    """sum_i (-1)^i [q_0, ..., q_i omitted, ..., q_d]; degenerate tuples contribute zero."""
    eng = _engine(Q)
    acc = [0] * eng.H.n
    for i in range(len(vectors)):
        b = BasisTuple.of([v for k, v in enumerate(vectors) if k != i], Q.p)
        v = eng.vector(b)
        s = -1 if i % 2 else 1
        acc = [a + s * x for a, x in zip(acc, v)]
    return RelativeClass(tuple(acc), Q.alpha)


def antisymmetry_holds(basis, perm: Sequence[int], Q: QuotientComplex) -> bool:
    b = basis if isinstance(basis, BasisTuple) else BasisTuple.of(basis, Q.p)
    eng = _engine(Q)
    v, w = eng.vector(b), eng.vector(b.permuted(perm))
    s = perm_parity(perm)
    return all(y == s * x for x, y in zip(v, w))


def scaling_holds(basis, i: int, a: Poly, Q: QuotientComplex) -> bool:
    b = basis if isinstance(basis, BasisTuple) else BasisTuple.of(basis, Q.p)
    eng = _engine(Q)
    return eng.vector(b) == eng.vector(b.scaled(i, a))


def random_vectors(rng, p: int, d: int, max_deg: int, k: int) -> list[tuple[Poly, ...]]:
    out = []
    while len(out) < k:
        v = tuple(Poly([rng.randrange(p) for _ in range(max_deg + 1)], p) for _ in range(d))
        if any(x.deg >= 0 for x in v):
            out.append(v)
    return out


def symbol_vectors(bases: Iterable[BasisTuple], Q: QuotientComplex) -> list[tuple[int, ...]]:
    eng = _engine(Q)
    return [eng.vector(b) for b in bases]
