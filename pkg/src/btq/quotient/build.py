"""Finite quotient complexes Gamma\\BT relative to the truncation, transporters and stabilizers.

Gamma_I is normal in GL_d(A) with GL_d(A)/Gamma_I = G, so the Gamma_I-orbits
inside the GL_d(A)-orbit of sigma_0 are the cosets G / rho(Stab sigma_0).  A
quotient simplex is a pair (orbit key of sigma_0, coset of g) standing for
the orbit of g~ sigma_0 with g~ any lift of g.
"""
from __future__ import annotations

import itertools
import os
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ..building import LatticeClassKey, flags, vertex_key
from ..bundles import poly_mat_inverse, to_kmat
from ..exactring.kfield import mat_mul
from ..exactring.poly import Poly
from ..simplicial import Complex, Subcomplex
from .levels import GroupSpec, LevelGroup, SearchBudgetExceeded
from .orbits import (OrbitKey, Standardized, _pmul, blocks_of, canonicalize,
                     flag_stabilizer, lift_parabolic, parabolic, simplex_lattices, stab_order,
                     standardize)


class Budget:
    """Wall-clock budget in milliseconds (BTQ_BUDGET_MS or explicit); None = unlimited."""

    def __init__(self, ms: float | None = None):
        if ms is None:
            env = os.environ.get("BTQ_BUDGET_MS")
            ms = float(env) if env else None
        self.deadline = None if ms is None else time.monotonic() + ms / 1000.0

    def check(self, what: str = "computation") -> None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise SearchBudgetExceeded("time budget exhausted during %s" % what)


def delta_of(a: Sequence[int]) -> tuple[int, ...]:
    return tuple(a[i] - a[i + 1] for i in range(len(a) - 1))


def simplex_in_truncation(types: Iterable[Sequence[int]], alpha: int) -> bool:
    """A simplex lies in X^(alpha) iff some index i has Delta p(i) >= alpha at every vertex."""
    deltas = [delta_of(a) for a in types]
    if not deltas or not deltas[0]:
        return False
    return any(all(dl[i] >= alpha for dl in deltas) for i in range(len(deltas[0])))


def types_below(d: int, bound: int) -> list[tuple[int, ...]]:
    """Splitting types (a_d = 0) with every gap < bound."""
    out = []
    for gaps in itertools.product(range(bound), repeat=d - 1):
        a = [0] * d
        for i in range(d - 2, -1, -1):
            a[i] = a[i + 1] + gaps[i]
        out.append(tuple(a))
    return sorted(out)


@dataclass
class OrbitData:
    key: OrbitKey
    dim: int
    vertex_std: list          # per chain vertex: (type a_k, rho-index of h_k^-1, h_k^-1)
    faces: list               # per omitted chain position: (face key, rho-index of h_f, h_f)
    relative: bool
    stab_gl: int
    H: frozenset = frozenset()
    coset_of: list = field(default_factory=list)
    coset_reps: list = field(default_factory=list)

    @property
    def types(self) -> list[tuple[int, ...]]:
        return [v[0] for v in self.vertex_std]


class QuotientComplex:
    """The emitted finite complex: closure of the simplices outside X^(alpha)."""

    def __init__(self, spec: GroupSpec, alpha: int, G: LevelGroup, orbits: dict[OrbitKey, OrbitData],
                 budget: Budget | None = None):
        self.spec, self.alpha, self.G, self.orbits = spec, alpha, G, orbits
        self.p, self.d = spec.q, spec.d
        self.budget = budget or Budget(None)
        self._assemble()

    # -- assembly ------------------------------------------------------------------
    def _assemble(self) -> None:
        G = self.G
        by_dim: dict[int, list[tuple]] = {}
        for key, od in self.orbits.items():
            for rep in od.coset_reps:
                by_dim.setdefault(od.dim, []).append((key, rep))
        top = max(by_dim) if by_dim else -1
        self.cells: list[list[tuple]] = []
        self.ids: dict[tuple, int] = {}
        for i in range(top + 1):
            layer = sorted(by_dim.get(i, []), key=lambda kr: (kr[0], G.elems[kr[1]]))
            self.cells.append(layer)
            for sid, kr in enumerate(layer):
                self.ids[(i, kr[0], kr[1])] = sid
        verts: list[list[tuple[int, ...]]] = []
        faces: list[list[tuple[int, ...]]] = []
        self.chain_vertices: list[list[tuple[int, ...]]] = []
        for i, layer in enumerate(self.cells):
            vl, fl, cl = [], [], []
            for key, rep in layer:
                od = self.orbits[key]
                if i == 0:
                    sid = self.ids[(0, key, rep)]
                    vl.append((sid,))
                    fl.append(())
                    cl.append((sid,))
                    continue
                chain = [self.vertex_id(a_k, G.mul(rep, hk)) for a_k, hk, _ in od.vertex_std]
                face_chain = [self.simplex_id(i - 1, fkey, G.mul(rep, hf)) for fkey, hf, _ in od.faces]
                order = sorted(range(i + 1), key=lambda k: chain[k])
                vl.append(tuple(chain[k] for k in order))
                fl.append(tuple(face_chain[k] for k in order))
                cl.append(tuple(chain))
            verts.append(vl)
            faces.append(fl)
            self.chain_vertices.append(cl)
        self.complex = Complex(verts, faces)
        self.relative = [[self.orbits[key].relative for key, _ in layer] for layer in self.cells]
        self.truncation = Subcomplex(self.complex, {
            i: [s for s, r in enumerate(rel) if not r] for i, rel in enumerate(self.relative)})

    def vertex_id(self, a: tuple, g: int) -> int:
        od = self.orbits[(a, ())]
        return self.ids[(0, (a, ()), od.coset_reps[od.coset_of[g]])]

    def simplex_id(self, dim: int, key: OrbitKey, g: int) -> int:
        od = self.orbits[key]
        return self.ids[(dim, key, od.coset_reps[od.coset_of[g]])]

    # -- lookups of building simplices ---------------------------------------------
    def locate(self, mats: Sequence, std: Sequence[Standardized] | None = None) -> tuple[int, int] | None:
        """(dim, id) of the quotient simplex of the building simplex with these vertex lattices."""
        c = canonicalize(mats, self.p, std)
        if c.key not in self.orbits:
            return None
        dim = len(mats) - 1
        return dim, self.simplex_id(dim, c.key, self.G.rho_index(c.h))

    def locate_vertex(self, mat, std: Standardized | None = None) -> int | None:
        s = std or standardize(mat, self.p)
        if (s.a, ()) not in self.orbits:
            return None
        return self.vertex_id(s.a, self.G.rho_index(s.h_inv))

    # -- per-simplex data ------------------------------------------------------------
    def key_of(self, dim: int, sid: int) -> OrbitKey:
        return self.cells[dim][sid][0]

    def rep_lift(self, dim: int, sid: int) -> list[list[Poly]]:
        return self.G.lifts[self.cells[dim][sid][1]]

    def stabilizer_order(self, dim: int, sid: int) -> int:
        od = self.orbits[self.key_of(dim, sid)]
        return od.stab_gl // len(od.H)

    def splitting_types(self, dim: int, sid: int) -> list[tuple[int, ...]]:
        return self.orbits[self.key_of(dim, sid)].types

    def in_truncation(self, dim: int, sid: int) -> bool:
        return not self.relative[dim][sid]

    def representative(self, dim: int, sid: int) -> list:
        """Vertex lattices of the representative simplex g~ sigma_0 (chain order)."""
        a, flag = self.key_of(dim, sid)
        g = to_kmat(self.rep_lift(dim, sid))
        return [mat_mul(g, m) for m in simplex_lattices(a, flag, self.p)]

    def rep_keys(self, dim: int, sid: int) -> list[LatticeClassKey]:
        return [vertex_key(m, self.p) for m in self.representative(dim, sid)]

    def stabilizer_elements(self, dim: int, sid: int, cap: int = 4096) -> list[list[list[Poly]]]:
        """Elements of Gamma_I fixing the representative simplex (conjugated from sigma_0)."""
        key = self.key_of(dim, sid)
        n = self.stabilizer_order(dim, sid)
        if n > cap:
            raise SearchBudgetExceeded("stabilizer of order %d exceeds cap %d" % (n, cap))
        ident = tuple(self.G.R.const(int(i == j)) for i in range(self.d) for j in range(self.d))
        sols = stab_solutions(key[0], key[1], ident, self.G, budget=max(cap * 64, 1 << 16))
        g = self.rep_lift(dim, sid)
        gi = poly_mat_inverse(g)
        return [_pmul(_pmul(g, s), gi) for s in sols]

    def core_vertices(self) -> list[int]:
        return [s for s in range(self.complex.count(0)) if self.relative[0][s]]

    def relative_ids(self, dim: int) -> list[int]:
        return self.truncation.relative_ids(dim)


# --- enumeration of Stab(v_a) elements with prescribed residues ---------------------

def _entry_solutions(n: int, top: int, target: int | None, G: LevelGroup) -> list[Poly]:
    """Polynomials f with f = top*t^n + (deg < n terms) and rho(f) = target (if given)."""
    p = G.q
    R = G.R
    lead = Poly.const(top, p).shift(n) if top else Poly._raw((), p)
    if target is None or R.k == 0:
        return [lead + Poly(c, p) for c in _all_coeffs(p, n)]
    need = R.decode(R.add[target][R.neg[R.encode(lead)]])
    k = R.k
    if n <= k:
        return [lead + need] if need.deg < n else []
    m = R.m
    return [lead + need + m * Poly(c, p) for c in _all_coeffs(p, n - k)]


def _all_coeffs(p: int, n: int):
    return itertools.product(range(p), repeat=max(n, 0))


def stab_solutions(a: Sequence[int], flag, target: tuple | None, G: LevelGroup,
                   budget: int = 1 << 20) -> list[list[list[Poly]]]:
    """All s in Stab(v_a) (with residue in Stab(flag) when flag is not None) with rho(s) = target."""
    p, d = G.q, len(a)
    blocks = blocks_of(a)
    Ps = flag_stabilizer(blocks, flag, p) if flag is not None else parabolic(blocks, p)
    zero = Poly._raw((), p)
    out = []
    for P in Ps:
        choices = []
        total = 1
        ok = True
        for i in range(d):
            for j in range(d):
                n = a[i] - a[j]
                tgt = None if target is None else target[i * d + j]
                if n < 0:
                    if tgt is not None and G.R.k and tgt != 0:
                        ok = False
                    choices.append([zero])
                    continue
                sols = _entry_solutions(n, P[i][j], tgt, G)
                if not sols:
                    ok = False
                    break
                choices.append(sols)
                total *= len(sols)
            if not ok:
                break
        if not ok:
            continue
        if total * len(Ps) > budget:
            raise SearchBudgetExceeded("transporter enumeration of size %d at degree bound %d"
                                       % (total * len(Ps), max(a) - min(a)))
        for entries in itertools.product(*choices):
            out.append([list(entries[i * d:(i + 1) * d]) for i in range(d)])
    return out


# --- transporters -----------------------------------------------------------------

@dataclass
class Transporter:
    source: list
    target: list
    elements: list

    def __len__(self) -> int:
        return len(self.elements)


def _as_mats(x) -> list:
    if hasattr(x, "vertex_mats"):
        return x.vertex_mats()
    if isinstance(x, LatticeClassKey):
        return [x.matrix()]
    if x and isinstance(x[0][0], list) or (x and isinstance(x[0][0], tuple)):
        return [list(map(list, m)) for m in x]
    return [x]


def transporter(x, y, spec: GroupSpec, G: LevelGroup | None = None, budget: int = 1 << 20) -> Transporter:
    """{gamma in Gamma : gamma x = y} for building simplices (vertex lattice lists or BTSimplex)."""
    p = spec.q
    G = G or LevelGroup(spec)
    xs, ys = _as_mats(x), _as_mats(y)
    if len(xs) != len(ys):
        return Transporter(xs, ys, [])
    sx = [standardize(m, p) for m in xs]
    sy = [standardize(m, p) for m in ys]
    target_keys = sorted(str(vertex_key(m, p)) for m in ys)
    found: dict = {}
    x0 = sx[0]
    for yk in sy:
        if yk.a != x0.a:
            continue
        T = G.mul_codes(G.rho(yk.h), G.rho(x0.h_inv))
        tgt = None if G.R.k == 0 else T
        for s in stab_solutions(x0.a, None, tgt, G, budget):
            gamma = _pmul(_pmul(yk.h_inv, s), x0.h)
            if len(xs) > 1:
                imgs = sorted(str(vertex_key(mat_mul(to_kmat(gamma), m), p)) for m in xs)
                if imgs != target_keys:
                    continue
            found[tuple(tuple(f.c for f in r) for r in gamma)] = gamma
    return Transporter(xs, ys, [found[k] for k in sorted(found)])


def stabilizer(sigma, spec: GroupSpec, G: LevelGroup | None = None, budget: int = 1 << 20) -> list:
    return transporter(sigma, sigma, spec, G, budget).elements


# --- the quotient builder -----------------------------------------------------------

def build_quotient(spec: GroupSpec, alpha: int, budget_ms: float | None = None,
                   G: LevelGroup | None = None) -> QuotientComplex:
    d, p = spec.d, spec.q
    if alpha <= d - 1:
        raise ValueError("alpha must exceed d-1 = %d" % (d - 1))
    budget = Budget(budget_ms)
    bound = alpha + 2 * (d - 1)
    T = set(types_below(d, bound))
    orbit_info: dict[OrbitKey, tuple] = {}
    queue: list[OrbitKey] = []
    for a in sorted(T):
        budget.check("orbit enumeration")
        for length in range(d):
            for fl in flags(p, d, length) if length else [()]:
                mats = simplex_lattices(a, fl, p)
                std = [standardize(m, p) for m in mats]
                types = [s.a for s in std]
                if any(t not in T for t in types) or simplex_in_truncation(types, alpha):
                    continue
                c = canonicalize(mats, p, std)
                if c.key not in orbit_info:
                    orbit_info[c.key] = None
                    queue.append(c.key)
    relative_keys = set(queue)
    G = G or LevelGroup(spec)
    orbits: dict[OrbitKey, OrbitData] = {}
    while queue:
        budget.check("face closure")
        key = queue.pop()
        if key in orbits:
            continue
        a, fl = key
        mats = simplex_lattices(a, fl, p)
        std = [standardize(m, p) for m in mats]
        vstd = [(s.a, G.rho_index(s.h_inv), s.h_inv) for s in std]
        faces = []
        if len(mats) > 1:
            for k in range(len(mats)):
                sub = mats[:k] + mats[k + 1:]
                c = canonicalize(sub, p, std[:k] + std[k + 1:])
                faces.append((c.key, G.rho_index(c.h), c.h))
                if c.key not in orbits:
                    queue.append(c.key)
        types = [s.a for s in std]
        rel = key in relative_keys
        if rel == simplex_in_truncation(types, alpha):
            raise AssertionError("relative flag inconsistent for %r" % (key,))
        orbits[key] = OrbitData(key, len(mats) - 1, vstd, faces, rel, stab_order(key, p))
    for key, od in orbits.items():
        budget.check("coset partition")
        od.H = residue_stabilizer(key, G)
        _partition(od, G)
    return QuotientComplex(spec, alpha, G, orbits, budget)


def residue_stabilizer(key: OrbitKey, G: LevelGroup) -> frozenset:
    """rho(Stab sigma_0) as a set of G-indices."""
    a, fl = key
    d, p, R = len(a), G.q, G.R
    out = set()
    lows = []
    for i in range(d):
        for j in range(d):
            n = a[i] - a[j]
            lows.append(R.low_degree(n) if n > 0 else [0])
    for P in flag_stabilizer(blocks_of(a), fl, p):
        base = G.rho(lift_parabolic(P, a, p))
        for extra in itertools.product(*lows):
            code = tuple(R.add[x][y] for x, y in zip(base, extra))
            out.add(G.index[code])
    return frozenset(out)


def _partition(od: OrbitData, G: LevelGroup) -> None:
    coset_of = [-1] * len(G)
    reps = []
    H = sorted(od.H)
    for g in range(len(G)):
        if coset_of[g] >= 0:
            continue
        cid = len(reps)
        reps.append(g)
        for h in H:
            coset_of[G.mul(g, h)] = cid
    od.coset_of = coset_of
    od.coset_reps = reps


# --- export -----------------------------------------------------------------------

def _flag_json(flag) -> list:
    return [[list(v) for v in W] for W in flag]


def _mat_json(m) -> list:
    return [[list(x.c) for x in r] for r in m]


def quotient_to_json(Q: QuotientComplex, max_elements: int = 64) -> dict:
    """Deterministic document describing the emitted quotient and its truncation."""
    c = Q.complex
    cells = []
    for i in range(c.dim + 1):
        for sid in range(c.count(i)):
            key = Q.key_of(i, sid)
            order = Q.stabilizer_order(i, sid)
            elems = None
            if order <= max_elements:
                elems = sorted(_mat_json(g) for g in Q.stabilizer_elements(i, sid, max_elements))
            cells.append({
                "dim": i,
                "id": sid,
                "vertices": list(c.verts[i][sid]),
                "faces": list(c.faces[i][sid]) if i else [],
                "orbit": {"type": list(key[0]), "flag": _flag_json(key[1])},
                "coset_rep": list(Q.G.elems[Q.cells[i][sid][1]]),
                "rep_key": [str(k) for k in Q.rep_keys(i, sid)],
                "splitting_type": [list(a) for a in Q.splitting_types(i, sid)],
                "stab_order": order,
                "in_truncation": Q.in_truncation(i, sid),
                "stabilizer_elements": elems,
            })
    return {
        "kind": "quotient",
        "group": {"q": Q.spec.q, "d": Q.spec.d, "ideal": Q.spec.ideal_str(), "level_group_order": len(Q.G)},
        "alpha": Q.alpha,
        "counts": c.counts(),
        "core_vertices": Q.core_vertices(),
        "simplices": cells,
    }


def render_dot(vertices: Sequence[tuple], edges: Sequence[tuple]) -> str:
    """vertices: (id, stab order, splitting type, in truncation); edges: (a, b, stab order)."""
    lines = ["graph quotient {"]
    for v, order, typ, trunc in vertices:
        lines.append('  v%d [label="%d", type="%s", style=%s];'
                     % (v, order, ",".join(map(str, typ)), "dashed" if trunc else "solid"))
    for a, b, order in edges:
        lines.append('  v%d -- v%d [label="%d"];' % (a, b, order))
    lines.append("}")
    return "\n".join(lines) + "\n"


def quotient_to_dot(Q: QuotientComplex) -> str:
    """DOT graph of a d = 2 quotient; labels are stabilizer orders, the collar is dashed."""
    if Q.d != 2:
        raise ValueError("DOT export is for d = 2 quotient graphs")
    c = Q.complex
    verts = [(v, Q.stabilizer_order(0, v), Q.splitting_types(0, v)[0], Q.in_truncation(0, v))
             for v in range(c.count(0))]
    edges = [c.verts[1][e] + (Q.stabilizer_order(1, e),) for e in range(c.count(1) if c.dim >= 1 else 0)]
    return render_dot(verts, edges)
