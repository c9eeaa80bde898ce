"""Top-degree homology of the quotient pair (Q, Q^(alpha)), level transitions and orientation characters.

There are no d-simplices, so H_{d-1}(pair) is the kernel of the relative
boundary on the relative chambers: a saturated sublattice of Z^N.  Classes
are therefore compared as chamber vectors without any quotienting.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Sequence

from ..building import vertex_key
from ..bundles import to_kmat
from ..exactring.intmat import det, elementary_divisors, smith_normal_form
from ..exactring.kfield import mat_mul
from ..simplicial import perm_parity
from .build import QuotientComplex, build_quotient
from .levels import GroupSpec


@dataclass
class PairHomology:
    alpha: int
    dim: int
    chambers: list[int]                  # relative top-simplex ids (vector order)
    faces: list[int]                     # relative codim-1 ids (row order)
    boundary: dict[int, dict[int, int]]  # sparse columns {col: {row: coeff}}
    rank: int
    basis: list[list[int]] | None = None
    coord_rows: list[list[int]] | None = None   # left inverse of the basis on cycles

    @property
    def n(self) -> int:
        return len(self.chambers)

    def dense_boundary(self) -> list[list[int]]:
        M = [[0] * self.n for _ in self.faces]
        for c, col in self.boundary.items():
            for r, v in col.items():
                M[r][c] = v
        return M

    def is_cycle(self, vec: Sequence[int]) -> bool:
        acc: dict[int, int] = {}
        for c, x in enumerate(vec):
            if x:
                for r, v in self.boundary.get(c, {}).items():
                    acc[r] = acc.get(r, 0) + v * x
        return not any(acc.values())

    def coordinates(self, vec: Sequence[int]) -> list[int]:
        """Coordinates of a relative cycle in the kernel basis (exact, integral)."""
        if self.basis is None:
            raise ValueError("pair homology was computed without a basis")
        if not self.is_cycle(vec):
            raise ValueError("vector is not a relative cycle")
        return [sum(a * b for a, b in zip(row, vec) if b) for row in self.coord_rows]


def pair_homology(Q: QuotientComplex, basis: bool = False) -> PairHomology:
    top = Q.d - 1
    c = Q.complex
    chambers = Q.relative_ids(top) if top <= c.dim else []
    faces = Q.relative_ids(top - 1) if top >= 1 else []
    ridx = {r: k for k, r in enumerate(faces)}
    sparse = c.boundary_sparse(top, rows=ridx, cols=chambers) if top >= 1 and chambers else {}
    boundary = {k: dict(col) for k, col in sparse.items() if col}
    rk = len(elementary_divisors(boundary)) if boundary else 0
    ph = PairHomology(Q.alpha, top, chambers, faces, boundary, len(chambers) - rk)
    if basis:
        n = ph.n
        if faces and boundary:
            res = smith_normal_form(ph.dense_boundary())
            ph.basis = [[res.V[i][j] for i in range(n)] for j in range(res.rank, n)]
            ph.coord_rows = [list(res.Vinv[j]) for j in range(res.rank, n)]
        else:
            ph.basis = [[int(i == j) for i in range(n)] for j in range(n)]
            ph.coord_rows = [list(r) for r in ph.basis]
        if len(ph.basis) != ph.rank:
            raise AssertionError("kernel basis size disagrees with boundary rank")
    return ph


# --- level transitions ------------------------------------------------------------

@dataclass
class Transition:
    alpha: int
    matrix: list[list[int]]    # rows: basis at alpha, cols: basis at alpha+1
    iso: bool
    source_rank: int
    target_rank: int


def chamber_projection(hi: QuotientComplex, lo: QuotientComplex) -> dict[int, int]:
    """Chamber ids of the finer pair that survive in the coarser one (hi alpha+1 -> lo alpha)."""
    top = hi.d - 1
    out = {}
    for sid in hi.relative_ids(top):
        key, rep = hi.cells[top][sid]
        tgt = lo.ids.get((top, key, rep))
        if tgt is not None and lo.relative[top][tgt]:
            out[sid] = tgt
    return out


def alpha_transition(spec: GroupSpec, alpha: int, lo: QuotientComplex | None = None,
                     hi: QuotientComplex | None = None) -> Transition:
    """H_{d-1}(pair at alpha+1) -> H_{d-1}(pair at alpha) in kernel bases, with iso flag."""
    if alpha <= spec.d - 1:
        raise ValueError("alpha must exceed d-1")
    lo = lo or build_quotient(spec, alpha)
    hi = hi or build_quotient(spec, alpha + 1, G=lo.G)
    Hlo, Hhi = pair_homology(lo, basis=True), pair_homology(hi, basis=True)
    proj = chamber_projection(hi, lo)
    lo_pos = {sid: k for k, sid in enumerate(Hlo.chambers)}
    cols = []
    for z in Hhi.basis:
        v = [0] * Hlo.n
        for k, x in enumerate(z):
            if x and Hhi.chambers[k] in proj:
                v[lo_pos[proj[Hhi.chambers[k]]]] += x
        cols.append(Hlo.coordinates(v))
    M = [[cols[j][i] for j in range(len(cols))] for i in range(Hlo.rank)]
    iso = Hlo.rank == Hhi.rank and (Hlo.rank == 0 or abs(det(M)) == 1)
    return Transition(alpha, M, iso, Hhi.rank, Hlo.rank)


# --- orientation characters ---------------------------------------------------------

def orientation_character_of(vertices: Sequence[Hashable], elements: Sequence,
                             act: Callable[[object, Hashable], Hashable]) -> list[int]:
    """Sign of the vertex permutation induced by each element on an oriented simplex."""
    pos = {v: k for k, v in enumerate(vertices)}
    out = []
    for g in elements:
        img = [act(g, v) for v in vertices]
        if set(img) != set(vertices):
            raise ValueError("element does not stabilize the simplex")
        out.append(perm_parity([pos[x] for x in img]))
    return out


def orientation_character(Q: QuotientComplex, dim: int, sid: int, cap: int = 4096) -> list[int]:
    """The orientation character on the stabilizer of the representative simplex."""
    mats = Q.representative(dim, sid)
    keys = [str(vertex_key(m, Q.p)) for m in mats]
    by_key = dict(zip(keys, mats))

    def act(g, k):
        return str(vertex_key(mat_mul(to_kmat(g), by_key[k]), Q.p))

    return orientation_character_of(keys, Q.stabilizer_elements(dim, sid, cap), act)
