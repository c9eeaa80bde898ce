"""Integer matrices: Smith normal form with unimodular transforms, sparse
elementary divisors, kernels and subquotient invariants."""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Sequence

IntMatrix = list  # list of rows of int


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """g, x, y with x*a + y*b = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> list[list[int]]:
    if not a:
        return []
    k = len(b[0]) if b else 0
    bt = list(zip(*b)) if b else [()] * k
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def zeros(m: int, n: int) -> list[list[int]]:
    return [[0] * n for _ in range(m)]


def transpose(a: Sequence[Sequence[int]], ncols: int | None = None) -> list[list[int]]:
    if not a:
        return [[] for _ in range(ncols or 0)]
    return [list(c) for c in zip(*a)]


@dataclass
class SNFResult:
    """U @ M @ V = D with D diagonal carrying `divisors` (d_1 | d_2 | ...)."""

    divisors: list[int]
    shape: tuple[int, int]
    U: list[list[int]] | None = None
    V: list[list[int]] | None = None
    Uinv: list[list[int]] | None = None
    Vinv: list[list[int]] | None = None

    @property
    def rank(self) -> int:
        return len(self.divisors)

    def diagonal(self) -> list[list[int]]:
        m, n = self.shape
        d = zeros(m, n)
        for i, x in enumerate(self.divisors):
            d[i][i] = x
        return d


class _Work:
    """Row/column operations on A mirrored on U, V and their inverses."""

    def __init__(self, M, track: bool):
        self.A = [list(r) for r in M]
        self.m = len(self.A)
        self.n = len(self.A[0]) if self.m else 0
        self.track = track
        if track:
            self.U, self.Ui = identity(self.m), identity(self.m)
            self.V, self.Vi = identity(self.n), identity(self.n)

    def swap_rows(self, i, j):
        if i == j:
            return
        A = self.A
        A[i], A[j] = A[j], A[i]
        if self.track:
            self.U[i], self.U[j] = self.U[j], self.U[i]
            for r in self.Ui:
                r[i], r[j] = r[j], r[i]

    def swap_cols(self, i, j):
        if i == j:
            return
        for r in self.A:
            r[i], r[j] = r[j], r[i]
        if self.track:
            for r in self.V:
                r[i], r[j] = r[j], r[i]
            self.Vi[i], self.Vi[j] = self.Vi[j], self.Vi[i]

    def row_op(self, i, j, a, b, c, d):
        """r_i <- a r_i + b r_j ; r_j <- c r_i + d r_j  (ad - bc = +-1)."""
        A = self.A
        ri, rj = A[i], A[j]
        A[i] = [a * x + b * y for x, y in zip(ri, rj)]
        A[j] = [c * x + d * y for x, y in zip(ri, rj)]
        if self.track:
            ui, uj = self.U[i], self.U[j]
            self.U[i] = [a * x + b * y for x, y in zip(ui, uj)]
            self.U[j] = [c * x + d * y for x, y in zip(ui, uj)]
            det = a * d - b * c
            ii, ij, ji, jj = det * d, -det * b, -det * c, det * a
            for r in self.Ui:
                x, y = r[i], r[j]
                r[i] = x * ii + y * ji
                r[j] = x * ij + y * jj

    def col_op(self, i, j, a, b, c, d):
        """c_i <- a c_i + b c_j ; c_j <- c c_i + d c_j  (ad - bc = +-1)."""
        for r in self.A:
            x, y = r[i], r[j]
            r[i] = a * x + b * y
            r[j] = c * x + d * y
        if self.track:
            for r in self.V:
                x, y = r[i], r[j]
                r[i] = a * x + b * y
                r[j] = c * x + d * y
            det = a * d - b * c
            # F has F[i][i]=a F[j][i]=b F[i][j]=c F[j][j]=d; Vi <- F^-1 Vi
            ii, ij, ji, jj = det * d, -det * c, -det * b, det * a
            vi, vj = self.Vi[i], self.Vi[j]
            self.Vi[i] = [ii * x + ij * y for x, y in zip(vi, vj)]
            self.Vi[j] = [ji * x + jj * y for x, y in zip(vi, vj)]


def smith_normal_form(M: Sequence[Sequence[int]], transforms: bool = True,
                      ncols: int | None = None) -> SNFResult:
    """Smith normal form by gcd-first pivoting.

    `ncols` is only needed for matrices with zero rows.
    """
    w = _Work(M, transforms)
    if not w.m:
        w.n = ncols or 0
        if transforms:
            w.V, w.Vi = identity(w.n), identity(w.n)
    A, m, n = w.A, w.m, w.n
    divisors = []
    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        w.swap_rows(t, best[1])
        w.swap_cols(t, best[2])
        while True:
            for i in range(t + 1, m):
                b = A[i][t]
                if not b:
                    continue
                a = A[t][t]
                if b % a == 0:
                    w.row_op(t, i, 1, 0, -(b // a), 1)
                else:
                    g, x, y = xgcd(a, b)
                    w.row_op(t, i, x, y, -(b // g), a // g)
            for j in range(t + 1, n):
                b = A[t][j]
                if not b:
                    continue
                a = A[t][t]
                if b % a == 0:
                    w.col_op(t, j, 1, 0, -(b // a), 1)
                else:
                    g, x, y = xgcd(a, b)
                    w.col_op(t, j, x, y, -(b // g), a // g)
            if any(A[i][t] for i in range(t + 1, m)):
                continue
            piv = A[t][t]
            bad = None
            for i in range(t + 1, m):
                row = A[i]
                for j in range(t + 1, n):
                    if row[j] % piv:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            w.row_op(t, bad, 1, 1, 0, 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            if transforms:
                w.U[t] = [-x for x in w.U[t]]
                for r in w.Ui:
                    r[t] = -r[t]
        divisors.append(A[t][t])
    if transforms:
        return SNFResult(divisors, (m, n), w.U, w.V, w.Ui, w.Vi)
    return SNFResult(divisors, (m, n))


def rank(M) -> int:
    return len(elementary_divisors(M))


def elementary_divisors(M: Sequence[Sequence[int]] | dict, ncols: int | None = None) -> list[int]:
    """Nonzero elementary divisors (sorted, divisibility chain) of an integer matrix.

    Accepts dense rows or a sparse {col: {row: value}} dict. Unit pivots are
    eliminated sparsely (each contributes a divisor 1); what remains is
    handed to the dense Smith form.
    """
    if isinstance(M, dict):
        cols = {c: dict(v) for c, v in M.items() if v}
    else:
        cols = {}
        for i, row in enumerate(M):
            for j, x in enumerate(row):
                if x:
                    cols.setdefault(j, {})[i] = x
    return _sparse_divisors(cols)


def _sparse_divisors(cols: dict[int, dict[int, int]]) -> list[int]:
    rows: dict[int, dict[int, int]] = {}
    for c, col in cols.items():
        for r, x in col.items():
            rows.setdefault(r, {})[c] = x
    ones = 0
    # lazy heap of (column length, column); stale entries are skipped on pop
    heap = [(len(col), c) for c, col in cols.items()]
    heapq.heapify(heap)
    while True:
        # shortest column holding a unit, then the shortest row among its units
        best = None
        while heap:
            lc, c = heapq.heappop(heap)
            col = cols.get(c)
            if col is None or len(col) != lc:
                continue
            units = [r for r, x in col.items() if x == 1 or x == -1]
            if units:
                best = (c, min(units, key=lambda r: len(rows[r])))
                break
        if best is None:
            break
        pc, pr = best
        prow = rows.pop(pr)
        pv = prow[pc]
        pcol = cols.pop(pc)
        for r, x in pcol.items():
            if r == pr:
                continue
            f = x * pv  # pv = +-1 so x / pv = x * pv
            row = rows[r]
            for c, y in prow.items():
                if c == pc:
                    continue
                nv = row.get(c, 0) - f * y
                if nv:
                    row[c] = nv
                    cols[c][r] = nv
                else:
                    row.pop(c, None)
                    cols[c].pop(r, None)
            row.pop(pc, None)
            if not row:
                del rows[r]
        for c in prow:
            if c != pc:
                cols[c].pop(pr, None)
                if cols[c]:
                    heapq.heappush(heap, (len(cols[c]), c))
                else:
                    del cols[c]
        ones += 1
    if not cols:
        return [1] * ones
    ridx = {r: i for i, r in enumerate(sorted(rows))}
    cidx = {c: j for j, c in enumerate(sorted(cols))}
    dense = zeros(len(ridx), len(cidx))
    for c, col in cols.items():
        for r, x in col.items():
            dense[ridx[r]][cidx[c]] = x
    rest = smith_normal_form(dense, transforms=False).divisors
    return [1] * ones + rest


def kernel_basis(M: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Z-basis of {x in Z^n : M x = 0}, as a list of column vectors (saturated)."""
    if not M:
        return [[int(i == j) for i in range(ncols)] for j in range(ncols)]
    res = smith_normal_form(M)
    V = res.V
    return [[V[i][j] for i in range(ncols)] for j in range(res.rank, ncols)]


@dataclass
class Subquotient:
    """Z-module ker(d_in) / im(d_out) with explicit generators."""

    free_rank: int
    torsion: list[int]
    generators: list[list[int]] = field(default_factory=list)  # free gens last
    cycle_basis: list[list[int]] = field(default_factory=list)

    def invariants(self) -> tuple[int, tuple[int, ...]]:
        return self.free_rank, tuple(self.torsion)


def subquotient(d_in: Sequence[Sequence[int]] | None, d_out: Sequence[Sequence[int]] | None,
                n: int, want_generators: bool = True) -> Subquotient:
    """Homology at a chain group of rank n with incoming d_out (n x m) and outgoing d_in (k x n)."""
    if want_generators:
        if d_in:
            res = smith_normal_form(d_in)
            r = res.rank
            K = [[res.V[i][j] for i in range(n)] for j in range(r, n)]  # kernel columns
            Vi = res.Vinv
        else:
            r = 0
            K = [[int(i == j) for i in range(n)] for j in range(n)]
            Vi = identity(n)
        k = len(K)
        if not k:
            return Subquotient(0, [], [], [])
        if d_out and d_out[0]:
            m = len(d_out[0])
            # coordinates of the image in the kernel basis: rows r.. of Vi @ d_out
            X = [[sum(Vi[r + a][i] * d_out[i][j] for i in range(n) if d_out[i][j]) for j in range(m)]
                 for a in range(k)]
        else:
            X = [[] for _ in range(k)]
        if X and X[0]:
            sx = smith_normal_form(X)
            divs = sx.divisors
            Ui = sx.Uinv
        else:
            divs = []
            Ui = identity(k)
        # generators: K @ Ui columns
        gens_all = []
        for j in range(k):
            vec = [0] * n
            for a in range(k):
                c = Ui[a][j]
                if c:
                    col = K[a]
                    for i in range(n):
                        if col[i]:
                            vec[i] += c * col[i]
            gens_all.append(vec)
        torsion = [x for x in divs if x > 1]
        tgens = [gens_all[j] for j, x in enumerate(divs) if x > 1]
        fgens = gens_all[len(divs):]
        return Subquotient(k - len(divs), torsion, tgens + fgens, K)
    r_in = len(elementary_divisors(d_in)) if d_in else 0
    divs = elementary_divisors(d_out) if d_out else []
    return Subquotient(n - r_in - len(divs), [x for x in divs if x > 1])


def det(M: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant (Bareiss)."""
    a = [list(r) for r in M]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if a[i][k]), None)
            if sw is None:
                return 0
            a[k], a[sw] = a[sw], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]
