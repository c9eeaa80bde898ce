"""Acceptance criteria 1-10 at their stated tolerances.

Every criterion records one PASS/FAIL line; the lines are printed in the
terminal summary (see conftest.py) and to stdout when run with -s.
"""
import itertools
import random
import time

import pytest

from btq.building import APARTMENT, beta_window, interior_faces, vertex_key
from btq.bundles import SplittingType, poly_det, representative, to_kmat
from btq.cli import verify_case
from btq.exactring import KElem, all_polys, is_integral, mat_inverse, mat_mul, matmul, smith_normal_form
from btq.grouphom import (FiniteGroup, corollary_bound_check, exponent_bound_check, harvest,
                          sign_characters)
from btq.quotient import GroupSpec, SearchBudgetExceeded, alpha_transition
from btq.quotient.build import quotient_to_json
from btq.simplicial import GroupInvariants, barycentric_sphere, boundary, homology, universal_coeff_check
from btq.symbols import BasisTuple, antisymmetry_holds, cocycle_sum, random_vectors, scaling_holds
from conftest import ACCEPTANCE, quotient
from helpers import random_complex, sphere

CRITERION2_CASES = [(q, ideal) for q in (2, 3) for ideal in ("t", "t+1", "t^2+t+1")]
STABLE_ALPHA = 2

_verdicts: dict = {}


def record(n, ok, detail):
    line = "criterion %2d: %s  %s" % (n, "PASS" if ok else "FAIL", detail)
    ACCEPTANCE[n] = line
    print(line)
    assert ok, line


def verdict(q, d, ideal, alpha):
    key = (q, d, ideal, alpha)
    if key not in _verdicts:
        t0 = time.perf_counter()
        v = verify_case(GroupSpec.parse(q, d, ideal), alpha)
        _verdicts[key] = (v, time.perf_counter() - t0)
    return _verdicts[key]


def _is_power(n, p):
    while n % p == 0:
        n //= p
    return n == 1


# --- 1 ---------------------------------------------------------------------------------------

def entrywise_stabilizer_count(p, n):
    """Exhaustive count of GL_2(A) elements fixing the type-(n,0) vertex.

    With unit determinant, g fixes the class of L iff L^-1 g L is integral.
    For a diagonal L that is an entrywise condition, so each entry is searched
    over all polynomials of degree <= n + 2 and unit-determinant combinations
    of the admissible entries are counted.
    """
    L = representative(SplittingType((n, 0)), p)
    assert all(not L[i][j] for i in range(2) for j in range(2) if i != j)
    Li = mat_inverse(L)
    polys = all_polys(p, n + 2)
    allowed = {}
    for i, j in itertools.product(range(2), repeat=2):
        ok = []
        for f in polys:
            E = [[KElem.const(0, p)] * 2 for _ in range(2)]
            E[i] = list(E[i])
            E[i][j] = KElem(f)
            if all(is_integral(x) for r in mat_mul(mat_mul(Li, E), L) for x in r):
                ok.append(f)
        allowed[i, j] = ok
    count = 0
    key = vertex_key(L, p)
    for a, b, c, d in itertools.product(allowed[0, 0], allowed[0, 1], allowed[1, 0], allowed[1, 1]):
        g = [[a, b], [c, d]]
        if poly_det(g).deg == 0:
            assert vertex_key(mat_mul(to_kmat(g), L), p) == key
            count += 1
    return count


def test_criterion_01_half_line():
    t0 = time.perf_counter()
    problems = []
    for q in (2, 3):
        Q = quotient(q, 2, "1", 5)
        core = Q.core_vertices()
        types = [Q.splitting_types(0, s)[0] for s in core]
        if types != [(k, 0) for k in range(5)]:
            problems.append("q=%d core types %s" % (q, types))
        edges = {tuple(sorted(Q.complex.verts[1][e])) for e in range(Q.complex.count(1))}
        if any((core[k], core[k + 1]) not in edges for k in range(4)):
            problems.append("q=%d core is not a path" % q)
        for k, v in enumerate(core):
            order = Q.stabilizer_order(0, v)
            formula = (q * q - 1) * (q * q - q) if k == 0 else (q - 1) ** 2 * q ** (k + 1)
            if not order == formula == entrywise_stabilizer_count(q, k):
                problems.append("q=%d v%d: %d vs %d" % (q, k, order, formula))
    elapsed = time.perf_counter() - t0
    record(1, not problems and elapsed < 10,
           "half-line q in {2,3}, alpha=5, stabilizers match oracle (%.1fs) %s" % (elapsed, problems or ""))


# --- 2, 3, 7 ------------------------------------------------------------------------------------

def test_criterion_02_index_one():
    rows = []
    ok = True
    for q, ideal in CRITERION2_CASES:
        v, secs = verdict(q, 2, ideal, STABLE_ALPHA)
        good = v["index"] == 1 and v["rank_ok"] and v["transition_iso"] and secs < 300
        ok &= good
        rows.append("q=%d (%s) index=%s %.1fs" % (q, ideal, v["index"], secs))
    record(2, ok, "; ".join(rows))


def test_criterion_03_rank_equality():
    rows = []
    ok = True
    for q, d, ideal, alpha in [(q, 2, i, STABLE_ALPHA) for q, i in CRITERION2_CASES] + [(2, 3, "t", 3)]:
        v, _ = verdict(q, d, ideal, alpha)
        ok &= v["rank_ms"] == v["rank_h"]
        rows.append("q=%d d=%d (%s) %d/%d" % (q, d, ideal, v["rank_ms"], v["rank_h"]))
    record(3, ok, "; ".join(rows))


def test_criterion_04_gl3_exponent(monkeypatch):
    monkeypatch.setenv("BTQ_BUDGET_MS", str(30 * 60 * 1000))
    try:
        v, secs = verdict(2, 3, "t", 3)
    except SearchBudgetExceeded as exc:
        ACCEPTANCE[4] = "criterion  4: INCONCLUSIVE  budget exhausted: %s" % exc
        pytest.skip(ACCEPTANCE[4])
    e = v["exponent"]
    ok = e is not None and (4 * 21) % e == 0 and v["p_part_divides"] and v["bound"] == 84
    record(4, ok, "d=3 q=2 (t): exponent %s, index %s, bound %d (%.1fs)" % (e, v["index"], v["bound"], secs))


def test_criterion_07_transition_iso():
    ok = True
    rows = []
    for q, ideal in CRITERION2_CASES:
        tr = alpha_transition(GroupSpec.parse(q, 2, ideal), STABLE_ALPHA, lo=quotient(q, 2, ideal, STABLE_ALPHA))
        ok &= tr.iso and tr.source_rank == tr.target_rank
        rows.append("q=%d (%s) %d->%d" % (q, ideal, tr.source_rank, tr.target_rank))
    record(7, ok, "; ".join(rows))


# --- 5 -----------------------------------------------------------------------------------------

def random_window(rng, d):
    side = rng.randint(3, 7 if d == 2 else 5)
    box = [tuple(x) + (0,) for x in itertools.product(range(side), repeat=d - 1)]
    keep = rng.uniform(0.5, 1.0)
    return [x for x in box if rng.random() < keep] or box[:1]


def test_criterion_05_beta_is_cycle():
    rng = random.Random(5)
    worst = 0.0
    bad = 0
    for d in (2, 3):
        for _ in range(50):
            W = random_window(rng, d)
            t0 = time.perf_counter()
            bd = APARTMENT.boundary_chain(beta_window(None, W))
            bad += any(bd.coeffs.get(f) for f in interior_faces(W))
            worst = max(worst, time.perf_counter() - t0)
    record(5, bad == 0 and worst < 1, "100 windows (d=2,3), %d nonzero interiors, slowest %.3fs" % (bad, worst))


# --- 6 -----------------------------------------------------------------------------------------

def ar_checks(Q, n, rng):
    p, d = Q.p, Q.d
    fails = []
    for k in range(n):
        vs = random_vectors(rng, p, d, 1, d + 1)
        b = BasisTuple.of(vs[:d], p)
        perm = rng.sample(range(d), d)
        a = all_polys(p, 1)[rng.randrange(1, p * p)]
        if not antisymmetry_holds(b, perm, Q):
            fails.append("antisymmetry #%d" % k)
        if not scaling_holds(b, rng.randrange(d), a, Q):
            fails.append("scaling #%d" % k)
        if not cocycle_sum(vs, Q).is_zero():
            fails.append("%d-term #%d" % (d + 1, k))
    return fails


def test_criterion_06_ar_relations():
    rng = random.Random(6)
    t0 = time.perf_counter()
    fails = ar_checks(quotient(2, 2, "t", STABLE_ALPHA), 50, rng) + ar_checks(quotient(3, 2, "t", STABLE_ALPHA), 50, rng)
    t2 = time.perf_counter() - t0
    fails += ar_checks(quotient(2, 3, "t", 3), 20, rng)
    t3 = time.perf_counter() - t0 - t2
    record(6, not fails, "100 tuples at d=2 (%.1fs), 20 at d=3 (%.1fs) %s" % (t2, t3, fails or ""))


# --- 8 -----------------------------------------------------------------------------------------

def test_criterion_08_p_power_stabilizers():
    cases = [(q, 2, i, STABLE_ALPHA) for q, i in CRITERION2_CASES] + [(2, 3, "t", 3)]
    bad = []
    total = 0
    for args in cases:
        Q = quotient(*args)
        for dim in range(Q.complex.dim + 1):
            for s in range(Q.complex.count(dim)):
                total += 1
                if not _is_power(Q.stabilizer_order(dim, s), Q.p):
                    bad.append((args, dim, s))
    record(8, not bad, "%d cells in %d quotients %s" % (total, len(cases), bad[:3] or ""))


# --- 9 -----------------------------------------------------------------------------------------

def test_criterion_09_group_homology_bounds():
    t0 = time.perf_counter()
    checked = 0
    fails = []
    for args in [(2, 2, "t", 4), (3, 2, "t", 3), (2, 3, "t", 3)]:
        Q = quotient(*args)
        for name, H in harvest(quotient_to_json(Q), max_order=16):
            for chi in sign_characters(H):
                for s in (1, 2):
                    checked += 1
                    v = corollary_bound_check(H, chi, s, Q.d)
                    if not v.holds:
                        fails.append((args, name, s))
    for p in (2, 3):
        for k in (1, 2, 3):
            H = FiniteGroup.elementary_abelian(p, k)
            for chi in sign_characters(H):
                for s in (1, 2):
                    checked += 1
                    v = exponent_bound_check(H, chi, s)
                    if not (v.holds and v.bound == p):
                        fails.append(("(Z/%d)^%d" % (p, k), s))
    elapsed = time.perf_counter() - t0
    record(9, not fails and elapsed < 300, "%d (group, character, s) checks (%.1fs) %s" % (checked, elapsed, fails[:3] or ""))


# --- 10 ----------------------------------------------------------------------------------------

def snf_round_trip(M):
    r = smith_normal_form(M)
    n = len(M[0])
    return (matmul(matmul(r.U, M), r.V) == r.diagonal()
            and matmul(r.V, r.Vinv) == [[int(i == j) for j in range(n)] for i in range(n)])


def test_criterion_10_homology_engine():
    t0 = time.perf_counter()
    rng = random.Random(10)
    fails = []
    for k in range(200):
        c = random_complex(rng, max_vertices=7, max_dim=3)
        for i in range(1, c.dim + 1):
            B = c.boundary_matrix(i)
            if i >= 2:
                prod = matmul(c.boundary_matrix(i - 1), B)
                if any(x for row in prod for x in row):
                    fails.append("dd #%d" % k)
            if B and B[0] and not snf_round_trip(B):
                fails.append("snf #%d" % k)
        for m in (2, 3):
            if not universal_coeff_check(c, m).ok:
                fails.append("uct #%d mod %d" % (k, m))
    for d in range(2, 6):
        c, fund, _ = barycentric_sphere(list(range(d)))
        if not boundary(c, fund).is_zero():
            fails.append("sphere %d cycle" % d)
        sph = sphere(d - 2)
        if any(homology(c, i) != homology(sph, i) for i in range(d - 1)):
            fails.append("sphere %d homology" % d)
        top = GroupInvariants(2) if d == 2 else GroupInvariants(1)
        if homology(c, d - 2) != top:
            fails.append("sphere %d top" % d)
    elapsed = time.perf_counter() - t0
    record(10, not fails and elapsed < 60, "200 random complexes and spheres d=2..5 (%.1fs) %s" % (elapsed, fails[:3] or ""))
