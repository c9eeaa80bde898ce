import random

import pytest

from btq.building import flag_simplices, vertex_key
from btq.bundles import (Polygon, SplittingType, birkhoff, bundle_degrees, h0, hn_flag,
                         in_truncation, poly_det, poly_mat_mul, representative,
                         sections_dimension, splitting_type, to_kmat)
from btq.exactring import KElem, Poly, identity, is_integral, mat_det, mat_eq, mat_mul, valuation
from helpers import random_lattice, random_unit


def random_gl_a(rng, p, d, max_deg=2, steps=6):
    """Product of elementary and unit-diagonal matrices over A."""
    g = [[Poly.const(int(i == j), p) for j in range(d)] for i in range(d)]
    for _ in range(steps):
        i, j = rng.sample(range(d), 2)
        E = [[Poly.const(int(r == c), p) for c in range(d)] for r in range(d)]
        E[i][j] = Poly([rng.randrange(p) for _ in range(max_deg + 1)], p)
        g = poly_mat_mul(g, E)
    D = [[Poly.const(rng.randrange(1, p) if r == c else 0, p) for c in range(d)] for r in range(d)]
    return poly_mat_mul(g, D)


def diag_pi(p, exps):
    d = len(exps)
    return [[KElem.pi(p, exps[i]) if i == j else KElem.const(0, p) for j in range(d)] for i in range(d)]


def test_birkhoff_diag():
    p = 2
    w = birkhoff(diag_pi(p, [2, 0]))
    assert w.e == (2, 0)
    assert mat_eq(to_kmat(w.u), identity(2, p)) and mat_eq(w.k, identity(2, p))


def test_birkhoff_on_units():
    rng = random.Random(5)
    for _ in range(10):
        k = random_unit(rng, 3, 3)
        assert birkhoff(k).e == (0, 0, 0)


@pytest.mark.parametrize("p", [2, 3])
def test_birkhoff_round_trip(p):
    rng = random.Random(100 + p)
    for _ in range(100):
        u0 = to_kmat(random_gl_a(rng, p, 2))
        k0 = random_unit(rng, p, 2)
        h = mat_mul(mat_mul(u0, diag_pi(p, [3, 0])), k0)
        w = birkhoff(h)
        assert w.e == (3, 0)
        assert poly_det(w.u).deg == 0
        assert all(is_integral(x) for r in w.k for x in r) and valuation(mat_det(w.k)) == 0
        assert mat_eq(mat_mul(mat_mul(to_kmat(w.u), diag_pi(p, w.e)), w.k), h)


def test_degree_convention_sections():
    p = 2
    t_lattice = [[KElem.t(p)]]
    assert bundle_degrees(t_lattice) == (1,)
    assert h0([1]) == 2
    assert sections_dimension(t_lattice, p, 3) == 2


@pytest.mark.parametrize("a", [(0, 0), (2, 0), (1, 1, 0), (3, 0, 0)])
def test_sections_match_h0(a):
    p = 2
    g = representative(SplittingType(a), p)
    assert sections_dimension(g, p, max(a) + 1) == h0(a)


def test_splitting_type_examples():
    p = 3
    assert splitting_type(identity(2, p)).a == (0, 0)
    for k in range(5):
        st = splitting_type(vertex_key(diag_pi(p, [k, 0])))
        assert st.a == (k, 0) and st.delta() == (k,)


def test_splitting_type_is_arithmetic_invariant():
    rng = random.Random(17)
    for p, d in [(2, 2), (2, 3), (3, 2)]:
        for _ in range(15):
            g = random_lattice(rng, p, d)
            gamma = to_kmat(random_gl_a(rng, p, d))
            assert splitting_type(mat_mul(gamma, g)) == splitting_type(g)


def test_polygon():
    poly = SplittingType((3, 1, 0)).polygon()
    assert poly.p == (0, 3, 4, 4) and poly.delta == (2, 1)
    assert all(2 * poly.p[i] - poly.p[i - 1] - poly.p[i + 1] == poly.delta[i - 1] for i in (1, 2))
    rng = random.Random(2)
    for _ in range(20):
        assert Polygon.from_degrees(bundle_degrees(random_lattice(rng, 2, 3), 2)).is_convex()


def test_in_truncation_examples():
    assert in_truncation(SplittingType((2, 0)), 2, [1])
    assert not any(in_truncation(SplittingType((0, 0)), a) for a in range(1, 6))
    st = SplittingType((3, 1, 0))
    assert in_truncation(st, 2, [1])
    assert not in_truncation(st, 2, [2])
    assert not in_truncation(st, 2, [1, 2])
    assert in_truncation(st, 2)


def _p_of(degs):
    s = sorted(degs, reverse=True)
    out = [0]
    for x in s:
        out.append(out[-1] + x)
    return out


def test_degree_difference_lemma():
    """For L' inside L: 0 <= p_L(i) - p_L'(i) <= deg L - deg L'."""
    rng = random.Random(23)
    p, d = 2, 3
    for _ in range(30):
        g = random_lattice(rng, p, d)
        M = random_unit(rng, p, d)
        M = [[M[i][j] * KElem.pi(p, rng.randrange(3)) if i == j else M[i][j] * KElem.pi(p)
              for j in range(d)] for i in range(d)]
        sub = mat_mul(g, M)
        pl, ps = _p_of(bundle_degrees(g)), _p_of(bundle_degrees(sub))
        gap = pl[d] - ps[d]
        for i in range(1, d):
            assert 0 <= pl[i] - ps[i] <= gap


def test_hn_flag_semistable_and_line():
    p = 2
    assert hn_flag(identity(2, p)) == []
    for k in range(1, 4):
        flag = hn_flag(diag_pi(p, [k, 0]))
        assert len(flag) == 1
        (line,) = flag
        assert [[x == 1 for x in r] for r in line] == [[False, True]]


def _hn_subspaces(m, p):
    return set(hn_flag(m, p))


@pytest.mark.parametrize("a", [(6, 0), (9, 4, 0), (4, 8, 0)])
def test_hn_flags_meet_on_deep_simplices(a):
    """Simplices with a common gap > 3 at all vertices share an HN subspace."""
    p, d = 2, len(a)
    a = tuple(sorted(a, reverse=True))
    v = vertex_key(representative(SplittingType(a), p), p)
    deep = 0
    for i in range(1, d):
        for s in flag_simplices(v, i):
            mats = s.vertex_mats()
            types = [splitting_type(m, p) for m in mats]
            if not any(all(t.delta()[j] > 3 for t in types) for j in range(d - 1)):
                continue
            deep += 1
            common = set.intersection(*[_hn_subspaces(m, p) for m in mats])
            assert common
    assert deep > 0


def test_hn_flag_stability_under_small_moves():
    """A one-step move keeps the HN piece at a gap larger than the degree drop."""
    p = 2
    v = vertex_key(representative(SplittingType((7, 0)), p), p)
    base = hn_flag(v.matrix(), p)
    for s in flag_simplices(v, 1):
        m = s.vertex_mats()[1]
        assert hn_flag(m, p) == base
