import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from btq.exactring import matmul
from btq.simplicial import (Chain, Complex, FiniteMap, GroupInvariants, InvalidComplex, NotFinite,
                            NotSubcomplex, Subcomplex, barycentric_sphere, boundary, cohomology,
                            face_sign, homology, perm_parity, pushforward_finite, relative_homology,
                            universal_coeff_check)
from helpers import RP2, random_complex, sphere, two_edge_loop

TRIANGLE_GRAPH = Complex.from_simplices([(0, 1), (1, 2), (0, 2)])
POINT = Complex.from_simplices([(0,)])


def test_edge_boundary_column():
    c = Complex.from_simplices([(0, 1)])
    col = [row[0] for row in c.boundary_matrix(1)]
    assert sorted(col) == [-1, 1] and col[1] == -col[0]
    # the s_v sign: removing the first vertex of (0, 1) has sign -1
    assert face_sign((0, 1), 0) == (-1, (1,))
    assert col[1] == face_sign((0, 1), 0)[0]


def test_full_triangle_dd_zero():
    c = Complex.from_simplices([(0, 1, 2)])
    assert matmul(c.boundary_matrix(1), c.boundary_matrix(2)) == [[0], [0], [0]]


def test_triangle_graph_examples():
    from btq.exactring import rank
    assert rank(TRIANGLE_GRAPH.boundary_matrix(1)) == 2
    assert homology(TRIANGLE_GRAPH, 1) == GroupInvariants(1)
    assert homology(POINT, 0) == GroupInvariants(1)


def test_non_strict_loop():
    c = two_edge_loop()
    assert not c.is_strict()
    assert homology(c, 1) == GroupInvariants(1)
    assert homology(c, 0) == GroupInvariants(1)


def test_invalid_complex_rejected():
    with pytest.raises(InvalidComplex):
        Complex([[(0,), (1,)], [(0, 1)]], [[(), ()], [(0, 0)]])


def test_rp2():
    c = Complex.from_simplices(RP2)
    assert c.counts() == [6, 15, 10]
    assert homology(c, 1) == GroupInvariants(0, (2,))
    assert homology(c, 2) == GroupInvariants(0)
    assert homology(c, 1, 2) == GroupInvariants(0, (2,))
    assert homology(c, 2, 2) == GroupInvariants(0, (2,))
    assert homology(c, 2, "Q") == GroupInvariants(0)
    assert cohomology(c, 2) == GroupInvariants(0, (2,))
    rep = universal_coeff_check(c, 2)
    assert rep.ok
    assert rep.rows[1]["tor"].is_zero()


def test_uct_examples():
    rep = universal_coeff_check(TRIANGLE_GRAPH, 2)
    assert rep.ok and rep.rows[1]["H"] == GroupInvariants(0, (2,)) and rep.rows[1]["tor"].is_zero()
    for m in (2, 3, 4, "Q"):
        r = universal_coeff_check(POINT, m)
        assert r.ok
    assert homology(POINT, 0, 5) == GroupInvariants(0, (5,))


def test_homology_with_composite_coefficients():
    c = Complex.from_simplices(RP2)
    assert homology(c, 1, 4) == GroupInvariants(0, (2,))
    assert homology(c, 2, 4) == GroupInvariants(0, (2,))
    assert homology(c, 0, 6).isomorphic(GroupInvariants(0, (6,)))


def test_relative_examples():
    edge = Complex.from_simplices([(0, 1)])
    ends = Subcomplex(edge, {0: [0, 1]})
    r = relative_homology(edge, ends, 1)
    assert r.invariants == GroupInvariants(1) and len(r.generators) == 1
    assert all(relative_homology(edge, edge, i).invariants.is_zero() for i in range(2))
    base = Subcomplex(edge, {0: [0]})
    assert all(relative_homology(edge, base, i).invariants.is_zero() for i in range(2))
    with pytest.raises(NotSubcomplex):
        Subcomplex(edge, {1: [0]})


def test_relative_generators_are_relative_cycles():
    c = Complex.from_simplices([(0, 1, 2), (2, 3)])
    sub = Subcomplex.from_complex(c, Complex.from_simplices([(0, 1), (3,)]))
    r = relative_homology(c, sub, 1)
    rows = sub.relative_ids(0)
    ridx = {x: k for k, x in enumerate(rows)}
    sp = c.boundary_sparse(1, rows=ridx, cols=r.chain_ids)
    for g in r.cycle_basis:
        acc = {}
        for j, x in enumerate(g):
            for i, v in sp.get(j, {}).items():
                acc[i] = acc.get(i, 0) + v * x
        assert not any(acc.values())


def test_double_cover_pushforward():
    hexagon = Complex.from_simplices([(i, (i + 1) % 6) for i in range(6)])
    tri = TRIANGLE_GRAPH
    f = FiniteMap(hexagon, tri, {i: i % 3 for i in range(6)})
    cyc = Chain(1)
    for sid, vs in enumerate(hexagon.verts[1]):
        a, b = vs
        order = (a, b) if (b - a) % 6 == 1 else (b, a)
        cyc.add_oriented(sid, order, 1)
    assert boundary(hexagon, cyc).is_zero()
    img = pushforward_finite(f, cyc)
    tcyc = Chain(1)
    for sid, (a, b) in enumerate(tri.verts[1]):
        tcyc.add_oriented(sid, (a, b) if (b - a) % 3 == 1 else (b, a), 1)
    assert img.coeffs == tcyc.scale(2).coeffs


def test_identity_pushforward_and_collapse_rejected():
    c = Complex.from_simplices([(0, 1, 2)])
    f = FiniteMap(c, c, {i: i for i in range(3)})
    ch = Chain(2, {0: 3})
    assert pushforward_finite(f, ch).coeffs == {0: 3}
    with pytest.raises(NotFinite):
        FiniteMap(Complex.from_simplices([(0, 1)]), POINT, {0: 0, 1: 0})


@pytest.mark.parametrize("seed", range(10))
def test_pushforward_commutes_with_boundary(seed):
    rng = random.Random(seed)
    src = random_complex(rng, 6, 2)
    labels = [vs[0] for vs in src.verts[0]]
    vmap = dict(zip(labels, rng.sample(range(len(labels) + 2), len(labels))))
    tgt = Complex.from_simplices([tuple(vmap[v] for v in vs) for layer in src.verts for vs in layer])
    f = FiniteMap(src, tgt, vmap)
    for i in range(1, src.dim + 1):
        ch = Chain(i, {s: rng.randint(-3, 3) for s in range(src.count(i))})
        ch = Chain(i, {k: v for k, v in ch.coeffs.items() if v})
        lhs = boundary(tgt, pushforward_finite(f, ch))
        rhs = pushforward_finite(f, boundary(src, ch))
        assert lhs.coeffs == rhs.coeffs


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_barycentric_sphere(d):
    c, fund, subsets = barycentric_sphere(list("abcdef"[:d]))
    assert len(fund.coeffs) == len(list(itertools.permutations(range(d))))
    assert boundary(c, fund).is_zero()
    sph = sphere(d - 2)
    for i in range(d - 1):
        assert homology(c, i) == homology(sph, i)
    assert homology(c, d - 2) == (GroupInvariants(2) if d == 2 else GroupInvariants(1))


def test_barycentric_small_cases():
    c, _, subsets = barycentric_sphere([1, 2])
    assert c.counts() == [2] and [set(s) for s in subsets] == [{1}, {2}]
    c, _, _ = barycentric_sphere([1, 2, 3])
    assert c.counts() == [6, 6]
    c, _, _ = barycentric_sphere([1, 2, 3, 4])
    assert homology(c, 1).is_zero() and homology(c, 2) == GroupInvariants(1)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_dd_zero_random(seed):
    c = random_complex(random.Random(seed))
    for i in range(2, c.dim + 1):
        prod = matmul(c.boundary_matrix(i - 1), c.boundary_matrix(i))
        assert all(x == 0 for row in prod for x in row)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_homology_invariant_under_relabeling(seed):
    rng = random.Random(seed)
    c = random_complex(rng)
    labels = [vs[0] for vs in c.verts[0]]
    shuffled = labels[:]
    rng.shuffle(shuffled)
    perm = dict(zip(labels, shuffled))
    c2 = Complex.from_simplices([[perm[v] for v in vs] for layer in c.verts for vs in layer])
    for i in range(c.dim + 1):
        assert homology(c, i) == homology(c2, i)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 20), min_size=3, max_size=6, unique=True), st.data())
def test_face_maps_anticommute(verts, data):
    ordering = tuple(data.draw(st.permutations(verts)))
    v, w = data.draw(st.lists(st.sampled_from(verts), min_size=2, max_size=2, unique=True))
    s1, f1 = face_sign(ordering, v)
    s2, f12 = face_sign(f1, w)
    t1, g1 = face_sign(ordering, w)
    t2, g12 = face_sign(g1, v)
    assert f12 == g12
    assert s1 * s2 == -(t1 * t2)


def test_perm_parity():
    assert perm_parity([0, 1, 2]) == 1
    assert perm_parity([1, 0, 2]) == -1
    assert perm_parity([2, 0, 1]) == 1


def test_euler_characteristic_matches_betti():
    c = Complex.from_simplices(RP2)
    betti = [homology(c, i, "Q").free for i in range(c.dim + 1)]
    assert c.euler_characteristic() == sum((-1) ** i * b for i, b in enumerate(betti)) == 1
