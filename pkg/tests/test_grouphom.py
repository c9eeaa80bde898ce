import itertools

import pytest

from btq.grouphom import (BudgetExceeded, FiniteGroup, NoFiltrationFound,
                          corollary_bound_check, exponent_bound_check, group_homology, harvest,
                          sign_characters)
from btq.quotient.build import quotient_to_json
from btq.simplicial import GroupInvariants
from conftest import quotient

Z = GroupInvariants


def symmetric(n):
    els = list(itertools.permutations(range(n)))
    return FiniteGroup.from_elements(els, lambda a, b: tuple(a[b[i]] for i in range(n)))


def nontrivial_character(H):
    return next(c for c in sign_characters(H) if not c.is_trivial())


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_cyclic_homology(n):
    H = FiniteGroup.cyclic(n)
    assert group_homology(H, s=0) == Z(1)
    assert group_homology(H, s=1) == Z(0, (n,))
    assert group_homology(H, s=2) == Z(0)
    assert group_homology(H, s=3) == Z(0, (n,))


def test_twisted_z2():
    H = FiniteGroup.cyclic(2)
    chi = nontrivial_character(H)
    assert [group_homology(H, chi, s) for s in range(4)] == [Z(0, (2,)), Z(0), Z(0, (2,)), Z(0)]


def test_klein_four():
    V = FiniteGroup.elementary_abelian(2, 2)
    assert group_homology(V, s=1) == Z(0, (2, 2))
    assert group_homology(V, s=2) == Z(0, (2,))
    assert V.filtration_length() == 1
    v = exponent_bound_check(V, None, 2, 1)
    assert v.bound == 2 and v.holds


def test_twisted_h0_is_coinvariants():
    for H in (FiniteGroup.elementary_abelian(2, 2), FiniteGroup.dihedral(4), symmetric(3)):
        for chi in sign_characters(H):
            expect = Z(1) if chi.is_trivial() else Z(0, (2,))
            assert group_homology(H, chi, 0) == expect


def test_sign_characters_count():
    assert len(sign_characters(FiniteGroup.elementary_abelian(2, 3))) == 8
    assert len(sign_characters(FiniteGroup.cyclic(3))) == 1
    assert len(sign_characters(symmetric(3))) == 2
    for chi in sign_characters(FiniteGroup.dihedral(4)):
        chi.check(FiniteGroup.dihedral(4))


def test_nonabelian_examples():
    S3 = symmetric(3)
    assert group_homology(S3, s=1) == Z(0, (2,))
    assert group_homology(S3, s=2) == Z(0)
    D4 = FiniteGroup.dihedral(4)
    assert group_homology(D4, s=1) == Z(0, (2, 2))
    assert group_homology(D4, s=2) == Z(0, (2,))
    assert D4.filtration_length() == 2


@pytest.mark.parametrize("p", [2, 3])
def test_heisenberg(p):
    H = FiniteGroup.heisenberg(p)
    assert len(H) == p ** 3
    assert group_homology(H, s=1) == Z(0, (p, p))
    assert H.filtration_length() == 2
    v = exponent_bound_check(H, None, 1)
    assert v.bound == p ** 2 and v.holds


@pytest.mark.parametrize("a,b", [(2, 3), (2, 4), (3, 3)])
def test_kunneth_h1(a, b):
    G, K = FiniteGroup.cyclic(a), FiniteGroup.cyclic(b)
    lhs = group_homology(G.product(K), s=1)
    rhs = Z(0, group_homology(G, s=1).torsion + group_homology(K, s=1).torsion)
    assert lhs.isomorphic(rhs)


@pytest.mark.parametrize("p,k", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)])
def test_elementary_abelian_bound(p, k):
    H = FiniteGroup.elementary_abelian(p, k)
    assert group_homology(H, s=1) == Z(0, (p,) * k)
    for chi in sign_characters(H):
        for s in (1, 2):
            assert exponent_bound_check(H, chi, s).holds


def test_not_a_p_group():
    with pytest.raises(NoFiltrationFound):
        exponent_bound_check(symmetric(3), None, 1)


def test_bar_complex_cap():
    with pytest.raises(BudgetExceeded):
        group_homology(FiniteGroup.cyclic(50), s=3, max_cells=1000)


def test_group_axioms_checked():
    with pytest.raises(ValueError):
        FiniteGroup([[0, 1], [0, 1]])


def test_harvested_stabilizers_meet_corollary():
    Q = quotient(2, 2, "t", 4)
    groups = harvest(quotient_to_json(Q), max_order=16)
    assert groups
    for name, H in groups:
        assert H.prime_power() is not None
        for chi in sign_characters(H):
            for s in (1, 2):
                assert corollary_bound_check(H, chi, s, 2).holds, name


def test_from_matrices_matches_order():
    Q = quotient(2, 2, "1", 4)
    doc = quotient_to_json(Q)
    groups = dict(harvest(doc, max_order=16))
    assert sorted(len(H) for H in groups.values())[:2] == [2, 4]
    assert any(len(H) == 6 and group_homology(H, s=1) == Z(0, (2,)) for H in groups.values())
