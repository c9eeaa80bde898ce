import itertools
import random

import pytest

from btq.bundles import poly_mat_mul
from btq.exactring import Poly
from btq.quotient import chamber_projection, pair_homology
from btq.symbols import (BasisTuple, SymbolEngine, antisymmetry_holds, apartment_core_chain,
                         boundary_in_truncation, bound_constants, cocycle_sum, index_and_exponent,
                         index_in_kernel_basis, modular_symbol, ms_lattice, primitive_vectors,
                         random_vectors, scaling_holds)
from conftest import quotient


def P(s, p=2):
    return Poly.parse(s, p)


def basis(rows, p=2):
    return BasisTuple.of([[P(x, p) for x in r] for r in rows], p)


def _gamma_elements(Q, k, rng):
    """Random products of the generators t*E_ij of Gamma_(t) (plus their transposes)."""
    p, d = Q.p, Q.d
    m = Q.spec.modulus
    out = []
    for _ in range(k):
        g = [[Poly.const(int(i == j), p) for j in range(d)] for i in range(d)]
        for _ in range(3):
            i, j = rng.sample(range(d), 2)
            E = [[Poly.const(int(r == c), p) for c in range(d)] for r in range(d)]
            E[i][j] = m * Poly([rng.randrange(p) for _ in range(2)], p)
            g = poly_mat_mul(g, E)
        out.append(g)
    return out


# --- constants -------------------------------------------------------------------------------

def test_bound_constants():
    assert bound_constants(2, 2)[0] == 0
    assert bound_constants(3, 2)[0] == 2
    assert bound_constants(4, 2)[0] == 8
    assert bound_constants(2, 2, q0=2)[1] == 3
    assert bound_constants(3, 2) == (2, 21)


# --- single symbols ----------------------------------------------------------------------------

def test_gl2_standard_symbol_folds_to_zero():
    Q = quotient(2, 2, "1", 4)
    ch = apartment_core_chain(basis([["1", "0"], ["0", "1"]]), Q)
    assert boundary_in_truncation(ch, Q)
    assert modular_symbol(basis([["1", "0"], ["0", "1"]]), Q).is_zero()
    assert pair_homology(Q).rank == 0


def test_degenerate_tuple_is_zero():
    Q = quotient(2, 2, "t", 2)
    b = basis([["t", "1"], ["t", "1"]])
    assert b.is_degenerate()
    assert apartment_core_chain(b, Q).is_zero()


def test_swap_negates():
    Q = quotient(2, 2, "t", 2)
    a = modular_symbol(basis([["1", "0"], ["0", "1"]]), Q)
    b = modular_symbol(basis([["0", "1"], ["1", "0"]]), Q)
    assert not a.is_zero()
    assert a == -b


def test_scaling_by_t_plus_one():
    Q = quotient(2, 2, "t", 2)
    b = basis([["1", "t"], ["0", "1"]])
    assert scaling_holds(b, 0, P("t+1"), Q)
    assert scaling_holds(b, 1, P("t^2+1"), Q)


def test_three_term_relation_d2():
    Q = quotient(2, 2, "t", 2)
    rng = random.Random(7)
    for _ in range(10):
        vs = random_vectors(rng, 2, 2, 1, 3)
        assert cocycle_sum(vs, Q).is_zero()


def test_gamma_invariance():
    rng = random.Random(8)
    for args in [(2, 2, "t", 2), (2, 2, "t+1", 3)]:
        Q = quotient(*args)
        b = basis([["1", "t"], ["t+1", "t^2"]])
        base = modular_symbol(b, Q)
        for g in _gamma_elements(Q, 4, rng):
            assert modular_symbol(b.acted(g), Q) == base


def test_symbols_are_relative_cycles():
    Q = quotient(2, 2, "t+1", 2)
    H = pair_homology(Q)
    eng = SymbolEngine(Q, H)
    for v in primitive_vectors(2, 2, 1)[:6]:
        for w in primitive_vectors(2, 2, 1)[:6]:
            b = BasisTuple((v, w), 2)
            ch = eng.chain(b)
            assert boundary_in_truncation(ch, Q)
            assert H.is_cycle(eng.vector(b))


@pytest.mark.parametrize("args", [(2, 2, "t", 2), (3, 2, "t", 2), (2, 2, "t^2+t+1", 2)])
def test_fast_path_matches_general(args):
    Q = quotient(*args)
    eng = SymbolEngine(Q)
    G = Q.G
    for u in range(0, len(G), max(1, len(G) // 6)):
        b = BasisTuple(tuple(zip(*G.lifts[u])), Q.p)
        assert eng.vector(b) == eng.vector(b, general=True)


def test_fast_path_matches_general_d3():
    Q = quotient(2, 3, "t", 3)
    eng = SymbolEngine(Q)
    for u in (0, 5, 77):
        b = BasisTuple(tuple(zip(*Q.G.lifts[u])), 2)
        assert eng.vector(b) == eng.vector(b, general=True)


def test_antisymmetry_all_transpositions_d3():
    Q = quotient(2, 3, "t", 3)
    b = basis([["1", "0", "0"], ["0", "1", "0"], ["t", "1", "1"]])
    for perm in itertools.permutations(range(3)):
        assert antisymmetry_holds(b, perm, Q)


def test_alpha_independence():
    lo, hi = quotient(2, 2, "t", 2), quotient(2, 2, "t", 3)
    proj = chamber_projection(hi, lo)
    Hlo, Hhi = pair_homology(lo), pair_homology(hi)
    pos_lo = {s: k for k, s in enumerate(Hlo.chambers)}
    rng = random.Random(4)
    for vs in (random_vectors(rng, 2, 2, 2, 2) for _ in range(6)):
        b = BasisTuple.of(vs, 2)
        if b.is_degenerate():
            continue
        v_hi = modular_symbol(b, hi).vector
        img = [0] * Hlo.n
        for k, x in enumerate(v_hi):
            if x and Hhi.chambers[k] in proj:
                img[pos_lo[proj[Hhi.chambers[k]]]] += x
        assert tuple(img) == modular_symbol(b, lo).vector


# --- the MS lattice -------------------------------------------------------------------------------

def test_gl2_lattice_is_zero():
    Q = quotient(2, 2, "1", 4)
    L = ms_lattice(Q)
    r = index_and_exponent(L, pair_homology(Q))
    assert L.rank == 0 and r.rank_ok and r.index == 1


@pytest.mark.parametrize("ideal", ["t", "t+1"])
def test_streams_agree_d2(ideal):
    Q = quotient(2, 2, ideal, 2)
    H = pair_homology(Q, basis=True)
    uni = ms_lattice(Q)
    allb = ms_lattice(Q, "all", max_deg=1)
    assert allb.stabilized
    assert uni.divisors == allb.divisors
    assert all(uni.contains(c) for c in allb.columns)
    assert all(allb.contains(c) for c in uni.columns)
    assert index_in_kernel_basis(uni, H) == index_in_kernel_basis(allb, H) == 1


def test_index_report_for_congruence_case():
    Q = quotient(2, 2, "t^2+t+1", 2)
    H = pair_homology(Q, basis=True)
    L = ms_lattice(Q)
    r = index_and_exponent(L, H)
    assert r.rank_ok and r.rank_ms == 20 and r.index == 1 and r.exponent == 1
    assert index_in_kernel_basis(L, H) == 1


def test_index_detects_sublattice():
    """A kernel basis with one vector doubled spans an index-2 sublattice."""
    from btq.exactring import elementary_divisors
    from btq.symbols import MSLattice
    H = pair_homology(quotient(2, 2, "t^2+t+1", 2), basis=True)
    cols = [tuple(z) for z in H.basis]
    cols[0] = tuple(2 * x for x in cols[0])
    L = MSLattice(cols, elementary_divisors([list(c) for c in cols]), "test", True)
    r = index_and_exponent(L, H)
    assert r.rank_ok and r.index == 2 and r.exponent == 2
    assert index_in_kernel_basis(L, H) == 2
    short = MSLattice(cols[1:], elementary_divisors([list(c) for c in cols[1:]]), "test", True)
    assert not index_and_exponent(short, H).rank_ok and index_and_exponent(short, H).index is None


def test_unknown_stream():
    with pytest.raises(ValueError):
        ms_lattice(quotient(2, 2, "t", 2), "bogus")
