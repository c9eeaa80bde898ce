"""Small complexes and generators shared by several test modules."""
import itertools

from btq.building import vertex_key
from btq.exactring import KElem, identity, mat_mul
from btq.simplicial import Complex

RP2 = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 1, 5),
       (1, 2, 4), (2, 3, 5), (1, 3, 4), (2, 4, 5), (1, 3, 5)]


def random_complex(rng, max_vertices=7, max_dim=3, n_simplices=None):
    nv = rng.randint(1, max_vertices)
    k = n_simplices if n_simplices is not None else rng.randint(1, 8)
    tops = []
    for _ in range(k):
        size = rng.randint(1, min(nv, max_dim + 1))
        tops.append(rng.sample(range(nv), size))
    return Complex.from_simplices(tops)


def sphere(n):
    """Boundary of the (n+1)-simplex: an n-sphere."""
    return Complex.from_simplices(itertools.combinations(range(n + 2), n + 1))


def two_edge_loop():
    """Two vertices joined by two distinct edges (not a strict complex)."""
    return Complex([[(0,), (1,)], [(0, 1), (0, 1)]], [[(), ()], [(1, 0), (1, 0)]])


def random_k(rng, p, lo=-2, hi=3):
    """A random Laurent polynomial in pi with exponents in [lo, hi]."""
    acc = KElem.const(0, p)
    for e in range(lo, hi + 1):
        c = rng.randrange(p)
        if c:
            acc = acc + KElem.pi(p, e) * c
    return acc


def random_unit(rng, p, d):
    """Unitriangular products: an element of GL_d(O) with entries in F_p[pi]."""
    L = identity(d, p)
    U = identity(d, p)
    for i in range(d):
        for j in range(d):
            if i > j:
                L[i][j] = random_k(rng, p, 0, 3)
            elif i < j:
                U[i][j] = random_k(rng, p, 0, 3)
    D = [[KElem.const(rng.randrange(1, p), p) if i == j else KElem.const(0, p) for j in range(d)]
         for i in range(d)]
    return mat_mul(mat_mul(L, D), U)


def random_lattice(rng, p, d):
    while True:
        g = [[random_k(rng, p) for _ in range(d)] for _ in range(d)]
        try:
            vertex_key(g, p)
            return g
        except ValueError:
            continue
