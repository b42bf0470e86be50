import random

import pytest
import sympy

from periodforge.character import Character, Verdict, classify
from periodforge.exactnum import QScalar
from periodforge.symplectic import (
    SpIntMatrix,
    block_sl2,
    block_swap,
    cross_shear,
    shear,
    transvection,
)

SQRT2 = QScalar.sqrt(2)


# -- random inputs ----------------------------------------------------------

def random_lattice_character(rng: random.Random, n: int, lo: int = -4, hi: int = 4) -> Character:
    """Integer character, redrawn until it is realizable with a rank-2 lattice image."""
    while True:
        u = [rng.randint(lo, hi) for _ in range(2 * n)]
        v = [rng.randint(lo, hi) for _ in range(2 * n)]
        chi = Character.from_rows(u, v)
        cls = classify(chi)
        if cls.verdict is Verdict.REALIZABLE_ABELIAN and cls.image.is_lattice:
            return chi


def random_sqrt2_scalar(rng: random.Random, lo: int = -3, hi: int = 3) -> QScalar:
    return QScalar(rng.randint(lo, hi)) + SQRT2 * rng.randint(lo, hi)


def random_nondiscrete_character(rng: random.Random, n: int = 3) -> Character:
    """Character over Q(sqrt 2) with omega > 0 and non-discrete image."""
    while True:
        u = [random_sqrt2_scalar(rng) for _ in range(2 * n)]
        v = [random_sqrt2_scalar(rng) for _ in range(2 * n)]
        chi = Character.from_rows(u, v, 2)
        cls = classify(chi)
        if cls.omega.sign() > 0 and not cls.image.discrete:
            return chi


def generator_pool(n: int):
    pool = []
    for j in range(n):
        pool += [block_sl2(n, j, ((1, 1), (0, 1))), block_sl2(n, j, ((1, 0), (-1, 1))),
                 block_sl2(n, j, ((0, 1), (-1, 0)))]
        for k in range(n):
            if k != j:
                pool += [shear(n, j, k, 1), shear(n, j, k, -2)]
                if k > j:
                    pool += [block_swap(n, j, k), cross_shear(n, j, k, 1)]
    vec = [1] + [0] * (2 * n - 2) + [1]
    pool.append(transvection(n, vec, 1))
    return pool


def random_word(rng: random.Random, n: int, length: int) -> SpIntMatrix:
    pool = generator_pool(n)
    g = SpIntMatrix.identity(n)
    for _ in range(length):
        g = g @ rng.choice(pool)
    return g


# -- independent oracles ----------------------------------------------------

def sympy_is_symplectic(entries) -> bool:
    M = sympy.Matrix(entries)
    n = M.shape[0] // 2
    J = sympy.zeros(2 * n, 2 * n)
    for j in range(n):
        J[2 * j, 2 * j + 1] = 1
        J[2 * j + 1, 2 * j] = -1
    return M.T * J * M == J and M.det() == 1


def union_find_euler(surface) -> tuple[int, int, int]:
    """V, E, F from raw corner identifications, without the rotation system."""
    E = len(surface.edges)
    parent = list(range(E))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    # corner e = start of edge e; the start of e is glued to the end of its partner
    succ = {}
    for f in surface.faces:
        m = len(f.edges)
        for i, e in enumerate(f.edges):
            succ[e] = f.edges[(i + 1) % m]
    for e in range(E):
        p = surface.pairing[e]
        union(e, succ[p])
        union(succ[e], p)
    V = len({find(e) for e in range(E)})
    edges = {frozenset((e, surface.pairing[e])) for e in range(E)}
    return V, len(edges), len(surface.faces)


@pytest.fixture
def rng():
    return random.Random(20261016)
