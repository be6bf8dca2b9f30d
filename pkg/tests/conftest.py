"""Independent oracles shared by the test modules.

Nothing here calls the code under test for the quantity being checked:
spectra come from numpy.linalg.eigvalsh on the full adjacency matrix,
isomorphism from brute force over all row and column permutations.
"""

import itertools
import random

import numpy as np
import pytest
from hypothesis import strategies as st

from bispectral.graph import BipartiteGraph, from_biadjacency


def eig_rho(g: BipartiteGraph) -> float:
    if g.e == 0:
        return 0.0
    return float(np.linalg.eigvalsh(g.adjacency().astype(float)).max())


def brute_canonical(g: BipartiteGraph) -> tuple:
    b = g.biadjacency()
    best = None
    for rp in itertools.permutations(range(g.p)):
        for cp in itertools.permutations(range(g.q)):
            key = tuple(b[np.ix_(rp, cp)].ravel())
            if best is None or key > best:
                best = key
    return best


def labelled_graphs(p: int, q: int, e: int):
    cells = list(itertools.product(range(p), range(q)))
    for chosen in itertools.combinations(cells, e):
        rows = [0] * p
        for i, j in chosen:
            rows[i] |= 1 << j
        yield BipartiteGraph(p, q, tuple(rows))


def random_graph(rng: random.Random, pmax: int = 10, qmax: int = 10) -> BipartiteGraph:
    p, q = rng.randint(1, pmax), rng.randint(1, qmax)
    dens = rng.random()
    return from_biadjacency([[int(rng.random() < dens) for _ in range(q)] for _ in range(p)])


@st.composite
def graphs(draw, pmax=6, qmax=6):
    p = draw(st.integers(1, pmax))
    q = draw(st.integers(1, qmax))
    rows = draw(st.lists(st.integers(0, (1 << q) - 1), min_size=p, max_size=p))
    return BipartiteGraph(p, q, tuple(rows))


@pytest.fixture
def k235():
    return from_biadjacency([[1, 1, 1], [1, 1, 0]])


@pytest.fixture
def path4():
    return from_biadjacency([[1, 1], [1, 0]])
