import random
from itertools import combinations, permutations

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from exco2.core import Hypergraph

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES = {}


def random_graph(rng, n, k=3, p=None):
    p = rng.random() if p is None else p
    return Hypergraph(n, k, [e for e in combinations(range(n), k) if rng.random() < p])


@st.composite
def hypergraphs(draw, min_n=0, max_n=7, k=3):
    n = draw(st.integers(min_n, max_n))
    slots = list(combinations(range(n), k))
    picks = draw(st.lists(st.booleans(), min_size=len(slots), max_size=len(slots)))
    return Hypergraph(n, k, [e for e, keep in zip(slots, picks) if keep])


@st.composite
def graph_and_perm(draw, min_n=1, max_n=7, k=3):
    G = draw(hypergraphs(min_n, max_n, k))
    perm = draw(st.permutations(list(range(G.n))))
    return G, tuple(perm)


def burnside_count(n, k=3):
    """Isomorphism classes of k-graphs on n vertices: average of 2^(cycles on k-sets)."""
    subsets = list(combinations(range(n), k))
    index = {s: i for i, s in enumerate(subsets)}
    total = 0
    perms = 0
    for p in permutations(range(n)):
        perms += 1
        seen = [False] * len(subsets)
        cycles = 0
        for i in range(len(subsets)):
            if seen[i]:
                continue
            cycles += 1
            j = i
            while not seen[j]:
                seen[j] = True
                j = index[tuple(sorted(p[v] for v in subsets[j]))]
        total += 2 ** cycles
    return total // perms


def brute_min_mask(G):
    """Smallest relabelled edge bitset over all n! permutations, computed without the library's ranks."""
    subsets = list(combinations(range(G.n), G.k))
    order = sorted(subsets, key=lambda s: tuple(reversed(s)))
    pos = {s: i for i, s in enumerate(order)}
    best = None
    for p in permutations(range(G.n)):
        m = 0
        for e in G.edges:
            m |= 1 << pos[tuple(sorted(p[v] for v in e))]
        best = m if best is None or m < best else best
    return best or 0


@pytest.fixture
def rng():
    return random.Random(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
