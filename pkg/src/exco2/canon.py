"""Canonical labelling of small hypergraphs.

Vertices are coloured by an iterated incidence refinement, then non-singleton
cells are split by individualising each vertex in turn.  Every leaf of the
search tree gives a relabelling; the canonical form is the leaf whose edge
bitset is smallest.  Vertices that can be swapped by a transposition
automorphism ("twins") are branched on only once per cell.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

from .core import Hypergraph, colex_rank
from .errors import TooLarge

DEFAULT_MAX_N = 16


@dataclass(frozen=True)
class CanonicalForm:
    n: int
    k: int
    mask: int
    perm: tuple[int, ...]  # vertex v of the input is vertex perm[v] of the canonical graph

    @property
    def graph(self) -> Hypergraph:
        return Hypergraph.from_mask(self.n, self.k, self.mask)

    def key(self) -> tuple[int, int, int]:
        return (self.n, self.k, self.mask)

    def __eq__(self, other):
        if not isinstance(other, CanonicalForm):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())


def _incidence(n, edges):
    inc = [[] for _ in range(n)]
    for e in edges:
        for v in e:
            inc[v].append(tuple(u for u in e if u != v))
    return inc


def _refine(inc, colors):
    ncol = len(set(colors))
    while True:
        sigs = [
            (colors[v], tuple(sorted(tuple(sorted(colors[u] for u in rest)) for rest in inc[v])))
            for v in range(len(colors))
        ]
        order = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [order[s] for s in sigs]
        if len(order) == ncol:
            return new
        colors, ncol = new, len(order)


def _twin_ids(n, edges, edge_set):
    """Label each vertex by its class under 'transposition (u v) is an automorphism'."""
    inc = [[] for _ in range(n)]
    for e in edges:
        for v in e:
            inc[v].append(e)
    ids = list(range(n))
    for u in range(n):
        if ids[u] != u:
            continue
        for v in range(u + 1, n):
            if ids[v] != v or len(inc[u]) != len(inc[v]):
                continue
            swap = {u: v, v: u}
            if all(tuple(sorted(swap.get(w, w) for w in e)) in edge_set for e in inc[u]):
                ids[v] = u
    return ids


def canonical_form(G: Hypergraph, max_n: int = DEFAULT_MAX_N) -> CanonicalForm:
    n, k = G.n, G.k
    if n > max_n:
        raise TooLarge(f"canonical form limited to n <= {max_n}, got {n}")
    edges = G.edges
    if n <= 1 or not edges or len(edges) == G.num_slots:
        return CanonicalForm(n, k, G.mask, tuple(range(n)))
    inc = _incidence(n, edges)
    twins = _twin_ids(n, edges, set(edges))
    best = [None, None]

    def leaf(colors):
        mask = 0
        for e in edges:
            mask |= 1 << colex_rank([colors[v] for v in e])
        if best[0] is None or mask < best[0]:
            best[0], best[1] = mask, tuple(colors)

    def search(colors):
        counts = {}
        for c in colors:
            counts[c] = counts.get(c, 0) + 1
        target = min((c for c, m in counts.items() if m > 1), default=None)
        if target is None:
            leaf(colors)
            return
        tried = set()
        for u in range(n):
            if colors[u] != target or twins[u] in tried:
                continue
            tried.add(twins[u])
            child = [2 * c + (0 if v == u or c != target else 1) for v, c in enumerate(colors)]
            search(_refine(inc, child))

    search(_refine(inc, [0] * n))
    return CanonicalForm(n, k, best[0], best[1])


def canonical_graph(G: Hypergraph, max_n: int = DEFAULT_MAX_N) -> Hypergraph:
    return canonical_form(G, max_n).graph


def is_isomorphic(G: Hypergraph, H: Hypergraph, max_n: int = DEFAULT_MAX_N) -> bool:
    if (G.n, G.k, G.num_edges) != (H.n, H.k, H.num_edges):
        return False
    return canonical_form(G, max_n) == canonical_form(H, max_n)


def brute_force_canonical_mask(G: Hypergraph) -> int:
    """Minimum relabelled bitset over all n! permutations (test oracle, tiny n only)."""
    best = None
    for perm in permutations(range(G.n)):
        mask = 0
        for e in G.edges:
            mask |= 1 << colex_rank([perm[v] for v in e])
        if best is None or mask < best:
            best = mask
    return best if best is not None else 0
