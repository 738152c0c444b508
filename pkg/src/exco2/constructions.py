"""Named 3-graph families and the cycle-cover constructions G(D)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .core import Hypergraph, co2, colex_table, complete, ranks_of
from .errors import BadWeights, NotACycleCover, TooSmall, UnknownName


@dataclass(frozen=True)
class Partition:
    classes: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen = [v for c in self.classes for v in c]
        if sorted(seen) != list(range(len(seen))):
            raise BadWeights("partition classes must be disjoint and cover 0..n-1")

    @property
    def n(self) -> int:
        return sum(len(c) for c in self.classes)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.classes)

    def labels(self) -> np.ndarray:
        lab = np.empty(self.n, dtype=np.int32)
        for i, c in enumerate(self.classes):
            lab[list(c)] = i
        return lab

    @classmethod
    def from_sizes(cls, sizes: Sequence[int]) -> "Partition":
        if any(s < 0 for s in sizes):
            raise BadWeights(f"negative class size in {sizes}")
        out, start = [], 0
        for s in sizes:
            out.append(tuple(range(start, start + s)))
            start += s
        return cls(tuple(out))


def balanced_sizes(n: int, parts: int, larger_first: bool = True) -> list[int]:
    q, r = divmod(n, parts)
    sizes = [q + 1] * r + [q] * (parts - r)
    return sizes if larger_first else sizes[::-1]


def _class_counts(n: int, sizes: Sequence[int]) -> np.ndarray:
    """(C(n,3), len(sizes)) array: how many vertices of each triple lie in each class."""
    lab = Partition.from_sizes(sizes).labels()
    triples = colex_table(n, 3)
    cls = lab[triples]
    return np.stack([(cls == j).sum(axis=1) for j in range(len(sizes))], axis=1)


def _from_indicator(n: int, ind: np.ndarray) -> Hypergraph:
    return Hypergraph.from_indicator(n, 3, ind)


def build_Cn(n: int) -> Hypergraph:
    """Three near-equal classes: transversal triples plus V1V1V2, V2V2V3, V3V3V1."""
    if n < 3:
        raise TooSmall("C_n needs n >= 3")
    sizes = [n // 3, (n + 1) // 3, (n + 2) // 3]
    c = _class_counts(n, sizes)
    ind = (
        ((c[:, 0] == 1) & (c[:, 1] == 1) & (c[:, 2] == 1))
        | ((c[:, 0] == 2) & (c[:, 1] == 1))
        | ((c[:, 1] == 2) & (c[:, 2] == 1))
        | ((c[:, 2] == 2) & (c[:, 0] == 1))
    )
    return _from_indicator(n, ind)


def build_Bn(n: int) -> Hypergraph:
    """Complete bipartite 3-graph: parts of size ceil(n/2) and floor(n/2)."""
    if n < 3:
        raise TooSmall("B_n needs n >= 3")
    c = _class_counts(n, [(n + 1) // 2, n // 2])
    return _from_indicator(n, (c[:, 0] >= 1) & (c[:, 1] >= 1))


def co2_Bn_closed_form(n: int) -> int:
    if n < 2:
        raise TooSmall("closed form needs n >= 2")
    hi, lo = (n + 1) // 2, n // 2
    return comb(hi, 2) * lo**2 + comb(lo, 2) * hi**2 + hi * lo * (n - 2) ** 2


def build_Sn(n: int) -> Hypergraph:
    """Complete balanced 3-partite 3-graph, part sizes floor(n/3), floor((n+1)/3), floor((n+2)/3)."""
    if n < 3:
        raise TooSmall("S_n needs n >= 3")
    c = _class_counts(n, [n // 3, (n + 1) // 3, (n + 2) // 3])
    return _from_indicator(n, (c == 1).all(axis=1))


def _h5_sizes(n: int) -> list[int]:
    if n < 4:
        raise TooSmall("H5 needs n >= 4")
    return balanced_sizes(n, 4)


def build_H5(n: int) -> Hypergraph:
    """A triple is a non-edge iff some class j has |e & A_j| >= 2 and |e & A_j| + |e & A_{j+1}| = 3."""
    c = _class_counts(n, _h5_sizes(n))
    bad = np.zeros(len(c), dtype=bool)
    for j in range(4):
        nxt = (j + 1) % 4
        bad |= (c[:, j] >= 2) & (c[:, j] + c[:, nxt] == 3)
    return _from_indicator(n, ~bad)


def h5_complement_edges(n: int) -> set[tuple[int, ...]]:
    """Non-edges of H5 listed class by class: triples inside A_j, and pairs of A_j with a vertex of A_{j+1}."""
    part = Partition.from_sizes(_h5_sizes(n)).classes
    out = set()
    for j in range(4):
        out.update(itertools.combinations(part[j], 3))
        for pair in itertools.combinations(part[j], 2):
            for w in part[(j + 1) % 4]:
                out.add(tuple(sorted(pair + (w,))))
    return out


F4_EDGES = [(1, 2, 3), (1, 2, 4), (2, 3, 4)]
F5_EDGES = [(1, 2, 3), (1, 2, 4), (3, 4, 5)]
F33_EDGES = [(1, 2, 3), (1, 4, 5), (1, 4, 6), (1, 5, 6), (2, 4, 5),
             (2, 4, 6), (2, 5, 6), (3, 4, 5), (3, 4, 6), (3, 5, 6)]


def _one_based(n: int, edges) -> Hypergraph:
    return Hypergraph(n, 3, [tuple(v - 1 for v in e) for e in edges])


def build_F4() -> Hypergraph:
    return _one_based(4, F4_EDGES)


def build_F5() -> Hypergraph:
    return _one_based(5, F5_EDGES)


def build_F33() -> Hypergraph:
    return _one_based(6, F33_EDGES)


def build_K(ell: int, k: int = 3) -> Hypergraph:
    if ell < k:
        raise TooSmall(f"K_{ell}^{k} needs ell >= k")
    return complete(ell, k)


# -- directed cycle covers ---------------------------------------------------


@dataclass(frozen=True)
class DirectedCycleCover:
    """Vertex-disjoint directed cycles (length >= 2) covering vertices 0..m-1."""

    m: int
    arcs: frozenset

    def __post_init__(self):
        arcs = frozenset((int(i), int(j)) for i, j in self.arcs)
        object.__setattr__(self, "arcs", arcs)
        out = [0] * self.m
        inn = [0] * self.m
        for i, j in arcs:
            if i == j:
                raise NotACycleCover(f"loop at {i}")
            if not (0 <= i < self.m and 0 <= j < self.m):
                raise NotACycleCover(f"arc {(i, j)} outside 0..{self.m - 1}")
            out[i] += 1
            inn[j] += 1
        if any(d != 1 for d in out + inn):
            raise NotACycleCover("every vertex needs in- and out-degree 1")

    @classmethod
    def from_cycles(cls, m: int, cycles: Iterable[Sequence[int]]) -> "DirectedCycleCover":
        arcs = set()
        for cyc in cycles:
            cyc = list(cyc)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                arcs.add((a, b))
        return cls(m, frozenset(arcs))

    def successor(self) -> dict[int, int]:
        return dict(self.arcs)

    def cycles(self) -> list[tuple[int, ...]]:
        succ = self.successor()
        seen, out = set(), []
        for start in range(self.m):
            if start in seen:
                continue
            cyc, v = [], start
            while v not in seen:
                seen.add(v)
                cyc.append(v)
                v = succ[v]
            out.append(tuple(cyc))
        return out

    def cycle_type(self) -> tuple[int, ...]:
        return tuple(sorted(len(c) for c in self.cycles()))

    def is_isomorphic(self, other: "DirectedCycleCover") -> bool:
        return self.m == other.m and self.cycle_type() == other.cycle_type()


def build_Dstar(k: int) -> DirectedCycleCover:
    """The cover with the most cycles on k-1 vertices: all 2-cycles, plus one 3-cycle when k is even."""
    if k < 4:
        raise TooSmall("D*_k needs k >= 4")
    m = k - 1
    if k % 2:
        cycles = [(i, i + 1) for i in range(0, m, 2)]
    else:
        cycles = [(i, i + 1) for i in range(0, k - 5, 2)] + [(k - 4, k - 3, k - 2)]
    return DirectedCycleCover.from_cycles(m, cycles)


def _partitions_min2(m: int, largest: int | None = None) -> list[tuple[int, ...]]:
    largest = m if largest is None else largest
    if m == 0:
        return [()]
    out = []
    for first in range(min(m, largest), 1, -1):
        for rest in _partitions_min2(m - first, first):
            out.append((first,) + rest)
    return out


def enumerate_cycle_covers(m: int, labeled: bool = False) -> list[DirectedCycleCover]:
    """One cover per isomorphism class (cycle-length multiset), or every labelled cover."""
    if m < 2:
        raise TooSmall("cycle covers need at least 2 vertices")
    if labeled:
        out = []
        for perm in itertools.permutations(range(m)):
            if all(perm[i] != i for i in range(m)):
                out.append(DirectedCycleCover(m, frozenset(enumerate(perm))))
        return out
    out = []
    for lengths in sorted(_partitions_min2(m), key=lambda p: sorted(p)):
        cycles, start = [], 0
        for ell in sorted(lengths):
            cycles.append(tuple(range(start, start + ell)))
            start += ell
        out.append(DirectedCycleCover.from_cycles(m, cycles))
    return out


def two_block_weights(k: int, n: int, last3: int) -> list[int]:
    """Class sizes for G*(D*_k): the first k-4 classes balanced on n - last3 vertices,
    the last three balanced on ``last3`` vertices."""
    if k < 4:
        raise TooSmall("needs k >= 4")
    if not 0 <= last3 <= n:
        raise BadWeights(f"last3 must lie in 0..{n}")
    if k == 4:
        if last3 != n:
            raise BadWeights("k=4 has only the three-class block")
        return balanced_sizes(n, 3)
    return balanced_sizes(n - last3, k - 4) + balanced_sizes(last3, 3)


def build_GD(D: DirectedCycleCover, n: int, weights: Sequence[int] | None = None) -> Hypergraph:
    """Non-edges: triples inside one class, and triples with two vertices in V_i and one in V_j for an arc (i, j)."""
    if not isinstance(D, DirectedCycleCover):
        raise NotACycleCover("expected a DirectedCycleCover")
    m = D.m
    if n < m:
        raise TooSmall(f"need n >= {m}")
    if weights is None:
        weights = balanced_sizes(n, m)
    weights = list(weights)
    if len(weights) != m or sum(weights) != n or any(w < 0 for w in weights):
        raise BadWeights(f"weights {weights} must be {m} nonnegative sizes summing to {n}")
    lab = Partition.from_sizes(weights).labels()
    cls = np.sort(lab[colex_table(n, 3)], axis=1)
    a, b, c = cls[:, 0], cls[:, 1], cls[:, 2]
    arc = np.zeros((m, m), dtype=bool)
    for i, j in D.arcs:
        arc[i, j] = True
    inside = (a == c)
    # exactly two in one class: doubled class is the middle value
    two = (a == b) ^ (b == c)
    double = b
    single = np.where(a == b, c, a)
    bad = inside | (two & arc[double, single])
    return _from_indicator(n, ~bad)


def sweep_gstar(k: int, n: int, step: int = 1) -> list[tuple[int, int]]:
    """co2 of G(D*_k) for every size of the three-class block (even k >= 6)."""
    if k < 6 or k % 2:
        raise TooSmall("the two-block weighting applies to even k >= 6")
    D = build_Dstar(k)
    out = []
    for s in range(0, n + 1, step):
        G = build_GD(D, n, two_block_weights(k, n, s))
        out.append((s, co2(G)))
    return out


def blow_up(H: Hypergraph, t: int) -> Hypergraph:
    """Replace vertex x by x*t .. x*t+t-1 and each edge by all t^k transversal edges."""
    if t < 1:
        raise TooSmall("blow-up factor must be >= 1")
    if H.num_edges == 0:
        return Hypergraph.from_mask(H.n * t, H.k, 0)
    arr = H.edge_array.astype(np.int64)
    offsets = np.array(list(itertools.product(range(t), repeat=H.k)), dtype=np.int64)
    rows = (arr[:, None, :] * t + offsets[None, :, :]).reshape(-1, H.k)
    ind = np.zeros(comb(H.n * t, H.k), dtype=bool)
    ind[ranks_of(rows)] = True
    return Hypergraph.from_indicator(H.n * t, H.k, ind)


# -- name registry -----------------------------------------------------------

NAMES = {
    "Cn": "balanced 3-class 3-graph with cyclic 2+1 edges (needs --n)",
    "Bn": "balanced complete bipartite 3-graph (needs --n)",
    "Sn": "balanced complete 3-partite 3-graph (needs --n)",
    "H5": "4-class 3-graph with the cyclic non-edge rule (needs --n)",
    "F4": "4 vertices, edges 123 124 234",
    "F5": "5 vertices, edges 123 124 345",
    "F33": "6 vertices, 123 plus the 9 triples 1|2|3 x pair of 456",
    "K": "complete k-graph on --n vertices (uniformity --k, default 3)",
    "GDstar": "G(D*_k) on --n vertices with balanced classes (needs --k)",
}


def build_named(name: str, n: int | None = None, k: int | None = None) -> Hypergraph:
    def need_n():
        if n is None:
            raise TooSmall(f"{name} needs a vertex count")
        return n

    if name == "F4":
        return build_F4()
    if name == "F5":
        return build_F5()
    if name == "F33":
        return build_F33()
    if name == "Cn":
        return build_Cn(need_n())
    if name == "Bn":
        return build_Bn(need_n())
    if name == "Sn":
        return build_Sn(need_n())
    if name == "H5":
        return build_H5(need_n())
    if name == "K":
        return build_K(need_n(), 3 if k is None else k)
    if name == "GDstar":
        if k is None:
            raise TooSmall("GDstar needs --k")
        return build_GD(build_Dstar(k), need_n())
    raise UnknownName(f"unknown construction {name!r}; known: {', '.join(NAMES)}")
