"""Induced and non-induced subgraph counts, labelled densities and the exact
4-vertex decomposition of co2 for 3-graphs."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from math import comb
from typing import Sequence

import numpy as np

from .canon import canonical_form
from .core import Hypergraph, co2, colex_rank, colex_table, normalizer, ranks_of, small_subsets
from .errors import OutOfRangeVertex, SizeMismatch, TooLarge, TooSmall, UniformityMismatch, WrongUniformity

MAX_PATTERN_VERTICES = 9


def local_masks(G: Hypergraph, f: int) -> np.ndarray:
    """Bitset of G[S] in local colex order, for every f-subset S (in colex order)."""
    k = G.k
    slots = comb(f, k)
    subs = colex_table(G.n, f)
    if len(subs) == 0:
        return np.zeros(0, dtype=object if slots > 62 else np.int64)
    inner = colex_table(f, k)
    glob = subs[:, inner]  # rows stay sorted: subs and inner are both increasing
    ranks = ranks_of(glob.reshape(-1, k)).reshape(len(subs), slots)
    bits = G.indicator()[ranks]
    if slots <= 62:
        weights = np.left_shift(np.int64(1), np.arange(slots, dtype=np.int64))
        return (bits.astype(np.int64) * weights).sum(axis=1)
    return np.array([sum(1 << int(i) for i in np.flatnonzero(row)) for row in bits], dtype=object)


def local_mask(G: Hypergraph, vertices: Sequence[int]) -> int:
    """Bitset of G restricted to ``vertices`` in the given order (position i -> local vertex i)."""
    mask = 0
    for i, sub in enumerate(small_subsets(len(vertices), G.k)):
        if G.has_edge([vertices[p] for p in sub]):
            mask |= 1 << i
    return mask


@lru_cache(maxsize=256)
def _images(n: int, k: int, mask: int, fixed: int = 0) -> frozenset:
    G = Hypergraph.from_mask(n, k, mask)
    edges = G.edges
    if G.num_edges in (0, G.num_slots):
        return frozenset([mask])
    out = set()
    head = tuple(range(fixed))
    for tail in permutations(range(fixed, n)):
        perm = head + tail
        m = 0
        for e in edges:
            m |= 1 << colex_rank([perm[v] for v in e])
        out.add(m)
    return frozenset(out)


def pattern_images(F: Hypergraph, fixed: int = 0) -> frozenset:
    """All bitsets of relabellings of F that fix vertices ``0..fixed-1``."""
    if F.n > MAX_PATTERN_VERTICES:
        raise TooLarge(f"patterns limited to {MAX_PATTERN_VERTICES} vertices")
    return _images(F.n, F.k, F.mask, fixed)


def automorphism_count(F: Hypergraph) -> int:
    from math import factorial

    return factorial(F.n) // len(pattern_images(F))


def _check_pair(F: Hypergraph, G: Hypergraph):
    if F.k != G.k:
        raise UniformityMismatch(f"pattern is {F.k}-uniform, host is {G.k}-uniform")
    if F.n > G.n:
        raise SizeMismatch("pattern has more vertices than host")


def count_induced(F: Hypergraph, G: Hypergraph) -> int:
    """Number of |V(F)|-subsets of V(G) inducing a copy of F."""
    _check_pair(F, G)
    masks = local_masks(G, F.n)
    images = pattern_images(F)
    if masks.dtype == object:
        return sum(1 for m in masks if m in images)
    return int(np.isin(masks, np.fromiter(images, dtype=np.int64)).sum())


def count_copies(F: Hypergraph, G: Hypergraph) -> int:
    """Number of (not necessarily induced) subgraphs of G isomorphic to F."""
    _check_pair(F, G)
    masks = local_masks(G, F.n)
    total = 0
    for img in pattern_images(F):
        if masks.dtype == object:
            total += sum(1 for m in masks if m & img == img)
        else:
            total += int(((masks & np.int64(img)) == np.int64(img)).sum())
    return total


def induced_density(F: Hypergraph, G: Hypergraph) -> Fraction:
    return Fraction(count_induced(F, G), comb(G.n, F.n))


def induced_profile(G: Hypergraph, m: int) -> Counter:
    """Counts of m-vertex induced subgraphs keyed by canonical bitset."""
    cache: dict[int, int] = {}
    out: Counter = Counter()
    for raw in local_masks(G, m):
        raw = int(raw)
        if raw not in cache:
            cache[raw] = canonical_form(Hypergraph.from_mask(m, G.k, raw)).mask
        out[cache[raw]] += 1
    return out


# -- labelled graphs -------------------------------------------------------


@dataclass(frozen=True)
class LabelledGraph:
    base: Hypergraph
    theta: tuple[int, ...]

    def __post_init__(self):
        theta = tuple(int(v) for v in self.theta)
        object.__setattr__(self, "theta", theta)
        if len(set(theta)) != len(theta):
            raise OutOfRangeVertex("labels must be distinct vertices")
        for v in theta:
            if not 0 <= v < self.base.n:
                raise OutOfRangeVertex(f"label {v} not a vertex")

    def labels_first(self) -> Hypergraph:
        """Same graph relabelled so the labelled vertices come first, in label order."""
        rest = [v for v in range(self.base.n) if v not in self.theta]
        order = list(self.theta) + rest
        return self.base.induced(order)


def codegree_flag() -> LabelledGraph:
    """Three vertices, two labelled, one edge through all three."""
    return LabelledGraph(Hypergraph(3, 3, [(0, 1, 2)]), (0, 1))


def labelled_density(flag: LabelledGraph, host: LabelledGraph) -> Fraction:
    """Probability that the labelled vertices of ``host`` together with a uniform
    random set of the right size induce a copy of ``flag`` respecting labels."""
    H, G = flag.base, host.base
    if H.k != G.k:
        raise UniformityMismatch("flag and host uniformities differ")
    t = len(flag.theta)
    if len(host.theta) != t:
        raise SizeMismatch("flag and host have different numbers of labels")
    if H.n > G.n:
        raise SizeMismatch("flag larger than host")
    images = pattern_images(flag.labels_first(), fixed=t)
    free = [v for v in range(G.n) if v not in host.theta]
    extra = H.n - t
    total = comb(len(free), extra)
    hits = 0
    for sub in small_subsets(len(free), extra):
        if local_mask(G, list(host.theta) + [free[i] for i in sub]) in images:
            hits += 1
    return Fraction(hits, total)


# -- co2 identities --------------------------------------------------------


@dataclass(frozen=True)
class FourProfile:
    N0: int
    N1: int
    N2: int
    N3: int
    N4: int

    @property
    def total(self) -> int:
        return self.N0 + self.N1 + self.N2 + self.N3 + self.N4

    def as_tuple(self) -> tuple[int, int, int, int, int]:
        return (self.N0, self.N1, self.N2, self.N3, self.N4)


@dataclass(frozen=True)
class Co2Decomposition:
    profile: FourProfile
    edges: int
    co2: int

    @property
    def rhs(self) -> int:
        p = self.profile
        return 3 * self.edges + 2 * (p.N2 + 3 * p.N3 + 6 * p.N4)

    @property
    def holds(self) -> bool:
        return self.co2 == self.rhs


def four_profile(G: Hypergraph) -> FourProfile:
    if G.k != 3:
        raise WrongUniformity("four-vertex profile is defined for 3-graphs")
    masks = local_masks(G, 4)
    pop = np.zeros(len(masks), dtype=np.int64)
    for i in range(4):
        pop += (masks >> i) & 1
    counts = np.bincount(pop, minlength=5)
    return FourProfile(*(int(c) for c in counts))


def co2_decomposition(G: Hypergraph) -> Co2Decomposition:
    """co2(G) = 3|E| + 2(N2 + 3 N3 + 6 N4), where Ni counts 4-sets spanning i edges.

    Each pair's d(d-1) counts ordered pairs of extension vertices that both
    complete it; a 4-set with 2, 3 or 4 edges holds 1, 3 or 6 such pairs.
    """
    if G.k != 3:
        raise WrongUniformity("decomposition is defined for 3-graphs")
    if G.n < 4:
        raise TooSmall("decomposition needs n >= 4")
    dec = Co2Decomposition(four_profile(G), G.num_edges, co2(G))
    if not dec.holds:
        raise AssertionError(f"co2 identity failed: {dec.co2} != {dec.rhs}")
    return dec


def normalized_co2(G: Hypergraph) -> Fraction:
    if G.n < G.k:
        raise TooSmall("normalisation needs n >= k")
    return Fraction(co2(G), normalizer(G.n, G.k))


@dataclass(frozen=True)
class JumpsReport:
    lower: Fraction
    value: int
    upper: int

    @property
    def lower_slack(self) -> Fraction:
        return self.value - self.lower

    @property
    def upper_slack(self) -> int:
        return self.upper - self.value

    @property
    def ok(self) -> bool:
        return self.lower_slack >= 0 and self.upper_slack >= 0

    @property
    def tight(self) -> bool:
        return self.lower_slack == 0 and self.upper_slack == 0


def jumps_bounds_check(G: Hypergraph) -> JumpsReport:
    """Cauchy-Schwarz lower bound and codegree-cap upper bound on co2."""
    k, m = G.k, G.num_edges
    slots = comb(G.n, k - 1)
    lower = Fraction((k * m) ** 2, slots) if slots else Fraction(0)
    upper = k * max(G.n - k + 1, 0) * m
    return JumpsReport(lower, co2(G), upper)
