"""Isomorph-free generation of F-free hypergraphs and exact exco2 at small n.

Graphs on m vertices are built from the classes on m-1 vertices by adding
vertex m-1 together with a set of edges through it.  Because edge bitsets are
colex ranked, the edges through the new vertex occupy the bit range
``[C(m-1, k), C(m, k))`` and the child is ``parent | link << C(m-1, k)``.
Children are deduplicated by canonical form.  Deleting a vertex preserves
F-freeness in both subgraph and induced mode, so augmenting only F-free
parents loses nothing.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Iterable, Iterator, Sequence

import numpy as np

from .canon import canonical_form
from .constructions import DirectedCycleCover, build_Dstar, build_GD, enumerate_cycle_covers
from .core import Hypergraph, co2, colex_rank, normalizer, small_subsets
from .densities import count_copies, count_induced, pattern_images
from .errors import TooLarge, TooSmall, UniformityMismatch

DEFAULT_MAX_N = 7
SUBGRAPH = "subgraph"
INDUCED = "induced"


@dataclass(frozen=True)
class ForbiddenFamily:
    patterns: tuple[Hypergraph, ...] = ()
    modes: tuple[str, ...] = ()

    def __post_init__(self):
        pats = tuple(self.patterns)
        modes = tuple(self.modes) if self.modes else (SUBGRAPH,) * len(pats)
        if len(modes) != len(pats):
            raise ValueError("one mode per pattern")
        if any(m not in (SUBGRAPH, INDUCED) for m in modes):
            raise ValueError(f"modes must be {SUBGRAPH!r} or {INDUCED!r}")
        if len({p.k for p in pats}) > 1:
            raise UniformityMismatch("all forbidden patterns must share a uniformity")
        object.__setattr__(self, "patterns", pats)
        object.__setattr__(self, "modes", modes)

    @classmethod
    def of(cls, *patterns: Hypergraph, mode: str = SUBGRAPH) -> "ForbiddenFamily":
        return cls(tuple(patterns), (mode,) * len(patterns))

    @property
    def k(self) -> int | None:
        return self.patterns[0].k if self.patterns else None

    def key(self):
        return tuple((p.n, p.k, p.mask, m) for p, m in zip(self.patterns, self.modes))

    def admits(self, G: Hypergraph) -> bool:
        """True iff G contains no forbidden pattern (post-hoc check via counting)."""
        for p, mode in zip(self.patterns, self.modes):
            if p.n > G.n:
                continue
            count = count_copies(p, G) if mode == SUBGRAPH else count_induced(p, G)
            if count:
                return False
        return True


class _PatternCheck:
    def __init__(self, pattern: Hypergraph, mode: str):
        self.f = pattern.n
        self.k = pattern.k
        images = pattern_images(pattern)
        complete_pattern = pattern.num_edges == pattern.num_slots
        covered = {v for e in pattern.edges for v in e}
        self.subgraph = mode == SUBGRAPH or complete_pattern
        self.prunable = self.subgraph
        self.needs_leaf = (not self.subgraph) or len(covered) < pattern.n
        slots = pattern.num_slots
        if self.subgraph and slots <= 20:
            arr = np.arange(1 << slots, dtype=np.int64)
            hit = np.zeros(1 << slots, dtype=bool)
            for img in images:
                hit |= (arr & img) == img
            self.table = hit
        else:
            self.table = None
        self.images = images

    def hit(self, local: int) -> bool:
        if self.table is not None:
            return bool(self.table[local])
        if self.subgraph:
            return any(img & local == img for img in self.images)
        return local in self.images


@lru_cache(maxsize=64)
def _subset_ranks(m: int, f: int, k: int, must: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    """For each f-subset of range(m) containing ``must``: global ranks of its k-subsets in local colex order."""
    rest = [v for v in range(m) if v not in must]
    inner = small_subsets(f, k)
    out = []
    for extra in combinations(rest, f - len(must)):
        S = sorted(must + extra)
        out.append(tuple(colex_rank([S[i] for i in sub]) for sub in inner))
    return tuple(out)


def _local(mask: int, ranks: Sequence[int]) -> int:
    lm = 0
    for i, g in enumerate(ranks):
        if mask >> g & 1:
            lm |= 1 << i
    return lm


class _Checker:
    def __init__(self, fam: ForbiddenFamily):
        self.checks = [_PatternCheck(p, m) for p, m in zip(fam.patterns, fam.modes)]

    def edge_ok(self, mask: int, m: int, edge: tuple[int, ...]) -> bool:
        for c in self.checks:
            if not c.prunable or c.f > m:
                continue
            for ranks in _subset_ranks(m, c.f, c.k, edge):
                if c.hit(_local(mask, ranks)):
                    return False
        return True

    def leaf_ok(self, mask: int, m: int) -> bool:
        for c in self.checks:
            if not c.needs_leaf or c.f > m:
                continue
            for ranks in _subset_ranks(m, c.f, c.k, (m - 1,)):
                if c.hit(_local(mask, ranks)):
                    return False
        return True


@lru_cache(maxsize=16)
def _checker(fam_key) -> _Checker:
    pats = tuple(Hypergraph.from_mask(n, k, mask) for n, k, mask, _ in fam_key)
    modes = tuple(mode for *_, mode in fam_key)
    return _Checker(ForbiddenFamily(pats, modes))


def _children(parent_masks: Sequence[int], m: int, k: int, fam_key) -> set[int]:
    """Canonical bitsets of all admissible m-vertex extensions of the given parents."""
    checker = _checker(fam_key)
    base = comb(m - 1, k)
    links = small_subsets(m - 1, k - 1)
    new_edges = [tuple(sorted(T + (m - 1,))) for T in links]
    out: set[int] = set()

    def extend(mask: int, j: int):
        if j == len(links):
            if checker.leaf_ok(mask, m):
                out.add(canonical_form(Hypergraph.from_mask(m, k, mask)).mask)
            return
        extend(mask, j + 1)
        with_edge = mask | (1 << (base + j))
        if checker.edge_ok(with_edge, m, new_edges[j]):
            extend(with_edge, j + 1)

    for parent in parent_masks:
        extend(parent, 0)
    return out


def _chunks(items: list, parts: int) -> list[list]:
    return [items[i::parts] for i in range(parts) if items[i::parts]]


def generate_levels(n: int, fam: ForbiddenFamily, k: int | None = None, max_n: int = DEFAULT_MAX_N,
                    threads: int = 1) -> Iterator[tuple[int, list[int]]]:
    """Yield (m, sorted canonical bitsets of F-free m-vertex graphs) for m = 0..n."""
    k = fam.k or k or 3
    if n > max_n:
        raise TooLarge(f"exhaustive generation limited to n <= {max_n}; raise max_n explicitly")
    fam_key = fam.key()
    level = [0]
    yield 0, level
    for m in range(1, n + 1):
        if threads > 1 and len(level) > 1:
            found: set[int] = set()
            with ProcessPoolExecutor(max_workers=threads) as pool:
                for part in pool.map(_children, _chunks(level, threads * 4),
                                     [m] * (threads * 4), [k] * (threads * 4), [fam_key] * (threads * 4)):
                    found |= part
        else:
            found = _children(level, m, k, fam_key)
        level = sorted(found)
        yield m, level


def generate_free(n: int, fam: ForbiddenFamily = ForbiddenFamily(), k: int | None = None,
                  max_n: int = DEFAULT_MAX_N, threads: int = 1) -> list[Hypergraph]:
    """One canonical representative per isomorphism class of F-free n-vertex k-graphs."""
    k = fam.k or k or 3
    for m, level in generate_levels(n, fam, k, max_n, threads):
        if m == n:
            return [Hypergraph.from_mask(n, k, mask) for mask in level]
    raise AssertionError("unreachable")


@dataclass
class SearchResult:
    n: int
    k: int
    value: int
    maximizers: list[Hypergraph]
    classes: int
    visited: int

    @property
    def normalized(self) -> Fraction:
        denom = normalizer(self.n, self.k)
        return Fraction(self.value, denom) if denom else Fraction(0)


def _result(n: int, k: int, level: list[int], visited: int, fam: ForbiddenFamily) -> SearchResult:
    best, winners = -1, []
    for mask in level:
        G = Hypergraph.from_mask(n, k, mask)
        v = co2(G)
        if v > best:
            best, winners = v, [G]
        elif v == best:
            winners.append(G)
    for G in winners:
        if not fam.admits(G):
            raise AssertionError("search reported a maximizer containing a forbidden pattern")
    return SearchResult(n, k, best, winners, len(level), visited)


def exco2_exact(n: int, fam: ForbiddenFamily = ForbiddenFamily(), k: int | None = None,
                max_n: int = DEFAULT_MAX_N, threads: int = 1) -> SearchResult:
    k = fam.k or k or 3
    visited = 0
    for m, level in generate_levels(n, fam, k, max_n, threads):
        visited += len(level)
        if m == n:
            return _result(n, k, level, visited, fam)
    raise AssertionError("unreachable")


@dataclass
class MonotonicityReport:
    rows: list[SearchResult] = field(default_factory=list)

    @property
    def values(self) -> list[Fraction]:
        return [r.normalized for r in self.rows]

    @property
    def non_increasing(self) -> bool:
        v = self.values
        return all(a >= b for a, b in zip(v, v[1:]))


def monotonicity_report(ns: Iterable[int], fam: ForbiddenFamily = ForbiddenFamily(), k: int | None = None,
                        max_n: int = DEFAULT_MAX_N, threads: int = 1) -> MonotonicityReport:
    """Normalised exco2 for each n in ``ns``; one incremental generation pass."""
    k = fam.k or k or 3
    wanted = sorted(set(ns))
    if not wanted:
        return MonotonicityReport()
    if wanted[0] < k:
        raise TooSmall(f"normalisation needs n >= {k}")
    report = MonotonicityReport()
    visited = 0
    for m, level in generate_levels(wanted[-1], fam, k, max_n, threads):
        visited += len(level)
        if m in wanted:
            report.rows.append(_result(m, k, level, visited, fam))
    return report


@dataclass(frozen=True)
class CoverScore:
    cover: DirectedCycleCover
    value: int
    is_dstar: bool


def argmax_cycle_cover(k: int, n: int) -> list[CoverScore]:
    """Every isomorphism class of cycle covers on k-1 vertices ranked by co2(G(D)) on n vertices."""
    if k - 1 < 2:
        raise TooSmall("needs k >= 3")
    if n < 6 * (k - 1):
        raise TooSmall(f"n must be at least 6(k-1) = {6 * (k - 1)}")
    dstar = build_Dstar(k) if k >= 4 else None
    scores = []
    for D in enumerate_cycle_covers(k - 1):
        scores.append(CoverScore(D, co2(build_GD(D, n)), dstar is not None and D.is_isomorphic(dstar)))
    scores.sort(key=lambda s: (-s.value, s.cover.cycle_type()))
    return scores


def dstar_strictly_first(scores: Sequence[CoverScore]) -> bool:
    return bool(scores) and scores[0].is_dstar and (len(scores) == 1 or scores[0].value > scores[1].value)


def naive_exco2(n: int, fam: ForbiddenFamily, k: int = 3) -> tuple[int, set[int]]:
    """Oracle: scan every labelled graph; returns (max co2, canonical bitsets of maximizers)."""
    best, winners = -1, set()
    for mask in range(1 << comb(n, k)):
        G = Hypergraph.from_mask(n, k, mask)
        if not fam.admits(G):
            continue
        v = co2(G)
        if v > best:
            best, winners = v, {canonical_form(G).mask}
        elif v == best:
            winners.add(canonical_form(G).mask)
    return best, winners
