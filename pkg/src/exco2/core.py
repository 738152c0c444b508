"""k-uniform hypergraphs stored as colex-ranked edge bitsets, plus codegree machinery.

A k-subset ``s_0 < s_1 < ... < s_{k-1}`` of ``{0, 1, ...}`` has colex rank
``sum(C(s_i, i + 1))``.  The rank does not depend on the ambient vertex count,
so a bitset on ``n`` vertices is also a valid bitset on ``n + 1`` vertices.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import comb
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    DuplicateVertexInEdge,
    FormatError,
    NotAnEdge,
    OutOfRangeVertex,
    OverlappingSets,
    WrongArity,
    WrongUniformity,
)

# rank tables are only materialised as Python tuples up to this many slots
_SMALL_SLOTS = 1 << 16


def colex_rank(subset: Sequence[int]) -> int:
    s = sorted(subset)
    return sum(comb(v, i + 1) for i, v in enumerate(s))


def colex_unrank(r: int, k: int) -> tuple[int, ...]:
    out = []
    for i in range(k, 0, -1):
        c = i - 1
        while comb(c + 1, i) <= r:
            c += 1
        out.append(c)
        r -= comb(c, i)
    return tuple(reversed(out))


@lru_cache(maxsize=64)
def small_subsets(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    """All k-subsets of range(n) in colex order (index == rank)."""
    if k == 0:
        return ((),)
    out = []
    for top in range(k - 1, n):
        out.extend(s + (top,) for s in small_subsets(top, k - 1))
    return tuple(out)


@lru_cache(maxsize=8)
def colex_table(n: int, k: int) -> np.ndarray:
    """Array of shape (C(n, k), k), row r is the k-subset of colex rank r."""
    # colex tables are prefix-closed: the subsets of range(top) come first
    table = np.zeros((1, 0), dtype=np.int32)
    for j in range(k):
        blocks = []
        for top in range(j, n):
            head = table[: comb(top, j)]
            blocks.append(np.hstack([head, np.full((len(head), 1), top, dtype=np.int32)]))
        table = np.vstack(blocks) if blocks else np.zeros((0, j + 1), dtype=np.int32)
    table.setflags(write=False)
    return table


def ranks_of(rows: np.ndarray) -> np.ndarray:
    """Colex ranks of the sorted rows of an integer array."""
    rows = np.sort(np.asarray(rows, dtype=np.int64), axis=1)
    r = np.zeros(rows.shape[0], dtype=np.int64)
    for i in range(rows.shape[1]):
        v = rows[:, i]
        # C(v, i+1) vectorised for small i
        term = np.ones_like(v)
        for j in range(i + 1):
            term = term * (v - j)
        r += term // np.int64(np.prod(np.arange(1, i + 2)))
    return r


def _bits_to_int(indicator: np.ndarray) -> int:
    packed = np.packbits(indicator.astype(np.uint8), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def _int_to_bits(mask: int, length: int) -> np.ndarray:
    nbytes = (length + 7) // 8
    raw = np.frombuffer(mask.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:length].astype(bool)


class Hypergraph:
    """Immutable k-uniform hypergraph on vertices ``0..n-1``.

    The edge set is the integer ``mask``; bit ``r`` is set iff the k-subset of
    colex rank ``r`` is an edge.
    """

    __slots__ = ("_n", "_k", "_mask", "_edges", "_array")

    def __init__(self, n: int, k: int, edges: Iterable[Iterable[int]] = ()):
        if k < 2:
            raise WrongUniformity(f"uniformity must be >= 2, got {k}")
        if n < 0:
            raise OutOfRangeVertex(f"vertex count must be >= 0, got {n}")
        mask = 0
        for e in edges:
            e = tuple(e)
            if len(e) != k:
                raise WrongArity(f"edge {e} does not have {k} vertices")
            if len(set(e)) != k:
                raise DuplicateVertexInEdge(f"edge {e} repeats a vertex")
            for v in e:
                if not 0 <= v < n:
                    raise OutOfRangeVertex(f"vertex {v} not in 0..{n - 1}")
            mask |= 1 << colex_rank(e)
        self._init(n, k, mask)

    def _init(self, n, k, mask):
        object.__setattr__(self, "_n", n)
        object.__setattr__(self, "_k", k)
        object.__setattr__(self, "_mask", mask)
        object.__setattr__(self, "_edges", None)
        object.__setattr__(self, "_array", None)

    def __setattr__(self, name, value):
        raise AttributeError("Hypergraph is immutable")

    @classmethod
    def from_mask(cls, n: int, k: int, mask: int) -> "Hypergraph":
        if k < 2:
            raise WrongUniformity(f"uniformity must be >= 2, got {k}")
        if mask < 0 or mask.bit_length() > comb(n, k):
            raise OutOfRangeVertex("edge bitset longer than C(n, k)")
        g = cls.__new__(cls)
        g._init(n, k, mask)
        return g

    @classmethod
    def from_indicator(cls, n: int, k: int, indicator: np.ndarray) -> "Hypergraph":
        """Build from a boolean array of length C(n, k) indexed by colex rank."""
        indicator = np.asarray(indicator, dtype=bool)
        if indicator.shape != (comb(n, k),):
            raise WrongArity("indicator length must equal C(n, k)")
        return cls.from_mask(n, k, _bits_to_int(indicator))

    # -- basic accessors ---------------------------------------------------

    @property
    def n(self) -> int:
        return self._n

    @property
    def k(self) -> int:
        return self._k

    @property
    def mask(self) -> int:
        return self._mask

    @property
    def num_slots(self) -> int:
        return comb(self._n, self._k)

    @property
    def num_edges(self) -> int:
        return bin(self._mask).count("1")

    def __len__(self) -> int:
        return self.num_edges

    def indicator(self) -> np.ndarray:
        return _int_to_bits(self._mask, self.num_slots)

    @property
    def edge_array(self) -> np.ndarray:
        """Edges as an (m, k) int array, rows sorted, in colex order."""
        if self._array is None:
            if self.num_slots <= _SMALL_SLOTS:
                arr = np.array(self.edges, dtype=np.int32).reshape(-1, self._k)
            else:
                idx = np.flatnonzero(self.indicator())
                arr = colex_table(self._n, self._k)[idx]
            arr.setflags(write=False)
            object.__setattr__(self, "_array", arr)
        return self._array

    @property
    def edges(self) -> tuple[tuple[int, ...], ...]:
        if self._edges is None:
            if self.num_slots <= _SMALL_SLOTS:
                table = small_subsets(self._n, self._k)
                out = []
                m = self._mask
                while m:
                    low = m & -m
                    out.append(table[low.bit_length() - 1])
                    m ^= low
                edges = tuple(out)
            else:
                edges = tuple(tuple(int(v) for v in row) for row in self.edge_array)
            object.__setattr__(self, "_edges", edges)
        return self._edges

    def has_edge(self, e: Iterable[int]) -> bool:
        e = tuple(e)
        if len(e) != self._k or len(set(e)) != self._k:
            return False
        if any(not 0 <= v < self._n for v in e):
            return False
        return bool(self._mask >> colex_rank(e) & 1)

    def __contains__(self, e) -> bool:
        return self.has_edge(e)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(self.edges)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (self._n, self._k, self._mask) == (other._n, other._k, other._mask)

    def __hash__(self) -> int:
        return hash((self._n, self._k, self._mask))

    def __repr__(self) -> str:
        return f"Hypergraph(n={self._n}, k={self._k}, edges={self.num_edges})"

    # -- derived graphs ----------------------------------------------------

    def relabel(self, perm: Sequence[int]) -> "Hypergraph":
        """Vertex v of self becomes vertex perm[v]."""
        if sorted(perm) != list(range(self._n)):
            raise OutOfRangeVertex("perm must be a permutation of range(n)")
        if self.num_slots > _SMALL_SLOTS:
            p = np.asarray(perm, dtype=np.int64)
            r = ranks_of(p[self.edge_array])
            ind = np.zeros(self.num_slots, dtype=bool)
            ind[r] = True
            return Hypergraph.from_indicator(self._n, self._k, ind)
        mask = 0
        for e in self.edges:
            mask |= 1 << colex_rank([perm[v] for v in e])
        return Hypergraph.from_mask(self._n, self._k, mask)

    def induced(self, vertices: Sequence[int]) -> "Hypergraph":
        """Subgraph induced on ``vertices``, relabelled 0.. in the given order."""
        pos = {v: i for i, v in enumerate(vertices)}
        if len(pos) != len(vertices):
            raise DuplicateVertexInEdge("repeated vertex in induced set")
        mask = 0
        for e in self.edges:
            if all(v in pos for v in e):
                mask |= 1 << colex_rank([pos[v] for v in e])
        return Hypergraph.from_mask(len(vertices), self._k, mask)

    def complement(self) -> "Hypergraph":
        return Hypergraph.from_mask(self._n, self._k, ((1 << self.num_slots) - 1) ^ self._mask)

    def with_vertices(self, n: int) -> "Hypergraph":
        """Same edges on a larger vertex set (isolated vertices appended)."""
        if n < self._n:
            raise OutOfRangeVertex("cannot shrink a hypergraph")
        return Hypergraph.from_mask(n, self._k, self._mask)


def new_hypergraph(n: int, k: int, edges: Iterable[Iterable[int]] = ()) -> Hypergraph:
    """Validated constructor; repeated edges collapse."""
    return Hypergraph(n, k, edges)


def complete(n: int, k: int) -> Hypergraph:
    return Hypergraph.from_mask(n, k, (1 << comb(n, k)) - 1)


def empty(n: int, k: int) -> Hypergraph:
    return Hypergraph.from_mask(n, k, 0)


# -- codegrees -------------------------------------------------------------


class CodegreeTable:
    """Codegree vector: ``d(T)`` for every (k-1)-subset ``T``, indexed by colex rank."""

    __slots__ = ("n", "k", "values")

    def __init__(self, n: int, k: int, values: np.ndarray):
        self.n = n
        self.k = k
        self.values = values
        values.setflags(write=False)

    def __getitem__(self, T: Iterable[int]) -> int:
        T = tuple(T)
        if len(T) != self.k - 1 or len(set(T)) != len(T):
            raise WrongArity(f"codegree needs a {self.k - 1}-set, got {T}")
        for v in T:
            if not 0 <= v < self.n:
                raise OutOfRangeVertex(f"vertex {v} not in 0..{self.n - 1}")
        return int(self.values[colex_rank(T)])

    def __len__(self) -> int:
        return len(self.values)

    def items(self):
        table = colex_table(self.n, self.k - 1)
        for r in range(len(self.values)):
            yield tuple(int(v) for v in table[r]), int(self.values[r])

    @property
    def l1(self) -> int:
        return int(self.values.sum())

    @property
    def sum_squares(self) -> int:
        return sum(int(v) * int(v) for v in self.values)


def codegree_table(G: Hypergraph) -> CodegreeTable:
    k = G.k
    size = comb(G.n, k - 1)
    arr = G.edge_array
    if len(arr) == 0:
        return CodegreeTable(G.n, k, np.zeros(size, dtype=np.int64))
    counts = np.zeros(size, dtype=np.int64)
    for drop in range(k):
        cols = [c for c in range(k) if c != drop]
        counts += np.bincount(ranks_of(arr[:, cols]), minlength=size)
    return CodegreeTable(G.n, k, counts)


def codegree(G: Hypergraph, T: Iterable[int]) -> int:
    T = tuple(T)
    if len(T) != G.k - 1 or len(set(T)) != len(T):
        raise WrongArity(f"codegree needs a {G.k - 1}-set, got {T}")
    for v in T:
        if not 0 <= v < G.n:
            raise OutOfRangeVertex(f"vertex {v} not in 0..{G.n - 1}")
    ts = set(T)
    return sum(1 for v in range(G.n) if v not in ts and G.has_edge(T + (v,)))


def co2(G: Hypergraph) -> int:
    """Sum of squared codegrees over all (k-1)-subsets."""
    vals = codegree_table(G).values
    # exact: at most C(n, k-1) * (n-k+1)^2, fine in int64 up to n ~ 48000 for k=3
    total = int(np.dot(vals, vals))
    if total < 0:
        total = sum(int(v) ** 2 for v in vals)
    return total


def normalizer(n: int, k: int) -> int:
    return comb(n, k - 1) * (n - k + 1) ** 2


def edge_weight(G: Hypergraph, e: Iterable[int]) -> int:
    """Sum of the codegrees of the k sub-(k-1)-sets of the edge ``e``."""
    e = tuple(sorted(e))
    if not G.has_edge(e):
        raise NotAnEdge(f"{e} is not an edge")
    return sum(codegree(G, T) for T in itertools.combinations(e, G.k - 1))


def edge_weights(G: Hypergraph) -> dict[tuple[int, ...], int]:
    table = codegree_table(G).values
    out = {}
    for e in G.edges:
        out[e] = sum(int(table[colex_rank(T)]) for T in itertools.combinations(e, G.k - 1))
    return out


# -- 3-graph structure -----------------------------------------------------


def _require_3(G: Hypergraph):
    if G.k != 3:
        raise WrongUniformity(f"operation defined for 3-graphs, got k={G.k}")


def _check_vertex(G: Hypergraph, x: int):
    if not 0 <= x < G.n:
        raise OutOfRangeVertex(f"vertex {x} not in 0..{G.n - 1}")


def _vertex_set(G: Hypergraph, S) -> frozenset:
    S = frozenset(S)
    for v in S:
        _check_vertex(G, v)
    return S


def q_value(G: Hypergraph, x: int) -> int:
    """``sum_y d(x,y)^2 + 2 * sum_{vw in L(x)} d(v,w)``."""
    _require_3(G)
    _check_vertex(G, x)
    table = codegree_table(G).values
    total = sum(int(table[colex_rank((x, y))]) ** 2 for y in range(G.n) if y != x)
    for v, w in link_graph(G, x).edges:
        total += 2 * int(table[colex_rank((v, w))])
    return total


def link_graph(G: Hypergraph, x: int, A=None, B=None, complement: bool = False) -> Hypergraph:
    """Link graph of ``x`` as a 2-graph on the same n vertices.

    With ``A`` only, the link is restricted to pairs inside ``A``; with both
    ``A`` and ``B``, to pairs with one end in each.  ``complement`` returns the
    missing pairs of the same region instead.  ``x`` itself never appears.
    """
    _require_3(G)
    _check_vertex(G, x)
    if A is None and B is not None:
        A, B = B, None
    if A is None:
        others = [v for v in range(G.n) if v != x]
        pairs = itertools.combinations(others, 2)
    elif B is None:
        A = _vertex_set(G, A)
        pairs = itertools.combinations(sorted(A - {x}), 2)
    else:
        A, B = _vertex_set(G, A), _vertex_set(G, B)
        if A & B:
            raise OverlappingSets("A and B must be disjoint")
        pairs = ((a, b) for a in sorted(A - {x}) for b in sorted(B - {x}))
    edges = [p for p in pairs if G.has_edge((x,) + tuple(p)) != complement]
    return Hypergraph(G.n, 2, edges)


def cross_edges(G: Hypergraph, A, B, complement: bool = False) -> int:
    """Edges with two vertices in one of A, B and the third in the other."""
    _require_3(G)
    A, B = _vertex_set(G, A), _vertex_set(G, B)
    if A & B:
        raise OverlappingSets("A and B must be disjoint")
    count = 0
    for e in G.edges:
        a = sum(1 for v in e if v in A)
        b = sum(1 for v in e if v in B)
        if (a, b) in ((2, 1), (1, 2)):
            count += 1
    if complement:
        return comb(len(A), 2) * len(B) + comb(len(B), 2) * len(A) - count
    return count


# -- text format -----------------------------------------------------------


def format_hg(G: Hypergraph) -> str:
    lines = [f"{G.n} {G.k}"]
    lines.extend(" ".join(str(v) for v in e) for e in G.edges)
    return "\n".join(lines) + "\n"


def parse_hg(text: str) -> Hypergraph:
    rows = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([int(tok) for tok in line.split()])
        except ValueError as exc:
            raise FormatError(f"bad line {raw!r}") from exc
    if not rows or len(rows[0]) != 2:
        raise FormatError("first line must be 'n k'")
    n, k = rows[0]
    return Hypergraph(n, k, rows[1:])


def read_hg(path) -> Hypergraph:
    return parse_hg(Path(path).read_text())


def write_hg(G: Hypergraph, path) -> None:
    Path(path).write_text(format_hg(G))
