"""Flag-algebra semidefinite programs for the normalised codegree squared sum.

For a basis order N, the admissible graphs are the F-free N-vertex 3-graphs.
A type is a fully labelled t-vertex graph, and its flags are f-vertex graphs
whose first t vertices carry the type, with 2f - t = N.  For every admissible
G and type, M(G)[a, b] is the probability that a uniformly random injective
map theta of the labels into G, together with a random split of the remaining
vertices into X and its complement Y, shows flag a on theta+X and flag b on
theta+Y.  Any PSD matrices Q then give

    limit of normalised co2  <=  max_G  objective(G) + sum <Q, M(G)>.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from math import comb, perm
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import Hypergraph, colex_table, ranks_of
from .densities import _images, four_profile
from .errors import FormatError, SizeMismatch, TooLarge
from .search import ForbiddenFamily, generate_free

TARGETS = ("co2", "edges")


@dataclass
class FlagBasis:
    N: int
    k: int
    admissibles: list[Hypergraph]
    objective: list[Fraction]
    target: str = "co2"

    def __len__(self) -> int:
        return len(self.admissibles)

    @property
    def trivial_bound(self) -> Fraction:
        return max(self.objective)


def objective_value(G: Hypergraph, target: str = "co2") -> Fraction:
    """Exact coefficient of an admissible graph in the linear objective."""
    if target == "co2":
        p = four_profile(G)
        total = comb(G.n, 4)
        return Fraction(p.N2, 6 * total) + Fraction(p.N3, 2 * total) + Fraction(p.N4, total)
    if target == "edges":
        return Fraction(G.num_edges, G.num_slots)
    raise ValueError(f"unknown target {target!r}; expected one of {TARGETS}")


def build_basis(N: int, fam: ForbiddenFamily = ForbiddenFamily(), target: str = "co2",
                threads: int = 1) -> FlagBasis:
    if N not in (4, 5, 6):
        raise TooLarge("basis order must be 4, 5 or 6")
    if fam.k not in (None, 3):
        raise SizeMismatch("flag programs are implemented for 3-graphs")
    admissibles = generate_free(N, fam, k=3, max_n=max(N, 7), threads=threads)
    return FlagBasis(N, 3, admissibles, [objective_value(G, target) for G in admissibles], target)


@dataclass
class TypeAndFlags:
    id: int
    t: int
    f: int
    type_mask: int
    flags: list[int]  # canonical labelled bitsets on f vertices, labels are vertices 0..t-1
    k: int = 3
    lookup: np.ndarray = field(default=None, repr=False)  # raw labelled bitset -> flag index or -1

    @property
    def type_graph(self) -> Hypergraph:
        return Hypergraph.from_mask(self.t, self.k, self.type_mask)

    def flag_graph(self, a: int) -> Hypergraph:
        return Hypergraph.from_mask(self.f, self.k, self.flags[a])

    def __len__(self) -> int:
        return len(self.flags)


def labelled_canonical(mask: int, f: int, t: int, k: int = 3) -> int:
    """Smallest bitset over permutations of the unlabelled vertices t..f-1."""
    return min(_images(f, k, mask, t)) if mask else 0


def enumerate_types_and_flags(N: int, fam: ForbiddenFamily = ForbiddenFamily(), k: int = 3) -> list[TypeAndFlags]:
    if N not in (4, 5, 6):
        raise TooLarge("basis order must be 4, 5 or 6")
    out: list[TypeAndFlags] = []
    for t in range(N % 2, N - 1, 2):
        f = (N + t) // 2
        inner, slots = comb(t, k), comb(f, k)
        for tau in generate_free(t, fam, k=k):
            index: dict[int, int] = {}
            lookup = np.full(1 << slots, -1, dtype=np.int64)
            flags: list[int] = []
            for bits in range(1 << (slots - inner)):
                raw = tau.mask | (bits << inner)
                if not fam.admits(Hypergraph.from_mask(f, k, raw)):
                    continue
                canon = labelled_canonical(raw, f, t, k)
                if canon not in index:
                    index[canon] = len(flags)
                    flags.append(canon)
                lookup[raw] = index[canon]
            if not flags:
                continue
            order = sorted(range(len(flags)), key=flags.__getitem__)
            remap = np.empty(len(flags), dtype=np.int64)
            remap[order] = np.arange(len(flags))
            lookup = np.where(lookup >= 0, remap[np.maximum(lookup, 0)], -1)
            out.append(TypeAndFlags(len(out), t, f, tau.mask, sorted(flags), k, lookup))
    return out


# -- pair densities --------------------------------------------------------


def _splits(N: int, t: int, f: int) -> tuple[np.ndarray, np.ndarray]:
    """Vertex orders theta+X and theta+Y for every injective theta and every X."""
    A, B = [], []
    for theta in permutations(range(N), t):
        rest = [v for v in range(N) if v not in theta]
        for X in combinations(rest, f - t):
            Y = [v for v in rest if v not in X]
            A.append(list(theta) + list(X))
            B.append(list(theta) + Y)
    return np.array(A, dtype=np.int64).reshape(-1, f), np.array(B, dtype=np.int64).reshape(-1, f)


def _local_ranks(orders: np.ndarray, k: int) -> np.ndarray:
    f = orders.shape[1]
    inner = colex_table(f, k)
    glob = np.sort(orders[:, inner], axis=2)
    return ranks_of(glob.reshape(-1, k)).reshape(len(orders), len(inner))


@dataclass
class SparsePairs:
    """All M(G_i) for one type, as aggregated (admissible, a*nf + b, count) triples."""
    type_id: int
    size: int
    denominator: int
    admissible: np.ndarray
    code: np.ndarray
    count: np.ndarray

    def dense(self, i: int) -> np.ndarray:
        out = np.zeros(self.size * self.size, dtype=np.int64)
        sel = self.admissible == i
        out[self.code[sel]] = self.count[sel]
        return out.reshape(self.size, self.size)


@dataclass(frozen=True)
class PairDensityMatrix:
    admissible: int
    type_id: int
    counts: np.ndarray
    denominator: int

    def entry(self, a: int, b: int) -> Fraction:
        return Fraction(int(self.counts[a, b]), self.denominator)

    def as_fractions(self) -> list[list[Fraction]]:
        return [[Fraction(int(c), self.denominator) for c in row] for row in self.counts]


def compute_pairs(basis: FlagBasis, tafs: Sequence[TypeAndFlags]) -> list[SparsePairs]:
    N, k = basis.N, basis.k
    by_t: dict[int, list[TypeAndFlags]] = {}
    for taf in tafs:
        if 2 * taf.f - taf.t != N:
            raise SizeMismatch(f"type {taf.id} does not fit basis order {N}")
        by_t.setdefault(taf.t, []).append(taf)
    acc = {taf.id: ([], [], []) for taf in tafs}
    for t, group in by_t.items():
        f = group[0].f
        A, B = _splits(N, t, f)
        ra, rb = _local_ranks(A, k), _local_ranks(B, k)
        wa = np.left_shift(np.int64(1), np.arange(ra.shape[1], dtype=np.int64))
        for i, G in enumerate(basis.admissibles):
            ind = G.indicator().astype(np.int64)
            ma = ind[ra] @ wa
            mb = ind[rb] @ wa
            for taf in group:
                a = taf.lookup[ma]
                sel = a >= 0
                if not sel.any():
                    continue
                b = taf.lookup[mb[sel]]
                codes, counts = np.unique(a[sel] * len(taf) + b, return_counts=True)
                rows, cs, ns = acc[taf.id]
                rows.append(np.full(len(codes), i, dtype=np.int64))
                cs.append(codes)
                ns.append(counts.astype(np.int64))
    out = []
    for taf in tafs:
        rows, cs, ns = acc[taf.id]
        den = split_total(N, taf.t, taf.f)
        cat = (lambda xs: np.concatenate(xs) if xs else np.zeros(0, dtype=np.int64))
        out.append(SparsePairs(taf.id, len(taf), den, cat(rows), cat(cs), cat(ns)))
    return out


def split_total(N: int, t: int, f: int) -> int:
    """Number of (theta, X) choices: the common denominator of every M(G)."""
    return perm(N, t) * comb(N - t, f - t)


def pair_density_matrices(basis: FlagBasis, taf: TypeAndFlags) -> list[PairDensityMatrix]:
    sp = compute_pairs(basis, [taf])[0]
    return [PairDensityMatrix(i, taf.id, sp.dense(i), sp.denominator) for i in range(len(basis))]


def flag_densities(G: Hypergraph, taf: TypeAndFlags, theta: Sequence[int]) -> list[Fraction]:
    """Density of each flag among extensions of the labelled vertices ``theta`` in G."""
    from .densities import local_mask

    if len(theta) != taf.t:
        raise SizeMismatch("theta must label every type vertex")
    rest = [v for v in range(G.n) if v not in theta]
    hits = [0] * len(taf)
    total = 0
    for X in combinations(rest, taf.f - taf.t):
        total += 1
        idx = int(taf.lookup[local_mask(G, list(theta) + list(X))])
        if idx >= 0:
            hits[idx] += 1
    return [Fraction(h, total) for h in hits]


@dataclass
class FlagProblem:
    basis: FlagBasis
    tafs: list[TypeAndFlags]
    pairs: list[SparsePairs]

    @classmethod
    def build(cls, N: int, fam: ForbiddenFamily = ForbiddenFamily(), target: str = "co2",
              threads: int = 1) -> "FlagProblem":
        basis = build_basis(N, fam, target, threads)
        tafs = enumerate_types_and_flags(N, fam)
        return cls(basis, tafs, compute_pairs(basis, tafs))


# -- SDPA sparse format ----------------------------------------------------
#
# Variables live in the SDPA dual matrix Y = diag(Q_1, ..., Q_T, s_1..s_m, lam).
# Constraint i reads <M_i, Q> + s_i - lam = -objective_i, and the objective
# maximises -lam, so the optimum is the smallest provable bound.


def emit_sdp(problem: FlagProblem, path, precision: int = 17) -> Path:
    basis, tafs, pairs = problem.basis, problem.tafs, problem.pairs
    m = len(basis)
    fmt = f"{{:.{precision}g}}"
    lp = len(tafs) + 1
    lines = [
        f'"flag program N={basis.N} target={basis.target} admissibles={m}',
        str(m),
        str(len(tafs) + 1),
        " ".join([str(len(t)) for t in tafs] + [str(-(m + 1))]),
        " ".join(fmt.format(-float(c)) for c in basis.objective),
        f"0 {lp} {m + 1} {m + 1} -1",
    ]
    entries: list[tuple[int, int, int, int, float]] = []
    for blk, sp in enumerate(pairs, start=1):
        a, b = np.divmod(sp.code, sp.size)
        keep = a <= b
        for i, aa, bb, c in zip(sp.admissible[keep], a[keep], b[keep], sp.count[keep]):
            entries.append((int(i) + 1, blk, int(aa) + 1, int(bb) + 1, c / sp.denominator))
    for i in range(m):
        entries.append((i + 1, lp, i + 1, i + 1, 1.0))
        entries.append((i + 1, lp, m + 1, m + 1, -1.0))
    entries.sort(key=lambda e: e[:4])
    lines.extend(f"{i} {blk} {a} {b} {fmt.format(v)}" for i, blk, a, b, v in entries)
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


@dataclass
class SdpaProblem:
    m: int
    blocks: list[int]
    c: np.ndarray
    entries: np.ndarray  # rows of (matno, block, i, j, value), 1-based indices


def read_sdpa(path) -> SdpaProblem:
    text = Path(path).read_text().splitlines()
    body = [ln for ln in text if ln.strip() and ln.lstrip()[0] not in '"*']
    try:
        m = int(body[0].split()[0])
        nblocks = int(body[1].split()[0])
        blocks = [int(x) for x in body[2].replace(",", " ").replace("{", " ").replace("}", " ").split()][:nblocks]
        c = np.array([float(x) for x in body[3].replace(",", " ").replace("{", " ").replace("}", " ").split()][:m])
        rows = np.array([[float(x) for x in ln.split()[:5]] for ln in body[4:]], dtype=float).reshape(-1, 5)
    except (IndexError, ValueError) as exc:
        raise FormatError(f"not a valid SDPA sparse file: {exc}") from None
    if len(c) != m or len(blocks) != nblocks:
        raise FormatError("SDPA header does not match its contents")
    return SdpaProblem(m, blocks, c, rows)


@dataclass
class SolverResult:
    status: str
    value: float  # optimum of the dual form, i.e. -lambda for emitted flag programs
    blocks: list[np.ndarray]


def solve_sdpa(problem: SdpaProblem, solver: str | None = None, verbose: bool = False) -> SolverResult:
    """Solve ``max F0.Y  s.t.  Fi.Y = ci, Y psd`` with cvxpy (best-effort helper)."""
    import cvxpy as cp
    import scipy.sparse as sps

    E = problem.entries
    variables, cons = [], []
    lhs = 0
    obj = 0
    for b, size in enumerate(problem.blocks, start=1):
        rows = E[E[:, 1] == b]
        n = abs(size)
        mat, i, j, v = rows[:, 0].astype(int), rows[:, 2].astype(int) - 1, rows[:, 3].astype(int) - 1, rows[:, 4]
        if size > 0:
            Y = cp.Variable((n, n), PSD=True)
            flat = cp.vec(Y, order="F")
            ii = np.concatenate([i, j[i != j]])
            jj = np.concatenate([j, i[i != j]])
            vv = np.concatenate([v, v[i != j]])
            mm = np.concatenate([mat, mat[i != j]])
            col = jj * n + ii
        else:
            Y = cp.Variable(n, nonneg=True)
            flat = Y
            keep = i == j
            mm, col, vv = mat[keep], i[keep], v[keep]
        variables.append(Y)
        F0 = mm == 0
        if F0.any():
            obj = obj + sps.csr_matrix((vv[F0], (np.zeros(F0.sum(), dtype=int), col[F0])),
                                       shape=(1, flat.shape[0])) @ flat
        A = sps.csr_matrix((vv[~F0], (mm[~F0] - 1, col[~F0])), shape=(problem.m, flat.shape[0]))
        lhs = lhs + A @ flat
    cons.append(lhs == problem.c)
    prob = cp.Problem(cp.Maximize(cp.sum(obj)), cons)
    prob.solve(solver=solver or "CLARABEL", verbose=verbose)
    blocks = []
    for Y, size in zip(variables, problem.blocks):
        val = Y.value
        blocks.append(np.zeros((abs(size),) * (2 if size > 0 else 1)) if val is None else np.asarray(val))
    return SolverResult(prob.status, float(prob.value) if prob.value is not None else float("nan"), blocks)


def solve_flag_problem(problem: FlagProblem, path=None, precision: int = 17, solver: str | None = None) -> SolverResult:
    """Emit the program, read it back as any external solver would, and solve it."""
    import tempfile

    if path is None:
        with tempfile.TemporaryDirectory() as tmp:
            return solve_sdpa(read_sdpa(emit_sdp(problem, Path(tmp) / "flag.dat-s", precision)), solver)
    return solve_sdpa(read_sdpa(emit_sdp(problem, path, precision)), solver)
