import random
from fractions import Fraction
from itertools import combinations, permutations
from math import comb

import numpy as np
import pytest

from conftest import random_graph
from exco2.constructions import build_Bn, build_F4, build_F5
from exco2.core import co2, complete
from exco2.densities import count_induced, local_mask
from exco2.errors import FormatError, TooLarge
from exco2.flagsdp import (
    FlagProblem,
    build_basis,
    emit_sdp,
    enumerate_types_and_flags,
    flag_densities,
    labelled_canonical,
    objective_value,
    pair_density_matrices,
    read_sdpa,
    solve_flag_problem,
    split_total,
)
from exco2.search import ForbiddenFamily

K4 = ForbiddenFamily.of(complete(4, 3))
CANCELLATIVE = ForbiddenFamily.of(build_F4(), build_F5())


@pytest.fixture(scope="module")
def k4_n5():
    return FlagProblem.build(5, K4)


@pytest.fixture(scope="module")
def empty_n6():
    return FlagProblem.build(6)


# -- basis -------------------------------------------------------------------------


def test_basis_n4_k4():
    b = build_basis(4, K4)
    assert len(b) == 4
    by_edges = {G.num_edges: c for G, c in zip(b.admissibles, b.objective)}
    assert by_edges == {0: 0, 1: 0, 2: Fraction(1, 6), 3: Fraction(1, 2)}


def test_basis_sizes():
    assert len(build_basis(5)) == 34
    b = build_basis(4)
    assert len(b) == 5
    assert b.objective[[G.num_edges for G in b.admissibles].index(4)] == 1
    with pytest.raises(TooLarge):
        build_basis(7)


def test_objective_averaging_consistency(rng):
    """N=4 objective averaged over 4-sets reproduces (co2 - 3|E|) / (12 C(n,4))."""
    b = build_basis(4)
    for _ in range(25):
        G = random_graph(rng, rng.randint(4, 8))
        lhs = sum(c * count_induced(A, G) for A, c in zip(b.admissibles, b.objective)) / comb(G.n, 4)
        assert lhs == Fraction(co2(G) - 3 * G.num_edges, 12 * comb(G.n, 4))


def test_edges_target():
    assert objective_value(complete(5, 3), "edges") == 1
    with pytest.raises(ValueError):
        objective_value(complete(5, 3), "nope")


# -- types and flags -----------------------------------------------------------------


def test_type_sizes():
    n6 = enumerate_types_and_flags(6)
    assert sorted({(t.t, t.f) for t in n6}) == [(0, 3), (2, 4), (4, 5)]
    assert [t.type_mask for t in n6 if t.t == 2] == [0]
    n5 = enumerate_types_and_flags(5)
    assert sorted({(t.t, t.f) for t in n5}) == [(1, 3), (3, 4)]
    k4 = enumerate_types_and_flags(6, K4)
    assert len([t for t in k4 if t.t == 4]) == 4


def test_flags_distinct_and_free():
    for fam in (ForbiddenFamily(), K4, CANCELLATIVE):
        for taf in enumerate_types_and_flags(6, fam):
            seen = set()
            for a in range(len(taf)):
                H = taf.flag_graph(a)
                assert fam.admits(H)
                assert local_mask(H, list(range(taf.t))) == taf.type_mask
                # every relabelling of the free vertices lands on the same flag
                head = tuple(range(taf.t))
                orbit = set()
                for tail in permutations(range(taf.t, taf.f)):
                    orbit.add(H.relabel(head + tail).mask)
                assert not orbit & seen
                seen |= orbit
                assert labelled_canonical(H.mask, taf.f, taf.t) == taf.flags[a]


def test_empty_flag_lists_dropped():
    # forbidding a single edge leaves only edgeless types and one flag each
    fam = ForbiddenFamily.of(complete(3, 3))
    tafs = enumerate_types_and_flags(6, fam)
    assert all(len(t) == 1 for t in tafs)


# -- pair densities ------------------------------------------------------------------


def brute_pair_matrix(G, taf):
    where = {m: a for a, m in enumerate(taf.flags)}
    M = [[Fraction(0)] * len(taf) for _ in range(len(taf))]
    den = split_total(G.n, taf.t, taf.f)
    for theta in permutations(range(G.n), taf.t):
        if local_mask(G, list(theta)) != taf.type_mask:
            continue
        rest = [v for v in range(G.n) if v not in theta]
        for X in combinations(rest, taf.f - taf.t):
            Y = [v for v in rest if v not in X]
            a = where[labelled_canonical(local_mask(G, list(theta) + list(X)), taf.f, taf.t)]
            b = where[labelled_canonical(local_mask(G, list(theta) + Y), taf.f, taf.t)]
            M[a][b] += Fraction(1, den)
    return M


def test_pairs_match_brute_force(empty_n6):
    rng = random.Random(3)
    basis = empty_n6.basis
    picks = rng.sample(range(len(basis)), 6)
    for taf, sp in zip(empty_n6.tafs, empty_n6.pairs):
        for i in picks:
            dense = sp.dense(i)
            brute = brute_pair_matrix(basis.admissibles[i], taf)
            assert [[Fraction(int(c), sp.denominator) for c in row] for row in dense] == brute


def test_pairs_symmetric_and_bounded(empty_n6):
    rng = random.Random(4)
    picks = rng.sample(range(len(empty_n6.basis)), 100)
    for sp in empty_n6.pairs:
        for i in picks:
            M = sp.dense(i)
            assert (M == M.T).all()
            assert M.min() >= 0 and M.sum() <= sp.denominator


def test_empty_admissible_has_only_empty_flag_mass(empty_n6):
    idx = [G.num_edges for G in empty_n6.basis.admissibles].index(0)
    for taf, sp in zip(empty_n6.tafs, empty_n6.pairs):
        M = sp.dense(idx)
        for a in range(len(taf)):
            if taf.flags[a]:
                assert not M[a].any() and not M[:, a].any()


def test_pair_density_matrix_api(k4_n5):
    taf = k4_n5.tafs[0]
    mats = pair_density_matrices(k4_n5.basis, taf)
    assert len(mats) == len(k4_n5.basis)
    m = mats[-1]
    assert m.entry(0, 0) == Fraction(int(m.counts[0, 0]), m.denominator)
    assert all(0 <= x <= 1 for row in m.as_fractions() for x in row)


def test_partition_of_unity():
    B6 = build_Bn(6)
    for taf in enumerate_types_and_flags(5):
        for theta in permutations(range(6), taf.t):
            if local_mask(B6, list(theta)) != taf.type_mask:
                continue
            assert sum(flag_densities(B6, taf, theta)) == 1


# -- SDPA emission -------------------------------------------------------------------


def test_emit_and_read_back(k4_n5, tmp_path):
    path = emit_sdp(k4_n5, tmp_path / "p.dat-s", precision=12)
    prob = read_sdpa(path)
    m = len(k4_n5.basis)
    assert prob.m == m
    assert prob.blocks == [len(t) for t in k4_n5.tafs] + [-(m + 1)]
    assert np.allclose(prob.c, [-float(c) for c in k4_n5.basis.objective])
    assert (prob.entries[:, 2] <= prob.entries[:, 3]).all()
    # every constraint has its own slack and the shared lambda entry
    lp = prob.entries[prob.entries[:, 1] == len(prob.blocks)]
    assert len(lp) == 2 * m + 1


def test_read_sdpa_rejects_garbage(tmp_path):
    p = tmp_path / "bad.dat-s"
    p.write_text("hello\n")
    with pytest.raises(FormatError):
        read_sdpa(p)


def test_solver_on_small_program(k4_n5):
    res = solve_flag_problem(k4_n5)
    assert res.status == "optimal"
    bound = -res.value
    assert Fraction(1, 3) - Fraction(1, 10**6) <= bound <= float(k4_n5.basis.trivial_bound)
