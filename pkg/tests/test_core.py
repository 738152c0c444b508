from itertools import combinations
from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import graph_and_perm, hypergraphs
from exco2.constructions import build_Bn, build_Cn, build_F5, build_Sn
from exco2.core import (
    Hypergraph,
    codegree,
    codegree_table,
    colex_rank,
    colex_table,
    colex_unrank,
    co2,
    complete,
    cross_edges,
    edge_weight,
    edge_weights,
    empty,
    format_hg,
    link_graph,
    new_hypergraph,
    normalizer,
    parse_hg,
    q_value,
    read_hg,
    small_subsets,
    write_hg,
)
from exco2.errors import (
    DuplicateVertexInEdge,
    FormatError,
    NotAnEdge,
    OutOfRangeVertex,
    OverlappingSets,
    WrongArity,
    WrongUniformity,
)


# -- ranks ---------------------------------------------------------------------


def test_colex_order_and_roundtrip():
    subs = small_subsets(7, 3)
    assert len(subs) == comb(7, 3)
    assert list(subs) == sorted(subs, key=lambda s: tuple(reversed(s)))
    for r, s in enumerate(subs):
        assert colex_rank(s) == r
        assert colex_unrank(r, 3) == s


def test_colex_rank_stable_under_growth():
    assert colex_rank((0, 1, 2)) == 0
    assert colex_rank((0, 1, 3)) == 1
    assert colex_rank((0, 2, 3)) == 2
    assert colex_rank((1, 2, 3)) == 3
    assert colex_rank((0, 1, 4)) == comb(4, 3)


@pytest.mark.parametrize("n,k", [(7, 3), (6, 2), (8, 4), (5, 5), (3, 4)])
def test_colex_table_matches_tuples(n, k):
    table = colex_table(n, k)
    assert [tuple(r) for r in table.tolist()] == list(small_subsets(n, k))


# -- construction and validation -------------------------------------------------------


def test_complete_k4():
    G = new_hypergraph(4, 3, [{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}])
    assert G.num_edges == 4
    assert G == complete(4, 3)


def test_empty_has_zero_co2():
    assert co2(new_hypergraph(3, 3, [])) == 0


def test_f5_from_one_based():
    G = new_hypergraph(5, 3, [(a - 1, b - 1, c - 1) for a, b, c in ((1, 2, 3), (1, 2, 4), (3, 4, 5))])
    assert G.num_edges == 3
    assert G == build_F5()


def test_duplicates_collapse_and_order_is_irrelevant():
    G = Hypergraph(4, 3, [(2, 1, 0), (0, 1, 2), (3, 1, 0)])
    assert G.edges == ((0, 1, 2), (0, 1, 3))


@pytest.mark.parametrize("edges,err", [
    ([(0, 1, 4)], OutOfRangeVertex),
    ([(0, 1)], WrongArity),
    ([(0, 1, 1)], DuplicateVertexInEdge),
    ([(-1, 0, 1)], OutOfRangeVertex),
])
def test_invalid_edges(edges, err):
    with pytest.raises(err):
        Hypergraph(4, 3, edges)


def test_uniformity_must_be_at_least_two():
    with pytest.raises(WrongUniformity):
        Hypergraph(4, 1, [])


def test_immutable():
    G = complete(4, 3)
    with pytest.raises(AttributeError):
        G.n = 5
    with pytest.raises(AttributeError):
        G._mask = 0


def test_bitset_length_and_indicator():
    G = build_Cn(6)
    ind = G.indicator()
    assert len(ind) == comb(6, 3)
    assert int(ind.sum()) == G.num_edges
    assert Hypergraph.from_indicator(6, 3, ind) == G


def test_with_vertices_keeps_mask():
    G = build_Bn(5)
    H = G.with_vertices(7)
    assert H.mask == G.mask and H.n == 7


# -- codegrees ------------------------------------------------------------------------


def test_codegree_examples():
    B4 = build_Bn(4)
    assert codegree(B4, (0, 1)) == 2
    assert codegree(empty(5, 3), (1, 3)) == 0
    for T in combinations(range(4), 2):
        assert codegree(complete(4, 3), T) == 2


def test_codegree_wrong_arity():
    with pytest.raises(WrongArity):
        codegree(complete(4, 3), (0, 1, 2))


def test_co2_examples():
    assert co2(build_Bn(4)) == 24
    assert co2(build_Bn(6)) == 198
    assert co2(build_Cn(6)) == 120


def test_co2_c6_by_pair_classes():
    # three within-class pairs of codegree 2 and twelve cross pairs of codegree 3
    tab = codegree_table(build_Cn(6))
    values = sorted(v for _, v in tab.items())
    assert values == [2] * 3 + [3] * 12


def test_edge_weight_examples():
    S6 = build_Sn(6)
    assert all(edge_weight(S6, e) == 6 for e in S6.edges)
    assert edge_weight(Hypergraph(3, 3, [(0, 1, 2)]), (0, 1, 2)) == 3
    assert all(w == 6 for w in edge_weights(complete(4, 3)).values())
    with pytest.raises(NotAnEdge):
        edge_weight(S6, (0, 1, 2))


def test_normalizer_of_complete_graph():
    for n in range(3, 9):
        assert co2(complete(n, 3)) == normalizer(n, 3)


@given(hypergraphs(max_n=8))
def test_l1_identity_and_codegree_range(G):
    tab = codegree_table(G)
    assert tab.l1 == G.k * G.num_edges
    assert all(0 <= v <= max(G.n - G.k + 1, 0) for _, v in tab.items())
    assert tab.sum_squares == co2(G)


@given(hypergraphs(max_n=8))
def test_weights_sum_to_co2(G):
    assert sum(edge_weights(G).values()) == co2(G)


@given(hypergraphs(max_n=7, k=4))
def test_l1_identity_k4(G):
    assert codegree_table(G).l1 == 4 * G.num_edges


@given(graph_and_perm(max_n=8))
def test_co2_isomorphism_invariant(gp):
    G, perm = gp
    assert co2(G.relabel(perm)) == co2(G)


def test_codegree_table_matches_direct_count(rng):
    from conftest import random_graph

    for _ in range(20):
        G = random_graph(rng, rng.randint(3, 9))
        tab = codegree_table(G)
        for T in combinations(range(G.n), 2):
            assert tab[T] == sum(1 for e in G.edges if set(T) <= set(e))


# -- q, links, cross edges ---------------------------------------------------------------


def test_q_value_examples():
    G = Hypergraph(5, 3, [(0, 1, 2)])
    assert q_value(G, 4) == 0
    assert q_value(complete(4, 3), 0) == 24
    assert all(q_value(build_Bn(4), x) == 24 for x in range(4))
    with pytest.raises(OutOfRangeVertex):
        q_value(G, 5)
    with pytest.raises(WrongUniformity):
        q_value(complete(5, 4), 0)


def test_q_values_sum_to_co2_identity():
    # sum_x q(x) = 2 co2 + 2 sum_e w(e) = 4 co2, by double counting
    for G in (build_Bn(7), build_Cn(8), build_Sn(7), complete(6, 3)):
        assert sum(q_value(G, x) for x in range(G.n)) == 4 * co2(G)


def test_link_graph_examples():
    L = link_graph(complete(4, 3), 0)
    assert L.k == 2 and L.edges == ((1, 2), (1, 3), (2, 3))
    B4 = build_Bn(4)
    A, B = {0, 1}, {2, 3}
    assert link_graph(B4, 0, A, B).edges == ((1, 2), (1, 3))
    assert link_graph(B4, 0, A, B, complement=True).edges == ()


def test_link_graph_errors():
    with pytest.raises(OverlappingSets):
        link_graph(complete(5, 3), 0, {1, 2}, {2, 3})
    with pytest.raises(OutOfRangeVertex):
        link_graph(complete(5, 3), 7)


def test_cross_edges_examples():
    B4 = build_Bn(4)
    assert cross_edges(B4, {0, 1}, {2, 3}) == 4
    A, B = {0, 1, 2}, {3, 4}
    assert cross_edges(empty(6, 3), A, B) == 0
    assert cross_edges(empty(6, 3), A, B, complement=True) == comb(3, 2) * 2 + comb(2, 2) * 3
    assert cross_edges(build_Cn(6), {0, 1}, {2, 3}) == 2
    with pytest.raises(OverlappingSets):
        cross_edges(B4, {0, 1}, {1, 2})


# -- text format ---------------------------------------------------------------------


@given(hypergraphs(max_n=8))
def test_hg_roundtrip(G):
    H = parse_hg(format_hg(G))
    assert H == G and H.n == G.n and H.k == G.k


def test_hg_comments_and_file_roundtrip(tmp_path):
    text = "# F4\n4 3\n0 1 2\n# middle\n0 1 3\n1 2 3\n"
    G = parse_hg(text)
    assert G.num_edges == 3
    p = tmp_path / "g.hg"
    write_hg(G, p)
    assert read_hg(p) == G
    assert p.read_text() == format_hg(G)


@pytest.mark.parametrize("text", ["", "4\n", "4 3\n0 1 x\n", "a b\n"])
def test_hg_bad_text(text):
    with pytest.raises(FormatError):
        parse_hg(text)


def test_induced_and_complement():
    G = build_Cn(6)
    assert G.complement().num_edges == comb(6, 3) - G.num_edges
    sub = G.induced([0, 1, 2, 3])
    assert sub.n == 4
    assert all(G.has_edge(tuple([0, 1, 2, 3][v] for v in e)) for e in sub.edges)


@given(st.integers(0, 40))
def test_ranks_vectorised(seed):
    rng = np.random.default_rng(seed)
    rows = np.sort(np.array([rng.choice(12, 3, replace=False) for _ in range(20)]), axis=1)
    from exco2.core import ranks_of

    assert ranks_of(rows).tolist() == [colex_rank(r) for r in rows.tolist()]
