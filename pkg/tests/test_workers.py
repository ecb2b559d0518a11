import pytest

from hypergraph import EngineLimits, Hypergraph, find_bad_coloring
from workers import SearchPool, search_pool


def ap3_graph(n):
    return Hypergraph.build(n, [(a, a + d, a + 2 * d) for d in range(1, n) for a in range(n - 2 * d)])


def test_inline_map_keeps_order():
    pool = SearchPool(workers=1)
    assert pool.map(lambda x: x * x, [3, 1, 2]) == [9, 1, 4]


def test_default_pool_uses_settings():
    assert search_pool.workers >= 1


@pytest.mark.parametrize("n, r, depth", [(8, 2, 1), (8, 2, 4), (9, 2, 3), (12, 3, 2)])
def test_split_search_agrees_with_direct_search(n, r, depth):
    graph = ap3_graph(n)
    limits = EngineLimits()
    direct = find_bad_coloring(graph, r, limits)
    split = SearchPool(workers=1).solve(graph, r, limits, split_depth=depth)
    assert split.coloring == direct.coloring
    assert not split.exhausted


def test_split_depth_is_capped_by_vertex_count():
    graph = ap3_graph(3)
    res = SearchPool(workers=1).solve(graph, 2, EngineLimits(), split_depth=10)
    assert res.coloring == find_bad_coloring(graph, 2).coloring


def test_process_pool_matches_inline():
    graph = ap3_graph(8)
    inline = SearchPool(workers=1).solve(graph, 2, EngineLimits(), split_depth=3)
    parallel = SearchPool(workers=2).solve(graph, 2, EngineLimits(), split_depth=3)
    assert parallel.coloring == inline.coloring
