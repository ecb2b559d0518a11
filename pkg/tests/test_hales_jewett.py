import pytest

from errors import UsageError
from hales_jewett import (
    STAR, find_mono_line, hj_number, instantiate, line, line_hypergraph, lines, parse_word, render, word_at,
    word_index, words,
)
from hypergraph import EngineLimits


def test_word_indexing():
    assert word_index((1, 1, 1), 3) == 0
    assert word_index((1, 2, 3), 3) == 5
    assert word_at(5, 3, 3) == (1, 2, 3)
    assert [word_index(w, 2) for w in words(2, 3)] == list(range(8))


def test_lines_scan_all_star_first():
    found = list(lines(2, 2))
    assert found[0] == (STAR, STAR)
    assert len(found) == 3 ** 2 - 2 ** 2
    assert len(list(lines(3, 3))) == 4 ** 3 - 3 ** 3


def test_line_instantiation():
    w = parse_word("1*2*")
    assert line(w, 2) == [(1, 1, 2, 1), (1, 2, 2, 2)]
    assert instantiate(w, 2) == (1, 2, 2, 2)
    with pytest.raises(UsageError):
        line((1, 2), 2)
    with pytest.raises(UsageError):
        instantiate(w, 3, 2)


def test_render_parse():
    assert render(parse_word("*12*")) == "*12*"


def test_find_mono_line_with_flat_coloring():
    # 11 -> 0, 12 -> 1, 21 -> 1, 22 -> 1: *2 comes before 2* in scan order
    assert find_mono_line(2, 2, [0, 1, 1, 1]) == (STAR, 2)


def test_find_mono_line_with_callable():
    assert find_mono_line(3, 2, lambda w: 0) == (STAR, STAR)
    assert find_mono_line(2, 1, lambda w: w[0] - 1) is None


def test_find_mono_line_checks_length():
    with pytest.raises(UsageError):
        find_mono_line(2, 2, [0, 1])


def test_line_hypergraph_size():
    graph = line_hypergraph(2, 2)
    assert graph.size == 4
    assert len(graph.edges) == 5


@pytest.mark.parametrize("k, r, n", [(2, 1, 1), (2, 2, 2), (2, 3, 3), (1, 4, 1), (3, 1, 1)])
def test_hj_numbers(k, r, n):
    result = hj_number(k, r)
    assert result.n == n
    assert not result.exhausted


def test_hj_number_bad_coloring_below():
    result = hj_number(2, 2)
    assert result.bad_n == 1
    assert result.bad == (0, 1)
    assert find_mono_line(2, 1, result.bad) is None


def test_hj_number_out_of_room():
    result = hj_number(2, 3, max_n=2)
    assert result.n is None
    assert result.exhausted
    assert result.bad_n == 2


def test_hj_number_rejects_bad_arguments():
    with pytest.raises(UsageError):
        hj_number(0, 2)


def test_hj_number_reports_blow_up_before_building():
    result = hj_number(3, 2, EngineLimits(max_nodes=100))
    assert result.n is None
    assert result.exhausted
    # [3]^2 has 3 * (16 - 9) = 21 incidences, [3]^3 already 3 * (64 - 27) = 111
    assert result.bad_n <= 2
