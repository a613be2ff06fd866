from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from arbor.config import Limits
from arbor.errors import CapacityError, DepthError, InvalidInputError, ParseError
from arbor.tree import (
    Cylinder,
    EventuallyPeriodicPath,
    SphericalIndex,
    is_prefix,
    level_width,
    level_words,
    parse_path,
    parse_word,
    path_distance,
    render_word,
    word_rank,
    word_unrank,
)

words2 = st.lists(st.integers(0, 1), max_size=10).map(tuple)


def test_index_entries_cycle_through_the_period():
    idx = SphericalIndex((2,), (3, 5))
    assert idx.entries(5) == [2, 3, 5, 3, 5]
    assert not idx.is_constant
    with pytest.raises(InvalidInputError):
        idx.arity


def test_index_rejects_unary_branching():
    with pytest.raises(InvalidInputError):
        SphericalIndex((), (1,))


def test_level_width_and_capacity():
    idx = SphericalIndex.constant(3)
    assert level_width(idx, 4) == 81
    with pytest.raises(CapacityError):
        level_width(idx, 20, Limits(max_width=1000))
    with pytest.raises(DepthError):
        idx.check_word((0,) * 30)


def test_check_word_rejects_out_of_range_letter():
    with pytest.raises(InvalidInputError, match="position 2"):
        SphericalIndex.constant(2).check_word((0, 2))


def test_level_words_are_lexicographic_and_ranked():
    idx = SphericalIndex((2,), (3,))
    ws = level_words(idx, 2)
    assert ws == sorted(ws)
    assert [word_rank(idx, w) for w in ws] == list(range(6))


@given(st.lists(st.integers(0, 2), min_size=1, max_size=8))
def test_rank_unrank_round_trip(w):
    idx = SphericalIndex.constant(3)
    assert word_unrank(idx, len(w), word_rank(idx, w)) == tuple(w)


def test_parse_and_render_words():
    assert parse_word("0101") == (0, 1, 0, 1)
    assert parse_word("e") == ()
    assert parse_word("10,3") == (10, 3)
    assert render_word((1, 12)) == "1,12"
    with pytest.raises(ParseError):
        parse_word("0x1")


@pytest.mark.parametrize("text,prefix,period", [("0*", (), (0,)), ("(01)*", (), (0, 1)), ("011(10)*", (0, 1, 1), (1, 0)), ("1*", (), (1,))])
def test_parse_path_forms(text, prefix, period):
    p = parse_path(text)
    assert (p.prefix, p.period) == (prefix, period)
    assert parse_path(p.render()) == p


def test_path_truncation():
    p = EventuallyPeriodicPath((1,), (0, 1))
    assert p.truncate(6) == (1, 0, 1, 0, 1, 0)


def test_cylinder_render_and_inclusion():
    c = Cylinder((0, 1))
    assert c.render() == "U_2(01)"
    assert Cylinder((0, 1, 1)) <= c
    assert not c <= Cylinder((0, 1, 1))
    assert sorted(c.words(SphericalIndex.constant(2), 3)) == [(0, 1, 0), (0, 1, 1)]


@given(words2, words2)
def test_cylinder_membership_is_prefix(base, w):
    assert Cylinder(base).contains_word(w) == is_prefix(base, w)


@given(words2, words2, words2)
def test_distance_is_an_ultrametric(x, y, z):
    dxz = path_distance(x, z, 2)
    assert dxz <= max(path_distance(x, y, 2), path_distance(y, z, 2))
    assert path_distance(x, y, 2) == path_distance(y, x, 2)


def test_distance_values():
    assert path_distance((0, 1, 1), (0, 1, 0), 2) == Fraction(1, 4)
    assert path_distance(parse_path("0*"), parse_path("0*"), 2) == 0
    with pytest.raises(InvalidInputError):
        path_distance((2,), (0,), 2)
