import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from arbor import families as F
from arbor.config import Limits
from arbor.errors import CapacityError, DepthError, InvalidInputError, ParseError, UndefinedGeneratorError
from arbor.recursion import (
    Portrait,
    RecursionSystem,
    WordElement,
    apply,
    compose,
    equal_to_depth,
    free_reduce,
    invert,
    is_level_transitive,
    is_trivial_to_depth,
    parse_system,
    portrait_dot,
    portrait_of,
    power_letters,
    render_portrait,
    section,
    truncate,
    tuple_generator,
)
from arbor.tree import SphericalIndex

from oracles import naive_table
from systems import SYSTEMS

names = sorted(SYSTEMS)


@st.composite
def element_pair(draw, max_len=6, max_v=4):
    s = SYSTEMS[draw(st.sampled_from(names))]
    letter = st.integers(0, 2 * s.ngens - 1)
    g = draw(st.lists(letter, max_size=max_len))
    h = draw(st.lists(letter, max_size=max_len))
    v = draw(st.lists(st.integers(0, s.arity - 1), max_size=max_v))
    return s, WordElement(s, g), WordElement(s, h), tuple(v)


def test_free_reduction_and_powers():
    assert free_reduce([0, 1, 2, 2, 3, 0]) == (2, 0)
    assert power_letters((0, 2), 3) == (0, 2) * 3
    assert power_letters((0, 2), -2) == (3, 1, 3, 1)
    assert power_letters((0,), 0) == ()


def test_odometer_examples():
    s = F.odometer(2)
    a = s.generator("a")
    assert apply(a, (1, 1)) == (0, 0)
    assert apply(a, (0, 1)) == (1, 1)
    assert apply(s.element("a a^-1"), (0, 1, 0, 1)) == (0, 1, 0, 1)
    assert str(section(a, (1,))) == "a"
    assert is_level_transitive(a, 12)


def test_chebyshev_examples():
    s = F.chebyshev(2)
    assert apply(s.generator("b"), (0, 0)) == (0, 0)
    assert apply(s.element("b a"), (0,)) == (1,)


def test_word_parsing_with_exponents():
    s = F.periodic(2)
    assert s.parse_word("a1^3 a2^-1") == (0, 0, 0, 3)
    assert s.render_word(()) == "e"
    with pytest.raises(UndefinedGeneratorError):
        s.parse_word("a3")


SAMPLE = """\
# the adding machine written with a forward reference
tree arity = 2
basepoint = 1*
gen b: perm = e; 0 -> a; 1 -> b
gen a: perm = (0 1); 0 -> e; 1 -> a
"""


def test_parse_system_with_forward_reference():
    s = parse_system(SAMPLE)
    assert s.names == ("b", "a") or list(s.names) == ["b", "a"]
    assert s.basepoint.render() == "1*"
    assert apply(s.generator("a"), (1, 1, 0)) == (0, 0, 1)


@pytest.mark.parametrize(
    "text,exc,line,col",
    [
        ("tree arity = 2\ngen a: perm = (0 1); 0 -> q; 1 -> a\n", UndefinedGeneratorError, 2, 27),
        ("tree arity = 2\ngen a: perm = (0 1); 0 -> e\n", ParseError, 2, 5),
        ("tree arity = x\n", ParseError, 1, 14),
        ("tree arity = 2\nfoo\n", ParseError, 2, 1),
        ("tree arity = 2\ngen a: perm = (0 1); 0 -> e; 2 -> e\n", ParseError, 2, 30),
        ("tree index = 2 | 3\ngen a: perm = e; 0 -> e; 1 -> e\n", ParseError, 1, 14),
    ],
)
def test_parse_errors_carry_positions(text, exc, line, col):
    with pytest.raises(exc) as info:
        parse_system(text)
    assert (info.value.line, info.value.column) == (line, col)
    assert str(info.value).startswith(f"line {line}, column {col}: ")


def test_group_directive_round_trips():
    s = F.arith_preperiodic_r2(1)
    t = parse_system(s.emit())
    assert [str(g) for g in t.group_generators()] == ["a", "b", "c c"]
    assert t.emit() == s.emit()


@pytest.mark.parametrize("name", names)
def test_emit_parse_round_trip(name):
    s = SYSTEMS[name]
    t = parse_system(s.emit())
    for i in range(s.ngens):
        for n in range(1, 9):
            assert np.array_equal(s.word_table((2 * i,), n), t.word_table((2 * i,), n))


@pytest.mark.parametrize("name", names)
def test_tables_match_unmemoized_recursion(name):
    s = SYSTEMS[name]
    for i in range(s.ngens):
        for l in (2 * i, 2 * i + 1):
            assert list(s.word_table((l,), 5)) == naive_table(s, (l,), 5)
    w = tuple(range(2 * s.ngens))
    assert list(s.word_table(w, 4)) == naive_table(s, w, 4)


@settings(max_examples=150, deadline=None)
@given(element_pair())
def test_section_cocycle(data):
    s, g, h, v = data
    gh = g * h
    assert apply(gh, v) == apply(g, apply(h, v))
    lhs = section(gh, v)
    rhs = section(g, apply(h, v)) * section(h, v)
    assert equal_to_depth(lhs, rhs, 8 - len(v))


@settings(max_examples=150, deadline=None)
@given(element_pair(), st.integers(1, 6))
def test_truncation_is_a_homomorphism(data, n):
    s, g, h, _ = data
    assert np.array_equal(truncate(g * h, n), truncate(g, n)[truncate(h, n)])
    assert np.array_equal(truncate(invert(g), n)[truncate(g, n)], np.arange(s.arity**n))


@settings(max_examples=80, deadline=None)
@given(element_pair(), st.integers(1, 5))
def test_portraits_agree_with_words(data, n):
    s, g, h, v = data
    pg, ph = portrait_of(g, n), portrait_of(h, n)
    assert np.array_equal(truncate(pg, n), truncate(g, n))
    assert np.array_equal(truncate(compose(pg, ph), n), truncate(g * h, n))
    assert np.array_equal(truncate(invert(pg), n), truncate(invert(g), n))
    if len(v) <= n:
        assert apply(pg, v) == apply(g, v)


def _switch(entries, perm):
    """perm-last entries rewritten so that the section sits at its input letter."""
    return [entries[perm[x]] for x in range(len(perm))]


@pytest.mark.parametrize(
    "arity,gens",
    [
        (2, [("a", (1, 0), ["a2", "e"]), ("a2", (0, 1), ["a", "e"])]),
        (3, [("x", (1, 2, 0), ["y", "e", "x"]), ("y", (0, 2, 1), ["e", "x", "y^-1"])]),
    ],
)
def test_tuple_convention_switch_round_trip(arity, gens):
    last = RecursionSystem.build(arity, [tuple_generator(n, p, e, "perm-last") for n, p, e in gens])
    first = RecursionSystem.build(arity, [tuple_generator(n, p, _switch(e, p), "perm-first") for n, p, e in gens])
    for i in range(len(gens)):
        for n in range(1, 9):
            assert np.array_equal(last.word_table((2 * i,), n), first.word_table((2 * i,), n))


def test_conventions_differ_when_the_permutation_moves_sections():
    last = RecursionSystem.build(2, [tuple_generator("a", (1, 0), ["a", "e"], "perm-last")])
    first = RecursionSystem.build(2, [tuple_generator("a", (1, 0), ["a", "e"], "perm-first")])
    assert str(section(last.generator("a"), (1,))) == "a"
    assert str(section(first.generator("a"), (0,))) == "a"


def test_capacity_and_depth_errors():
    s = F.odometer(2)
    with pytest.raises(CapacityError):
        truncate(s.generator("a"), 22, Limits(max_table=2**20))
    with pytest.raises(DepthError):
        apply(s.generator("a"), (0,) * 30)
    with pytest.raises(InvalidInputError):
        apply(s.generator("a"), (3,))
    p = portrait_of(s.generator("a"), 3)
    with pytest.raises(DepthError):
        apply(p, (0, 0, 0, 0))


def test_portrait_validation():
    idx = SphericalIndex.constant(2)
    with pytest.raises(InvalidInputError, match="missing"):
        Portrait(idx, 2, {(): (1, 0)})
    with pytest.raises(InvalidInputError):
        Portrait(idx, 1, {(): (0, 0)})


def test_mixed_caps_flag_the_product():
    s = F.odometer(2)
    g = compose(portrait_of(s.generator("a"), 3), portrait_of(s.generator("a"), 5))
    assert g.depth == 3 and g.capped


def test_portrait_rendering():
    s = F.odometer(2)
    text = render_portrait(portrait_of(s.generator("a"), 3))
    assert text.splitlines()[0] == "root: (0 1)"
    assert "    11: (0 1)" in text.splitlines()
    dot = portrait_dot(portrait_of(s.element("e"), 2))
    assert dot.count('label="e"') == 3
    assert dot == portrait_dot(portrait_of(s.element("e"), 2))


def test_triviality_helpers():
    s = F.periodic(2)
    a1sq = s.element("a1 a1")
    assert is_trivial_to_depth(a1sq, 2) and not is_trivial_to_depth(a1sq, 3)
