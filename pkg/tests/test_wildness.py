import random

import pytest
from hypothesis import given, settings, strategies as st

from arbor import families as F
from arbor.errors import ConsistencyError, InvalidInputError, ParseError
from arbor.recursion import WordElement, acts_trivially_on, apply
from arbor.tree import Cylinder, SphericalIndex
from arbor.wildness import (
    LqaWitness,
    a1_power_pattern_check,
    check_certificate,
    check_lqa_witness,
    check_nonhausdorff,
    conjugate_witness,
    dump_certificate,
    first_moved_level,
    load_certificate,
    n0_n1_bounded_search,
    nonhausdorff_certificate,
    parse_index,
    periodic_witness,
    preperiodic_certificate,
    theorem4_builder,
)


def test_periodic_witness_r2_n1():
    w = periodic_witness(2, 1)
    assert (w.W.render(), w.O_trivial.render(), w.check_depth) == ("U_1(0)", "U_2(00)", 6)
    assert acts_trivially_on(w.element, Cylinder((0, 0)), 6)
    assert not acts_trivially_on(w.element, Cylinder((0, 1)), 6)
    assert check_lqa_witness(w)
    assert str(w.element) == "a2^-1 a1^-1 a2^-1 a1 a1 a2 a1 a2"


@pytest.mark.parametrize("r,n", [(2, 1), (2, 2), (3, 1), (3, 2), (4, 1)])
def test_periodic_witness_roles(r, n):
    w = periodic_witness(r, n)
    wn = (0,) * (n * r - 1)
    assert w.W.base == wn and w.O_trivial.base == wn + (0,)
    assert w.check_depth == n * r + 2 * r
    assert check_lqa_witness(w)
    assert not acts_trivially_on(w.element, Cylinder(wn + (1,)), w.check_depth)


@pytest.mark.parametrize("r", [2, 3])
def test_periodic_witnesses_nest(r):
    ws = [periodic_witness(r, n) for n in (1, 2, 3)]
    for a, b in zip(ws, ws[1:]):
        assert b.W <= a.O_trivial <= a.W


def test_witness_preconditions():
    s = F.periodic(2)
    bad = LqaWitness(s.generator("a1"), Cylinder((0,)), Cylinder((1, 0)), 4)
    with pytest.raises(InvalidInputError):
        check_lqa_witness(bad)
    ident = LqaWitness(s.element("e"), Cylinder((0,)), Cylinder((0, 0)), 6)
    assert check_lqa_witness(ident) is False
    with pytest.raises(InvalidInputError):
        periodic_witness(1, 1)


@pytest.mark.parametrize("r,n,depth", [(2, 1, 6), (2, 2, 8), (3, 1, 9), (2, 3, 10), (3, 3, 12)])
def test_a1_power_pattern(r, n, depth):
    assert a1_power_pattern_check(r, n, depth)


def test_a1_power_pattern_depth_precondition():
    with pytest.raises(InvalidInputError):
        a1_power_pattern_check(2, 2, 5)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([(2, 1), (2, 2), (3, 1)]))
def test_conjugation_transports_witnesses(seed, rn):
    w = periodic_witness(*rn)
    s = w.element.system
    rng = random.Random(seed)
    h = WordElement(s, tuple(rng.randrange(2 * s.ngens) for _ in range(rng.randint(0, 6))))
    moved = conjugate_witness(w, h)
    assert check_lqa_witness(moved)


def test_fixedpoint_certificate_r3_s2():
    c = preperiodic_certificate(3, 2, depth=10)
    assert c.fixed_path.render() == "1*"
    assert [(p.W.render(), p.O.render()) for p in c.pairs[:2]] == [("U_1(1)", "U_3(101)"), ("U_2(11)", "U_4(1101)")]
    assert check_nonhausdorff(c)


def test_orbit_certificate_r3_s1():
    c = preperiodic_certificate(3, 1, depth=10)
    assert c.fixed_path.render() == "(01)*"
    assert [(p.W.render(), p.O.render()) for p in c.pairs[:2]] == [("U_2(01)", "U_3(011)"), ("U_4(0101)", "U_5(01011)")]


@pytest.mark.parametrize("r,s,gen", [(4, 2, "b3"), (4, 2, "b4"), (4, 1, "b2"), (5, 2, "b4"), (4, 3, "b4")])
def test_other_generators_are_certified(r, s, gen):
    c = preperiodic_certificate(r, s, gen, depth=12)
    assert c.pairs and check_nonhausdorff(c)


def test_certificate_parameter_errors():
    s = F.preperiodic(3, 1)
    with pytest.raises(InvalidInputError):
        nonhausdorff_certificate(s, "b1", "orbit", 3, 1, 10)
    with pytest.raises(InvalidInputError):
        nonhausdorff_certificate(s, "b3", "fixedpoint", 3, 1, 10)
    with pytest.raises(InvalidInputError):
        preperiodic_certificate(2, 1)
    # the orbit pattern of (3, 1) does not fit b3 of (3, 2)
    with pytest.raises(ConsistencyError):
        nonhausdorff_certificate(F.preperiodic(3, 2), "b3", "orbit", 4, 2, 12)


def test_tampered_certificate_fails_replay():
    c = preperiodic_certificate(3, 2, depth=10)
    text = dump_certificate(c).replace("pair 1 W=1 O=101", "pair 1 W=1 O=100")
    rep = check_certificate(load_certificate(text))
    assert not rep.ok and "n=1" in rep.failures[0]


@pytest.mark.parametrize("cert", [lambda: periodic_witness(3, 1), lambda: preperiodic_certificate(4, 2, "b3", 12), lambda: theorem4_builder(SphericalIndex.constant(3), (1, 2, 0), 7)[1]])
def test_certificates_round_trip_through_text(cert):
    c = cert()
    text = dump_certificate(c)
    again = load_certificate(text)
    assert dump_certificate(again) == text
    assert check_certificate(again).ok


def test_certificate_parse_errors():
    with pytest.raises(ParseError):
        load_certificate("hello\n")
    with pytest.raises(ParseError):
        load_certificate("arbor-certificate 1\ntype = lqa\n")


@pytest.mark.parametrize("index,perm,depth", [(SphericalIndex.constant(3), (1, 2, 0), 9), (SphericalIndex.constant(2), (1, 0), 7), (SphericalIndex.constant(2), (1, 0), 9)])
def test_builder_certificates(index, perm, depth):
    g, c = theorem4_builder(index, perm, depth)
    assert check_nonhausdorff(c)
    assert all(g.node_perms[v] == tuple(range(index.entry(len(v) + 1))) for v in g.node_perms if len(v) < 2)
    for k in range(1, depth + 1):
        assert apply(g, (0,) * k) == (0,) * k
    assert [p.W.level for p in c.pairs] == list(range(2, depth - 2, 2))


def test_builder_with_varying_index_and_levels():
    idx = parse_index("2 | 3 2")
    g, c = theorem4_builder(idx, lambda n: (1, 2, 0) if idx.entry(n) == 3 else (1, 0), 9)
    assert check_nonhausdorff(c)
    g, c = theorem4_builder(SphericalIndex.constant(3), {3: (1, 0, 2), 5: (0, 2, 1), 7: (1, 2, 0)}, 7)
    assert c.pairs


def test_builder_rejections():
    idx = SphericalIndex.constant(3)
    with pytest.raises(InvalidInputError, match="p_3"):
        theorem4_builder(idx, {3: (0, 1, 2), 5: (1, 2, 0)}, 5)
    with pytest.raises(InvalidInputError, match="odd"):
        theorem4_builder(idx, (1, 2, 0), 8)
    with pytest.raises(InvalidInputError):
        theorem4_builder(idx, (1, 0), 5)


def test_first_moved_level():
    s = F.odometer(2)
    assert first_moved_level(s.generator("a"), Cylinder((1, 1)), 6) == 1
    assert first_moved_level(s.element("e"), Cylinder(()), 6) is None
    assert first_moved_level(s.element("a a"), Cylinder(()), 6) == 2


def test_search_odometer():
    r = n0_n1_bounded_search(F.odometer(2), 1, 3)
    assert r.n0_syntactic["a"] == (1,)
    assert set(r.n1_semantic) == {"e"}


def test_search_chebyshev():
    r = n0_n1_bounded_search(F.chebyshev(2), 1, 2)
    assert r.n1_syntactic["b"] == (0,)


def test_search_preperiodic_fixed_vertex_on_ones():
    r = n0_n1_bounded_search(F.preperiodic(3, 2), 1, 4)
    v = r.n1_syntactic["b3"]
    assert set(v) == {1}


def test_search_periodic_finds_only_the_identity():
    r = n0_n1_bounded_search(F.periodic(2), 3, 4)
    assert set(r.n1_semantic) == {"e"}


def test_search_bounds():
    with pytest.raises(InvalidInputError):
        n0_n1_bounded_search(F.odometer(2), 2, 0)
    with pytest.raises(InvalidInputError):
        n0_n1_bounded_search(F.periodic(3), 9, 12)
