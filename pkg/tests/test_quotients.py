import numpy as np
import pytest

from arbor import families as F
from arbor.config import Limits
from arbor.errors import CapacityError, InvalidInputError, NotTransitiveError
from arbor.permgroup import bfs_order
from arbor.quotients import (
    ChainData,
    probe_windows,
    tower_from_chain,
    chain_report,
    discriminant_level,
    discriminant_tower,
    level_quotient,
    stability_probe,
    stabilizer,
)
from arbor.recursion import parse_system, truncate
from arbor.tree import parse_path

from oracles import relative_core_index


def test_odometer_quotients_are_cyclic():
    s = F.odometer(2)
    for n in range(1, 9):
        q = level_quotient(s, None, n)
        assert q.order() == 2**n
        assert stabilizer(q, (0,) * n).order == 1


def test_chebyshev_level_three_is_dihedral():
    q = level_quotient(F.chebyshev(2), None, 3)
    assert q.order() == 16
    assert not q.group().is_abelian()


def test_arith_r1_level_three():
    assert level_quotient(F.arith_periodic_r1(), None, 3).order() == 32


def test_stabilizer_words_and_orbit_stabilizer():
    s = F.chebyshev(2)
    for n in range(2, 7):
        q = level_quotient(s, None, n)
        h = stabilizer(q, (0,) * n)
        assert h.order == 2
        assert q.order() // h.order == 2**n  # transitive level
        for p in h.perms:
            assert p[0] == 0
        for w in h.words():
            assert np.array_equal(truncate(s.element(w), n), q.evaluate_label(h.labels[h.words().index(w)], n))
    q = level_quotient(s, None, 3)
    with pytest.raises(InvalidInputError):
        stabilizer(q, (0, 0, 0, 0))


def test_words_of_stabilizer_generators_fix_the_vertex():
    s = F.arith_periodic_r1()
    q = level_quotient(s, None, 5)
    h = stabilizer(q, (0,) * 5)
    for w in h.words():
        t = truncate(s.element(w), 5)
        assert t[0] == 0


@pytest.mark.parametrize("name,n_max,expected", [
    ("chebyshev", 8, lambda n: 2 if n >= 2 else 1),
    ("odometer", 12, lambda n: 1),
    ("arith_periodic_r1", 8, lambda n: 2 ** (n - 1) if n >= 3 else None),
])
def test_chain_reports(name, n_max, expected):
    rows = chain_report(F.FamilySpec(name).build(), None, None, n_max)
    for r in rows:
        assert r.index == 2**r.n
        assert r.quotient_order == r.index * r.stabilizer_order
        if expected(r.n) is not None:
            assert r.stabilizer_order == expected(r.n)


def test_chain_report_rejects_non_transitive_levels():
    s = parse_system("tree arity = 2\ngen a: perm = e; 0 -> a; 1 -> a\n")
    with pytest.raises(NotTransitiveError):
        chain_report(s, None, None, 2)
    rows = chain_report(s, None, None, 2, require_transitive=False)
    assert rows[0].index == 1


def test_capacity_bounds():
    with pytest.raises(CapacityError):
        level_quotient(F.odometer(2), None, 15, Limits(max_points=2**14))
    with pytest.raises(CapacityError):
        level_quotient(F.periodic(2), None, 6, Limits(max_order=10**6)).order()


def test_discriminant_level_examples():
    assert discriminant_level(F.chebyshev(2), None, None, 3, 6).order == 2
    assert discriminant_level(F.odometer(2), None, None, 2, 7).order == 1
    lev = discriminant_level(F.arith_periodic_r1(), None, None, 1, 6)
    assert lev.fingerprint.render() == "(16, abelian, 8, [2,8], 1)"


@pytest.mark.parametrize("name,pairs", [
    ("chebyshev", [(1, 4), (2, 5), (3, 6)]),
    ("arith_periodic_r1", [(0, 5), (1, 5), (2, 6), (1, 6)]),
    ("arith_preperiodic_r2", [(0, 5), (1, 6)]),
    ("periodic", [(1, 3), (2, 4)]),
    ("preperiodic", [(1, 3), (2, 4)]),
])
def test_relative_core_matches_conjugate_intersection(name, pairs):
    s = F.FamilySpec(name, r=2 if name == "periodic" else 3, s=1).build()
    for m, n in pairs:
        assert discriminant_level(s, None, None, m, n).order == relative_core_index(s, m, n)


def test_chebyshev_tower_is_all_isomorphisms():
    t = discriminant_tower(F.chebyshev(2), None, None, 4, 9)
    for r in t.row_maps + t.column_maps:
        if r.source[1] >= r.source[0] + 3:
            assert r.injective and r.surjective and r.image_order == 2
    assert stability_probe(t).line() == "verdict=stable-evidence order=2"


def test_arith_tower_kernels_double_along_rows():
    t = discriminant_tower(F.arith_periodic_r1(), None, None, 4, 9)
    for r in t.row_maps:
        m, n = r.source
        if n - m >= 4:
            assert r.surjective and r.kernel_order == 2
    for m in range(5):
        for n in range(m + 3, 10):
            assert t.level(0, n).order == t.level(m, n).order * 2**m
    assert all(v == 1 for k, v in t.surviving.items() if k[1] >= k[0] + 2)


def test_tower_inclusions_give_divisibility():
    t = discriminant_tower(F.arith_preperiodic_r2(1), None, None, 3, 7)
    for (m, n), lev in t.levels.items():
        assert t.level(0, n).order % lev.order == 0
        assert lev.stabilizer_order % lev.order == 0


def test_odometer_tower_is_trivial():
    t = discriminant_tower(F.odometer(2), None, None, 3, 10)
    assert all(l.order == 1 for l in t.levels.values())
    assert stability_probe(t).line() == "verdict=stable-evidence order=1"


def test_probe_needs_three_levels():
    t = discriminant_tower(F.odometer(2), None, None, 2, 3)
    with pytest.raises(InvalidInputError):
        stability_probe(t)


def test_periodic_probe_is_never_stable():
    t = discriminant_tower(F.periodic(2), None, None, 2, 6, Limits(max_order=10**200))
    assert stability_probe(t).verdict == "wild-evidence"
    assert t.surviving[(1, 5)] > 1


def test_other_basepoints():
    s = F.preperiodic(3, 2)
    t = discriminant_tower(s, None, parse_path("1*"), 1, 6, Limits(max_order=10**40))
    assert t.basepoint.render() == "1*"
    assert all(l.order >= 1 for l in t.levels.values())


def test_chain_order_matches_bfs_on_small_quotients():
    for name in ("chebyshev", "odometer", "arith_periodic_r1", "arith_preperiodic_r2", "dihedral"):
        s = F.FamilySpec(name).build()
        for n in range(1, 8):
            q = level_quotient(s, None, n)
            if q.order() <= 10**4:
                assert q.order() == bfs_order(q.width, q.perms, 10**5)


def test_windows_from_one_chain_match_separate_towers():
    s = F.periodic(2)
    lim = Limits(max_order=10**100)
    data = ChainData(s, None, None, 6, lim)
    for M, N in ((0, 4), (1, 5), (2, 6), (3, 6)):
        a = tower_from_chain(data, M, N)
        b = discriminant_tower(s, None, None, M, N, lim)
        assert {k: v.fingerprint for k, v in a.levels.items()} == {k: v.fingerprint for k, v in b.levels.items()}
        assert a.row_maps == b.row_maps and a.column_maps == b.column_maps
        assert a.surviving == b.surviving
    verdicts = probe_windows(F.chebyshev(2), N=7)
    assert verdicts[(3, 7)].line() == "verdict=stable-evidence order=2"
    assert len(verdicts) == sum(n - 1 for n in range(3, 8))
    with pytest.raises(InvalidInputError):
        tower_from_chain(data, 0, 7)
