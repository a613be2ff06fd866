"""Finite level quotients, group chains, relative cores and discriminant towers.

Vertices of levels 1..N are packed into one "tree domain": level k
occupies positions offset(k) .. offset(k) + d^k - 1, in lexicographic
order. A chain built on that domain with base x_1, ..., x_N gives every
stabilizer G_n = Stab(x_n) at once (the strong generators fixing the
first n base points).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Sequence

import numpy as np

from .config import DEFAULT_LIMITS, Limits
from .errors import CapacityError, ConsistencyError, InvalidInputError, NotTransitiveError
from .permgroup import SLP, PermGroup, is_identity_perm, perm_inverse, perm_order, abelian_invariants_from_orders
from .recursion import RecursionSystem, WordElement, truncate
from .tree import EventuallyPeriodicPath, Word, level_width, level_words, render_word, word_rank, word_unrank


# ---------------------------------------------------------------- fingerprints


@dataclass(frozen=True)
class Fingerprint:
    order: int
    abelian: bool
    exponent: int | None
    invariants: tuple[int, ...] | None
    derived_order: int | None

    def render(self) -> str:
        exp = "?" if self.exponent is None else str(self.exponent)
        if not self.abelian:
            inv = "-"
        elif self.invariants is None:
            inv = "?"
        else:
            inv = "[" + ",".join(map(str, self.invariants)) + "]"
        kind = "abelian" if self.abelian else "non-abelian"
        der = "?" if self.derived_order is None else str(self.derived_order)
        return f"({self.order}, {kind}, {exp}, {inv}, {der})"

    def complete(self) -> bool:
        return self.exponent is not None


def fingerprint(group: PermGroup, limits: Limits | None = None, strict: bool = True) -> Fingerprint:
    """(order, abelian, exponent, invariant factors, derived order).

    Past the enumeration bound this raises, or with strict=False keeps only
    the order and the abelian flag.
    """
    limits = limits or group.limits
    order = group.order()
    abelian = group.is_abelian()
    if order > limits.max_enumerate:
        if strict:
            raise CapacityError(f"group of order {order} exceeds the enumeration bound {limits.max_enumerate}")
        return Fingerprint(order, abelian, None, None, 1 if abelian else None)
    derived = 1 if abelian else group.derived_subgroup().order()
    els = group.elements(limits.max_enumerate)
    orders = [perm_order(e) for e in els]
    exponent = 1
    from math import lcm

    for o in orders:
        exponent = lcm(exponent, o)
    inv = tuple(abelian_invariants_from_orders(orders)) if abelian else None
    return Fingerprint(order, abelian, exponent, inv, derived)


# ---------------------------------------------------------------- quotients


def _resolve_gens(sys: RecursionSystem, gens) -> list[WordElement]:
    if gens is None:
        return sys.group_generators()
    out = []
    for g in gens:
        if isinstance(g, str):
            out.append(sys.element(g))
        elif isinstance(g, WordElement):
            if g.system is not sys:
                raise InvalidInputError("generator belongs to a different system")
            out.append(g)
        else:
            out.append(sys.element(g))
    return out


@dataclass
class FiniteQuotient:
    """Image of <gens> in Sym(V_n), with a word for every generator."""

    system: RecursionSystem
    level: int
    gens: list[WordElement]
    perms: list[np.ndarray]
    limits: Limits = DEFAULT_LIMITS
    slp: SLP = field(init=False)
    _group: PermGroup | None = field(default=None, init=False, repr=False)
    _tree: list[np.ndarray] | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        self.slp = SLP(len(self.gens))

    @property
    def points(self) -> list[Word]:
        return level_words(self.system.index, self.level, self.limits)

    @property
    def width(self) -> int:
        return self.system.arity**self.level

    def group(self) -> PermGroup:
        if self._group is None:
            self._group = PermGroup(self.width, self.perms, [self.slp.gen(i) for i in range(len(self.gens))], self.slp, self.limits)
        return self._group

    def order(self) -> int:
        return self.group().order()

    # tree domain: all vertices of levels 1..level
    def offsets(self) -> list[int]:
        d = self.system.arity
        out = [0]
        for k in range(1, self.level + 1):
            out.append(out[-1] + d**k)
        return out  # level k starts at out[k-1]

    def tree_perms(self) -> list[np.ndarray]:
        if self._tree is None:
            self._tree = [self.lift_to_tree(p) for p in self.perms]
        return self._tree

    def lift_to_tree(self, p: np.ndarray) -> np.ndarray:
        """Level-n table to the action on every vertex of levels 1..n."""
        d, n = self.system.arity, self.level
        offs = self.offsets()
        parts = []
        for k in range(1, n + 1):
            scale = d ** (n - k)
            parts.append(offs[k - 1] + p[np.arange(d**k, dtype=np.int64) * scale] // scale)
        return np.concatenate(parts)

    def tree_point(self, v: Sequence[int]) -> int:
        k = len(v)
        if not 1 <= k <= self.level:
            raise InvalidInputError(f"vertex level {k} is outside 1..{self.level}")
        return self.offsets()[k - 1] + word_rank(self.system.index, v)

    def level_slice(self, tree_perm: np.ndarray, k: int) -> np.ndarray:
        offs = self.offsets()
        return tree_perm[offs[k - 1] : offs[k]] - offs[k - 1]

    def label_word(self, node: int, max_len: int = 10_000):
        return self.slp.expand(node, [g.letters for g in self.gens], max_len)

    def evaluate_label(self, node: int, n: int, memo: dict | None = None) -> np.ndarray:
        """Re-evaluate a labelled element as a level-n table from its generator words."""
        tables = [truncate(g, n, self.limits) for g in self.gens]
        return self.slp.evaluate(node, lambda i: tables[i], lambda a, b: a[b], perm_inverse, np.arange(self.system.arity**n, dtype=np.int64), memo)


def level_quotient(sys: RecursionSystem, gens=None, n: int = 1, limits: Limits = DEFAULT_LIMITS) -> FiniteQuotient:
    if n < 1:
        raise InvalidInputError("quotient level must be at least 1")
    width = level_width(sys.index, n, limits)
    if width > limits.max_points:
        raise CapacityError(f"level {n} has {width} points; the bound is {limits.max_points}")
    gl = _resolve_gens(sys, gens)
    perms = [truncate(g, n, limits) for g in gl]
    return FiniteQuotient(sys, n, gl, perms, limits)


@dataclass
class SubgroupHandle:
    parent: FiniteQuotient
    perms: list[np.ndarray]
    labels: list[int]
    order: int
    vertex: Word | None = None

    def words(self, max_len: int = 10_000) -> list[str]:
        out = []
        for lab in self.labels:
            w = self.parent.label_word(lab, max_len)
            out.append(self.parent.system.render_word(w) if w is not None else f"<slp {lab}>")
        return out

    def group(self) -> PermGroup:
        q = self.parent
        return PermGroup(q.width, self.perms, self.labels, q.slp, q.limits)


def stabilizer(q: FiniteQuotient, v: Sequence[int]) -> SubgroupHandle:
    v = q.system.index.check_word(v, q.limits)
    if len(v) > q.level:
        raise InvalidInputError(f"vertex level {len(v)} is below the quotient level {q.level}")
    if len(v) == 0:
        g = q.group()
        return SubgroupHandle(q, list(g.gens), list(g.labels), g.order(), ())
    if len(v) == q.level:
        # a leaf: the level permutations already see it
        ch = q.group().chain([word_rank(q.system.index, v)])
        idx = ch.stabilizer_gens(1)
        perms = [ch.sgens[j] for j in idx]
    else:
        tree = PermGroup(len(q.tree_perms()[0]), q.tree_perms(), [q.slp.gen(i) for i in range(len(q.gens))], q.slp, q.limits)
        ch = tree.chain([q.tree_point(v)])
        idx = ch.stabilizer_gens(1)
        perms = [q.level_slice(ch.sgens[j], q.level) for j in idx]
    order = ch.order() // len(ch.levels[0].orbit)
    return SubgroupHandle(q, perms, [ch.slab[j] for j in idx], order, v)


# ---------------------------------------------------------------- chains


@dataclass(frozen=True)
class ChainRow:
    n: int
    index: int  # |G : G_n|, the orbit of x_n
    quotient_order: int  # |G / C_n|
    stabilizer_order: int  # |G_n / C_n|


def chain_report(sys: RecursionSystem, gens=None, basepoint: EventuallyPeriodicPath | None = None, N: int = 1, limits: Limits = DEFAULT_LIMITS, require_transitive: bool = True) -> list[ChainRow]:
    basepoint = basepoint or sys.basepoint
    rows = []
    for n in range(1, N + 1):
        q = level_quotient(sys, gens, n, limits)
        xn = basepoint.truncate(n)
        base = [q.tree_point(xn[:k]) for k in range(1, n + 1)]
        tree = PermGroup(len(q.tree_perms()[0]), q.tree_perms(), [q.slp.gen(i) for i in range(len(q.gens))], q.slp, limits)
        ch = tree.chain(base)
        sizes = ch.basic_orbit_sizes()
        index = prod(sizes[:n])
        order = ch.order()
        if require_transitive and index != q.width:
            raise NotTransitiveError(n, index, q.width)
        rows.append(ChainRow(n, index, order, order // index))
    return rows


class ChainData:
    """One stabilizer chain of the level-N quotient on the tree domain.

    G_n for n <= N is generated by the strong generators fixing the first n
    base points x_1..x_n.
    """

    def __init__(self, sys: RecursionSystem, gens, basepoint: EventuallyPeriodicPath | None, N: int, limits: Limits = DEFAULT_LIMITS):
        self.system = sys
        self.basepoint = basepoint or sys.basepoint
        self.N = N
        self.limits = limits
        self.quotient = level_quotient(sys, gens, N, limits)
        q = self.quotient
        self.path = self.basepoint.truncate(N)
        base = [q.tree_point(self.path[:k]) for k in range(1, N + 1)]
        tree = PermGroup(len(q.tree_perms()[0]), q.tree_perms(), [q.slp.gen(i) for i in range(len(q.gens))], q.slp, limits)
        self.chain = tree.chain(base)
        self._orbits: dict = {}
        self._orders: dict = {}

    def stab_gens(self, m: int) -> list[int]:
        """Strong generator indices generating G_m (m = 0 gives the whole group)."""
        return self.chain.stabilizer_gens(m)

    def stab_order(self, m: int) -> int:
        """|G_m / C_N|."""
        return prod(self.chain.basic_orbit_sizes()[m:])

    def level_perm(self, j: int, n: int) -> np.ndarray:
        return self.quotient.level_slice(self.chain.sgens[j], n)

    def orbit(self, m: int, n: int) -> list[int]:
        """G_m-orbit of x_n as sorted level-n ranks."""
        key = (m, n)
        if key not in self._orbits:
            tables = [self.level_perm(j, n).tolist() for j in self.stab_gens(m)]
            start = word_rank(self.system.index, self.path[:n])
            seen = {start}
            todo = [start]
            while todo:
                x = todo.pop()
                for t in tables:
                    y = t[x]
                    if y not in seen:
                        seen.add(y)
                        todo.append(y)
            self._orbits[key] = sorted(seen)
        return self._orbits[key]

    def group_on(self, n_gens: int, points_level: int, points: Sequence[int]) -> PermGroup:
        """G_{n_gens} acting on the given level-`points_level` vertices."""
        return self.group_on_blocks(n_gens, [(points_level, points)])

    def group_on_blocks(self, n_gens: int, blocks: Sequence[tuple[int, Sequence[int]]]) -> PermGroup:
        """G_{n_gens} acting on a disjoint union of invariant vertex sets (level, ranks)."""
        offs = self.quotient.offsets()
        pts = np.concatenate([offs[k - 1] + np.asarray(p, dtype=np.int64) for k, p in blocks])
        pos = np.full(offs[-1], -1, dtype=np.int64)
        pos[pts] = np.arange(len(pts))
        gens, labs = [], []
        for j in self.stab_gens(n_gens):
            img = pos[self.chain.sgens[j][pts]]
            if (img < 0).any():
                raise ConsistencyError("orbit is not invariant under the stabilizer")
            gens.append(img)
            labs.append(self.chain.slab[j])
        return PermGroup(len(pts), gens, labs, self.quotient.slp, self.limits)

    def surviving_kernel(self, m: int, k: int, n: int, deep: int) -> int:
        """Order of the image in D(m, n) of the kernel of D(m, deep) -> D(k, deep)."""
        ok = self.orbit(k, deep)
        both = self.group_on_blocks(deep, [(deep, ok), (n, self.orbit(m, n))]).order()
        key = ("on", k, deep)
        if key not in self._orders:
            self._orders[key] = self.group_on(deep, deep, ok).order()
        return both // self._orders[key]


@dataclass
class DiscriminantLevel:
    m: int
    n: int
    orbit: list[int]  # level-n ranks of the G_m-orbit of x_n
    group: PermGroup
    order: int
    fingerprint: Fingerprint
    stabilizer_order: int  # |G_n / C_N| for the divisibility check

    def orbit_words(self, d: int) -> list[str]:
        from .tree import SphericalIndex

        idx = SphericalIndex.constant(d)
        return [render_word(word_unrank(idx, self.n, r)) for r in self.orbit]


def _make_level(data: ChainData, m: int, n: int, strict: bool) -> DiscriminantLevel:
    orbit = data.orbit(m, n)
    grp = data.group_on(n, n, orbit)
    order = grp.order()
    fp = fingerprint(grp, data.limits, strict=strict)
    return DiscriminantLevel(m, n, orbit, grp, order, fp, data.stab_order(n))


def discriminant_level(sys: RecursionSystem, gens=None, basepoint: EventuallyPeriodicPath | None = None, m: int = 0, n: int = 1, limits: Limits = DEFAULT_LIMITS) -> DiscriminantLevel:
    if not 0 <= m <= n:
        raise InvalidInputError("need 0 <= m <= n")
    if n < 1:
        raise InvalidInputError("need n >= 1")
    data = ChainData(sys, gens, basepoint, n, limits)
    lev = _make_level(data, m, n, strict=True)
    if data.stab_order(n) % lev.order:
        raise ConsistencyError("discriminant order does not divide the stabilizer order")
    return lev


@dataclass(frozen=True)
class MapInfo:
    """A homomorphism between two cells of the tower."""

    kind: str  # "row": D(m,n) -> D(k,n); "column": D(m,n+1) -> D(m,n)
    source: tuple[int, int]
    target: tuple[int, int]
    image_order: int
    kernel_order: int
    injective: bool
    surjective: bool


@dataclass
class DiscriminantTower:
    basepoint: EventuallyPeriodicPath
    M: int
    N: int
    levels: dict[tuple[int, int], DiscriminantLevel]
    row_maps: list[MapInfo]
    column_maps: list[MapInfo]
    arity: int
    # (m, n) -> order of the image in D(m, n) of ker(D(m, N) -> D(m+1, N))
    surviving: dict[tuple[int, int], int] = field(default_factory=dict)

    def window(self) -> list[tuple[int, int]]:
        return sorted(self.levels)

    def level(self, m: int, n: int) -> DiscriminantLevel:
        return self.levels[(m, n)]


def _restriction_order(src: DiscriminantLevel, sub_points: Sequence[int]) -> int:
    pos = {p: i for i, p in enumerate(src.orbit)}
    return src.group.restrict([pos[p] for p in sub_points]).order()


def discriminant_tower(sys: RecursionSystem, gens=None, basepoint: EventuallyPeriodicPath | None = None, M: int = 0, N: int = 1, limits: Limits = DEFAULT_LIMITS, check_words: bool = True) -> DiscriminantTower:
    if not 0 <= M <= N or N < 1:
        raise InvalidInputError("need 0 <= M <= N and N >= 1")
    data = ChainData(sys, gens, basepoint, N, limits)
    return tower_from_chain(data, M, N, check_words)


def tower_from_chain(data: ChainData, M: int, N: int, check_words: bool = True) -> DiscriminantTower:
    """The (M, N) tower read off an existing chain of depth at least N.

    Levels and kernel orders are memoized on the chain, so sweeping many
    windows of one system costs little more than the deepest one.
    """
    if not 0 <= M <= N or not 1 <= N <= data.N:
        raise InvalidInputError(f"need 0 <= M <= N <= {data.N}")
    memo = data._orders
    levels: dict[tuple[int, int], DiscriminantLevel] = {}
    for m in range(M + 1):
        for n in range(max(m, 1), N + 1):
            key = ("level", m, n)
            if key not in memo:
                lev = _make_level(data, m, n, strict=False)
                if lev.stabilizer_order % lev.order:
                    raise ConsistencyError(f"|D({m},{n})| does not divide |G_{n}/C_{data.N}|")
                memo[key] = lev
            levels[(m, n)] = memo[key]
    rows = []
    for (m, n), lev in sorted(levels.items()):
        k = m + 1
        if (k, n) not in levels:
            continue
        tgt = levels[(k, n)]
        if not set(tgt.orbit) <= set(lev.orbit):
            raise ConsistencyError(f"orbit of G_{k} is not inside the orbit of G_{m} at level {n}")
        key = ("row", m, n)
        if key not in memo:
            memo[key] = _restriction_order(lev, tgt.orbit)
        img = memo[key]
        info = MapInfo("row", (m, n), (k, n), img, lev.order // img, img == lev.order, img == tgt.order)
        if not info.surjective:
            raise ConsistencyError(f"restriction D({m},{n}) -> D({k},{n}) is not surjective")
        rows.append(info)
    cols = []
    for (m, n), lev in sorted(levels.items()):
        if (m, n + 1) not in levels:
            continue
        src = levels[(m, n + 1)]
        key = ("column", m, n)
        if key not in memo:
            memo[key] = data.group_on(n + 1, n, lev.orbit).order()
        img = memo[key]
        cols.append(MapInfo("column", (m, n + 1), (m, n), img, src.order // img, img == src.order, img == lev.order))
    surviving = {}
    for m in range(M):
        for n in range(max(m + 1, 1), N):
            key = ("surviving", m, n, N)
            if key not in memo:
                memo[key] = data.surviving_kernel(m, m + 1, n, N)
            surviving[(m, n)] = memo[key]
    if check_words:
        _check_labels(data, levels)
    return DiscriminantTower(data.basepoint, M, N, levels, rows, cols, data.system.arity, surviving)


def probe_windows(sys: RecursionSystem, gens=None, basepoint: EventuallyPeriodicPath | None = None, N: int = 3, limits: Limits = DEFAULT_LIMITS, burn_in: int = 2) -> dict[tuple[int, int], "ProbeVerdict"]:
    """Run the stability probe on every window (M, N') with N' <= N and N' - M >= 2."""
    data = ChainData(sys, gens, basepoint, N, limits)
    out = {}
    for top in range(3, N + 1):
        for M in range(top - 1):
            out[(M, top)] = stability_probe(tower_from_chain(data, M, top, check_words=(top == N and M == 0)), burn_in)
    return out


def _check_labels(data: ChainData, levels: dict) -> None:
    """Every strong generator's word, re-evaluated at level n, matches its permutation."""
    q = data.quotient
    memo: dict = {}
    ns = sorted({n for (_, n) in levels})
    top = max(ns)
    for j in range(len(data.chain.sgens)):
        table = q.evaluate_label(data.chain.slab[j], top, memo)
        if not np.array_equal(table, data.level_perm(j, top)):
            raise ConsistencyError("a stabilizer generator disagrees with its defining word")


# ---------------------------------------------------------------- probe


@dataclass
class ProbeVerdict:
    verdict: str
    fingerprint: Fingerprint | None
    window: tuple[int, int]
    burn_in: int
    kind: str  # "finite", "growing" or "" for no stable evidence
    notes: list[str]

    def line(self) -> str:
        out = f"verdict={self.verdict}"
        if self.verdict == "stable-evidence":
            if self.kind == "finite" and self.fingerprint is not None:
                out += f" order={self.fingerprint.order}"
            else:
                out += " order=unbounded"
        return out


def stability_probe(tower: DiscriminantTower, burn_in: int = 2) -> ProbeVerdict:
    """Finite-depth heuristic for stable versus wild towers.

    Columns are the fingerprints of D(m, n) for n >= m + burn_in.

    stable-evidence, finite: columns are constant and agree with each
    other, and the row maps at the deepest level are isomorphisms.
    stable-evidence, unbounded: columns grow, but the kernel of every
    deepest row map D(m, N) -> D(m+1, N) acts trivially on each shallower
    D(m, n), so the maps between the limit groups look injective.
    wild-evidence: columns grow and those kernels survive at level N - 1.
    """
    M, N = tower.M, tower.N
    if N - M + 1 < 3:
        raise InvalidInputError("probe window needs at least 3 levels")
    columns = {}
    for m in range(M + 1):
        columns[m] = [tower.levels[(m, n)].fingerprint for n in range(max(m + burn_in, 1), N + 1) if (m, n) in tower.levels]
    usable = {m: c for m, c in columns.items() if len(c) >= 2}
    if not usable:
        return ProbeVerdict("inconclusive", None, (M, N), burn_in, "", ["window too shallow for the burn-in"])
    deep_rows = [r for r in tower.row_maps if r.source[1] == N and r.source[0] in usable]
    if all(len(set(c)) == 1 for c in usable.values()):
        values = {c[0] for c in usable.values()}
        iso = all(r.injective and r.surjective for r in deep_rows)
        if len(values) == 1 and iso:
            return ProbeVerdict("stable-evidence", next(iter(values)), (M, N), burn_in, "finite", [f"columns constant from n = m + {burn_in}"])
        return ProbeVerdict("inconclusive", None, (M, N), burn_in, "", ["columns constant but the deepest row maps are not isomorphisms"])
    growing = all(c[-1].order > c[0].order for c in usable.values())
    if not growing:
        return ProbeVerdict("inconclusive", None, (M, N), burn_in, "", ["columns neither constant nor growing"])
    checked = {key: v for key, v in tower.surviving.items() if key[1] >= key[0] + burn_in}
    if not checked:
        return ProbeVerdict("inconclusive", None, (M, N), burn_in, "", ["no room to test kernels below level N"])
    if all(v == 1 for v in checked.values()):
        return ProbeVerdict("stable-evidence", None, (M, N), burn_in, "unbounded", ["columns grow; deepest row-map kernels die one level up"])
    if all(tower.surviving.get((m, N - 1), 1) > 1 for m in range(M) if (m, N - 1) in checked):
        return ProbeVerdict("wild-evidence", None, (M, N), burn_in, "", ["columns grow; deepest row-map kernels survive to level N - 1"])
    return ProbeVerdict("inconclusive", None, (M, N), burn_in, "", ["kernels survive in some columns only"])
