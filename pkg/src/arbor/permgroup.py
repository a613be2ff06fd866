"""Permutation groups: a deterministic Schreier-Sims chain plus BFS helpers.

Permutations are numpy image arrays; p[q] is "p after q". Every group
element we keep carries a label in a straight-line program (SLP) over the
original generators, so it can be re-evaluated elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import lcm
from typing import Callable, Sequence

import numpy as np

from .config import DEFAULT_LIMITS, Limits
from .errors import CapacityError, InvalidInputError


class SLP:
    """Straight-line programs: ('g', i), ('*', a, b) meaning a after b, ('-', a)."""

    def __init__(self, ngens: int):
        self.ngens = ngens
        self.nodes: list[tuple] = [("1",)]
        self._intern: dict[tuple, int] = {("1",): 0}
        for i in range(ngens):
            self._add(("g", i))

    IDENTITY = 0

    def _add(self, node: tuple) -> int:
        hit = self._intern.get(node)
        if hit is not None:
            return hit
        self.nodes.append(node)
        self._intern[node] = len(self.nodes) - 1
        return len(self.nodes) - 1

    def gen(self, i: int) -> int:
        return 1 + i

    def mul(self, a: int, b: int) -> int:
        if a == 0:
            return b
        if b == 0:
            return a
        return self._add(("*", a, b))

    def inv(self, a: int) -> int:
        if a == 0:
            return 0
        node = self.nodes[a]
        if node[0] == "-":
            return node[1]
        return self._add(("-", a))

    def product(self, labels: Sequence[int]) -> int:
        out = 0
        for lab in reversed(labels):
            out = self.mul(lab, out)
        return out

    def evaluate(self, node: int, leaf: Callable[[int], object], mul, inv, one, memo: dict | None = None):
        """Evaluate bottom-up without recursion."""
        memo = {} if memo is None else memo
        stack = [node]
        while stack:
            x = stack[-1]
            if x in memo:
                stack.pop()
                continue
            nd = self.nodes[x]
            if nd[0] == "1":
                memo[x] = one
            elif nd[0] == "g":
                memo[x] = leaf(nd[1])
            else:
                kids = nd[1:]
                todo = [k for k in kids if k not in memo]
                if todo:
                    stack.extend(todo)
                    continue
                memo[x] = mul(memo[nd[1]], memo[nd[2]]) if nd[0] == "*" else inv(memo[nd[1]])
            stack.pop()
        return memo[node]

    def length(self, node: int, memo: dict | None = None) -> int:
        """Letter count of the unreduced expansion."""
        return self.evaluate(node, lambda i: 1, lambda a, b: a + b, lambda a: a, 0, memo)

    def expand(self, node: int, gen_words: Sequence[tuple[int, ...]], max_len: int = 10_000):
        """Expand to a concrete word: gen_words[i] is the word of leaf i."""
        from .recursion import free_reduce, inverse_letters

        if self.length(node) > max_len:
            return None
        return self.evaluate(
            node,
            lambda i: tuple(gen_words[i]),
            lambda a, b: free_reduce(a + b),
            lambda a: inverse_letters(a),
            (),
        )


def perm_inverse(p: np.ndarray) -> np.ndarray:
    out = np.empty_like(p)
    out[p] = np.arange(len(p), dtype=p.dtype)
    return out


def is_identity_perm(p: np.ndarray) -> bool:
    return bool(np.array_equal(p, np.arange(len(p))))


def perm_order(p: np.ndarray) -> int:
    """lcm of the cycle lengths; cycles are labelled by their least point via pointer doubling."""
    p = np.asarray(p, dtype=np.int64)
    n = len(p)
    if n == 0:
        return 1
    label = np.arange(n, dtype=np.int64)
    ptr = p.copy()
    for _ in range(max(1, (n - 1).bit_length())):
        label = np.minimum(label, label[ptr])
        ptr = ptr[ptr]
    lengths = np.bincount(label, minlength=n)
    out = 1
    for c in np.unique(lengths[lengths > 0]).tolist():
        out = lcm(out, int(c))
    return out


@dataclass
class _Level:
    point: int
    orbit: list[int] = field(default_factory=list)
    where: dict[int, int] = field(default_factory=dict)
    u: list[np.ndarray] = field(default_factory=list)
    uinv: dict[int, np.ndarray] = field(default_factory=dict)  # filled on demand
    ulab: list[int] = field(default_factory=list)
    tested: set = field(default_factory=set)


class StabChain:
    """Base and strong generating set built by deterministic Schreier-Sims.

    The base starts with `base_prefix` (kept even where the orbit is
    trivial) and is extended with the smallest moved point when needed.
    """

    def __init__(
        self,
        degree: int,
        gens: Sequence[np.ndarray],
        labels: Sequence[int],
        slp: SLP,
        base_prefix: Sequence[int] = (),
        limits: Limits = DEFAULT_LIMITS,
    ):
        self.degree = degree
        self.slp = slp
        self.limits = limits
        self.ident = np.arange(degree, dtype=np.int64)
        self.base: list[int] = []
        self.levels: list[_Level] = []
        # strong generators with the number of leading base points they fix
        self.sgens: list[np.ndarray] = []
        self.sinv: list[np.ndarray] = []
        self.slab: list[int] = []
        self.sdepth: list[int] = []
        for b in base_prefix:
            self._new_level(int(b))
        for g, lab in zip(gens, labels):
            self.extend(np.asarray(g, dtype=np.int64), lab)

    def extend(self, g: np.ndarray, lab: int) -> bool:
        """Add a generator unless it is already a member; returns True if added."""
        res, l, _ = self.sift(g)
        if l == len(self.base) and self._is_ident(res):
            return False
        depth = self._add_strong(g, lab)
        self._run(depth)
        return True

    def _is_ident(self, h: np.ndarray) -> bool:
        return bool((h == self.ident).all())

    # ----- construction -----

    def _new_level(self, b: int):
        lev = _Level(b, [b], {b: 0}, [self.ident], {0: self.ident}, [SLP.IDENTITY], set())
        self.base.append(b)
        self.levels.append(lev)

    def _fixes_prefix(self, g: np.ndarray) -> int:
        for i, b in enumerate(self.base):
            if g[b] != b:
                return i
        return len(self.base)

    def _add_strong(self, g: np.ndarray, lab: int) -> int:
        depth = self._fixes_prefix(g)
        if depth == len(self.base):
            moved = np.nonzero(g != self.ident)[0]
            self._new_level(int(moved[0]))
        self.sgens.append(g)
        self.sinv.append(perm_inverse(g))
        self.slab.append(lab)
        self.sdepth.append(depth)
        for i in range(depth + 1):
            self._extend_orbit(i)
        return depth

    def _gens_at(self, i: int) -> list[int]:
        return [j for j, d in enumerate(self.sdepth) if d >= i]

    def _extend_orbit(self, i: int):
        lev = self.levels[i]
        gens = self._gens_at(i)
        k = 0
        while k < len(lev.orbit):
            beta = lev.orbit[k]
            for j in gens:
                g = self.sgens[j]
                gamma = int(g[beta])
                if gamma not in lev.where:
                    ub = g[lev.u[k]]
                    lev.where[gamma] = len(lev.orbit)
                    lev.orbit.append(gamma)
                    lev.u.append(ub)
                    lev.ulab.append(self.slp.mul(self.slab[j], lev.ulab[k]))
            k += 1
        self._check_order()

    def _uinv(self, lev: _Level, k: int) -> np.ndarray:
        inv = lev.uinv.get(k)
        if inv is None:
            inv = np.empty_like(self.ident)
            inv[lev.u[k]] = self.ident
            lev.uinv[k] = inv
        return inv

    def _check_order(self):
        o = 1
        for lev in self.levels:
            o *= len(lev.orbit)
        if o > self.limits.max_order:
            raise CapacityError(f"group order exceeds the bound {self.limits.max_order}")

    def sift(self, h: np.ndarray, start: int = 0):
        """Return (residue, level, trace). level == len(base) with identity residue means membership."""
        trace = []
        for l in range(start, len(self.base)):
            lev = self.levels[l]
            beta = int(h[lev.point])
            k = lev.where.get(beta)
            if k is None:
                return h, l, trace
            if k:
                h = self._uinv(lev, k)[h]
                trace.append((l, k))
        return h, len(self.base), trace

    def _run(self, start: int):
        i = start
        while i >= 0:
            restart = None
            lev = self.levels[i]
            gens = self._gens_at(i)
            for k in range(len(lev.orbit)):
                beta = lev.orbit[k]
                for j in gens:
                    if (k, j) in lev.tested:
                        continue
                    lev.tested.add((k, j))
                    g = self.sgens[j]
                    gamma = int(g[beta])
                    kg = lev.where[gamma]
                    gu = g[lev.u[k]]
                    if np.array_equal(gu, lev.u[kg]):
                        continue
                    h = self._uinv(lev, kg)[gu]
                    res, l, trace = self.sift(h, i + 1)
                    if l == len(self.base) and self._is_ident(res):
                        continue
                    # label: sifted residue of uinv_gamma * g * u_beta
                    slp = self.slp
                    lab = slp.product([slp.inv(lev.ulab[kg]), self.slab[j], lev.ulab[k]])
                    for ll, kk in trace:
                        lab = slp.mul(slp.inv(self.levels[ll].ulab[kk]), lab)
                    restart = self._add_strong(res, lab)
                    break
                if restart is not None:
                    break
            if restart is None:
                i -= 1
            else:
                i = restart

    # ----- queries -----

    def order(self) -> int:
        o = 1
        for lev in self.levels:
            o *= len(lev.orbit)
        return o

    def contains(self, p: np.ndarray) -> bool:
        res, l, _ = self.sift(np.asarray(p, dtype=np.int64))
        return l == len(self.base) and self._is_ident(res)

    def stabilizer_gens(self, i: int) -> list[int]:
        """Indices of strong generators fixing the first i base points."""
        return self._gens_at(i)

    def basic_orbit_sizes(self) -> list[int]:
        return [len(lev.orbit) for lev in self.levels]


class PermGroup:
    """A permutation group given by labelled generators."""

    def __init__(self, degree: int, gens: Sequence[np.ndarray], labels: Sequence[int] | None = None, slp: SLP | None = None, limits: Limits = DEFAULT_LIMITS):
        self.degree = degree
        self.gens = [np.asarray(g, dtype=np.int64) for g in gens]
        if slp is None:
            slp = SLP(len(self.gens))
            labels = [slp.gen(i) for i in range(len(self.gens))]
        self.slp = slp
        self.labels = list(labels) if labels is not None else [slp.gen(i) for i in range(len(self.gens))]
        self.limits = limits
        self._chain: StabChain | None = None

    def chain(self, base_prefix: Sequence[int] = ()) -> StabChain:
        if base_prefix:
            return StabChain(self.degree, self.gens, self.labels, self.slp, base_prefix, self.limits)
        if self._chain is None:
            self._chain = StabChain(self.degree, self.gens, self.labels, self.slp, (), self.limits)
        return self._chain

    def order(self) -> int:
        return self.chain().order()

    def contains(self, p: np.ndarray) -> bool:
        return self.chain().contains(p)

    def identity(self) -> np.ndarray:
        return np.arange(self.degree, dtype=np.int64)

    def is_trivial(self) -> bool:
        return all(is_identity_perm(g) for g in self.gens)

    def orbit(self, point: int) -> list[int]:
        orb = [point]
        seen = {point}
        k = 0
        gl = [g.tolist() for g in self.gens]
        while k < len(orb):
            x = orb[k]
            for g in gl:
                y = g[x]
                if y not in seen:
                    seen.add(y)
                    orb.append(y)
            k += 1
        return orb

    def restrict(self, points: Sequence[int]) -> "PermGroup":
        """Action on an invariant set, points renumbered by their order in `points`."""
        pts = np.asarray(points, dtype=np.int64)
        pos = np.full(self.degree, -1, dtype=np.int64)
        pos[pts] = np.arange(len(pts))
        gens = []
        for g in self.gens:
            img = pos[g[pts]]
            if (img < 0).any():
                raise InvalidInputError("point set is not invariant")
            gens.append(img)
        return PermGroup(len(pts), gens, self.labels, self.slp, self.limits)

    def is_abelian(self) -> bool:
        for i, g in enumerate(self.gens):
            for h in self.gens[i + 1 :]:
                if not np.array_equal(g[h], h[g]):
                    return False
        return True

    def elements(self, bound: int | None = None) -> list[np.ndarray]:
        """BFS enumeration; raises CapacityError past the bound."""
        bound = self.limits.max_enumerate if bound is None else bound
        e = self.identity()
        seen = {e.tobytes()}
        out = [e]
        k = 0
        while k < len(out):
            x = out[k]
            for g in self.gens:
                y = g[x]
                key = y.tobytes()
                if key not in seen:
                    seen.add(key)
                    out.append(y)
                    if len(out) > bound:
                        raise CapacityError(f"enumeration exceeds {bound} elements")
            k += 1
        return out

    def normal_closure(self, gens: Sequence[np.ndarray], labels: Sequence[int]) -> "PermGroup":
        """Smallest subgroup containing `gens` and normalized by this group."""
        ch = StabChain(self.degree, [], [], self.slp, (), self.limits)
        kept, labs = [], []
        queue = list(zip(gens, labels))
        ginv = [perm_inverse(g) for g in self.gens]
        while queue:
            h, lab = queue.pop()
            h = np.asarray(h, dtype=np.int64)
            if not ch.extend(h, lab):
                continue
            kept.append(h)
            labs.append(lab)
            for g, gi, gl in zip(self.gens, ginv, self.labels):
                queue.append((g[h[gi]], self.slp.product([gl, lab, self.slp.inv(gl)])))
        sub = PermGroup(self.degree, kept, labs, self.slp, self.limits)
        sub._chain = ch
        return sub

    def derived_subgroup(self) -> "PermGroup":
        comms, labs = [], []
        slp = self.slp
        for i, g in enumerate(self.gens):
            gi = perm_inverse(g)
            for j in range(i + 1, len(self.gens)):
                h = self.gens[j]
                hi = perm_inverse(h)
                c = g[h[gi[hi]]]
                comms.append(c)
                a, b = self.labels[i], self.labels[j]
                labs.append(slp.product([a, b, slp.inv(a), slp.inv(b)]))
        if not comms:
            return PermGroup(self.degree, [], [], slp, self.limits)
        return self.normal_closure(comms, labs)


def bfs_order(degree: int, gens: Sequence[np.ndarray], bound: int) -> int:
    """Naive enumeration order; independent of the stabilizer chain."""
    return len(PermGroup(degree, gens, limits=Limits(max_enumerate=bound)).elements(bound))


def abelian_invariants_from_orders(orders: Sequence[int]) -> list[int]:
    """Invariant factors d_1 | d_2 | ... of a finite abelian group from its element orders."""
    n = len(orders)
    primes = _prime_factors(n)
    # per prime, elementary divisor exponents from counts of x with x^(p^k) = 1
    per_prime: dict[int, list[int]] = {}
    for p in primes:
        counts = []
        k = 0
        while True:
            c = sum(1 for o in orders if (p**k) % o == 0)
            counts.append(c)
            if c == _p_part(n, p):
                break
            k += 1
        # number of cyclic factors of exponent >= k is log_p(counts[k] / counts[k-1])
        ge = [_log(counts[k] // counts[k - 1], p) for k in range(1, len(counts))]
        exps = []
        for k in range(len(ge)):
            nxt = ge[k + 1] if k + 1 < len(ge) else 0
            exps += [k + 1] * (ge[k] - nxt)
        per_prime[p] = sorted(exps, reverse=True)
    width = max((len(v) for v in per_prime.values()), default=0)
    factors = [1] * width
    for p, exps in per_prime.items():
        for i, e in enumerate(exps):
            factors[i] *= p**e
    return sorted(f for f in factors if f > 1)


def _p_part(n: int, p: int) -> int:
    out = 1
    while n % p == 0:
        n //= p
        out *= p
    return out


def _log(x: int, p: int) -> int:
    k = 0
    while x > 1:
        x //= p
        k += 1
    return k


def _prime_factors(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


__all__ = [
    "SLP",
    "StabChain",
    "PermGroup",
    "bfs_order",
    "perm_inverse",
    "perm_order",
    "is_identity_perm",
    "abelian_invariants_from_orders",
]
