"""Wreath recursions, word and portrait elements, and their evaluation.

A word "g1 g2 ... gk" denotes the composition g1 o g2 o ... o gk, so the
rightmost letter acts first. Sections are stored by input letter:
g(x w) = perm_g(x) . s_g(x)(w).

Internally a word is a tuple of ints. Generator i is letter 2*i and its
formal inverse is letter 2*i + 1.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from . import perm as P
from .config import DEFAULT_LIMITS, Limits
from .errors import (
    CapacityError,
    DepthError,
    InvalidInputError,
    ParseError,
    UndefinedGeneratorError,
)
from .tree import (
    Cylinder,
    EventuallyPeriodicPath,
    SphericalIndex,
    Word,
    level_width,
    parse_path,
    render_word,
)

Letters = tuple[int, ...]

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def free_reduce(letters: Iterable[int]) -> Letters:
    out: list[int] = []
    for x in letters:
        if out and out[-1] == x ^ 1:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def inverse_letters(w: Sequence[int]) -> Letters:
    return tuple(x ^ 1 for x in reversed(w))


def power_letters(w: Letters, k: int) -> Letters:
    """w^k by repeated squaring; negative k uses the inverse."""
    if k < 0:
        w, k = free_reduce(inverse_letters(w)), -k
    result: Letters = ()
    base = free_reduce(w)
    while k:
        if k & 1:
            result = free_reduce(result + base)
        k >>= 1
        if k:
            base = free_reduce(base + base)
    return result


@dataclass(eq=False)
class RecursionSystem:
    """A finite self-similar generating set over the d-ary tree.

    perms[l] and sections[l] are indexed by letter (inverses included);
    sections[l][x] is the reduced word of the section at input letter x.
    """

    arity: int
    names: tuple[str, ...]
    perms: tuple[P.Perm, ...]
    sections: tuple[tuple[Letters, ...], ...]
    basepoint: EventuallyPeriodicPath = field(
        default_factory=lambda: EventuallyPeriodicPath((), (0,))
    )
    # default generating tuple of the group, as words; None means all generators
    group_words: tuple[Letters, ...] | None = None
    _step_memo: dict = field(default_factory=dict, repr=False)
    _table_memo: dict = field(default_factory=dict, repr=False)

    @classmethod
    def build(
        cls,
        arity: int,
        gens: Sequence[tuple[str, Sequence[int], Sequence[Sequence[str] | str]]],
        basepoint: EventuallyPeriodicPath | None = None,
        group: Sequence[str] | None = None,
    ) -> "RecursionSystem":
        """Build from (name, root perm image table, section word per input letter).

        Section words are given as text ("a b^-1", "e") or token lists.
        """
        if arity < 2:
            raise InvalidInputError("arity must be at least 2")
        names = tuple(g[0] for g in gens)
        if len(set(names)) != len(names):
            raise InvalidInputError("duplicate generator name")
        for n in names:
            if not _NAME_RE.fullmatch(n) or n == "e":
                raise InvalidInputError(f"bad generator name {n!r}")
        lookup = {n: i for i, n in enumerate(names)}
        perms: list[P.Perm] = []
        secs: list[tuple[Letters, ...]] = []
        for name, p, s in gens:
            p = tuple(p)
            if sorted(p) != list(range(arity)):
                raise InvalidInputError(f"root permutation of {name} is not a permutation of 0..{arity - 1}")
            if len(s) != arity:
                raise InvalidInputError(f"generator {name} needs exactly {arity} sections")
            perms.append(p)
            secs.append(tuple(_word_from_text(w, lookup) for w in s))
        all_perms: list[P.Perm] = []
        all_secs: list[tuple[Letters, ...]] = []
        for p, s in zip(perms, secs):
            q = P.inverse(p)
            all_perms += [p, q]
            all_secs += [s, tuple(inverse_letters(s[q[x]]) for x in range(arity))]
        sys = cls(arity, names, tuple(all_perms), tuple(all_secs))
        if basepoint is not None:
            basepoint.check(sys.index)
            sys.basepoint = basepoint
        if group is not None:
            sys.group_words = tuple(_word_from_text(w, lookup) for w in group)
        return sys

    @property
    def index(self) -> SphericalIndex:
        return SphericalIndex.constant(self.arity)

    @property
    def ngens(self) -> int:
        return len(self.names)

    # ----- words -----

    def letter(self, name: str) -> int:
        try:
            return 2 * self.names.index(name)
        except ValueError:
            raise UndefinedGeneratorError(f"undefined generator {name!r}") from None

    def parse_word(self, text: str) -> Letters:
        return _word_from_text(text, {n: i for i, n in enumerate(self.names)})

    def render_word(self, w: Sequence[int]) -> str:
        if not w:
            return "e"
        return " ".join(self.names[x >> 1] + ("^-1" if x & 1 else "") for x in w)

    def element(self, text_or_letters: str | Sequence[int] = ()) -> "WordElement":
        if isinstance(text_or_letters, str):
            return WordElement(self, self.parse_word(text_or_letters))
        return WordElement(self, free_reduce(text_or_letters))

    def generator(self, name: str) -> "WordElement":
        return WordElement(self, (self.letter(name),))

    def generators(self) -> list["WordElement"]:
        return [WordElement(self, (2 * i,)) for i in range(self.ngens)]

    def group_generators(self) -> list["WordElement"]:
        if self.group_words is None:
            return self.generators()
        return [WordElement(self, w) for w in self.group_words]

    # ----- evaluation -----

    def step(self, w: Letters, x: int) -> tuple[int, Letters]:
        """Image of the letter x under w and the reduced section w|_x."""
        key = (w, x)
        hit = self._step_memo.get(key)
        if hit is not None:
            return hit
        cur = x
        parts = []
        for l in reversed(w):
            parts.append(self.sections[l][cur])
            cur = self.perms[l][cur]
        sec: list[int] = []
        for part in reversed(parts):
            sec.extend(part)
        out = (cur, free_reduce(sec))
        if len(self._step_memo) > 2_000_000:
            self._step_memo.clear()
        self._step_memo[key] = out
        return out

    def root_perm(self, w: Letters) -> P.Perm:
        return tuple(self.step(w, x)[0] for x in range(self.arity))

    def apply(self, w: Letters, v: Sequence[int]) -> Word:
        out = []
        for x in v:
            y, w = self.step(w, x)
            out.append(y)
        return tuple(out)

    def section(self, w: Letters, v: Sequence[int]) -> Letters:
        for x in v:
            _, w = self.step(w, x)
        return w

    def letter_table(self, l: int, n: int) -> np.ndarray:
        key = (l, n)
        t = self._table_memo.get(key)
        if t is not None:
            return t
        d = self.arity
        if n == 0:
            t = np.zeros(1, dtype=np.int64)
        else:
            block = d ** (n - 1)
            t = np.empty(d * block, dtype=np.int64)
            for x in range(d):
                t[x * block : (x + 1) * block] = self.perms[l][x] * block + self.word_table(
                    self.sections[l][x], n - 1
                )
        t.setflags(write=False)
        self._table_memo[key] = t
        return t

    def word_table(self, w: Letters, n: int) -> np.ndarray:
        res = np.arange(self.arity**n, dtype=np.int64)
        for l in reversed(w):
            res = self.letter_table(l, n)[res]
        return res

    def is_trivial_to_depth(self, w: Letters, n: int) -> bool:
        memo: dict = {}

        def go(u: Letters, k: int) -> bool:
            if k == 0 or not u:
                return True
            key = (u, k)
            if key in memo:
                return memo[key]
            ok = True
            for x in range(self.arity):
                y, s = self.step(u, x)
                if y != x or not go(s, k - 1):
                    ok = False
                    break
            memo[key] = ok
            return ok

        return go(free_reduce(w), n)

    # ----- text format -----

    def emit(self) -> str:
        lines = [f"tree arity = {self.arity}", f"basepoint = {self.basepoint.render()}"]
        if self.group_words is not None:
            lines.append("group = " + ", ".join(self.render_word(w) for w in self.group_words))
        for i, name in enumerate(self.names):
            l = 2 * i
            parts = [f"perm = {P.format_perm(self.perms[l])}"]
            parts += [f"{x} -> {self.render_word(self.sections[l][x])}" for x in range(self.arity)]
            lines.append(f"gen {name}: " + "; ".join(parts))
        return "\n".join(lines) + "\n"


def _word_from_text(w: str | Sequence[str], lookup: dict[str, int]) -> Letters:
    tokens = w.split() if isinstance(w, str) else list(w)
    out: list[int] = []
    for tok in tokens:
        if tok in ("e", "1"):
            continue
        m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?", tok)
        if not m:
            raise ParseError(f"bad word token {tok!r}")
        name, exp = m.group(1), int(m.group(2) or 1)
        if name not in lookup:
            raise UndefinedGeneratorError(f"undefined generator {name!r}")
        l = 2 * lookup[name]
        out.extend([l ^ 1] * (-exp) if exp < 0 else [l] * exp)
    return free_reduce(out)


def tuple_generator(
    name: str,
    perm: Sequence[int],
    entries: Sequence[str],
    convention: str = "perm-last",
) -> tuple[str, P.Perm, list[str]]:
    """Turn a tuple-notation generator into input-letter sections.

    convention "perm-last" reads (h_0, ..., h_{d-1}) o perm, where the
    permutation acts first and h_y acts below the image letter y. Then the
    section at input x is h_{perm(x)}.
    convention "perm-first" reads perm o (h_0, ..., h_{d-1}), where h_x is
    already the section at input x.
    """
    perm = tuple(perm)
    if convention == "perm-last":
        secs = [entries[perm[x]] for x in range(len(perm))]
    elif convention == "perm-first":
        secs = list(entries)
    else:
        raise InvalidInputError(f"unknown tuple convention {convention!r}")
    return name, perm, secs


# ---------------------------------------------------------------- elements


@dataclass(frozen=True)
class WordElement:
    system: RecursionSystem
    letters: Letters

    def __post_init__(self):
        object.__setattr__(self, "letters", free_reduce(self.letters))

    def __str__(self) -> str:
        return self.system.render_word(self.letters)

    def __mul__(self, other: "WordElement") -> "WordElement":
        return compose(self, other)

    def __pow__(self, k: int) -> "WordElement":
        return WordElement(self.system, power_letters(self.letters, k))

    def inverse(self) -> "WordElement":
        return invert(self)

    @property
    def index(self) -> SphericalIndex:
        return self.system.index


@dataclass(frozen=True)
class Portrait:
    """Root permutations of the sections at every vertex above `depth`.

    As an element it is only defined down to `depth`; anything deeper is an
    error. `capped` records that a composition truncated to a smaller cap.
    """

    index: SphericalIndex
    depth: int
    node_perms: dict = field(hash=False)
    capped: bool = field(default=False, compare=False)

    def __post_init__(self):
        missing = [v for v in _vertices_above(self.index, self.depth) if v not in self.node_perms]
        if missing:
            raise InvalidInputError(f"portrait is missing a permutation at vertex {render_word(missing[0]) or 'root'}")
        for v, p in self.node_perms.items():
            if len(v) >= self.depth:
                raise InvalidInputError("portrait has a vertex at or below its depth")
            l = self.index.entry(len(v) + 1)
            if sorted(p) != list(range(l)):
                raise InvalidInputError(f"node permutation at {render_word(v) or 'root'} is not a permutation of 0..{l - 1}")

    @classmethod
    def identity(cls, index: SphericalIndex, depth: int) -> "Portrait":
        return cls(index, depth, {v: P.identity(index.entry(len(v) + 1)) for v in _vertices_above(index, depth)})

    def perm_at(self, v: Word) -> P.Perm:
        return self.node_perms[tuple(v)]

    def _need(self, n: int):
        if n > self.depth:
            raise DepthError(f"needs depth {n} but the portrait is capped at {self.depth}")


Element = Union[WordElement, Portrait]


def _vertices_above(index: SphericalIndex, depth: int) -> list[Word]:
    out: list[Word] = [()]
    level = [()]
    for k in range(1, depth):
        level = [v + (x,) for v in level for x in range(index.entry(k))]
        out.extend(level)
    return out if depth > 0 else []


def shifted_index(index: SphericalIndex, k: int) -> SphericalIndex:
    """Index of the subtree hanging below a level-k vertex."""
    if k <= len(index.prefix):
        return SphericalIndex(index.prefix[k:], index.period)
    r = (k - len(index.prefix)) % len(index.period)
    return SphericalIndex((), index.period[r:] + index.period[:r])


def _check_vertex(e: Element, v: Sequence[int], limits: Limits) -> Word:
    v = e.index.check_word(v, limits)
    if isinstance(e, Portrait):
        e._need(len(v))
    return v


def apply(e: Element, v: Sequence[int], limits: Limits = DEFAULT_LIMITS) -> Word:
    v = _check_vertex(e, v, limits)
    if isinstance(e, WordElement):
        return e.system.apply(e.letters, v)
    out = []
    u: Word = ()
    for x in v:
        y = e.node_perms[u][x]
        u = u + (x,)
        out.append(y)
    return tuple(out)


def section(e: Element, v: Sequence[int], limits: Limits = DEFAULT_LIMITS) -> Element:
    v = _check_vertex(e, v, limits)
    if isinstance(e, WordElement):
        return WordElement(e.system, e.system.section(e.letters, v))
    k = len(v)
    perms = {u[k:]: p for u, p in e.node_perms.items() if u[:k] == v and len(u) >= k}
    return Portrait(shifted_index(e.index, k), e.depth - k, perms, e.capped)


def to_portrait(e: Element, depth: int, limits: Limits = DEFAULT_LIMITS) -> Portrait:
    return portrait_of(e, depth, limits)


def compose(e1: Element, e2: Element) -> Element:
    """e1 after e2."""
    if isinstance(e1, WordElement) and isinstance(e2, WordElement):
        if e1.system is not e2.system:
            raise InvalidInputError("elements belong to different recursion systems")
        return WordElement(e1.system, free_reduce(e1.letters + e2.letters))
    if e1.index != e2.index:
        raise InvalidInputError("elements live on different trees")
    caps = [e.depth for e in (e1, e2) if isinstance(e, Portrait)]
    depth = min(caps)
    capped = any(e.capped for e in (e1, e2) if isinstance(e, Portrait)) or len(set(caps)) > 1
    g = portrait_of(e1, depth) if isinstance(e1, WordElement) or e1.depth != depth else e1
    h = portrait_of(e2, depth) if isinstance(e2, WordElement) or e2.depth != depth else e2
    perms = {}
    for v, ph in h.node_perms.items():
        perms[v] = P.compose(g.node_perms[apply(h, v)], ph)
    return Portrait(g.index, depth, perms, capped)


def invert(e: Element) -> Element:
    if isinstance(e, WordElement):
        return WordElement(e.system, inverse_letters(e.letters))
    perms = {}
    # walk g^-1 level by level: its image of v is known once the parent is done
    img: dict[Word, Word] = {(): ()}
    for v in _vertices_above(e.index, e.depth):
        u = img[v]  # u = g^-1(v)
        pinv = P.inverse(e.node_perms[u])
        perms[v] = pinv
        for x in range(len(pinv)):
            img[v + (x,)] = u + (pinv[x],)
    return Portrait(e.index, e.depth, perms, e.capped)


def truncate(e: Element, n: int, limits: Limits = DEFAULT_LIMITS) -> np.ndarray:
    """Level-n permutation as an image table over lexicographically ranked words."""
    if n > limits.max_depth:
        raise DepthError(f"level {n} exceeds max depth {limits.max_depth}")
    width = level_width(e.index, n, limits)
    if width > limits.max_table:
        raise CapacityError(f"level {n} has {width} vertices; dense tables are capped at {limits.max_table}")
    if isinstance(e, WordElement):
        return e.system.word_table(e.letters, n)
    e._need(n)
    ranks = np.zeros(1, dtype=np.int64)
    verts: list[Word] = [()]
    for k in range(n):
        l = e.index.entry(k + 1)
        new = np.empty(len(verts) * l, dtype=np.int64)
        nverts = []
        for i, v in enumerate(verts):
            p = e.node_perms[v]
            for x in range(l):
                new[i * l + x] = ranks[i] * l + p[x]
                nverts.append(v + (x,))
        ranks, verts = new, nverts
    return ranks


def portrait_of(e: Element, depth: int, limits: Limits = DEFAULT_LIMITS) -> Portrait:
    if depth > limits.max_depth:
        raise DepthError(f"depth {depth} exceeds max depth {limits.max_depth}")
    if isinstance(e, Portrait):
        e._need(depth)
        if depth == e.depth:
            return e
        return Portrait(e.index, depth, {v: p for v, p in e.node_perms.items() if len(v) < depth}, e.capped)
    level_width(e.index, max(depth - 1, 0), limits)
    sys = e.system
    perms = {}
    frontier = [((), e.letters)]
    for _ in range(depth):
        nxt = []
        for v, w in frontier:
            steps = [sys.step(w, x) for x in range(sys.arity)]
            perms[v] = tuple(s[0] for s in steps)
            nxt.extend((v + (x,), steps[x][1]) for x in range(sys.arity))
        frontier = nxt
    return Portrait(e.index, depth, perms)


def is_trivial_to_depth(e: Element, n: int, limits: Limits = DEFAULT_LIMITS) -> bool:
    if n > limits.max_depth:
        raise DepthError(f"depth {n} exceeds max depth {limits.max_depth}")
    if isinstance(e, WordElement):
        return e.system.is_trivial_to_depth(e.letters, n)
    e._need(n)
    return all(P.is_identity(p) for v, p in e.node_perms.items() if len(v) < n)


def acts_trivially_on(e: Element, c: Cylinder, n: int, limits: Limits = DEFAULT_LIMITS) -> bool:
    """True iff e fixes every level-n word extending the cylinder base."""
    if c.level > n:
        raise InvalidInputError("cylinder base is below the requested depth")
    base = _check_vertex(e, c.base, limits)
    if isinstance(e, Portrait):
        e._need(n)
    if apply(e, base, limits) != base:
        return False
    return is_trivial_to_depth(section(e, base, limits), n - c.level, limits)


def equal_to_depth(e1: Element, e2: Element, n: int, limits: Limits = DEFAULT_LIMITS) -> bool:
    return is_trivial_to_depth(compose(invert(e1), e2), n, limits)


def is_level_transitive(e: Element, n: int, limits: Limits = DEFAULT_LIMITS) -> bool:
    """True iff e acts as a single cycle on level n (hence on every level above)."""
    t = truncate(e, n, limits)
    x, steps = int(t[0]), 1
    while x != 0:
        x = int(t[x])
        steps += 1
    return steps == len(t)


# ---------------------------------------------------------------- text formats


def parse_system(text: str) -> RecursionSystem:
    arity: int | None = None
    basepoint: tuple[str, int, int] | None = None
    group: tuple[list[str], int] | None = None
    gens: list[tuple[str, int, int, str, list[tuple[int, str, int, int]]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        col = len(line) - len(line.lstrip()) + 1
        stripped = line.strip()
        if stripped.startswith("tree"):
            m = re.fullmatch(r"tree\s+(arity|index)\s*=\s*(.*)", stripped)
            if not m:
                raise ParseError("expected 'tree arity = <d>' or 'tree index = <prefix> | <period>'", lineno, col)
            if arity is not None:
                raise ParseError("tree declared twice", lineno, col)
            vcol = line.index(m.group(2)) + 1 if m.group(2) else col
            if m.group(1) == "arity":
                try:
                    arity = int(m.group(2))
                except ValueError:
                    raise ParseError(f"bad arity {m.group(2)!r}", lineno, vcol) from None
            else:
                pre, bar, per = m.group(2).partition("|")
                try:
                    entries = [int(x) for x in pre.split()] + [int(x) for x in per.split()]
                except ValueError:
                    raise ParseError("bad index entries", lineno, vcol) from None
                if not bar or not per.split():
                    raise ParseError("index needs '<prefix> | <period>' with a nonempty period", lineno, vcol)
                if len(set(entries)) != 1:
                    raise ParseError("recursion systems need a constant index", lineno, vcol)
                arity = entries[0]
            if arity < 2:
                raise ParseError("arity must be at least 2", lineno, vcol)
        elif stripped.startswith("basepoint"):
            m = re.fullmatch(r"basepoint\s*=\s*(\S+)", stripped)
            if not m:
                raise ParseError("expected 'basepoint = <path>'", lineno, col)
            basepoint = (m.group(1), lineno, line.index(m.group(1)) + 1)
        elif stripped.startswith("group"):
            m = re.fullmatch(r"group\s*=\s*(.+)", stripped)
            if not m:
                raise ParseError("expected 'group = <word>, <word>, ...'", lineno, col)
            group = ([w.strip() for w in m.group(1).split(",")], lineno)
        elif stripped.startswith("gen"):
            gens.append(_parse_gen_line(line, lineno))
        else:
            raise ParseError(f"unrecognised line {stripped!r}", lineno, col)
    if arity is None:
        raise ParseError("missing 'tree arity = <d>' line", 1, 1)
    if not gens:
        raise ParseError("no generators declared", 1, 1)
    names = [g[0] for g in gens]
    built = []
    for name, lineno, ncol, ptext, secs in gens:
        if names.count(name) > 1:
            raise ParseError(f"generator {name!r} declared twice", lineno, ncol)
        try:
            p = P.parse_perm(ptext, arity)
        except (ParseError, InvalidInputError) as exc:
            raise ParseError(str(exc), lineno, ncol) from None
        by_letter: dict[int, str] = {}
        for x, wtext, xcol, lcol in secs:
            if not 0 <= x < arity:
                raise ParseError(f"letter {x} out of range 0..{arity - 1}", lineno, lcol)
            if x in by_letter:
                raise ParseError(f"letter {x} has two sections", lineno, lcol)
            for tok in wtext.split():
                base = tok.split("^")[0]
                if base not in ("e", "1") and base not in names:
                    raise UndefinedGeneratorError(
                        f"undefined generator {base!r}", lineno, xcol + _offset(wtext, tok)
                    )
            by_letter[x] = wtext
        missing = [x for x in range(arity) if x not in by_letter]
        if missing:
            raise ParseError(f"generator {name!r} has no section for letter {missing[0]}", lineno, ncol)
        built.append((name, p, [by_letter[x] for x in range(arity)]))
    bp = None
    if basepoint is not None:
        try:
            bp = parse_path(basepoint[0])
        except ParseError as exc:
            raise ParseError(exc.message, basepoint[1], basepoint[2]) from None
    try:
        bp is None or bp.check(SphericalIndex.constant(arity))
    except InvalidInputError as exc:
        raise ParseError(str(exc), basepoint[1], basepoint[2]) from None
    sys = RecursionSystem.build(arity, built, bp)
    if group is not None:
        try:
            sys.group_words = tuple(sys.parse_word(w) for w in group[0])
        except ParseError as exc:
            raise type(exc)(exc.message, group[1], 1) from None
    return sys


def _offset(text: str, tok: str) -> int:
    return max(text.find(tok), 0)


def _parse_gen_line(line: str, lineno: int):
    m = re.match(r"(\s*)gen\s+([A-Za-z_][A-Za-z0-9_]*)\s*:\s*", line)
    if not m:
        raise ParseError("expected 'gen <name>: perm = ...; <letter> -> <word>; ...'", lineno, len(line) - len(line.lstrip()) + 1)
    name = m.group(2)
    ncol = line.index(name, len(m.group(1)) + 3) + 1
    if name == "e":
        raise ParseError("'e' is reserved for the identity", lineno, ncol)
    pos = m.end()
    fields = []
    for part in line[pos:].split(";"):
        start = pos + (len(part) - len(part.lstrip()))
        fields.append((part.strip(), start + 1))
        pos += len(part) + 1
    fields = [(f, c) for f, c in fields if f]
    if not fields or not fields[0][0].startswith("perm"):
        raise ParseError("generator line must start with 'perm = ...'", lineno, fields[0][1] if fields else pos)
    pm = re.fullmatch(r"perm\s*=\s*(.+)", fields[0][0])
    if not pm:
        raise ParseError("expected 'perm = <cycles or e>'", lineno, fields[0][1])
    secs = []
    for f, c in fields[1:]:
        sm = re.fullmatch(r"(\d+)\s*->\s*(.+)", f)
        if not sm:
            raise ParseError(f"expected '<letter> -> <word>', got {f!r}", lineno, c)
        secs.append((int(sm.group(1)), sm.group(2).strip(), c + f.index(sm.group(2)), c))
    return name, lineno, ncol, pm.group(1), secs


def render_portrait(p: Portrait) -> str:
    lines = []
    for v in sorted(p.node_perms, key=lambda v: (v,)):
        label = render_word(v) or "root"
        lines.append("  " * len(v) + f"{label}: {P.format_perm(p.node_perms[v])}")
    return "\n".join(lines) + "\n"


def portrait_dot(p: Portrait, name: str = "portrait") -> str:
    out = [f"digraph {name} {{", "  node [shape=box, fontname=monospace];"]
    order = sorted(_vertices_above(p.index, p.depth), key=lambda v: (len(v), v))

    def node_id(v: Word) -> str:
        return "v_" + "_".join(map(str, v)) if v else "root"

    for v in order:
        label = P.format_perm(p.node_perms[v])
        out.append(f'  {node_id(v)} [label="{label}"];')
    for v in order:
        if v:
            out.append(f'  {node_id(v[:-1])} -> {node_id(v)} [label="{v[-1]}"];')
    out.append("}")
    return "\n".join(out) + "\n"
