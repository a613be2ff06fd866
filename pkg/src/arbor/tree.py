"""Spherically homogeneous rooted trees, vertex words, cylinders and paths.

Vertex words are plain tuples of ints. The empty tuple is the root.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator, Sequence, Union

from .config import DEFAULT_LIMITS, Limits
from .errors import CapacityError, DepthError, InvalidInputError, ParseError

Word = tuple[int, ...]


@dataclass(frozen=True)
class SphericalIndex:
    """Branching numbers l_1, l_2, ... as an eventually periodic sequence."""

    prefix: tuple[int, ...] = ()
    period: tuple[int, ...] = (2,)

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(int(x) for x in self.prefix))
        object.__setattr__(self, "period", tuple(int(x) for x in self.period))
        if not self.period:
            raise InvalidInputError("index period must be nonempty")
        if any(x < 2 for x in self.prefix + self.period):
            raise InvalidInputError("every index entry must be at least 2")

    @classmethod
    def constant(cls, d: int) -> "SphericalIndex":
        return cls((), (d,))

    @property
    def is_constant(self) -> bool:
        return len(set(self.prefix + self.period)) == 1

    @property
    def arity(self) -> int:
        """The common branching number; only meaningful for constant indices."""
        if not self.is_constant:
            raise InvalidInputError("index is not constant")
        return self.period[0]

    def entry(self, k: int) -> int:
        """Branching number below level k-1, i.e. l_k for k >= 1."""
        if k < 1:
            raise InvalidInputError("index entries start at 1")
        if k <= len(self.prefix):
            return self.prefix[k - 1]
        return self.period[(k - 1 - len(self.prefix)) % len(self.period)]

    def entries(self, n: int) -> list[int]:
        return [self.entry(k) for k in range(1, n + 1)]

    def check_word(self, w: Sequence[int], limits: Limits = DEFAULT_LIMITS) -> Word:
        w = tuple(w)
        if len(w) > limits.max_depth:
            raise DepthError(f"word of length {len(w)} exceeds max depth {limits.max_depth}")
        for k, x in enumerate(w, start=1):
            if not 0 <= x < self.entry(k):
                raise InvalidInputError(
                    f"letter {x} at position {k} is out of range 0..{self.entry(k) - 1}"
                )
        return w

    def render(self) -> str:
        if self.is_constant:
            return f"arity = {self.period[0]}"
        pre = " ".join(map(str, self.prefix))
        per = " ".join(map(str, self.period))
        return f"index = {pre} | {per}".replace("=  |", "= |")


def level_width(index: SphericalIndex, n: int, limits: Limits = DEFAULT_LIMITS) -> int:
    if n < 0:
        raise InvalidInputError("level must be nonnegative")
    if n > limits.max_depth:
        raise DepthError(f"level {n} exceeds max depth {limits.max_depth}")
    w = 1
    for k in range(1, n + 1):
        w *= index.entry(k)
        if w > limits.max_width:
            raise CapacityError(f"level {n} is wider than the bound {limits.max_width}")
    return w


def level_words(index: SphericalIndex, n: int, limits: Limits = DEFAULT_LIMITS) -> list[Word]:
    """All level-n words in lexicographic order."""
    level_width(index, n, limits)
    return list(product(*(range(x) for x in index.entries(n))))


def word_rank(index: SphericalIndex, w: Sequence[int]) -> int:
    """Position of w in the lexicographic order of its level."""
    r = 0
    for k, x in enumerate(w, start=1):
        r = r * index.entry(k) + x
    return r


def word_unrank(index: SphericalIndex, n: int, r: int) -> Word:
    out = []
    for k in range(n, 0, -1):
        r, x = divmod(r, index.entry(k))
        out.append(x)
    return tuple(reversed(out))


def is_prefix(w: Sequence[int], v: Sequence[int]) -> bool:
    return len(w) <= len(v) and tuple(v[: len(w)]) == tuple(w)


def render_word(w: Sequence[int], wide: bool = False) -> str:
    """Bare digits for small alphabets, comma separated otherwise."""
    if wide or any(x >= 10 for x in w):
        return ",".join(map(str, w))
    return "".join(map(str, w))


def parse_word(text: str) -> Word:
    text = text.strip()
    if text in ("", "e", "()"):
        return ()
    if "," in text:
        parts = [p.strip() for p in text.split(",")]
    else:
        parts = list(text)
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise ParseError(f"bad vertex word {text!r}") from None


@dataclass(frozen=True)
class EventuallyPeriodicPath:
    prefix: Word
    period: Word

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "period", tuple(self.period))
        if not self.period:
            raise InvalidInputError("path period must be nonempty")

    def letter(self, k: int) -> int:
        """Letter at 0-based position k."""
        if k < len(self.prefix):
            return self.prefix[k]
        return self.period[(k - len(self.prefix)) % len(self.period)]

    def truncate(self, n: int) -> Word:
        return tuple(self.letter(k) for k in range(n))

    def check(self, index: SphericalIndex) -> "EventuallyPeriodicPath":
        # index and path are both eventually periodic, so one joint period suffices
        span = len(self.prefix) + len(index.prefix) + len(self.period) * len(index.period)
        index.check_word(self.truncate(span), Limits(max_depth=span))
        return self

    def render(self) -> str:
        wide = any(x >= 10 for x in self.prefix + self.period)
        pre = render_word(self.prefix, wide)
        per = render_word(self.period, wide)
        if len(self.period) == 1 and not wide:
            return f"{pre}{per}*"
        return f"{pre}({per})*"

    def __str__(self) -> str:
        return self.render()


_PATH_RE = re.compile(r"^\s*([0-9,]*?)\s*(?:\(([0-9,]+)\)|([0-9]))\*\s*$")


def parse_path(text: str) -> EventuallyPeriodicPath:
    """Parse "011(10)*", "0*" or "1,2(3,4)*"."""
    m = _PATH_RE.match(text)
    if not m:
        raise ParseError(f"bad eventually periodic path {text!r}; expected PREFIX(PERIOD)*")
    pre, per, single = m.groups()
    pre = pre.rstrip(",")
    period = parse_word(per if per is not None else single)
    return EventuallyPeriodicPath(parse_word(pre), period)


def truncate_path(path: EventuallyPeriodicPath, n: int) -> Word:
    if n < 0:
        raise InvalidInputError("level must be nonnegative")
    return path.truncate(n)


@dataclass(frozen=True)
class Cylinder:
    """All paths through the vertex `base`."""

    base: Word

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(self.base))

    @property
    def level(self) -> int:
        return len(self.base)

    def contains_word(self, v: Sequence[int]) -> bool:
        return is_prefix(self.base, v)

    def __le__(self, other: "Cylinder") -> bool:
        return is_prefix(other.base, self.base)

    def words(self, index: SphericalIndex, n: int) -> Iterator[Word]:
        """Level-n words inside the cylinder (n at least the base level)."""
        if n < self.level:
            raise InvalidInputError("depth is above the cylinder base")
        tails = product(*(range(index.entry(k)) for k in range(self.level + 1, n + 1)))
        for t in tails:
            yield self.base + t

    def render(self) -> str:
        return f"U_{self.level}({render_word(self.base)})"


PathLike = Union[Sequence[int], EventuallyPeriodicPath]


def path_distance(t: PathLike, w: PathLike, d: int) -> Fraction:
    """1/d^m where m is the length of the longest common prefix.

    Two eventually periodic paths that agree forever are at distance 0.
    """
    if d < 2:
        raise InvalidInputError("arity must be at least 2")
    if isinstance(t, EventuallyPeriodicPath) and isinstance(w, EventuallyPeriodicPath):
        span = (
            max(len(t.prefix), len(w.prefix)) + len(t.period) * len(w.period)
        )
        tt, ww = t.truncate(span), w.truncate(span)
        if tt == ww:
            return Fraction(0)
    else:
        n = min(_length(t), _length(w))
        tt, ww = _finite(t, n), _finite(w, n)
    for x in tt + ww:
        if not 0 <= x < d:
            raise InvalidInputError(f"letter {x} does not live on the {d}-ary tree")
    m = 0
    for x, y in zip(tt, ww):
        if x != y:
            break
        m += 1
    return Fraction(1, d**m)


def _length(p: PathLike) -> int:
    return 10**9 if isinstance(p, EventuallyPeriodicPath) else len(p)


def _finite(p: PathLike, n: int) -> Word:
    return p.truncate(n) if isinstance(p, EventuallyPeriodicPath) else tuple(p)[:n]
