"""Small permutations of {0..d-1} stored as image tuples."""

from __future__ import annotations

import re
from typing import Sequence

from .errors import InvalidInputError, ParseError

Perm = tuple[int, ...]


def identity(d: int) -> Perm:
    return tuple(range(d))


def is_identity(p: Sequence[int]) -> bool:
    return all(i == x for i, x in enumerate(p))


def compose(p: Sequence[int], q: Sequence[int]) -> Perm:
    """p after q."""
    return tuple(p[x] for x in q)


def inverse(p: Sequence[int]) -> Perm:
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def cycles(p: Sequence[int]) -> list[tuple[int, ...]]:
    seen = [False] * len(p)
    out = []
    for start in range(len(p)):
        if seen[start]:
            continue
        cyc = []
        x = start
        while not seen[x]:
            seen[x] = True
            cyc.append(x)
            x = p[x]
        if len(cyc) > 1:
            out.append(tuple(cyc))
    return out


def format_perm(p: Sequence[int]) -> str:
    cs = cycles(p)
    if not cs:
        return "e"
    sep = "," if len(p) > 10 else " "
    return "".join("(" + sep.join(map(str, c)) + ")" for c in cs)


def from_cycles(cs: Sequence[Sequence[int]], d: int) -> Perm:
    img = list(range(d))
    seen = set()
    for c in cs:
        for x in c:
            if not 0 <= x < d:
                raise InvalidInputError(f"letter {x} out of range 0..{d - 1}")
            if x in seen:
                raise InvalidInputError(f"letter {x} appears twice in the cycles")
            seen.add(x)
        for i, x in enumerate(c):
            img[x] = c[(i + 1) % len(c)]
    return tuple(img)


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_perm(text: str, d: int) -> Perm:
    """Parse cycle notation like "(0 1)(2 3)" or "e"."""
    s = text.strip()
    if s in ("e", "id", "()", ""):
        return identity(d)
    pos = 0
    cs = []
    for m in _CYCLE_RE.finditer(s):
        if s[pos : m.start()].strip():
            raise ParseError(f"bad permutation {text!r}")
        pos = m.end()
        body = m.group(1).replace(",", " ").split()
        try:
            cs.append([int(x) for x in body])
        except ValueError:
            raise ParseError(f"bad permutation {text!r}") from None
    if s[pos:].strip() or not cs:
        raise ParseError(f"bad permutation {text!r}")
    return from_cycles(cs, d)


def order(p: Sequence[int]) -> int:
    from math import lcm

    out = 1
    for c in cycles(p):
        out = lcm(out, len(c))
    return out
