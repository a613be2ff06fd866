"""Replayable certificates: LQA-violation witnesses, non-Hausdorff elements,
the wreath-product builder and bounded searches for self-replicating words.

Every check recomputes its claims from the element alone, at a stated depth.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Mapping, Sequence, Union

from . import perm as P
from .config import DEFAULT_LIMITS, Limits
from .errors import ConsistencyError, InvalidInputError, ParseError
from .families import lambda_word, periodic, preperiodic
from .recursion import (
    Element,
    Portrait,
    RecursionSystem,
    WordElement,
    acts_trivially_on,
    apply,
    equal_to_depth,
    free_reduce,
    inverse_letters,
    is_trivial_to_depth,
    parse_system,
    power_letters,
    section,
)
from .tree import (
    Cylinder,
    EventuallyPeriodicPath,
    SphericalIndex,
    Word,
    is_prefix,
    parse_path,
    parse_word,
    render_word,
)


def first_moved_level(e: Element, c: Cylinder, depth: int, limits: Limits = DEFAULT_LIMITS) -> int | None:
    """Smallest n <= depth at which e moves a level-n word of the cylinder, else None."""
    base = c.base
    img = apply(e, base, limits)
    for k in range(1, len(base) + 1):
        if img[:k] != base[:k]:
            return k
    s = section(e, base, limits)
    if isinstance(s, WordElement):
        sys = s.system
        frontier = {s.letters}
        for k in range(len(base), depth):
            nxt = set()
            for w in frontier:
                for x in range(sys.arity):
                    y, sec = sys.step(w, x)
                    if y != x:
                        return k + 1
                    if sec:
                        nxt.add(sec)
            if not nxt:
                return None
            frontier = nxt
        return None
    for v in sorted(s.node_perms, key=lambda v: (len(v), v)):
        if len(base) + len(v) >= depth:
            break
        if not P.is_identity(s.node_perms[v]):
            return len(base) + len(v) + 1
    return None


# ---------------------------------------------------------------- LQA witnesses


@dataclass(frozen=True)
class LqaWitness:
    """g is trivial on O_trivial yet not trivial on the larger W."""

    element: Element
    W: Cylinder
    O_trivial: Cylinder
    check_depth: int
    note: str = ""

    def word(self) -> str:
        return str(self.element) if isinstance(self.element, WordElement) else "<portrait>"


def periodic_witness_element(r: int, n: int) -> WordElement:
    """lambda^(-2^(nr-1)) a1^(2^n) lambda^(2^(nr-1)) in the periodic family."""
    sys = periodic(r)
    lam = sys.parse_word(lambda_word(r))
    k = 2 ** (n * r - 1)
    a1 = (sys.letter("a1"),)
    letters = power_letters(lam, -k) + power_letters(a1, 2**n) + power_letters(lam, k)
    return WordElement(sys, free_reduce(letters))


def periodic_witness(r: int, n: int, depth: int | None = None, limits: Limits = DEFAULT_LIMITS) -> LqaWitness:
    if r < 2 or n < 1:
        raise InvalidInputError("periodic witness needs r >= 2 and n >= 1")
    check = n * r + 2 * r if depth is None else depth
    if check < n * r + 1:
        raise InvalidInputError(f"depth must be at least {n * r + 1}")
    if check > limits.max_depth:
        raise InvalidInputError(f"depth {check} exceeds max depth {limits.max_depth}")
    e = periodic_witness_element(r, n)
    w = (0,) * (n * r - 1)
    return LqaWitness(
        e,
        Cylinder(w),
        Cylinder(w + (0,)),
        check,
        f"nontrivial on {Cylinder(w + (1,)).render()}",
    )


def check_lqa_witness(w: LqaWitness, limits: Limits = DEFAULT_LIMITS) -> bool:
    if not (w.W.contains_word(w.O_trivial.base) and w.O_trivial.level > w.W.level):
        raise InvalidInputError("O_trivial must be a proper sub-cylinder of W")
    if w.check_depth < w.O_trivial.level:
        raise InvalidInputError("check depth is above the cylinders")
    if not acts_trivially_on(w.element, w.O_trivial, w.check_depth, limits):
        return False
    return first_moved_level(w.element, w.W, w.check_depth, limits) is not None


def a1_power_pattern_check(r: int, n: int, depth: int, limits: Limits = DEFAULT_LIMITS) -> bool:
    """a1^(2^n) is trivial to depth nr, acts as a1 below 0^(nr) and trivially below 0^(nr-1)1."""
    if depth < n * r + r:
        raise InvalidInputError(f"depth must be at least {n * r + r}")
    sys = periodic(r)
    e = sys.generator("a1") ** (2**n)
    nr = n * r
    if not is_trivial_to_depth(e, nr, limits):
        return False
    below = section(e, (0,) * nr, limits)
    if not equal_to_depth(below, sys.generator("a1"), depth - nr, limits):
        return False
    return acts_trivially_on(e, Cylinder((0,) * (nr - 1) + (1,)), depth, limits)


# ---------------------------------------------------------------- non-Hausdorff


@dataclass(frozen=True)
class NestedPair:
    n: int
    W: Cylinder
    O: Cylinder


@dataclass(frozen=True)
class NonHausdorffCertificate:
    element: Element
    fixed_path: EventuallyPeriodicPath
    pairs: tuple[NestedPair, ...]
    depth: int
    note: str = ""


@dataclass
class CheckReport:
    ok: bool
    failures: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def check_nonhausdorff(cert: NonHausdorffCertificate, limits: Limits = DEFAULT_LIMITS) -> CheckReport:
    e, depth = cert.element, cert.depth
    fails = []
    path = cert.fixed_path.truncate(depth)
    if apply(e, path, limits) != path:
        fails.append(f"element moves {render_word(path)}")
    if not cert.pairs:
        fails.append("no nested pairs")
    prev = None
    for p in cert.pairs:
        if not p.W.contains_word(p.O.base) or p.O.level <= p.W.level:
            fails.append(f"n={p.n}: O is not a proper sub-cylinder of W")
        if p.W.base != cert.fixed_path.truncate(p.W.level):
            fails.append(f"n={p.n}: W is not centred on the fixed path")
        if prev is not None and not (p.W <= prev.W and p.W.level > prev.W.level):
            fails.append(f"n={p.n}: W does not shrink")
        if p.O.level > depth:
            fails.append(f"n={p.n}: O lies below the depth")
            continue
        if not acts_trivially_on(e, p.O, depth, limits):
            fails.append(f"n={p.n}: not trivial on {p.O.render()}")
        if first_moved_level(e, p.W, depth, limits) is None:
            fails.append(f"n={p.n}: trivial on {p.W.render()} to depth {depth}")
        prev = p
    return CheckReport(not fails, fails)


def _generator_index(sys: RecursionSystem, element) -> tuple[WordElement, int | None]:
    if isinstance(element, str):
        element = sys.element(element)
    if len(element.letters) == 1 and element.letters[0] % 2 == 0:
        name = sys.names[element.letters[0] >> 1]
        if name.startswith("b") and name[1:].isdigit():
            return element, int(name[1:])
    return element, None


def nonhausdorff_certificate(
    sys: RecursionSystem,
    element,
    kind: str,
    r: int,
    s: int | None = None,
    depth: int = 10,
    limits: Limits = DEFAULT_LIMITS,
) -> NonHausdorffCertificate:
    """Build and replay the nested cylinders for a pre-periodic generator.

    kind "fixedpoint" (s + 1 = r, element b_r): path 1*, W_n = U_n(1^n),
    O_n = U_{n+2}(1^n 0 1).
    kind "orbit" (r > s + 1, element b_i with s+1 <= i <= r): with
    p = 0^(r-s-1) 1 the path is 0^(i-s-1) 1 p*, W_n is its truncation of
    length (i-s) + (n-1)(r-s) and O_n appends a 1.
    A pair is included while the predicted first nontrivial level on W_n,
    level(W_n) + r, fits in the depth.
    """
    element, i = _generator_index(sys, element)
    if r < 3:
        raise InvalidInputError("pre-periodic certificates need r >= 3")
    if kind == "fixedpoint":
        s = r - 1 if s is None else s
        if s + 1 != r:
            raise InvalidInputError("fixedpoint kind needs s + 1 = r")
        i = r if i is None else i
        if i != r:
            raise InvalidInputError("fixedpoint kind certifies b_r only")
        path = EventuallyPeriodicPath((), (1,))
        pairs = []
        n = 1
        while n + r <= depth:
            pairs.append(NestedPair(n, Cylinder((1,) * n), Cylinder((1,) * n + (0, 1))))
            n += 1
    elif kind == "orbit":
        if s is None or not (r > s + 1):
            raise InvalidInputError("orbit kind needs r > s + 1")
        if i is None or not (s + 1 <= i <= r):
            raise InvalidInputError(f"orbit kind certifies b_i with {s + 1} <= i <= {r}")
        period = (0,) * (r - s - 1) + (1,)
        path = EventuallyPeriodicPath((0,) * (i - s - 1) + (1,), period)
        if i == r:
            path = EventuallyPeriodicPath((), period)
        pairs = []
        n = 1
        while True:
            lw = (i - s) + (n - 1) * (r - s)
            if lw + r > depth:
                break
            base = path.truncate(lw)
            pairs.append(NestedPair(n, Cylinder(base), Cylinder(base + (1,))))
            n += 1
    else:
        raise InvalidInputError(f"unknown certificate kind {kind!r}")
    cert = NonHausdorffCertificate(element, path, tuple(pairs), depth, f"{kind} r={r} s={s}")
    rep = check_nonhausdorff(cert, limits)
    if not rep:
        raise ConsistencyError("certificate replay failed: " + "; ".join(rep.failures))
    return cert


def preperiodic_certificate(r: int, s: int, gen: str | None = None, depth: int = 10, limits: Limits = DEFAULT_LIMITS) -> NonHausdorffCertificate:
    sys = preperiodic(r, s)
    gen = gen or f"b{r}"
    kind = "fixedpoint" if s + 1 == r else "orbit"
    return nonhausdorff_certificate(sys, gen, kind, r, s, depth, limits)


# ---------------------------------------------------------------- wreath builder

PermSpec = Union[Sequence[int], Mapping[int, Sequence[int]], Callable[[int], Sequence[int]]]


def theorem4_builder(index: SphericalIndex, leaf_perms: PermSpec, depth: int, limits: Limits = DEFAULT_LIMITS) -> tuple[Portrait, NonHausdorffCertificate]:
    """Portrait trivial on levels 0 and 1 whose node 0^(2j-1)1 carries p_(2j+1).

    leaf_perms is one permutation for every level, a mapping level -> perm,
    or a callable. The certificate uses the path 0*, W_k = U_2k(0^2k) and
    O_k = U_(2k+1)(0^2k 1) for every k with 2k + 3 <= depth.
    """
    if depth < 3 or depth % 2 == 0:
        raise InvalidInputError("depth must be odd and at least 3")

    def p(n: int) -> P.Perm:
        if callable(leaf_perms):
            q = leaf_perms(n)
        elif isinstance(leaf_perms, Mapping):
            if n not in leaf_perms:
                raise InvalidInputError(f"no permutation given for level {n}")
            q = leaf_perms[n]
        else:
            q = leaf_perms
        q = tuple(q)
        l = index.entry(n)
        if sorted(q) != list(range(l)):
            raise InvalidInputError(f"p_{n} is not a permutation of 0..{l - 1}")
        if P.is_identity(q):
            raise InvalidInputError(f"p_{n} must be nontrivial")
        return q

    nodes = {}
    for j in range(1, (depth - 1) // 2 + 1):
        v = (0,) * (2 * j - 1) + (1,)
        nodes[v] = p(2 * j + 1)
    perms = {}
    level = [()]
    for k in range(depth):
        for v in level:
            perms[v] = nodes.get(v, P.identity(index.entry(k + 1)))
        level = [v + (x,) for v in level for x in range(index.entry(k + 1))] if k + 1 < depth else []
    g = Portrait(index, depth, perms)
    pairs = []
    k = 1
    while 2 * k + 3 <= depth:
        pairs.append(NestedPair(k, Cylinder((0,) * (2 * k)), Cylinder((0,) * (2 * k) + (1,))))
        k += 1
    cert = NonHausdorffCertificate(g, EventuallyPeriodicPath((), (0,)), tuple(pairs), depth, "wreath builder")
    rep = check_nonhausdorff(cert, limits)
    if not rep:
        raise ConsistencyError("builder certificate failed: " + "; ".join(rep.failures))
    return g, cert


# ---------------------------------------------------------------- N0 / N1 search


@dataclass
class SearchResult:
    """word -> first witnessing vertex, per mode."""

    n0_syntactic: dict[str, Word]
    n0_semantic: dict[str, Word]
    n1_syntactic: dict[str, Word]
    n1_semantic: dict[str, Word]
    L: int
    D: int


def reduced_words(ngens: int, L: int):
    yield ()
    frontier = [()]
    for _ in range(L):
        nxt = []
        for w in frontier:
            for x in range(2 * ngens):
                if w and w[-1] == x ^ 1:
                    continue
                u = w + (x,)
                nxt.append(u)
                yield u
        frontier = nxt


def n0_n1_bounded_search(sys: RecursionSystem, L: int, D: int, limits: Limits = DEFAULT_LIMITS) -> SearchResult:
    if L < 0 or D < 1:
        raise InvalidInputError("need L >= 0 and D >= 1")
    if sys.arity**D * (2 * sys.ngens) ** L > 10**7:
        raise InvalidInputError("search space exceeds 10^7 (word, vertex) pairs")
    res = SearchResult({}, {}, {}, {}, L, D)
    verts = [v for k in range(1, D + 1) for v in product(range(sys.arity), repeat=k)]
    for w in reduced_words(sys.ngens, L):
        name = sys.render_word(w)
        e = WordElement(sys, w)
        for v in verts:
            sec = sys.section(w, v)
            fixed = sys.apply(w, v) == tuple(v)
            syn = sec == w
            sem = syn or equal_to_depth(WordElement(sys, sec), e, D, limits)
            if syn and name not in res.n0_syntactic:
                res.n0_syntactic[name] = v
            if sem and name not in res.n0_semantic:
                res.n0_semantic[name] = v
            if fixed and syn and name not in res.n1_syntactic:
                res.n1_syntactic[name] = v
            if fixed and sem and name not in res.n1_semantic:
                res.n1_semantic[name] = v
    return res


# ---------------------------------------------------------------- serialization

HEADER = "arbor-certificate 1"


def _portrait_lines(g: Portrait) -> list[str]:
    out = [f"begin portrait {g.depth}", f"tree {g.index.render()}"]
    for v in sorted(g.node_perms, key=lambda v: (len(v), v)):
        p = g.node_perms[v]
        if not P.is_identity(p):
            out.append(f"node {render_word(v) or 'root'} {P.format_perm(p)}")
    out.append("end portrait")
    return out


def _element_lines(e: Element) -> list[str]:
    if isinstance(e, WordElement):
        return [f"element = {e}", "begin system", *e.system.emit().splitlines(), "end system"]
    return ["element = portrait", *_portrait_lines(e)]


def dump_certificate(c: Union[LqaWitness, NonHausdorffCertificate]) -> str:
    lines = [HEADER]
    if isinstance(c, LqaWitness):
        lines += ["type = lqa", f"depth = {c.check_depth}", f"W = {render_word(c.W.base)}", f"O = {render_word(c.O_trivial.base)}"]
    else:
        lines += ["type = nonhausdorff", f"depth = {c.depth}", f"fixed_path = {c.fixed_path.render()}"]
        for p in c.pairs:
            lines.append(f"pair {p.n} W={render_word(p.W.base)} O={render_word(p.O.base)}")
    if c.note:
        lines.append(f"note = {c.note}")
    lines += _element_lines(c.element)
    return "\n".join(lines) + "\n"


def _parse_index(text: str) -> SphericalIndex:
    text = text.strip()
    if text.startswith("arity"):
        return SphericalIndex.constant(int(text.split("=")[1]))
    body = text.split("=", 1)[1] if "=" in text else text
    return parse_index(body)


def parse_index(text: str) -> SphericalIndex:
    """"3" is constant; "2 3 | 5" is prefix 2 3 then 5 forever."""
    pre, bar, per = text.partition("|")
    try:
        if not bar:
            return SphericalIndex((), tuple(int(x) for x in pre.replace(",", " ").split()))
        return SphericalIndex(tuple(int(x) for x in pre.replace(",", " ").split()), tuple(int(x) for x in per.replace(",", " ").split()))
    except ValueError:
        raise ParseError(f"bad index {text!r}") from None


def load_certificate(text: str) -> Union[LqaWitness, NonHausdorffCertificate]:
    lines = text.splitlines()
    if not lines or lines[0].strip() != HEADER:
        raise ParseError("not a certificate: missing header", 1, 1)
    kv: dict[str, str] = {}
    pairs = []
    sys_lines: list[str] | None = None
    portrait: dict | None = None
    i = 1
    while i < len(lines):
        raw = lines[i]
        line = raw.strip()
        i += 1
        if not line or line.startswith("#"):
            continue
        if line == "begin system":
            sys_lines = []
            while i < len(lines) and lines[i].strip() != "end system":
                sys_lines.append(lines[i])
                i += 1
            i += 1
        elif line.startswith("begin portrait"):
            portrait = {"depth": int(line.split()[2]), "nodes": {}, "index": None}
            while i < len(lines) and lines[i].strip() != "end portrait":
                parts = lines[i].split(None, 2)
                if parts[0] == "tree":
                    portrait["index"] = _parse_index(lines[i].strip()[4:])
                elif parts[0] == "node":
                    v = () if parts[1] == "root" else parse_word(parts[1])
                    portrait["nodes"][v] = parts[2]
                i += 1
            i += 1
        elif line.startswith("pair "):
            toks = line.split()
            try:
                n = int(toks[1])
                W = parse_word(toks[2].split("=", 1)[1])
                O = parse_word(toks[3].split("=", 1)[1])
            except (IndexError, ValueError):
                raise ParseError(f"bad pair line {line!r}", i, 1) from None
            pairs.append(NestedPair(n, Cylinder(W), Cylinder(O)))
        elif "=" in line:
            k, v = line.split("=", 1)
            kv[k.strip()] = v.strip()
        else:
            raise ParseError(f"unrecognised certificate line {line!r}", i, 1)
    if portrait is not None:
        idx = portrait["index"]
        if idx is None:
            raise ParseError("portrait without a tree line")
        perms = {}
        level = [()]
        for k in range(portrait["depth"]):
            l = idx.entry(k + 1)
            for v in level:
                perms[v] = P.parse_perm(portrait["nodes"][v], l) if v in portrait["nodes"] else P.identity(l)
            level = [v + (x,) for v in level for x in range(l)] if k + 1 < portrait["depth"] else []
        element: Element = Portrait(idx, portrait["depth"], perms)
    elif sys_lines is not None:
        sys = parse_system("\n".join(sys_lines))
        element = sys.element(kv.get("element", "e"))
    else:
        raise ParseError("certificate has no element")
    try:
        depth = int(kv["depth"])
        kind = kv["type"]
    except (KeyError, ValueError):
        raise ParseError("certificate needs type and depth") from None
    if kind == "lqa":
        return LqaWitness(element, Cylinder(parse_word(kv["W"])), Cylinder(parse_word(kv["O"])), depth, kv.get("note", ""))
    if kind == "nonhausdorff":
        return NonHausdorffCertificate(element, parse_path(kv["fixed_path"]), tuple(pairs), depth, kv.get("note", ""))
    raise ParseError(f"unknown certificate type {kind!r}")


def check_certificate(c: Union[LqaWitness, NonHausdorffCertificate], limits: Limits = DEFAULT_LIMITS) -> CheckReport:
    if isinstance(c, LqaWitness):
        try:
            ok = check_lqa_witness(c, limits)
        except InvalidInputError as exc:
            return CheckReport(False, [str(exc)])
        return CheckReport(ok, [] if ok else ["witness replay failed"])
    return check_nonhausdorff(c, limits)


def conjugate_witness(w: LqaWitness, h: WordElement) -> LqaWitness:
    """h g h^-1 with the cylinders moved by h."""
    e = w.element
    if not isinstance(e, WordElement):
        raise InvalidInputError("conjugation transport needs a word element")
    g = WordElement(e.system, h.letters + e.letters + inverse_letters(h.letters))
    return LqaWitness(g, Cylinder(apply(h, w.W.base)), Cylinder(apply(h, w.O_trivial.base)), w.check_depth, w.note)
