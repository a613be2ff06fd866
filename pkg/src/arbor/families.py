"""Built-in generator systems.

Each constructor notes which tuple convention its recursion was written
in before conversion to input-letter sections ("perm-last" is
(h_0, ..., h_{d-1}) o perm with h_y below the image letter y).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidInputError
from .recursion import RecursionSystem, tuple_generator
from .tree import EventuallyPeriodicPath

SIGMA = (1, 0)
TRIVIAL2 = (0, 1)


def _transpositions(d: int, start: int, stop: int) -> tuple[int, ...]:
    """Product of (start start+1)(start+2 start+3)... below stop."""
    img = list(range(d))
    for i in range(start, stop - 1, 2):
        img[i], img[i + 1] = i + 1, i
    return tuple(img)


def odometer(d: int = 2) -> RecursionSystem:
    """Adding machine: perm-last tuple (a, 1, ..., 1) o (0 1 ... d-1)."""
    if d < 2:
        raise InvalidInputError("odometer needs d >= 2")
    cycle = tuple((x + 1) % d for x in range(d))
    entries = ["a"] + ["e"] * (d - 1)
    return RecursionSystem.build(d, [tuple_generator("a", cycle, entries)])


def chebyshev(d: int = 2) -> RecursionSystem:
    """Two involutions a, b with tau = (0 1)(2 3)... and sigma = (1 2)(3 4)...

    even d: a = tau with trivial sections; b has root sigma, b|_0 = b, b|_{d-1} = a.
    odd d: a has root tau and a|_{d-1} = a; b has root sigma and b|_0 = b.
    The letters carrying nontrivial sections are fixed by the root, so both
    tuple conventions give the same sections.
    """
    if d < 2:
        raise InvalidInputError("chebyshev needs d >= 2")
    mid = ["e"] * (d - 2)
    if d % 2 == 0:
        tau = _transpositions(d, 0, d)
        sigma = _transpositions(d, 1, d - 1)
        gens = [
            tuple_generator("a", tau, ["e"] * d),
            tuple_generator("b", sigma, ["b"] + mid + ["a"]),
        ]
    else:
        tau = _transpositions(d, 0, d - 1)
        sigma = _transpositions(d, 1, d)
        gens = [
            tuple_generator("a", tau, ["e"] * (d - 1) + ["a"]),
            tuple_generator("b", sigma, ["b"] + ["e"] * (d - 1)),
        ]
    return RecursionSystem.build(d, gens)


def periodic(r: int) -> RecursionSystem:
    """a_1 = (a_r, 1) o sigma, a_i = (a_{i-1}, 1); perm-last tuples."""
    if r < 2:
        raise InvalidInputError("periodic family needs r >= 2")
    gens = [tuple_generator("a1", SIGMA, [f"a{r}", "e"])]
    for i in range(2, r + 1):
        gens.append(tuple_generator(f"a{i}", TRIVIAL2, [f"a{i - 1}", "e"]))
    return RecursionSystem.build(2, gens)


def preperiodic(r: int, s: int) -> RecursionSystem:
    """b_1 = sigma, b_{s+1} = (b_s, b_r), b_i = (b_{i-1}, 1) otherwise; perm-last tuples."""
    if not (1 <= s < r) or r < 2:
        raise InvalidInputError("preperiodic family needs 1 <= s < r and r >= 2")
    gens = [tuple_generator("b1", SIGMA, ["e", "e"])]
    for i in range(2, r + 1):
        if i == s + 1:
            gens.append(tuple_generator(f"b{i}", TRIVIAL2, [f"b{s}", f"b{r}"]))
        else:
            gens.append(tuple_generator(f"b{i}", TRIVIAL2, [f"b{i - 1}", "e"]))
    return RecursionSystem.build(2, gens)


def dihedral() -> RecursionSystem:
    """b1 = sigma, b2 = (b1, b2); the odometer is the word b1 b2."""
    return RecursionSystem.build(
        2,
        [tuple_generator("b1", SIGMA, ["e", "e"]), tuple_generator("b2", TRIVIAL2, ["b1", "b2"])],
    )


def arith_periodic_r1() -> RecursionSystem:
    """a the odometer, b multiplication by -1, c multiplication by 5.

    Written perm-first (sections by input letter): b = (b, a^-1 b),
    c = (c, a^2 c). With first letters as least significant binary digits,
    b sends u to -u and c sends u to 5u, so b a b^-1 = a^-1 and c a c^-1 = a^5.
    """
    return RecursionSystem.build(
        2,
        [
            tuple_generator("a", SIGMA, ["e", "a"], "perm-first"),
            tuple_generator("b", TRIVIAL2, ["b", "a^-1 b"], "perm-first"),
            tuple_generator("c", TRIVIAL2, ["c", "a a c"], "perm-first"),
        ],
    )


def arith_preperiodic_r2(r_exp: int = 1) -> RecursionSystem:
    """Odometer a = b1 b2 of the dihedral pair, b = b1, and c normalizing both.

    Here a and b are rewritten over themselves: a|_0 = b1 = b and
    a|_1 = b2 = b^-1 a. The element c is a^-2 z, where z has trivial root
    permutation with perm-first sections z|_0 = a^-2 z and z|_1 = z; that
    gives c|_0 = b^-1 a^-1 b c and c|_1 = a c. The group is generated by
    a, b and c^(2^r_exp).
    """
    if r_exp < 1:
        raise InvalidInputError("arith_preperiodic_r2 needs r_exp >= 1")
    return RecursionSystem.build(
        2,
        [
            tuple_generator("a", SIGMA, ["b", "b^-1 a"], "perm-first"),
            tuple_generator("b", SIGMA, ["e", "e"], "perm-first"),
            tuple_generator("c", TRIVIAL2, ["b^-1 a^-1 b c", "a c"], "perm-first"),
        ],
        group=["a", "b", f"c^{2 ** r_exp}"],
    )


@dataclass(frozen=True)
class FamilySpec:
    kind: str
    d: int | None = None
    r: int | None = None
    s: int | None = None
    r_exp: int | None = None

    def build(self) -> RecursionSystem:
        k = self.kind
        if k == "odometer":
            return odometer(self.d or 2)
        if k == "chebyshev":
            return chebyshev(self.d or 2)
        if k == "periodic":
            return periodic(_need(self.r, "r"))
        if k == "preperiodic":
            return preperiodic(_need(self.r, "r"), _need(self.s, "s"))
        if k == "arith_periodic_r1":
            return arith_periodic_r1()
        if k == "arith_preperiodic_r2":
            return arith_preperiodic_r2(self.r_exp or 1)
        if k == "dihedral":
            return dihedral()
        raise InvalidInputError(f"unknown family {k!r}")


FAMILY_NAMES = (
    "odometer",
    "chebyshev",
    "periodic",
    "preperiodic",
    "arith_periodic_r1",
    "arith_preperiodic_r2",
    "dihedral",
)


def _need(x, name):
    if x is None:
        raise InvalidInputError(f"family parameter {name} is required")
    return x


def lambda_word(r: int) -> str:
    """a1 a2 ... ar, the odometer-like product in the periodic family."""
    return " ".join(f"a{i}" for i in range(1, r + 1))


def periodic_basepoint() -> EventuallyPeriodicPath:
    return EventuallyPeriodicPath((), (0,))
