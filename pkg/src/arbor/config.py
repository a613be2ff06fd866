"""Resource bounds. Every bounded operation takes a Limits value."""

from __future__ import annotations

from dataclasses import dataclass, replace

DEFAULT_MAX_DEPTH = 24


@dataclass(frozen=True)
class Limits:
    max_depth: int = DEFAULT_MAX_DEPTH
    # widest level a dense permutation table may cover
    max_width: int = 2**24
    # largest dense level table (truncations)
    max_table: int = 2**20
    # points per level for quotient computations
    max_points: int = 2**14
    # group order through the stabilizer chain
    max_order: int = 10**7
    # element enumeration (BFS cross-checks, exponent, invariants)
    max_enumerate: int = 10**5

    def with_(self, **kw) -> "Limits":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw)


DEFAULT_LIMITS = Limits()
