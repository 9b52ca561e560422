"""Finite games as finite ultrametric spaces with a marked subset.

Runs become points at distance ``1/(Δ+1)``; Alice's runs are the marked
points.  Distances are exact fractions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from typing import Sequence

from .core import FiniteGame, RunSpec, delta_or_inf, game_from_delta
from .errors import DepthInsufficient, NotUltrametric, RangeOutsideS, WindowTooSmall
from .fraisse import PartialAutomorphism


def in_s(x: Fraction) -> bool:
    """Membership in ``{0} ∪ {1/n : n > 0}``."""
    return x == 0 or (x > 0 and x.numerator == 1)


@dataclass(frozen=True)
class UltraSpace:
    size: int
    dist: tuple
    marked: frozenset = frozenset()

    def __post_init__(self):
        dist = tuple(tuple(Fraction(x) for x in row) for row in self.dist)
        object.__setattr__(self, "dist", dist)
        object.__setattr__(self, "marked", frozenset(self.marked))
        validate_space(self)


def validate_space(m: UltraSpace) -> None:
    n = m.size
    if len(m.dist) != n or any(len(row) != n for row in m.dist):
        raise NotUltrametric("distance matrix has the wrong shape")
    if any(not 0 <= i < n for i in m.marked):
        raise NotUltrametric("marked point out of range")
    for i in range(n):
        if m.dist[i][i] != 0:
            raise NotUltrametric(f"d({i},{i}) must be 0")
        for j in range(n):
            if m.dist[i][j] != m.dist[j][i]:
                raise NotUltrametric(f"d({i},{j}) is not symmetric")
            if i != j and m.dist[i][j] <= 0:
                raise NotUltrametric(f"distinct points {i},{j} at distance {m.dist[i][j]}")
            if not in_s(m.dist[i][j]):
                raise RangeOutsideS(f"d({i},{j}) = {m.dist[i][j]} is not of the form 1/n")
    for i, j, k in permutations(range(n), 3):
        if m.dist[i][k] > max(m.dist[i][j], m.dist[j][k]):
            raise NotUltrametric(f"points {i},{j},{k} break the ultrametric law")


def met_of_game(g: FiniteGame) -> UltraSpace:
    n = len(g.runs)
    dist = [[Fraction(0) if i == j else Fraction(1, int(g.delta(i, j)) + 1) for j in range(n)] for i in range(n)]
    return UltraSpace(n, tuple(map(tuple, dist)), g.alice)


def game_of_met(m: UltraSpace) -> FiniteGame:
    """Rebuild a game from the dendrogram of the space: Δ = 1/d − 1."""
    validate_space(m)
    n = m.size
    deltas = [[float("inf") if i == j else int(1 / m.dist[i][j]) - 1 for j in range(n)] for i in range(n)]
    return game_from_delta(deltas, m.marked)


def isometric_with_marks(a: UltraSpace, b: UltraSpace) -> bool:
    if a.size != b.size or len(a.marked) != len(b.marked):
        return False
    for perm in permutations(range(b.size)):
        if all((i in a.marked) == (perm[i] in b.marked) for i in range(a.size)) and all(
            a.dist[i][j] == b.dist[perm[i]][perm[j]] for i, j in combinations(range(a.size), 2)
        ):
            return True
    return False


def run_distance(r: RunSpec, s: RunSpec) -> Fraction:
    d = delta_or_inf(r, s)
    return Fraction(0) if d == float("inf") else Fraction(1, int(d) + 1)


def transport_automorphism(u: PartialAutomorphism, sample: Sequence[RunSpec]) -> dict:
    """Apply ``u`` to runs: the first ``depth`` moves go through ``u``, the rest stay.

    Pairwise distances on the sample are preserved once every pair splits
    before ``depth``.  The tail is untouched, so being eventually zero is too.
    """
    sample = list(sample)
    for r, s in combinations(sample, 2):
        if r != s and delta_or_inf(r, s) >= u.depth:
            raise DepthInsufficient(f"{r} and {s} agree beyond depth {u.depth}")
    out = {}
    for r in sample:
        t = r.prefix(u.depth)
        if t not in u.forward:
            raise WindowTooSmall(f"{r} leaves the width-{u.width} window")
        rest = r.prefix(max(len(r.stem), u.depth))[u.depth :]
        out[r] = RunSpec.make(u.forward[t] + rest, r.tail)
    return out


def compose_partial(u: PartialAutomorphism, v: PartialAutomorphism) -> PartialAutomorphism:
    """``v ∘ u`` on a common window."""
    if (u.depth, u.width) != (v.depth, v.width):
        raise ValueError("automorphisms live on different windows")
    forward = {t: v.forward[s] for t, s in u.forward.items()}
    backward = {t: u.backward[s] for t, s in v.backward.items()}
    vmap = v.run_map
    tracked = tuple((r, vmap[s]) for r, s in u.tracked_runs if s in vmap)
    return PartialAutomorphism(u.depth, u.width, forward, backward, tracked)
