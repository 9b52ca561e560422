"""Finite games as finite sets of eventually-constant runs.

A run is stored as a :class:`RunSpec`, a finite stem followed by a constant
tail.  A :class:`FiniteGame` is a tuple of such runs plus the set of indices of
the runs won by Alice.  The game tree is never stored; it is the set of all
finite prefixes of the runs and is materialized on demand by :func:`tree_of`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from .errors import (
    BadAliceIndex,
    DuplicateRun,
    EmptyGame,
    EqualRuns,
    GameError,
    NonCanonicalRunSpec,
    NotUltrametric,
)

Moment = tuple  # finite tuple of naturals


@dataclass(frozen=True, order=True)
class RunSpec:
    """The infinite sequence ``stem + (tail, tail, ...)``."""

    stem: tuple = ()
    tail: int = 0

    @classmethod
    def make(cls, stem: Iterable[int] = (), tail: int = 0) -> "RunSpec":
        """Build a run, dropping stem entries that repeat the tail."""
        stem = list(stem)
        while stem and stem[-1] == tail:
            stem.pop()
        return cls(tuple(stem), tail)

    @classmethod
    def constant(cls, move: int) -> "RunSpec":
        return cls((), move)

    def is_canonical(self) -> bool:
        return not self.stem or self.stem[-1] != self.tail

    def at(self, i: int) -> int:
        return self.stem[i] if i < len(self.stem) else self.tail

    def prefix(self, n: int) -> Moment:
        if n <= len(self.stem):
            return self.stem[:n]
        return self.stem + (self.tail,) * (n - len(self.stem))

    def moves(self) -> set[int]:
        return set(self.stem) | {self.tail}

    def eventually(self, move: int) -> bool:
        return self.tail == move

    def __str__(self) -> str:
        body = ",".join(map(str, self.stem))
        return f"<{body}>{self.tail}^w"


def delta(r1: RunSpec, r2: RunSpec) -> int:
    """Least index at which the two runs differ."""
    horizon = max(len(r1.stem), len(r2.stem))
    for i in range(horizon + 1):
        if r1.at(i) != r2.at(i):
            return i
    raise EqualRuns(f"{r1} and {r2} denote the same sequence")


def delta_or_inf(r1: RunSpec, r2: RunSpec) -> float:
    """Like :func:`delta` but returns ``inf`` for equal runs."""
    if r1 == r2:
        return math.inf
    return delta(r1, r2)


def agreement(run: RunSpec, moment: Sequence[int]) -> bool:
    """True when ``moment`` is a prefix of ``run``."""
    return all(run.at(i) == x for i, x in enumerate(moment))


# Games with more runs than this compute Δ on demand instead of caching a matrix.
_MATRIX_LIMIT = 300


@dataclass(frozen=True)
class FiniteGame:
    runs: tuple = ()
    alice: frozenset = frozenset()
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "runs", tuple(self.runs))
        object.__setattr__(self, "alice", frozenset(self.alice))

    @classmethod
    def of(cls, runs: Iterable[RunSpec], alice: Iterable[int], name=None) -> "FiniteGame":
        """Build a game and raise on the first invariant violation."""
        g = cls(tuple(runs), frozenset(alice), name)
        report = validate_game(g)
        if not report.ok:
            raise report.errors[0]
        return g

    @classmethod
    def from_payoff(cls, runs: Iterable[RunSpec], flags: Iterable[bool], name=None) -> "FiniteGame":
        runs = tuple(runs)
        return cls.of(runs, (i for i, a in zip(range(len(runs)), flags) if a), name)

    def __len__(self) -> int:
        return len(self.runs)

    def is_alice(self, i: int) -> bool:
        return i in self.alice

    @property
    def bob(self) -> frozenset:
        return frozenset(range(len(self.runs))) - self.alice

    def flags(self) -> tuple:
        return tuple(i in self.alice for i in range(len(self.runs)))

    @cached_property
    def _deltas(self) -> tuple:
        return tuple(tuple(delta_or_inf(r, s) for s in self.runs) for r in self.runs)

    def delta(self, i: int, j: int) -> float:
        if len(self.runs) > _MATRIX_LIMIT:
            return delta_or_inf(self.runs[i], self.runs[j])
        return self._deltas[i][j]

    def delta_matrix(self) -> list[list[float]]:
        return [list(row) for row in self._deltas]

    def moves(self) -> set[int]:
        out: set[int] = set()
        for r in self.runs:
            out |= r.moves()
        return out

    def index(self, run: RunSpec) -> int:
        return self.runs.index(run)

    def is_trivial_for_alice(self) -> bool:
        return len(self.alice) == len(self.runs)

    def __str__(self) -> str:
        parts = [f"{'A' if i in self.alice else 'B'}:{r}" for i, r in enumerate(self.runs)]
        return "{" + " ".join(parts) + "}"


EMPTY_GAME = FiniteGame()


@dataclass
class ValidationReport:
    errors: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def lines(self) -> list[str]:
        return [f"{type(e).__name__}: {e}" for e in self.errors]


def validate_game(g: FiniteGame) -> ValidationReport:
    """Collect every invariant violation of ``g``."""
    report = ValidationReport()
    for i, r in enumerate(g.runs):
        if not isinstance(r, RunSpec):
            report.errors.append(GameError(f"run {i} is not a RunSpec"))
            return report
        if any((not isinstance(x, int)) or x < 0 for x in r.stem + (r.tail,)):
            report.errors.append(GameError(f"run {i} has a move that is not a natural number"))
        elif not r.is_canonical():
            report.errors.append(NonCanonicalRunSpec(f"run {i} ({r}) has a stem ending in its tail"))
    seen: dict = {}
    for i, r in enumerate(g.runs):
        if r in seen:
            report.errors.append(DuplicateRun(f"runs {seen[r]} and {i} coincide ({r})"))
        else:
            seen[r] = i
    for a in sorted(g.alice, key=repr):
        if not isinstance(a, int) or not 0 <= a < len(g.runs):
            report.errors.append(BadAliceIndex(f"alice index {a} out of range 0..{len(g.runs) - 1}"))
    if report.ok:
        # Every prefix has a successor and no limit branch exists besides the
        # declared runs: past the branching depth each moment lies on exactly
        # one run, whose continuation is its own constant tail.
        tree = tree_of(g, branching_depth(g) + 1) if g.runs else None
        if tree is not None:
            for depth_moment, marks in tree.run_markers.items():
                if len(marks) != 1:
                    report.errors.append(GameError(f"moment {depth_moment} lies on {len(marks)} runs"))
    return report


@dataclass(frozen=True)
class TruncatedTree:
    depth: int
    moments: frozenset
    run_markers: dict

    def level(self, n: int) -> list:
        return sorted(t for t in self.moments if len(t) == n)

    def children(self, t: Moment) -> list:
        return sorted(s for s in self.moments if len(s) == len(t) + 1 and s[: len(t)] == t)

    def level_sizes(self) -> list[int]:
        sizes = [0] * (self.depth + 1)
        for t in self.moments:
            sizes[len(t)] += 1
        return sizes


def tree_of(g: FiniteGame, depth: int) -> TruncatedTree:
    moments = set()
    markers: dict = {}
    for i, r in enumerate(g.runs):
        for k in range(depth + 1):
            moments.add(r.prefix(k))
        markers.setdefault(r.prefix(depth), set()).add(i)
    return TruncatedTree(depth, frozenset(moments), {t: frozenset(s) for t, s in markers.items()})


def max_delta(g: FiniteGame) -> int:
    """Largest pairwise Δ, or -1 when the game has fewer than two runs.

    The longest common prefix over all pairs is attained by two runs that are
    adjacent in lexicographic order, so sorting suffices.
    """
    if len(g.runs) < 2:
        return -1
    horizon = max(len(r.stem) for r in g.runs) + 1
    ordered = sorted(g.runs, key=lambda r: r.prefix(horizon))
    return max(delta(a, b) for a, b in zip(ordered, ordered[1:]))


def _prefix_maps_ok(src: Sequence[RunSpec], img: Sequence[RunSpec], exact: bool) -> bool:
    horizon = max((len(r.stem) for r in src), default=0) + (1 if exact else 0)
    for k in range(1, horizon + 1):
        forward: dict = {}
        backward: dict = {}
        for r, s in zip(src, img):
            p, q = r.prefix(k), s.prefix(k)
            if forward.setdefault(p, q) != q:
                return False
            if exact and backward.setdefault(q, p) != p:
                return False
    return True


def non_expanding(src: Sequence[RunSpec], img: Sequence[RunSpec]) -> bool:
    """``Δ(img[i], img[j]) >= Δ(src[i], src[j])`` for all pairs, in O(n·L²).

    Equivalent to: at every level k, runs sharing their k-prefix have images
    sharing their k-prefix.  Only levels up to the longest stem matter.
    """
    return _prefix_maps_ok(src, img, exact=False)


def same_delta_profile(src: Sequence[RunSpec], img: Sequence[RunSpec]) -> bool:
    """``img`` is pairwise distinct and ``Δ(img[i], img[j]) == Δ(src[i], src[j])``."""
    if len(set(src)) != len(src):
        return False
    return _prefix_maps_ok(src, img, exact=True)


def branching_depth(g: FiniteGame) -> int:
    if not g.runs:
        raise EmptyGame("branching depth of the empty game is undefined")
    return max_delta(g) + 1


def check_ultrametric(deltas: Sequence[Sequence[float]]) -> None:
    """Raise :class:`NotUltrametric` unless Δ(i,k) >= min(Δ(i,j), Δ(j,k))."""
    n = len(deltas)
    for i in range(n):
        for j in range(n):
            if deltas[i][j] != deltas[j][i]:
                raise NotUltrametric(f"asymmetric at ({i},{j})")
            if (i == j) != (deltas[i][j] == math.inf):
                raise NotUltrametric(f"bad diagonal/off-diagonal entry at ({i},{j})")
    for i, j, k in combinations(range(n), 3):
        a, b, c = deltas[i][j], deltas[j][k], deltas[i][k]
        # In an ultrametric the two smallest values of every triangle agree.
        lo = sorted((a, b, c))
        if lo[0] != lo[1]:
            raise NotUltrametric(f"triple ({i},{j},{k}) has Δ-values {a}, {b}, {c}")


def game_from_delta(deltas: Sequence[Sequence[float]], alice: Iterable[int] = (), name=None) -> FiniteGame:
    """Realize a Δ-matrix as a game; run ``i`` of the result is point ``i``.

    At each level the points still together are split into the classes of
    ``Δ > level`` and each class gets the move equal to its rank (ordered by
    smallest member).  A point's stem ends once it is alone.
    """
    check_ultrametric(deltas)
    n = len(deltas)
    stems: list[list[int]] = [[] for _ in range(n)]

    def split(members: list[int], level: int) -> None:
        if len(members) <= 1:
            return
        groups: list[list[int]] = []
        for m in members:
            for grp in groups:
                if deltas[grp[0]][m] > level:
                    grp.append(m)
                    break
            else:
                groups.append([m])
        for rank, grp in enumerate(groups):
            for m in grp:
                stems[m].append(rank)
            split(grp, level + 1)

    split(list(range(n)), 0)
    runs = tuple(RunSpec.make(s, 0) for s in stems)
    return FiniteGame.of(runs, alice, name)
