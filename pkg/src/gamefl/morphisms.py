"""Game morphisms stored as run maps.

For finite games a chronological tree map is determined by what it does on
runs, and a run map comes from a chronological map exactly when it never
decreases Δ.  All morphisms here are therefore a tuple ``run_map`` with
``run_map[i]`` the target index of source run ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterator

from .core import FiniteGame, Moment, RunSpec, agreement, non_expanding, same_delta_profile
from .errors import MomentNotInTree, NotChronological, SourceTargetMismatch


# Below this many source runs the cached pairwise Δ check is faster.
_SMALL = 16


@dataclass(frozen=True)
class GameMorphism:
    source: FiniteGame
    target: FiniteGame
    run_map: tuple

    def __post_init__(self):
        object.__setattr__(self, "run_map", tuple(self.run_map))
        if len(self.run_map) != len(self.source.runs):
            raise NotChronological("run map must assign every source run")
        n = len(self.target.runs)
        if any(not 0 <= j < n for j in self.run_map):
            raise NotChronological("run map index out of range")
        if len(self.run_map) <= _SMALL or not non_expanding(
            self.source.runs, [self.target.runs[j] for j in self.run_map]
        ):
            for i, j in combinations(range(len(self.run_map)), 2):
                if self.target.delta(self.run_map[i], self.run_map[j]) < self.source.delta(i, j):
                    raise NotChronological(
                        f"runs {i},{j} split at {self.source.delta(i, j)} but their images split earlier"
                    )

    @classmethod
    def trusted(cls, source: FiniteGame, target: FiniteGame, run_map) -> "GameMorphism":
        """Skip validation; for maps that are correct by construction."""
        m = object.__new__(cls)
        object.__setattr__(m, "source", source)
        object.__setattr__(m, "target", target)
        object.__setattr__(m, "run_map", tuple(run_map))
        return m

    def __call__(self, i: int) -> int:
        return self.run_map[i]

    def image_run(self, i: int) -> RunSpec:
        return self.target.runs[self.run_map[i]]

    def image(self) -> frozenset:
        return frozenset(self.run_map)


@dataclass(frozen=True)
class MorphismKind:
    is_A: bool
    is_B: bool
    is_injective: bool
    is_embedding: bool


def identity(g: FiniteGame) -> GameMorphism:
    return GameMorphism(g, g, tuple(range(len(g.runs))))


def classify(m: GameMorphism) -> MorphismKind:
    src, tgt = m.source, m.target
    is_a = all(tgt.is_alice(m(i)) for i in src.alice)
    is_b = all(not tgt.is_alice(m(i)) for i in src.bob)
    if len(src.runs) <= _SMALL:
        injective = len(set(m.run_map)) == len(m.run_map) and all(
            tgt.delta(m(i), m(j)) == src.delta(i, j) for i, j in combinations(range(len(src.runs)), 2)
        )
    else:
        injective = same_delta_profile(src.runs, [tgt.runs[j] for j in m.run_map])
    return MorphismKind(is_a, is_b, injective, injective and is_a and is_b)


def moment_image(m: GameMorphism, t: Moment) -> Moment:
    t = tuple(t)
    through = [i for i, r in enumerate(m.source.runs) if agreement(r, t)]
    if not through:
        raise MomentNotInTree(f"{t} is not a moment of the source game")
    images = {m.image_run(i).prefix(len(t)) for i in through}
    assert len(images) == 1, "non-expanding run map must induce a well-defined moment map"
    return images.pop()


def compose(m1: GameMorphism, m2: GameMorphism) -> GameMorphism:
    """``m2 ∘ m1``: first ``m1``, then ``m2``."""
    if m1.target != m2.source:
        raise SourceTargetMismatch("target of the first morphism is not the source of the second")
    return GameMorphism(m1.source, m2.target, tuple(m2(j) for j in m1.run_map))


def iter_embeddings(g1: FiniteGame, g2: FiniteGame, fixed: dict | None = None) -> Iterator[GameMorphism]:
    """Yield all embeddings ``g1 -> g2`` extending the partial map ``fixed``.

    Backtracking over source runs in index order; a candidate target run is
    pruned as soon as its payoff flag or a Δ to an already-placed run
    disagrees with the source.
    """
    fixed = dict(fixed or {})
    n1, n2 = len(g1.runs), len(g2.runs)
    if n1 > n2:
        return
    for i, j in fixed.items():
        if g1.is_alice(i) != g2.is_alice(j):
            return
    for (i, j), (k, l) in combinations(fixed.items(), 2):
        if j == l or g2.delta(j, l) != g1.delta(i, k):
            return
    order = [i for i in range(n1) if i not in fixed]
    assignment = dict(fixed)
    used = set(fixed.values())

    def rec(pos: int):
        if pos == len(order):
            yield GameMorphism(g1, g2, tuple(assignment[i] for i in range(n1)))
            return
        i = order[pos]
        flag = g1.is_alice(i)
        for j in range(n2):
            if j in used or g2.is_alice(j) != flag:
                continue
            if all(g2.delta(j, l) == g1.delta(i, k) for k, l in assignment.items()):
                assignment[i] = j
                used.add(j)
                yield from rec(pos + 1)
                del assignment[i]
                used.discard(j)

    yield from rec(0)


def enumerate_embeddings(g1: FiniteGame, g2: FiniteGame) -> list[GameMorphism]:
    return list(iter_embeddings(g1, g2))


def first_embedding(g1: FiniteGame, g2: FiniteGame, fixed: dict | None = None) -> GameMorphism | None:
    return next(iter_embeddings(g1, g2, fixed), None)


def are_isomorphic(g1: FiniteGame, g2: FiniteGame) -> GameMorphism | None:
    if len(g1.runs) != len(g2.runs) or len(g1.alice) != len(g2.alice):
        return None
    return first_embedding(g1, g2)


def iter_a_morphisms(g1: FiniteGame, g2: FiniteGame) -> Iterator[GameMorphism]:
    """All A-morphisms ``g1 -> g2`` (non-expanding, Alice runs to Alice runs)."""
    n1, n2 = len(g1.runs), len(g2.runs)
    assignment: list[int] = []

    def rec(i: int):
        if i == n1:
            yield GameMorphism(g1, g2, tuple(assignment))
            return
        for j in range(n2):
            if g1.is_alice(i) and not g2.is_alice(j):
                continue
            if all(g2.delta(j, assignment[k]) >= g1.delta(i, k) for k in range(i)):
                assignment.append(j)
                yield from rec(i + 1)
                assignment.pop()

    yield from rec(0)


# -- canonical forms -------------------------------------------------------

def _code(g: FiniteGame, members: list[int], level: int):
    if len(members) == 1:
        return (0, int(g.is_alice(members[0])))
    groups: dict[int, list[int]] = {}
    for m in members:
        groups.setdefault(g.runs[m].at(level), []).append(m)
    return (1, tuple(sorted(_code(g, grp, level + 1) for grp in groups.values())))


def canonical_code(g: FiniteGame):
    """Complete isomorphism invariant: the payoff-labelled branching tree.

    A leaf is ``(0, flag)``; a moment carrying several runs is ``(1, sorted
    child codes)``.  Levels where the runs do not split appear as a node with
    a single child, so split depths are part of the code.
    """
    if not g.runs:
        return (2,)
    return _code(g, list(range(len(g.runs))), 0)


def game_from_code(code, name=None) -> FiniteGame:
    runs: list[RunSpec] = []
    flags: list[bool] = []

    def walk(node, stem):
        if node[0] == 0:
            runs.append(RunSpec.make(stem, 0))
            flags.append(bool(node[1]))
            return
        for rank, child in enumerate(node[1]):
            walk(child, stem + [rank])

    if code != (2,):
        walk(code, [])
    return FiniteGame.from_payoff(runs, flags, name)


def canonical_form_with_map(g: FiniteGame) -> tuple[FiniteGame, GameMorphism]:
    """Canonical representative together with an isomorphism onto it."""
    order: list[int] = []

    def walk(members, level):
        if len(members) == 1:
            order.append(members[0])
            return
        groups: dict[int, list[int]] = {}
        for m in members:
            groups.setdefault(g.runs[m].at(level), []).append(m)
        keyed = sorted(groups.items(), key=lambda kv: (_code(g, kv[1], level + 1), kv[0]))
        for _, grp in keyed:
            walk(grp, level + 1)

    if g.runs:
        walk(list(range(len(g.runs))), 0)
    canon = game_from_code(canonical_code(g), g.name)
    position = {src: k for k, src in enumerate(order)}
    iso = GameMorphism(g, canon, tuple(position[i] for i in range(len(g.runs))))
    return canon, iso


def canonical_form(g: FiniteGame) -> FiniteGame:
    return canonical_form_with_map(g)[0]


def invert(m: GameMorphism) -> GameMorphism:
    """Inverse of a bijective embedding."""
    inv = [0] * len(m.run_map)
    for i, j in enumerate(m.run_map):
        inv[j] = i
    return GameMorphism(m.target, m.source, tuple(inv))
