"""Coproducts, pushouts along embeddings and the JEP/AP witnesses built on them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import FiniteGame, RunSpec, game_from_delta
from .errors import DuplicateRun, NotEmbedding, TargetMismatch
from .morphisms import GameMorphism, classify


@dataclass(frozen=True)
class Span:
    apex: FiniteGame
    left: GameMorphism
    right: GameMorphism

    def __post_init__(self):
        for leg in (self.left, self.right):
            if leg.source != self.apex:
                raise NotEmbedding("span legs must start at the apex")
            if not classify(leg).is_embedding:
                raise NotEmbedding(f"span leg {leg.run_map} is not an embedding")


@dataclass(frozen=True)
class CoconePair:
    target: FiniteGame
    left_inj: GameMorphism
    right_inj: GameMorphism


def subgame(g: FiniteGame, indices: Sequence[int]) -> tuple[FiniteGame, GameMorphism]:
    """The subgame on the given runs, with induced payoff, and its inclusion."""
    indices = list(indices)
    sub = FiniteGame(
        tuple(g.runs[i] for i in indices),
        frozenset(k for k, i in enumerate(indices) if g.is_alice(i)),
    )
    return sub, GameMorphism(sub, g, tuple(indices))


def coproduct(gs: Sequence[FiniteGame]) -> tuple[FiniteGame, list[GameMorphism]]:
    """Disjoint union sharing only the root.

    Each summand keeps its runs, except that first moves are renamed so that
    no two summands share one; runs from different summands then split at 0.
    """
    runs: list[RunSpec] = []
    alice: set[int] = set()
    fresh: dict[tuple[int, int], int] = {}
    spans: list[range] = []
    for j, g in enumerate(gs):
        start = len(runs)
        for i, r in enumerate(g.runs):
            x = r.at(0)
            new = fresh.setdefault((j, x), len(fresh))
            seq = (new,) + r.prefix(len(r.stem) + 1)[1:]
            runs.append(RunSpec.make(seq, r.tail))
            if g.is_alice(i):
                alice.add(len(runs) - 1)
        spans.append(range(start, len(runs)))
    total = FiniteGame.of(runs, alice)
    injections = [GameMorphism(g, total, tuple(span)) for g, span in zip(gs, spans)]
    return total, injections


def pushout(s: Span) -> CoconePair:
    """Amalgamate ``A <- apex -> B`` identifying exactly the apex runs.

    Runs of the result are the runs of ``A`` followed by the runs of ``B``
    outside the image of the apex.  Between a run ``a`` of ``A`` and a new run
    ``b`` of ``B`` the split depth is the largest value, over apex runs ``c``,
    of ``min(Δ(a, left c), Δ(b, right c))``, and 0 when the apex is empty.
    """
    a_game, b_game = s.left.target, s.right.target
    apex_n = len(s.apex.runs)
    right_image = {s.right(c): c for c in range(apex_n)}
    new_b = [b for b in range(len(b_game.runs)) if b not in right_image]
    na = len(a_game.runs)
    n = na + len(new_b)
    deltas = [[0.0] * n for _ in range(n)]
    for i in range(na):
        for k in range(na):
            deltas[i][k] = a_game.delta(i, k)
    for p, b in enumerate(new_b):
        for q, b2 in enumerate(new_b):
            deltas[na + p][na + q] = b_game.delta(b, b2)
        for i in range(na):
            best = 0
            for c in range(apex_n):
                best = max(best, min(a_game.delta(i, s.left(c)), b_game.delta(b, s.right(c))))
            deltas[i][na + p] = deltas[na + p][i] = best
    alice = set(a_game.alice) | {na + p for p, b in enumerate(new_b) if b_game.is_alice(b)}
    target = game_from_delta(deltas, alice)
    left_inj = GameMorphism(a_game, target, tuple(range(na)))
    new_pos = {b: na + p for p, b in enumerate(new_b)}
    right_map = tuple(s.left(right_image[b]) if b in right_image else new_pos[b] for b in range(len(b_game.runs)))
    right_inj = GameMorphism(b_game, target, right_map)
    return CoconePair(target, left_inj, right_inj)


def jep_witness(g1: FiniteGame, g2: FiniteGame) -> CoconePair:
    total, (i1, i2) = coproduct([g1, g2])
    return CoconePair(total, i1, i2)


def comma_jep_witness(f: GameMorphism, g: GameMorphism):
    """Joint embedding over a common target ``G``: the union of the two images.

    Returns ``(G', f', g', i)`` with ``i: G' -> G`` the inclusion and
    ``i ∘ f' = f``, ``i ∘ g' = g``.
    """
    if f.target != g.target:
        raise TargetMismatch("both embeddings must land in the same game")
    for m in (f, g):
        if not classify(m).is_embedding:
            raise NotEmbedding(f"{m.run_map} is not an embedding")
    indices = sorted(f.image() | g.image())
    sub, inclusion = subgame(f.target, indices)
    pos = {j: k for k, j in enumerate(indices)}
    f_co = GameMorphism(f.source, sub, tuple(pos[j] for j in f.run_map))
    g_co = GameMorphism(g.source, sub, tuple(pos[j] for j in g.run_map))
    return sub, f_co, g_co, inclusion


def free_game(runs: Iterable[RunSpec], name=None) -> FiniteGame:
    """The game on these runs that Alice wins outright."""
    runs = tuple(runs)
    if len(set(runs)) != len(runs):
        raise DuplicateRun("free_game needs pairwise distinct runs")
    return FiniteGame.of(runs, range(len(runs)), name)
