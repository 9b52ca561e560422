"""Weak finite smallness of finite games: verdicts with finite certificates.

A game ``G`` is weakly finitely small for a sequence when every morphism
from ``G`` into the colimit factors through some stage.  In the category of
A-morphisms this holds exactly for games Alice wins outright.  For a game
with a Bob run ``R`` the padding sequence below removes ``R`` from every
stage while its colimit still contains it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .core import FiniteGame, RunSpec, delta_or_inf, game_from_delta
from .errors import NotTrivialForAlice, RunIsAlice, SameClass, TooFewBranches
from .limits import (
    GameSequence,
    GflView,
    colimit,
    factor_through,
    inclusion_cocone,
    lift_run_with_delta,
)
from .morphisms import GameMorphism, compose

SETTINGS = ("Games_A", "Games_emb_pair", "Gmes")


@dataclass
class SmallnessVerdict:
    setting: str
    is_wfs: bool
    certificate: dict = field(default_factory=dict)


class BobCounterexample(NamedTuple):
    sequence: GameSequence
    target: FiniteGame
    inclusion: GameMorphism


def _fresh_move(g: FiniteGame) -> int:
    return max(g.moves(), default=-1) + 1


def _bob_stage(g: FiniteGame, r: RunSpec, b: int, n: int) -> FiniteGame:
    kept = [i for i, s in enumerate(g.runs) if s != r and delta_or_inf(s, r) < n]
    runs = [g.runs[i] for i in kept] + [RunSpec.make(r.prefix(k), b) for k in range(n + 1)]
    alice = {pos for pos, i in enumerate(kept) if g.is_alice(i)}
    return FiniteGame(tuple(runs), frozenset(alice))


def _inclusion(src: FiniteGame, tgt: FiniteGame) -> GameMorphism:
    index = {r: k for k, r in enumerate(tgt.runs)}
    return GameMorphism(src, tgt, tuple(index[r] for r in src.runs))


def bob_counterexample(g: FiniteGame, bob_run: int, stages: int) -> BobCounterexample:
    """The padding sequence that never contains the Bob run ``bob_run``.

    With ``b`` a move unused by ``g`` and ``R`` the Bob run, stage ``n``
    keeps the runs splitting from ``R`` before depth ``n`` and adds the
    grafts ``R↾k⌢b^ω`` for ``k <= n``.  Links are inclusions.  The target
    is ``g`` together with the grafts up to ``stages``, which is the union
    of the materialized stages plus ``R``; its payoff is that of ``g``.
    """
    if g.is_alice(bob_run):
        raise RunIsAlice(f"run {bob_run} is won by Alice")
    r = g.runs[bob_run]
    b = _fresh_move(g)

    def gen(n, prev):
        nxt = _bob_stage(g, r, b, n)
        return nxt, _inclusion(prev, nxt)

    games = [_bob_stage(g, r, b, n) for n in range(stages + 1)]
    links = [_inclusion(a, c) for a, c in zip(games, games[1:])]
    seq = GameSequence(tuple(games), tuple(links), generator=gen, embedding=True)
    grafts = tuple(RunSpec.make(r.prefix(k), b) for k in range(stages + 1))
    target = FiniteGame(g.runs + grafts, g.alice)
    return BobCounterexample(seq, target, _inclusion(g, target))


def bob_non_factoring(ce: BobCounterexample, bound: int | None = None) -> bool:
    """True when the inclusion factors through no stage up to ``bound``."""
    cocone = inclusion_cocone(ce.sequence, ce.target)
    return factor_through(ce.sequence, cocone, ce.inclusion, bound) is None


def partition_family(window) -> list:
    """Moments whose cones partition the runs of the window.

    For a :class:`GflView` of width ``w`` and depth ``d``: the children
    ``0..w-2`` at each level, descending into child ``w-1``, and finally
    the all-``(w-1)`` moment of length ``d``.  For a finite game: one moment
    per run, long enough to single it out.
    """
    if isinstance(window, GflView):
        d, w = window.depth, window.width
        family = [(w - 1,) * level + (x,) for level in range(d) for x in range(w - 1)]
        return family + [(w - 1,) * d]
    g = window.game if hasattr(window, "game") else window
    horizon = max((len(r.stem) for r in g.runs), default=0) + 1
    return [r.prefix(horizon) for r in g.runs]


def partition_counterexample(window, stages: int) -> GameSequence:
    """Stage ``n`` is the union of the first ``n+1`` cones of :func:`partition_family`.

    Stage ``n`` misses the cone of the next family member, so the identity
    of the window factors through no stage.  All runs are Alice runs.
    """
    family = partition_family(window)
    if len(family) < stages + 2:
        raise TooFewBranches(f"{len(family)} cones cannot separate {stages + 1} stages from the whole")
    if isinstance(window, GflView):
        runs = window.payoff_runs
        flags = [True] * len(runs)
    else:
        g = window.game if hasattr(window, "game") else window
        runs, flags = g.runs, g.flags()
    games = []
    for n in range(stages + 1):
        cones = family[: n + 1]
        keep = [i for i, r in enumerate(runs) if any(r.prefix(len(t)) == t for t in cones)]
        games.append(
            FiniteGame(tuple(runs[i] for i in keep), frozenset(k for k, i in enumerate(keep) if flags[i]))
        )
    links = [_inclusion(a, c) for a, c in zip(games, games[1:])]
    return GameSequence(tuple(games), tuple(links), embedding=True)


def window_game(window) -> FiniteGame:
    if isinstance(window, GflView):
        return window.as_game()
    return window.game if hasattr(window, "game") else window


def wfs_positive_certificate(
    g: FiniteGame, seq: GameSequence, legs: Sequence[GameMorphism], f: GameMorphism
) -> tuple[int, GameMorphism]:
    """A stage ``M`` and ``f'`` with ``legs[M] ∘ f' = f``, built by run lifting.

    ``legs`` must be the colimit legs in last-stage coordinates.  Runs of
    ``g`` are placed one at a time.  A new run is lifted against the placed
    run whose class is closest to its own, which by the ultrametric law
    matches every other split depth as well.
    """
    if not g.is_trivial_for_alice():
        raise NotTrivialForAlice("the positive certificate needs A = all runs")
    last = len(seq.games) - 1
    for n, leg in enumerate(legs):
        if leg.run_map != seq.push(n, last):
            raise ValueError("legs must be the colimit legs of the sequence")
    classes = list(f.run_map)
    stage, chosen = 0, []
    for j, c in enumerate(classes):
        if not chosen:
            stage, first = next(
                (m, r)
                for m in range(len(seq.games))
                for r in sorted(seq.games[m].alice)
                if seq.push(m, last)[r] == c
            )
            chosen.append(first)
            continue
        same = next((i for i in range(j) if classes[i] == c), None)
        if same is not None:
            chosen.append(chosen[same])
            continue
        runs = seq.last.runs
        near = max(range(j), key=lambda i: delta_or_inf(runs[classes[i]], runs[c]))
        try:
            new_stage, y = lift_run_with_delta(seq, stage, chosen[near], c)
        except SameClass:
            raise AssertionError("distinct classes were identified")
        push = seq.push(stage, new_stage)
        chosen = [push[x] for x in chosen] + [y]
        stage = new_stage
    fp = GameMorphism(g, seq.games[stage], tuple(chosen))
    if compose(fp, legs[stage]).run_map != f.run_map:
        raise AssertionError("lifted map does not factor f")
    return stage, fp


def approximating_sequence(g: FiniteGame, rng: random.Random) -> GameSequence:
    """A sequence of injective A-morphisms whose split depths grow to those of ``g``.

    Stage ``k`` has the Δ-matrix of ``g`` capped at a nondecreasing height.
    Stage 0 may carry an extra copy of one run that merges into it at stage 1.
    """
    n = len(g.runs)
    top = max((g.delta(i, j) for i in range(n) for j in range(i + 1, n)), default=0)
    heights = sorted(rng.randint(0, top) for _ in range(rng.randint(0, 3))) + [top]
    games = []
    for h in heights:
        m = [[min(h, g.delta(i, j)) if i != j else float("inf") for j in range(n)] for i in range(n)]
        games.append(game_from_delta(m, g.alice))
    links = [GameMorphism(a, b, tuple(range(n))) for a, b in zip(games, games[1:])]
    if n and rng.random() < 0.5:
        dup = rng.randrange(n)
        runs = games[0].runs + (RunSpec.make(games[0].runs[dup].prefix(len(games[0].runs[dup].stem) + 1), _fresh_move(games[0])),)
        first = FiniteGame(runs, frozenset(range(len(runs))))
        merge = tuple(range(n)) + (dup,)
        if len(games) == 1:
            games.append(games[0])
            links.append(GameMorphism(games[0], games[1], tuple(range(n))))
        links[0] = GameMorphism(first, games[1], merge)
        games[0] = first
    return GameSequence(tuple(games), tuple(links))


def positive_battery(g: FiniteGame, trials: int = 4, seed: int = 0) -> list:
    """Certificates for ``g`` across randomized sequences whose colimit is ``g``."""
    rng = random.Random(seed)
    out = []
    for _ in range(trials):
        seq = approximating_sequence(g, rng)
        view = colimit(seq, 0)
        f = GameMorphism(g, seq.last, tuple(range(len(g.runs))))
        stage, fp = wfs_positive_certificate(g, seq, view.legs, f)
        out.append({"stages": len(seq), "stage": stage, "map": fp.run_map})
    return out


def wfs_verdict(g: FiniteGame, setting: str = "Games_A", stages: int = 5, seed: int = 0) -> SmallnessVerdict:
    """Classify ``g`` and attach a finite certificate either way."""
    if setting not in SETTINGS:
        raise ValueError(f"unknown setting {setting!r}")
    if setting == "Gmes":
        if not g.runs:
            return SmallnessVerdict(setting, True, {"reason": "the empty tree is initial", "stage": 0, "map": ()})
        tree = FiniteGame(g.runs, frozenset())
        ce = bob_counterexample(tree, 0, stages)
        return SmallnessVerdict(
            setting, False, {"counterexample": ce, "run": 0, "factors": not bob_non_factoring(ce, stages)}
        )
    if g.is_trivial_for_alice():
        return SmallnessVerdict(setting, True, {"certificates": positive_battery(g, seed=seed)})
    bob = min(g.bob)
    ce = bob_counterexample(g, bob, stages)
    return SmallnessVerdict(
        setting, False, {"counterexample": ce, "run": bob, "factors": not bob_non_factoring(ce, stages)}
    )
