"""Sequences of finite games, their colimits, and the G_FL window.

A sequence is materialized as a finite list of stages.  Its colimit is
represented in the coordinates of the last materialized stage: two stage
moments are identified exactly when their images there agree, so the class
tree is the tree of the last stage.  An optional generator lets the sequence
be extended on demand; without one the sequence is read as constant after its
last stage.

G_FL is the game whose tree is every finite sequence of naturals and whose
payoff runs are the eventually-zero ones.  :class:`GflView` is a finite window
onto it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import count, product
from typing import Callable, Iterator, Optional, Sequence

from .core import FiniteGame, Moment, RunSpec, delta_or_inf, tree_of, TruncatedTree
from .errors import NotInPayoff, SameClass, SourceTargetMismatch, UnstableWindow
from .morphisms import GameMorphism, classify, compose, identity

# -- eventually-zero runs ----------------------------------------------------


def run_weight(r: RunSpec) -> int:
    return max(len(r.stem), max(r.stem) + 1 if r.stem else 0)


def _c00_of_weight(w: int) -> Iterator[RunSpec]:
    """Eventually-zero runs of weight ``w``, ordered by stem length, then lexicographically."""
    if w == 0:
        yield RunSpec()
        return
    for length in range(1, w + 1):
        for stem in product(range(w), repeat=length):
            if stem[-1] != 0 and max(length, max(stem) + 1) == w:
                yield RunSpec(stem, 0)


def c00_runs() -> Iterator[RunSpec]:
    """Every eventually-zero run exactly once, in a fixed order of type ω.

    Runs are grouped by weight ``max(len(stem), max(stem) + 1)``; each weight
    class is finite.  The order starts ``0^ω, <1>0^ω, <0,1>0^ω, <1,1>0^ω, ...``.
    """
    for w in count():
        yield from _c00_of_weight(w)


def c00_prefix(n: int) -> list[RunSpec]:
    out = []
    for r in c00_runs():
        if len(out) == n:
            break
        out.append(r)
    return out


def c00_index(r: RunSpec) -> int:
    """Position of an eventually-zero run in :func:`c00_runs`."""
    if r.tail != 0:
        raise ValueError(f"{r} is not eventually zero")
    w = run_weight(r)
    before = sum(1 for v in range(w) for _ in _c00_of_weight(v))
    for k, s in enumerate(_c00_of_weight(w)):
        if s == r:
            return before + k
    raise AssertionError("unreachable")


# -- the G_FL window -----------------------------------------------------------


@dataclass(frozen=True)
class GflView:
    """Moments of G_FL of length <= depth over moves < width."""

    depth: int
    width: int

    def moments(self) -> list[Moment]:
        return [t for n in range(self.depth + 1) for t in product(range(self.width), repeat=n)]

    def contains(self, t: Sequence[int]) -> bool:
        return len(t) <= self.depth and all(0 <= x < self.width for x in t)

    @staticmethod
    def is_payoff(r: RunSpec) -> bool:
        return r.tail == 0

    @cached_property
    def payoff_runs(self) -> tuple:
        """Eventually-zero runs whose depth-prefix lies in the window, in c00 order.

        These are exactly ``t⌢0^ω`` for the window moments ``t``.
        """
        runs = {RunSpec.make(t, 0) for t in product(range(self.width), repeat=self.depth)}
        return tuple(sorted(runs, key=lambda r: (run_weight(r), len(r.stem), r.stem)))

    def as_game(self) -> FiniteGame:
        """The finite subgame of G_FL on :attr:`payoff_runs`; its depth-tree is the window."""
        return FiniteGame(self.payoff_runs, frozenset(range(len(self.payoff_runs))))


# -- sequences -------------------------------------------------------------------

Generator = Callable[[int, FiniteGame], "tuple[FiniteGame, GameMorphism]"]


@dataclass(frozen=True)
class GameSequence:
    games: tuple
    links: tuple
    generator: Optional[Generator] = field(default=None, compare=False)
    embedding: bool = False

    def __post_init__(self):
        object.__setattr__(self, "games", tuple(self.games))
        object.__setattr__(self, "links", tuple(self.links))
        if not self.games:
            raise ValueError("a sequence needs at least one stage")
        if len(self.links) != len(self.games) - 1:
            raise ValueError("need exactly one link between consecutive stages")
        for n, link in enumerate(self.links):
            if link.source != self.games[n] or link.target != self.games[n + 1]:
                raise SourceTargetMismatch(f"link {n} does not connect stages {n} and {n + 1}")
        if self.embedding:
            for n, link in enumerate(self.links):
                if not classify(link).is_embedding:
                    raise ValueError(f"link {n} is not an embedding")

    def __len__(self) -> int:
        return len(self.games)

    @property
    def last(self) -> FiniteGame:
        return self.games[-1]

    def extend(self, more: int) -> "GameSequence":
        """Materialize ``more`` further stages with the generator."""
        if self.generator is None:
            raise ValueError("sequence has no generator")
        games, links = list(self.games), list(self.links)
        for _ in range(more):
            g, link = self.generator(len(games), games[-1])
            games.append(g)
            links.append(link)
        return GameSequence(tuple(games), tuple(links), self.generator, embedding=False)._mark(self.embedding)

    def _mark(self, embedding: bool) -> "GameSequence":
        object.__setattr__(self, "embedding", embedding)
        return self

    def link(self, n: int, m: int) -> GameMorphism:
        """The connecting map from stage ``n`` to stage ``m >= n``."""
        return GameMorphism.trusted(self.games[n], self.games[m], self.push(n, m))

    def push(self, n: int, m: int) -> tuple:
        if m == len(self.games) - 1:
            return self.to_last[n]
        run_map = tuple(range(len(self.games[n].runs)))
        for k in range(n, m):
            step = self.links[k].run_map
            run_map = tuple(step[j] for j in run_map)
        return run_map

    @cached_property
    def to_last(self) -> tuple:
        """Run maps from every stage to the last one, built back to front."""
        maps = [tuple(range(len(self.last.runs)))]
        for link in reversed(self.links):
            after = maps[-1]
            maps.append(tuple(after[j] for j in link.run_map))
        return tuple(reversed(maps))

    def is_trivial_for_alice(self) -> bool:
        return all(g.is_trivial_for_alice() for g in self.games)


def constant_sequence(g: FiniteGame, stages: int = 1) -> GameSequence:
    return GameSequence((g,) * stages, (identity(g),) * (stages - 1))


def chain_of_runs(runs: Sequence[RunSpec], sizes: Sequence[int], flags=None) -> GameSequence:
    """Stages are the first ``sizes[n]`` runs; links are inclusions."""
    runs = tuple(runs)
    flags = tuple(flags) if flags is not None else (True,) * len(runs)
    games = [
        FiniteGame(runs[:k], frozenset(i for i in range(k) if flags[i])) for k in sizes
    ]
    links = [
        GameMorphism.trusted(a, b, tuple(range(len(a.runs)))) for a, b in zip(games, games[1:])
    ]
    seq = GameSequence(tuple(games), tuple(links))
    return seq._mark(True)


def _example_generator(n: int, prev: FiniteGame):
    runs = prev.runs + (c00_prefix(n + 1)[-1],)
    g = FiniteGame(runs, frozenset(range(len(runs))))
    return g, GameMorphism.trusted(prev, g, tuple(range(len(prev.runs))))


def example_chain(stages: int) -> GameSequence:
    """Stage n is the all-Alice game on the first n+1 eventually-zero runs.

    Its colimit in the category of A-morphisms is G_FL; the Bob run 1^ω is a
    run of the colimit that no stage contains.
    """
    runs = c00_prefix(stages)
    seq = chain_of_runs(runs, range(1, stages + 1))
    object.__setattr__(seq, "generator", _example_generator)
    return seq


def example_chain_covering(view: GflView) -> GameSequence:
    """The shortest Example chain whose last stage contains every window payoff run."""
    last = max(c00_index(r) for r in view.payoff_runs)
    return example_chain(last + 1)


# -- cocones -------------------------------------------------------------------------


@dataclass(frozen=True)
class Cocone:
    """Legs given by the image run of every stage run.

    ``target`` is either a finite game (images are among its runs) or a
    :class:`GflView` (images are arbitrary runs of G_FL).
    """

    target: object
    images: tuple

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(tuple(leg) for leg in self.images))

    @classmethod
    def from_morphisms(cls, legs: Sequence[GameMorphism]) -> "Cocone":
        target = legs[0].target
        return cls(target, tuple(tuple(target.runs[j] for j in m.run_map) for m in legs))

    def is_payoff(self, r: RunSpec) -> bool:
        if isinstance(self.target, GflView):
            return r.tail == 0
        return self.target.is_alice(self.target.index(r))

    def tracked_payoff(self) -> tuple:
        if isinstance(self.target, GflView):
            return self.target.payoff_runs
        return tuple(self.target.runs[i] for i in sorted(self.target.alice))

    def window_moments(self, depth: int) -> frozenset:
        if isinstance(self.target, GflView):
            return frozenset(self.target.moments())
        return tree_of(self.target, depth).moments

    @cached_property
    def preimages(self) -> dict:
        """image run -> list of (stage, run index)."""
        out: dict = {}
        for n, leg in enumerate(self.images):
            for j, r in enumerate(leg):
                out.setdefault(r, []).append((n, j))
        return out

    def commutes_with(self, seq: GameSequence) -> bool:
        for n, link in enumerate(seq.links):
            if tuple(self.images[n + 1][j] for j in link.run_map) != self.images[n]:
                return False
        return True


def inclusion_cocone(seq: GameSequence, target) -> Cocone:
    """Every stage run maps to itself; the target must contain them."""
    return Cocone(target, tuple(g.runs for g in seq.games))


# -- colimits --------------------------------------------------------------------------


@dataclass(frozen=True)
class ColimitView:
    depth: int
    game: FiniteGame
    tree: TruncatedTree
    legs: tuple
    payoff_runs: tuple

    @property
    def moments(self) -> frozenset:
        return self.tree.moments

    def leg_moment(self, n: int, t: Moment) -> Moment:
        """Class of the stage-``n`` moment ``t``."""
        from .morphisms import moment_image

        return moment_image(self.legs[n], t)

    def class_of(self, n: int, run: int) -> int:
        return self.legs[n](run)

    def cocone(self) -> Cocone:
        return Cocone.from_morphisms(self.legs)


def _check_stable(seq: GameSequence, depth: int) -> None:
    if seq.generator is None or len(seq.links) == 0:
        return
    link = seq.links[-1]
    src, tgt = link.source, link.target
    horizon = max((len(r.stem) for r in src.runs), default=0) + 1
    for k in range(1, min(depth, horizon) + 1):
        seen: dict = {}
        for i, r in enumerate(src.runs):
            key = tgt.runs[link(i)].prefix(k)
            p = r.prefix(k)
            if seen.setdefault(key, p) != p:
                raise UnstableWindow(
                    f"the last link still identifies moments {seen[key]} and {p} of length {k}"
                )


def colimit(seq: GameSequence, depth: int) -> ColimitView:
    """Depth-``depth`` window of the colimit, in last-stage coordinates."""
    _check_stable(seq, depth)
    last = len(seq.games) - 1
    legs = tuple(GameMorphism.trusted(g, seq.last, seq.push(n, last)) for n, g in enumerate(seq.games))
    reps: dict[int, tuple] = {}
    for n, g in enumerate(seq.games):
        for j in sorted(g.alice):
            reps.setdefault(legs[n](j), (n, j))
    payoff = tuple(reps[c] for c in sorted(reps))
    return ColimitView(depth, seq.last, tree_of(seq.last, depth), legs, payoff)


def colimit_game(seq: GameSequence) -> tuple[FiniteGame, list[GameMorphism]]:
    """The materialized colimit object with its cocone of A-morphisms."""
    view = colimit(seq, 0)
    legs = [GameMorphism(g, view.game, view.legs[n].run_map) for n, g in enumerate(seq.games)]
    alice_classes = {view.legs[n](j) for n, j in view.payoff_runs}
    game = view.game
    if alice_classes != set(game.alice):
        game = FiniteGame(game.runs, frozenset(alice_classes))
        legs = [GameMorphism(m.source, game, m.run_map) for m in legs]
    return game, legs


def new_branches(seq: GameSequence, depth: int) -> list[Moment]:
    """Depth-``depth`` class moments carrying a colimit run with no stage preimage.

    A sequence without a generator is eventually constant, so its colimit is
    its last stage and there are none.  Otherwise a candidate run
    ``R = t⌢c^ω`` through a last-stage moment ``t`` is reported when ``R`` is
    not a stage run and ``t`` was not yet present at stage 0: the tree grows
    along ``R`` while no stage ever contains it.  This is a finite-horizon
    witness, not a decision procedure.
    """
    colimit(seq, depth)
    if seq.generator is None:
        return []
    last = seq.last
    stage_runs = set(last.runs)
    first = tree_of(seq.games[0], depth).moments
    tails = sorted(last.moves() | {0, 1})
    found = []
    for t in sorted(tree_of(last, depth).level(depth)):
        if t in first:
            continue
        if any(RunSpec.make(t, c) not in stage_runs for c in tails):
            found.append(t)
    return found


def lift_run_with_delta(seq: GameSequence, k: int, x: int, target) -> tuple[int, int]:
    """Find ``(M, y)`` with ``y`` an Alice run of stage ``M`` in class ``target``
    and ``Δ(y, image of x at M) == Δ(target, class of x)``.

    ``target`` is a class label (a last-stage run index) or a ``(stage, run)``
    representative.  The search follows the lifting argument: first a stage
    where the target class has an Alice preimage, then the first later stage
    where the pushed-forward pair splits at the right depth.
    """
    last = len(seq.games) - 1
    if isinstance(target, tuple):
        n0, r0 = target
        target = seq.push(n0, last)[r0]
    if not seq.games[k].is_alice(x):
        raise NotInPayoff(f"run {x} is not an Alice run of stage {k}")
    if not seq.last.is_alice(target):
        raise NotInPayoff(f"class {target} is not a payoff class")
    x_class = seq.push(k, last)[x]
    if x_class == target:
        raise SameClass("target is the class of x")
    want = delta_or_inf(seq.last.runs[target], seq.last.runs[x_class])
    for m in range(k, last + 1):
        to_last = seq.push(m, last)
        cands = [r for r in sorted(seq.games[m].alice) if to_last[r] == target]
        if not cands:
            continue
        r_prime = cands[0]
        for big in range(m, last + 1):
            y = seq.push(m, big)[r_prime]
            xm = seq.push(k, big)[x]
            runs = seq.games[big].runs
            if y != xm and delta_or_inf(runs[y], runs[xm]) == want:
                return big, y
        break
    raise UnstableWindow("no materialized stage realizes the required split depth")


def is_jointly_e_star(cocone: Cocone, depth: int, seq: GameSequence | None = None) -> bool:
    """Legs cover every window moment, and every tracked payoff run is the
    image of a stage Alice run.  ``seq`` supplies stage payoffs; without it
    every preimage counts."""
    return not jointly_e_star_gaps(cocone, depth, seq)


def jointly_e_star_gaps(cocone: Cocone, depth: int, seq: GameSequence | None = None) -> dict:
    covered = set()
    for leg in cocone.images:
        for r in leg:
            for k in range(depth + 1):
                covered.add(r.prefix(k))
    missing_moments = sorted(cocone.window_moments(depth) - covered)
    missing_runs = []
    for r in cocone.tracked_payoff():
        pres = cocone.preimages.get(r, [])
        if seq is not None:
            pres = [(n, j) for n, j in pres if seq.games[n].is_alice(j)]
        if not pres:
            missing_runs.append(r)
    gaps = {}
    if missing_moments:
        gaps["moments"] = missing_moments
    if missing_runs:
        gaps["payoff_runs"] = missing_runs
    return gaps


def factor_through(
    seq: GameSequence, cocone: Cocone, f, search_bound: int | None = None
) -> tuple[int, GameMorphism] | None:
    """Some stage ``n <= search_bound`` and A-morphism ``f'`` with ``leg_n ∘ f' = f``.

    ``f`` is a :class:`GameMorphism` into a finite target or any object with
    ``source`` and ``image`` (a tuple of runs), such as a G_FL embedding.
    """
    source = f.source
    if isinstance(f, GameMorphism):
        image = tuple(f.target.runs[j] for j in f.run_map)
    else:
        image = tuple(f.image)
    bound = len(seq.games) - 1 if search_bound is None else min(search_bound, len(seq.games) - 1)
    per_run = [cocone.preimages.get(r, []) for r in image]
    stages = sorted(set.intersection(*(set(n for n, _ in p) for p in per_run))) if per_run else range(bound + 1)
    for n in stages:
        if n > bound:
            break
        stage = seq.games[n]
        options = [[j for m, j in p if m == n and (stage.is_alice(j) or not source.is_alice(i))]
                   for i, p in enumerate(per_run)]
        found = _search_factor(source, stage, options)
        if found is not None:
            return n, GameMorphism(source, stage, found)
    return None


def _search_factor(source: FiniteGame, stage: FiniteGame, options: list[list[int]]):
    assignment: list[int] = []

    def rec(i: int):
        if i == len(options):
            return tuple(assignment)
        for j in options[i]:
            r = stage.runs[j]
            if all(
                delta_or_inf(r, stage.runs[assignment[k]]) >= source.delta(i, k) for k in range(i)
            ):
                assignment.append(j)
                out = rec(i + 1)
                if out is not None:
                    return out
                assignment.pop()
        return None

    return rec(0)
