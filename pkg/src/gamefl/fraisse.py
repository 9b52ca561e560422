"""Embeddings into G_FL, the Fraïssé sequence of finite games, and homogeneity checks.

An embedding of a finite game into G_FL is stored as the image run of each
source run.  It must preserve every Δ exactly and send Alice runs to
eventually-zero runs and Bob runs to the rest.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import groupby
from typing import Iterable, Sequence

from .constructions import Span, coproduct, pushout
from .core import FiniteGame, Moment, RunSpec, same_delta_profile
from .enumeration import canonical_games
from .errors import InvalidEmbedding, NotNatural, NotSubgame, WindowTooSmall
from .limits import (
    Cocone,
    GameSequence,
    GflView,
    factor_through,
    is_jointly_e_star,
    jointly_e_star_gaps,
    run_weight,
)
from .morphisms import (
    GameMorphism,
    canonical_form_with_map,
    classify,
    compose,
    first_embedding,
    iter_embeddings,
)

# -- embeddings into G_FL ----------------------------------------------------------


@dataclass(frozen=True)
class GflEmbedding:
    source: FiniteGame
    image: tuple

    def __post_init__(self):
        object.__setattr__(self, "image", tuple(self.image))
        problem = _embedding_problem(self.source.runs, self.source.flags(), self.image)
        if problem:
            raise InvalidEmbedding(problem)

    def __call__(self, i: int) -> RunSpec:
        return self.image[i]

    def moment(self, t: Moment) -> Moment:
        for r, u in zip(self.source.runs, self.image):
            if r.prefix(len(t)) == tuple(t):
                return u.prefix(len(t))
        raise ValueError(f"{t} is not a moment of the source")


def _embedding_problem(runs, flags, image) -> str | None:
    if len(image) != len(runs):
        return "need one image run per source run"
    if len(set(image)) != len(image):
        return "image runs are not distinct"
    if not same_delta_profile(runs, image):
        return "Δ is not preserved"
    for i, (flag, u) in enumerate(zip(flags, image)):
        if flag != (u.tail == 0):
            return f"run {i} breaks payoff-iff: alice={flag}, image {u}"
    return None


def empty_embedding() -> GflEmbedding:
    return GflEmbedding(FiniteGame(), ())


def _extend_images(runs: Sequence[RunSpec], flags: Sequence[bool], fixed: dict) -> list:
    """Images for every run, keeping ``fixed`` and placing the rest by the extension rule.

    At a moment with several runs the children are visited in move order.
    A child that contains an old run keeps the old image move.  A new child
    takes the least index not yet used by its siblings, old or new.  A moment
    carrying a single new run continues with 0 for Alice and 1 for Bob.
    """
    out: list = [None] * len(runs)

    def rec(members: list, level: int, prefix: tuple):
        if len(members) == 1:
            i = members[0]
            out[i] = fixed[i] if i in fixed else RunSpec.make(prefix, 0 if flags[i] else 1)
            return
        members = sorted(members, key=lambda i: runs[i].at(level))
        children = [list(g) for _, g in groupby(members, key=lambda i: runs[i].at(level))]
        moves: list = [None] * len(children)
        used = set()
        for c, child in enumerate(children):
            old = next((i for i in child if i in fixed), None)
            if old is not None:
                moves[c] = fixed[old].at(level)
                used.add(moves[c])
        k = 0
        for c in range(len(children)):
            if moves[c] is None:
                while k in used:
                    k += 1
                moves[c] = k
                used.add(k)
        for child, x in zip(children, moves):
            rec(child, level + 1, prefix + (x,))

    if runs:
        rec(list(range(len(runs))), 0, ())
    return out


def extend_embedding(g: FiniteGame, g_sup: FiniteGame, f: GflEmbedding) -> GflEmbedding:
    """Extend ``f: g -> G_FL`` to the larger game ``g_sup`` containing ``g``."""
    if f.source != g:
        raise InvalidEmbedding("f is not an embedding of g")
    index = {r: k for k, r in enumerate(g_sup.runs)}
    fixed = {}
    for i, r in enumerate(g.runs):
        if r not in index:
            raise NotSubgame(f"run {r} of g is missing from the larger game")
        if g.is_alice(i) != g_sup.is_alice(index[r]):
            raise NotSubgame(f"run {r} changes payoff in the larger game")
        fixed[index[r]] = f.image[i]
    return GflEmbedding(g_sup, _extend_images(g_sup.runs, g_sup.flags(), fixed))


def extend_along(link: GameMorphism, f: GflEmbedding) -> GflEmbedding:
    """Extend ``f`` from the source of the embedding ``link`` to its target."""
    if not classify(link).is_embedding:
        raise NotSubgame("the link is not an embedding")
    fixed = {link(i): u for i, u in enumerate(f.image)}
    tgt = link.target
    return GflEmbedding(tgt, _extend_images(tgt.runs, tgt.flags(), fixed))


def gap_violations(ext: GflEmbedding, base: Iterable[RunSpec] = (), branching_only: bool = True) -> list:
    """New image moments ``u⌢n`` whose siblings miss some index ``k < n``.

    ``base`` is the image of the embedding that was extended.  With
    ``branching_only`` moments carried by a single run are skipped, since the
    forced 0/1 continuation there cannot be gap-free for Bob runs.
    """
    horizon = max((len(u.stem) for u in ext.image), default=0) + 1
    old = {u.prefix(k) for u in base for k in range(horizon + 1)}
    bad = []
    for level in range(horizon):
        parents: dict = {}
        for u in ext.image:
            parents.setdefault(u.prefix(level), set()).add(u)
        for p, members in sorted(parents.items()):
            if branching_only and len(members) == 1:
                continue
            moves = {u.at(level) for u in members}
            for n in sorted(moves):
                if p + (n,) not in old and any(k not in moves for k in range(n)):
                    bad.append((p, n))
    return bad


# -- Fraïssé sequence ------------------------------------------------------------------


def _embedding_list(K: list) -> list:
    """All embeddings between members of ``K``, dovetailed by ``max(i, j)``."""
    out = []
    for s in range(len(K)):
        pairs = [(i, s) for i in range(s + 1)] + [(s, j) for j in range(s)]
        for i, j in pairs:
            out.extend(iter_embeddings(K[i], K[j]))
    return out


def fraisse_sequence(steps: int, enum_bound: int, trivial_for_alice: bool = False) -> GameSequence:
    """The first ``steps`` stages of a Fraïssé sequence over small canonical games.

    The embeddings between canonical games with at most ``enum_bound`` runs
    and Δ at most ``enum_bound`` are listed once and then reused cyclically.
    Step ``n`` uses embedding ``f_n: G' -> G``.  When ``G'`` is an earlier
    stage ``F(k)``, the next stage is the pushout of ``F(n) <- F(k) -> G``.
    Otherwise ``G'`` is first added to ``F(n)`` as a coproduct summand and the
    pushout is taken along that summand.  Every stage is kept canonical so
    that the comparison with ``G'`` is plain equality.  With
    ``trivial_for_alice`` only games Alice wins outright are used.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    K = canonical_games(enum_bound, enum_bound, include_empty=True)
    if trivial_for_alice:
        K = [g for g in K if g.is_trivial_for_alice()]
    embeddings = _embedding_list(K)
    games = [embeddings[0].source]
    links: list = []
    used: dict = {}
    for n in range(steps - 1):
        f = embeddings[n % len(embeddings)]
        current = games[-1]
        ks = [k for k, h in enumerate(games) if h == f.source]
        if ks:
            done = used.setdefault(n % len(embeddings), set())
            k = next((k for k in ks if k not in done), ks[-1])
            done.add(k)
            to_now = GameMorphism.trusted(games[k], current, _push(links, len(games[k].runs), k, n))
            amalgam = pushout(Span(f.source, to_now, f))
            nxt, link = amalgam.target, amalgam.left_inj
        else:
            total, (i, i_prime) = coproduct([current, f.source])
            amalgam = pushout(Span(f.source, i_prime, f))
            nxt, link = amalgam.target, compose(i, amalgam.left_inj)
        canon, iso = canonical_form_with_map(nxt)
        games.append(canon)
        links.append(compose(link, iso))
    return GameSequence(tuple(games), tuple(links), embedding=True)


def _push(links, size: int, n: int, m: int) -> tuple:
    run_map = tuple(range(size))
    for k in range(n, m):
        run_map = tuple(links[k].run_map[j] for j in run_map)
    return run_map


@dataclass
class FraisseReport:
    u_failures: list = field(default_factory=list)
    a_failures: list = field(default_factory=list)
    a_checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.u_failures and not self.a_failures


def verify_fraisse(
    seq: GameSequence, u_bound: int, a_bound: int, stages=None, trivial_for_alice: bool = False
) -> FraisseReport:
    """Brute-force (U) and (A) on the materialized stages.

    (U): every canonical game with at most ``u_bound`` runs and Δ at most
    ``u_bound`` embeds into the last stage, hence into some stage.
    (A): for stage ``n`` in ``stages`` (default: all) and every embedding
    ``f: F(n) -> x`` into a canonical game within ``a_bound``, some later
    stage ``F(m)`` has ``g: x -> F(m)`` with ``g ∘ f = F_n^m``.
    With ``trivial_for_alice`` both checks range over games Alice wins outright.
    """

    def games(bound):
        out = canonical_games(bound, bound, include_empty=True)
        return [g for g in out if g.is_trivial_for_alice()] if trivial_for_alice else out

    report = FraisseReport()
    for x in games(u_bound):
        if first_embedding(x, seq.last) is None:
            report.u_failures.append(x)
    targets = games(a_bound)
    for n in stages if stages is not None else range(len(seq)):
        stage = seq.games[n]
        for x in targets:
            for f in iter_embeddings(stage, x):
                report.a_checked += 1
                if not any(
                    first_embedding(x, seq.games[m], {f(i): j for i, j in enumerate(seq.push(n, m))})
                    for m in range(n, len(seq))
                ):
                    report.a_failures.append((n, x, f.run_map))
    return report


def canonical_cocone_to_gfl(seq: GameSequence) -> list[GflEmbedding]:
    """Legs into G_FL built by extending the empty embedding along the links."""
    first = seq.games[0]
    legs = [extend_embedding(FiniteGame(), first, empty_embedding())]
    for link in seq.links:
        legs.append(extend_along(link, legs[-1]))
    return legs


def legs_cocone(legs: Sequence[GflEmbedding], view: GflView) -> Cocone:
    return Cocone(view, tuple(leg.image for leg in legs))


# -- back-and-forth ------------------------------------------------------------------------


@dataclass(frozen=True)
class PartialAutomorphism:
    depth: int
    width: int
    forward: dict
    backward: dict
    tracked_runs: tuple

    @classmethod
    def identity(cls, depth: int, width: int) -> "PartialAutomorphism":
        view = GflView(depth, width)
        ident = {t: t for t in view.moments()}
        return cls(depth, width, ident, dict(ident), tuple((r, r) for r in view.payoff_runs))

    def __call__(self, t: Moment) -> Moment:
        return self.forward[tuple(t)]

    @property
    def run_map(self) -> dict:
        return dict(self.tracked_runs)

    def is_identity(self) -> bool:
        return all(t == u for t, u in self.forward.items())

    def is_levelwise_bijection(self) -> bool:
        moments = set(GflView(self.depth, self.width).moments())
        if set(self.forward) != moments or set(self.forward.values()) != moments:
            return False
        for t, u in self.forward.items():
            if len(u) != len(t) or self.backward[u] != t:
                return False
            if t and self.forward[t[:-1]] != u[:-1]:
                return False
        return True

    def preserves_payoff(self) -> bool:
        return all((r.tail == 0) == (u.tail == 0) for r, u in self.tracked_runs)


def _weight_blocks(runs: Sequence[RunSpec]) -> list[list[RunSpec]]:
    return [list(g) for _, g in groupby(runs, key=run_weight)]


def _grow(phi: dict, inv: dict, new: list) -> None:
    """Extend the partial isometry ``phi`` to the runs in ``new``."""
    new = [r for r in new if r not in phi]
    if not new:
        return
    dom = list(phi) + new
    flags = [r.tail == 0 for r in dom]
    fixed = {i: phi[r] for i, r in enumerate(dom[: len(phi)])}
    images = _extend_images(dom, flags, fixed)
    for r, u in zip(new, images[len(phi):]):
        phi[r] = u
        inv[u] = r


def back_and_forth(a: FiniteGame, f: GflEmbedding, g: GflEmbedding, depth: int, width: int) -> PartialAutomorphism:
    """A partial automorphism ``u`` of G_FL with ``u ∘ f = g`` on the window.

    ``u`` starts as ``f(R) -> g(R)`` and is grown by alternately adding the
    next block of eventually-zero runs to its domain and to its range.  Each
    block is one weight class of the enumeration used by the Example chain.
    Both directions are extended with the same rule as
    :func:`extend_embedding`.
    """
    if f.source != a or g.source != a:
        raise InvalidEmbedding("f and g must both embed a")
    view = GflView(depth, width)
    phi = dict(zip(f.image, g.image))
    inv = dict(zip(g.image, f.image))
    for block in _weight_blocks(view.payoff_runs):
        _grow(phi, inv, block)
        _grow(inv, phi, block)
    forward, backward = {}, {}
    for t in view.moments():
        r = RunSpec.make(t, 0)
        u, v = phi[r].prefix(len(t)), inv[r].prefix(len(t))
        if not view.contains(u) or not view.contains(v):
            raise WindowTooSmall(f"moment {t} needs moves outside width {width}")
        forward[t], backward[t] = u, v
    return PartialAutomorphism(depth, width, forward, backward, tuple(phi.items()))


# -- matching pairs and tight squeeze ---------------------------------------------------


@dataclass
class Report:
    """Per-condition outcome with witnesses for failures."""

    results: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def record(self, name: str, ok: bool, witness=None) -> None:
        self.results[name] = ok
        if not ok:
            self.witnesses[name] = witness

    @property
    def ok(self) -> bool:
        return all(self.results.values())


def window_pool(depth: int, width: int) -> FiniteGame:
    """Runs ``t⌢c^ω`` with ``t`` a length-``depth`` window moment and ``c < width``.

    The Alice runs are the eventually-zero ones.
    """
    runs = sorted(
        {RunSpec.make(t, c) for t in GflView(depth, width).moments() if len(t) == depth for c in range(width)},
        key=lambda r: (r.tail, run_weight(r), len(r.stem), r.stem),
    )
    return FiniteGame(tuple(runs), frozenset(i for i, r in enumerate(runs) if r.tail == 0))


def verify_matching(
    seq: GameSequence,
    legs: Sequence[GflEmbedding],
    f1_bound: int,
    depth: int,
    width: int = 3,
    autos: Sequence[PartialAutomorphism] = (),
) -> Report:
    """(F1), (F2), (H) and (BF) at desk scale.

    (F1) ranges over embeddings of canonical games with at most ``f1_bound``
    runs into :func:`window_pool`; the source games are restricted to the
    trivial-for-Alice ones when every stage is.  (H) checks the given
    automorphisms; (BF) runs back-and-forth on pairs drawn from the legs.
    """
    report = Report()
    view = GflView(depth, width)
    cocone = legs_cocone(legs, view)
    pool = window_pool(depth, width)
    sources = [g for g in canonical_games(f1_bound, depth) if g.is_trivial_for_alice() or not seq.is_trivial_for_alice()]
    failure = None
    for g in sources:
        for e in iter_embeddings(g, pool):
            image = tuple(pool.runs[j] for j in e.run_map)
            if factor_through(seq, cocone, _Into(g, image)) is None:
                failure = (g, image)
                break
        if failure:
            break
    report.record("F1", failure is None, failure)

    monic = [n for n, leg in enumerate(legs) if len(set(leg.image)) != len(leg.image)]
    report.record("F2", not monic, monic)

    moved = []
    for u in autos:
        if u.is_identity():
            continue
        if not any(u(r.prefix(depth)) != r.prefix(depth) for leg in legs for r in leg.image if view.contains(r.prefix(depth))):
            moved.append(u)
    report.record("H", not moved, moved)

    failures = []
    last = legs[-1]
    for n in (0, len(legs) - 1):
        for i in range(min(2, len(seq.games[n].runs))):
            a = FiniteGame((seq.games[n].runs[i],), frozenset({0} if seq.games[n].is_alice(i) else ()))
            f = GflEmbedding(a, (legs[n].image[i],))
            for j in range(len(last.image)):
                if seq.last.is_alice(j) != seq.games[n].is_alice(i):
                    continue
                g = GflEmbedding(a, (last.image[j],))
                if not all(view.contains(x.image[0].prefix(depth)) for x in (f, g)):
                    continue
                try:
                    u = back_and_forth(a, f, g, depth, width)
                except WindowTooSmall as exc:
                    failures.append((f.image, g.image, str(exc)))
                    continue
                if u(f.image[0].prefix(depth)) != g.image[0].prefix(depth):
                    failures.append((f.image, g.image, "u∘f != g"))
                break
    report.record("BF", not failures, failures)
    return report


@dataclass(frozen=True)
class _Into:
    source: FiniteGame
    image: tuple


def verify_tight_squeeze(
    s_prime: GameSequence,
    s: GameSequence,
    theta: Sequence[GameMorphism],
    legs: Cocone,
    depth: int,
    u_bound: int = 1,
    a_bound: int = 1,
) -> Report:
    """Both tight-squeeze conditions for ``θ: s' -> s`` and a cocone on ``s``.

    Colimit cocones are recognized through joint coverage: injective legs
    whose images cover the window moments and payoff runs.  When ``θ`` or
    the legs are not embeddings, or ``legs ∘ θ`` is not such a cocone, the
    hypotheses fail and the report says the check is vacuous.
    """
    n = min(len(s_prime), len(s), len(theta))
    for k in range(n - 1):
        left = compose(s_prime.links[k], theta[k + 1]).run_map
        right = compose(theta[k], s.links[k]).run_map
        if left != right:
            raise NotNatural(f"square {k} does not commute")
    report = Report()
    composite = Cocone(legs.target, tuple(tuple(legs.images[k][theta[k](i)] for i in range(len(s_prime.games[k].runs))) for k in range(n)))
    theta_ok = all(classify(t).is_embedding for t in theta[:n])
    legs_monic = all(len(set(leg)) == len(leg) for leg in legs.images[:n])
    composite_colimit = is_jointly_e_star(composite, depth, _prefix(s_prime, n))
    if not (theta_ok and legs_monic and composite_colimit):
        reasons = []
        if not theta_ok:
            reasons.append("θ is not levelwise an embedding")
        if not legs_monic:
            reasons.append("the legs are not injective")
        if not composite_colimit:
            reasons.append("legs∘θ is not jointly E*")
        report.notes.append("vacuous: " + "; ".join(reasons))
        report.results["vacuous"] = True
        return report
    gaps = jointly_e_star_gaps(Cocone(legs.target, legs.images[:n]), depth, _prefix(s, n))
    report.record("i", not gaps, gaps)
    trivial = s_prime.is_trivial_for_alice()
    sp = verify_fraisse(_prefix(s_prime, n), u_bound, a_bound, trivial_for_alice=trivial)
    if sp.ok:
        sr = verify_fraisse(_prefix(s, n), u_bound, a_bound, trivial_for_alice=trivial)
        report.record("ii", sr.ok, (sr.u_failures, sr.a_failures))
    else:
        report.notes.append("s' fails the Fraïssé checks, (ii) is vacuous")
        report.results["ii"] = True
    return report


def _prefix(seq: GameSequence, n: int) -> GameSequence:
    if n == len(seq):
        return seq
    return GameSequence(seq.games[:n], seq.links[: n - 1])
