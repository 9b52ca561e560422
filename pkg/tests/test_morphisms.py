import itertools

import pytest

from conftest import ALICE_1, BOB_1, R, game, ultrametric_matrices
from gamefl.core import FiniteGame, game_from_delta, tree_of
from gamefl.enumeration import canonical_games
from gamefl.errors import MomentNotInTree, NotChronological, SourceTargetMismatch
from gamefl.morphisms import (
    GameMorphism,
    are_isomorphic,
    canonical_code,
    canonical_form,
    canonical_form_with_map,
    classify,
    compose,
    enumerate_embeddings,
    identity,
    iter_a_morphisms,
    moment_image,
)

AA0 = game([R(), R(1)], {0, 1})


def brute_embeddings(g1, g2):
    """Every injection kept if it preserves Δ and payoff exactly."""
    out = []
    for perm in itertools.permutations(range(len(g2.runs)), len(g1.runs)):
        if all(g1.is_alice(i) == g2.is_alice(perm[i]) for i in range(len(g1.runs))) and all(
            g1.delta(i, j) == g2.delta(perm[i], perm[j])
            for i, j in itertools.combinations(range(len(g1.runs)), 2)
        ):
            out.append(perm)
    return sorted(out)


def test_classify_identity():
    for g in canonical_games(3, 2):
        k = classify(identity(g))
        assert k.is_A and k.is_B and k.is_injective and k.is_embedding


def test_classify_collapse_and_mixed():
    k = classify(GameMorphism(AA0, ALICE_1, (0, 0)))
    assert k.is_A and not k.is_injective and not k.is_embedding
    k = classify(GameMorphism(ALICE_1, BOB_1, (0,)))
    assert not k.is_A and k.is_B


def test_non_expanding_required():
    src = game([R(), R(0, 1)], {})  # Δ = 1
    tgt = game([R(), R(1)], {})  # Δ = 0
    with pytest.raises(NotChronological):
        GameMorphism(src, tgt, (0, 1))


def test_moment_image_examples():
    g = game([R(0, 0), R(0, 1)], {0})
    assert moment_image(identity(g), ()) == ()
    assert moment_image(identity(g), (0, 1)) == (0, 1)
    src = game([R(), R(0, 1)], {})
    tgt = game([R(2, 5), R(2, 7)], {})
    swap = GameMorphism(src, tgt, (1, 0))
    assert moment_image(swap, (0,)) == (2,)
    assert moment_image(swap, (0, 1)) == (2, 5)
    with pytest.raises(MomentNotInTree):
        moment_image(swap, (3,))


def test_enumerate_embeddings_examples():
    assert len(enumerate_embeddings(ALICE_1, ALICE_1)) == 1
    assert enumerate_embeddings(ALICE_1, BOB_1) == []
    assert sorted(m.run_map for m in enumerate_embeddings(AA0, AA0)) == [(0, 1), (1, 0)]


SMALL = canonical_games(3, 2) + [FiniteGame()]


@pytest.mark.parametrize("g1", SMALL[::3])
def test_enumerate_embeddings_against_brute_force(g1):
    for g2 in canonical_games(3, 2):
        assert sorted(m.run_map for m in enumerate_embeddings(g1, g2)) == brute_embeddings(g1, g2)


def test_embedding_moment_maps_injective_and_chronological():
    for g1 in canonical_games(2, 2):
        for g2 in canonical_games(3, 3)[::4]:
            for m in enumerate_embeddings(g1, g2):
                assert classify(m).is_injective
                moments = tree_of(g1, 8).moments
                images = {t: moment_image(m, t) for t in moments}
                assert len(set(images.values())) == len(images)
                for t, u in images.items():
                    assert len(u) == len(t)
                    assert all(images[t[:k]] == u[:k] for k in range(len(t)))


def test_embeddings_closed_under_automorphisms():
    for g in canonical_games(3, 2):
        autos = enumerate_embeddings(g, g)
        assert identity(g) in autos
        maps = {m.run_map for m in autos}
        for a, b in itertools.product(autos, repeat=2):
            assert compose(a, b).run_map in maps


def test_isomorphism_examples():
    g = game([R(1, 2), R(1, 3), R(0)], {0})
    assert are_isomorphic(g, g) is not None
    assert are_isomorphic(ALICE_1, BOB_1) is None
    h = game([R(4), R(9, 1), R(9, 2)], {2})
    assert are_isomorphic(g, h) is not None


def test_canonical_form_examples():
    g = game([R(1, 2), R(1, 3), R(0)], {0})
    assert canonical_form(canonical_form(g)) == canonical_form(g)
    relabeled = game([R(8, tail=4), R(3, 9), R(3, 7)], {2})
    assert canonical_form(relabeled) == canonical_form(g)
    assert canonical_form(game([R(7, tail=3)], {0})) == game([R()], {0})


def test_canonical_map_is_isomorphism():
    for g in canonical_games(3, 3)[::3] + [game([R(1, 2), R(1, 3), R(0)], {0})]:
        canon, iso = canonical_form_with_map(g)
        assert classify(iso).is_embedding and len(canon.runs) == len(g.runs)


def test_canonical_form_complete_invariant():
    # Brute-force every Δ-matrix and payoff on <= 4 runs with Δ <= 4.
    groups = {}
    for n in range(1, 5):
        for m in ultrametric_matrices(n, 4):
            for mask in range(1 << n):
                g = game_from_delta(m, [i for i in range(n) if mask >> i & 1])
                groups.setdefault(canonical_code(g), []).append(g)
    for members in groups.values():
        assert all(are_isomorphic(members[0], h) is not None for h in members[1:])
    reps = [members[0] for members in groups.values()]
    for a, b in itertools.combinations(reps, 2):
        assert are_isomorphic(a, b) is None
    assert len(groups) == len(canonical_games(4, 4))


def test_compose_examples():
    m = GameMorphism(AA0, ALICE_1, (0, 0))
    assert compose(identity(AA0), m) == m
    swap = GameMorphism(AA0, AA0, (1, 0))
    assert compose(swap, swap) == identity(AA0)
    g = canonical_games(3, 2)[-1]
    for e1 in enumerate_embeddings(AA0, g)[:3]:
        for e2 in enumerate_embeddings(g, g)[:3]:
            assert classify(compose(e1, e2)).is_embedding
    with pytest.raises(SourceTargetMismatch):
        compose(m, m)


def test_a_morphisms_compose_to_a_morphisms():
    games = canonical_games(2, 1)
    for g1, g2, g3 in itertools.product(games, repeat=3):
        for a in iter_a_morphisms(g1, g2):
            for b in iter_a_morphisms(g2, g3):
                assert classify(compose(a, b)).is_A


def test_empty_game_is_initial():
    for g in canonical_games(2, 1):
        assert [m.run_map for m in iter_a_morphisms(FiniteGame(), g)] == [()]
