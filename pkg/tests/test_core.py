import itertools

import pytest
from hypothesis import given, strategies as st

from conftest import R, brute_delta, game
from gamefl.core import (
    FiniteGame,
    RunSpec,
    branching_depth,
    delta,
    game_from_delta,
    tree_of,
    validate_game,
)
from gamefl.enumeration import canonical_games
from gamefl.errors import BadAliceIndex, DuplicateRun, EmptyGame, EqualRuns, NonCanonicalRunSpec

runs_st = st.builds(
    RunSpec.make,
    st.lists(st.integers(0, 3), max_size=5),
    st.integers(0, 3),
)


@pytest.mark.parametrize(
    "r1, r2, expected",
    [
        (R(), R(1), 0),
        (R(0, 1), R(0, 2), 1),
        (R(0, tail=1), R(), 1),
    ],
)
def test_delta_examples(r1, r2, expected):
    assert delta(r1, r2) == expected
    assert brute_delta(r1, r2) == expected


def test_delta_equal_runs_rejected():
    with pytest.raises(EqualRuns):
        delta(R(0, 0, tail=0), R())


@given(runs_st, runs_st)
def test_delta_matches_expansion(r1, r2):
    if r1 == r2:
        assert brute_delta(r1, r2) is None
        return
    d = delta(r1, r2)
    assert d == delta(r2, r1)
    assert d == brute_delta(r1, r2)
    assert d < max(len(r1.stem), len(r2.stem)) + 1


def test_runspec_make_is_canonical():
    r = RunSpec.make((1, 0, 0), 0)
    assert r == RunSpec((1,), 0)
    assert r.is_canonical()
    assert r.prefix(4) == (1, 0, 0, 0)


def test_validate_examples():
    assert validate_game(FiniteGame((R(),), {0})).ok
    rep = validate_game(FiniteGame((R(), R()), set()))
    assert any(isinstance(e, DuplicateRun) for e in rep.errors)
    rep = validate_game(FiniteGame((R(),), {3}))
    assert any(isinstance(e, BadAliceIndex) for e in rep.errors)
    rep = validate_game(FiniteGame((RunSpec((0,), 0),), set()))
    assert any(isinstance(e, NonCanonicalRunSpec) for e in rep.errors)
    with pytest.raises(DuplicateRun):
        FiniteGame.of([R(1), R(1)], [])


def test_tree_examples():
    t = tree_of(game([R(5, 2, tail=1)], {0}), 3)
    assert t.level_sizes() == [1, 1, 1, 1]
    assert tree_of(game([R(), R(1)], {0}), 2).level_sizes() == [1, 2, 2]
    assert tree_of(game([R(), R(0, 1)], {0}), 2).level_sizes() == [1, 1, 2]


def test_branching_depth_examples():
    assert branching_depth(game([R(3)], {})) == 0
    assert branching_depth(game([R(), R(1)], {})) == 1
    g = game([R(), R(1), R(0, 0, 0, 0, 1)], {0})
    assert sorted({g.delta(i, j) for i, j in itertools.combinations(range(3), 2)}) == [0, 4]
    assert branching_depth(g) == 5
    with pytest.raises(EmptyGame):
        branching_depth(FiniteGame())


FIXTURES = canonical_games(4, 3) + [
    game([R(3, 1, tail=2), R(3, 1, 4), R(0, tail=5)], {1}),
    game([R(1, 2, 3), R(1, 2, 3, 4), R(1, 2, tail=1)], {0, 2}),
]


@pytest.mark.parametrize("g", FIXTURES[::7])
def test_ultrametric_law_and_tree_shape(g):
    n = len(g.runs)
    for i, j, k in itertools.permutations(range(n), 3):
        assert g.delta(i, k) >= min(g.delta(i, j), g.delta(j, k))
    for d in range(11):
        t = tree_of(g, d)
        for m in t.moments:
            assert all(m[:k] in t.moments for k in range(len(m)))
            if len(m) < d:
                assert t.children(m)
        sizes = t.level_sizes()
        assert all(a <= b for a, b in zip(sizes, sizes[1:]))
    tail = tree_of(g, branching_depth(g) + 3).level_sizes()
    assert tail[-1] == n and tail[-2] == n


@pytest.mark.parametrize("g", FIXTURES[::5])
def test_game_from_delta_round_trip(g):
    h = game_from_delta(g.delta_matrix(), g.alice)
    assert h.delta_matrix() == g.delta_matrix()
    assert h.alice == g.alice


@given(st.lists(runs_st, min_size=1, max_size=6, unique=True), st.data())
def test_prefix_checks_match_pairwise(src, data):
    from gamefl.core import max_delta, non_expanding, same_delta_profile

    img = [data.draw(runs_st) for _ in src]
    pairs = list(itertools.combinations(range(len(src)), 2))

    def d(r, s):
        return float("inf") if r == s else delta(r, s)

    assert non_expanding(src, img) == all(d(img[i], img[j]) >= d(src[i], src[j]) for i, j in pairs)
    assert same_delta_profile(src, img) == all(d(img[i], img[j]) == d(src[i], src[j]) for i, j in pairs)
    g = FiniteGame(tuple(src), frozenset())
    assert max_delta(g) == max((delta(src[i], src[j]) for i, j in pairs), default=-1)
