import itertools

import pytest

from gamefl.core import FiniteGame, RunSpec


def R(*stem, tail=0):
    return RunSpec.make(stem, tail)


def game(runs, alice):
    return FiniteGame.of(runs, alice)


def brute_delta(r1, r2, horizon=None):
    """Independent Δ: expand both runs far past their stems and compare."""
    horizon = horizon or max(len(r1.stem), len(r2.stem)) + 2
    seq1 = list(r1.stem) + [r1.tail] * (horizon - len(r1.stem))
    seq2 = list(r2.stem) + [r2.tail] * (horizon - len(r2.stem))
    for i, (x, y) in enumerate(zip(seq1, seq2)):
        if x != y:
            return i
    return None


def ultrametric_matrices(n, max_delta):
    """All symmetric Δ-matrices on n points satisfying the ultrametric law."""
    pairs = list(itertools.combinations(range(n), 2))
    for values in itertools.product(range(max_delta + 1), repeat=len(pairs)):
        d = {p: v for p, v in zip(pairs, values)}
        ok = True
        for i, j, k in itertools.combinations(range(n), 3):
            a, b, c = sorted((d[(i, j)], d[(j, k)], d[(i, k)]))
            if a != b:
                ok = False
                break
        if ok:
            m = [[float("inf")] * n for _ in range(n)]
            for (i, j), v in d.items():
                m[i][j] = m[j][i] = v
            yield m


ALICE_1 = FiniteGame.of([RunSpec()], {0})
BOB_1 = FiniteGame.of([RunSpec()], set())


@pytest.fixture
def alice1():
    return ALICE_1


@pytest.fixture
def bob1():
    return BOB_1


def mediator_counts(source, legs, target):
    """How many A-morphisms source -> target induce each tuple of composite run maps."""
    from collections import Counter

    from gamefl.morphisms import iter_a_morphisms

    counts = Counter()
    for m in iter_a_morphisms(source, target):
        counts[tuple(tuple(m(leg(i)) for i in range(len(leg.source.runs))) for leg in legs)] += 1
    return counts


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
