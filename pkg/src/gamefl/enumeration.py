"""Enumeration of canonical finite games up to isomorphism."""

from __future__ import annotations

from functools import lru_cache

from .core import FiniteGame
from .morphisms import game_from_code


@lru_cache(maxsize=None)
def _codes(n: int, level: int, max_delta: int) -> tuple:
    """Codes of ``n``-run games whose pairwise Δ lie in ``[level, max_delta]``."""
    if n == 1:
        return ((0, 0), (0, 1))
    if level > max_delta:
        return ()
    out = [(1, (child,)) for child in _codes(n, level + 1, max_delta)]
    candidates = sorted(
        (code, size) for size in range(1, n) for code in _codes(size, level + 1, max_delta)
    )

    def multisets(start: int, remaining: int, picked: list):
        if remaining == 0:
            if len(picked) >= 2:
                yield tuple(picked)
            return
        for k in range(start, len(candidates)):
            code, size = candidates[k]
            if size <= remaining:
                picked.append(code)
                yield from multisets(k, remaining - size, picked)
                picked.pop()

    for children in multisets(0, n, []):
        out.append((1, tuple(sorted(children))))
    return tuple(sorted(set(out)))


def canonical_games(max_runs: int, max_delta: int, include_empty: bool = False) -> list[FiniteGame]:
    """All canonical games with 1..max_runs runs and every Δ <= max_delta.

    Ordered by run count, then by canonical code; deterministic.
    """
    games = [FiniteGame()] if include_empty else []
    for n in range(1, max_runs + 1):
        games.extend(game_from_code(code) for code in _codes(n, 0, max_delta))
    return games
