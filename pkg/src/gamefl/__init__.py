"""Finite two-player games, their embeddings, and the Fraïssé limit G_FL."""

from .core import FiniteGame, RunSpec, delta, tree_of, validate_game
from .morphisms import GameMorphism, classify, enumerate_embeddings, are_isomorphic, canonical_form

__all__ = [
    "FiniteGame",
    "GameMorphism",
    "RunSpec",
    "are_isomorphic",
    "canonical_form",
    "classify",
    "delta",
    "enumerate_embeddings",
    "tree_of",
    "validate_game",
]
