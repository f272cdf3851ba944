"""Deterministic, seedable selection among equivalent structure choices.

Builders that must pick one witness out of several (a cartesian lift, a
product diagram, ...) route the pick through a ``Chooser``.  With no seed the
pick is the first candidate in input order; with a seed, candidates are
ranked by a keyed hash, so every seed yields a reproducible but different
choice order.  Choice-independence of results is itself a tested property.
"""

from __future__ import annotations

import hashlib
from typing import Sequence, TypeVar

T = TypeVar("T")


class Chooser:
    def __init__(self, seed: int | None = None):
        self.seed = seed

    def rank(self, salt: str, candidate: object) -> bytes:
        data = f"{self.seed}:{salt}:{candidate!r}".encode()
        return hashlib.blake2b(data, digest_size=8).digest()

    def first(self, candidates: Sequence[T], salt: str) -> T:
        """Pick one candidate; input order if unseeded, hash order otherwise."""
        if not candidates:
            raise IndexError("no candidates to choose from")
        if self.seed is None:
            return candidates[0]
        return min(candidates, key=lambda c: self.rank(salt, c))
