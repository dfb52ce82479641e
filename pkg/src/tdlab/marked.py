"""Marked finite groups and the distance between their kernels in F_k.

δ(M, N) = 1/ℓ where ℓ is the length of a shortest reduced word lying in
exactly one of the two kernels, and 0 when the kernels agree.
"""
from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .permgrp import CorpusEntry
from .stallings import Word, alphabet, format_letters, reduce_word, shortlex_words
from .words import FiniteGroupTable


@dataclass(frozen=True)
class MarkedGroup:
    group: FiniteGroupTable
    images: tuple[int, ...]
    name: str = ""

    def __post_init__(self):
        if not self.images:
            raise ValueError("a marking needs at least one generator")
        if len(self.group.closure(self.images)) != self.group.order:
            raise ValueError("marked elements do not generate the group")

    @property
    def k(self) -> int:
        return len(self.images)

    def letter(self, l: int) -> int:
        g = self.images[abs(l) - 1]
        return g if l > 0 else self.group.inv[g]

    def evaluate(self, w: Sequence[int]) -> int:
        x = 0
        for l in w:
            if not 1 <= abs(l) <= self.k:
                raise ValueError(f"letter {l} out of range for rank {self.k}")
            x = self.group.mul[x][self.letter(l)]
        return x

    @classmethod
    def from_corpus(cls, entry: CorpusEntry, name: str = "") -> "MarkedGroup":
        if entry.marking is None:
            raise ValueError("group file has no marking line")
        table = FiniteGroupTable.from_perm_group(entry.group)
        return cls(table, tuple(table.index_of_perm(p) for p in entry.marking),
                   name or entry.group.name)

    @classmethod
    def cyclic(cls, n: int) -> "MarkedGroup":
        return cls(FiniteGroupTable.cyclic(n), (1 % n,), f"C{n}")


def kernel_contains(M: MarkedGroup, w: Sequence[int]) -> bool:
    return M.evaluate(reduce_word(w)) == 0


@dataclass(frozen=True)
class Distance:
    value: Fraction
    exact: bool
    witness: Word | None  # shortlex-least word in exactly one kernel

    def __str__(self) -> str:
        return str(self.value) if self.exact else f"<= {self.value}"

    def to_json(self) -> dict:
        return {"value": str(self.value), "exact": self.exact,
                "witness": None if self.witness is None else format_letters(self.witness)}


def _pair_search(M1: MarkedGroup, M2: MarkedGroup, radius: int | None):
    """BFS over the diagonal subgroup of G1 × G2.

    Ordered generators and a FIFO queue give the shortlex-least word to each
    pair state; the first state with exactly one trivial coordinate yields the
    separating word.  Returns (word or None, exhausted).
    """
    letters = alphabet(M1.k)
    start = (0, 0)
    parent: dict[tuple[int, int], tuple[tuple[int, int], int] | None] = {start: None}
    depth = {start: 0}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        if radius is not None and depth[s] >= radius:
            continue
        for l in letters:
            t = (M1.group.mul[s[0]][M1.letter(l)], M2.group.mul[s[1]][M2.letter(l)])
            if t in parent:
                continue
            parent[t] = (s, l)
            depth[t] = depth[s] + 1
            if (t[0] == 0) != (t[1] == 0):
                word = []
                cur = t
                while parent[cur] is not None:
                    cur, l2 = parent[cur]
                    word.append(l2)
                return tuple(reversed(word)), False
            queue.append(t)
    return None, radius is None or all(d < radius for d in depth.values())


def extends_to_isomorphism(M1: MarkedGroup, M2: MarkedGroup) -> bool:
    """Does x_i ↦ y_i extend to an isomorphism?  Built over the tables by
    closing the generator correspondence; any clash or size mismatch says no."""
    if M1.k != M2.k or M1.group.order != M2.group.order:
        return False
    phi = {0: 0}
    queue = deque([0])
    while queue:
        g = queue.popleft()
        for i in range(M1.k):
            a = M1.group.mul[g][M1.images[i]]
            b = M2.group.mul[phi[g]][M2.images[i]]
            if a in phi:
                if phi[a] != b:
                    return False
            else:
                phi[a] = b
                queue.append(a)
    return len(set(phi.values())) == len(phi) == M1.group.order


def marked_distance(M1: MarkedGroup, M2: MarkedGroup, radius: int = 12) -> Distance:
    """Exact 1/ℓ when a separating word of length ℓ ≤ radius exists; exact 0
    when the markings are isomorphic; otherwise the bound 1/(radius+1)."""
    if M1.k != M2.k:
        raise ValueError(f"generator counts differ: {M1.k} vs {M2.k}")
    if radius < 0:
        raise ValueError("radius must be non-negative")
    if extends_to_isomorphism(M1, M2):
        return Distance(Fraction(0), True, None)
    word, _ = _pair_search(M1, M2, radius)
    if word is not None:
        return Distance(Fraction(1, len(word)), True, word)
    return Distance(Fraction(1, radius + 1), False, None)


def brute_force_distance(M1: MarkedGroup, M2: MarkedGroup, radius: int) -> Fraction | None:
    """Enumerate reduced words up to radius; None if none separates."""
    for w in shortlex_words(M1.k, radius, start=1):
        if kernel_contains(M1, w) != kernel_contains(M2, w):
            return Fraction(1, len(w))
    return None


def load_marked(path: str | os.PathLike) -> MarkedGroup:
    from .corpus import load_entry
    entry = load_entry(path)
    return MarkedGroup.from_corpus(entry, name=entry.group.name)
