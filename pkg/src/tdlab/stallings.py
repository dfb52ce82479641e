"""Finitely generated subgroups of free groups via Stallings foldings.

Words in F_k are tuples of nonzero integers, ``i`` for x_i and ``-i`` for its
inverse.  Letters are ordered 1 < -1 < 2 < -2 < ... and words shortlex.
"""
from __future__ import annotations

import math
import random
import string
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

Word = tuple[int, ...]


def letter_key(l: int) -> int:
    return 2 * abs(l) - 2 + (l < 0)


def shortlex_key(w: Sequence[int]) -> tuple:
    return (len(w), tuple(letter_key(l) for l in w))


def alphabet(k: int) -> list[int]:
    return sorted([i for i in range(1, k + 1)] + [-i for i in range(1, k + 1)], key=letter_key)


def reduce_word(w: Iterable[int]) -> Word:
    out: list[int] = []
    for l in w:
        if l == 0:
            raise ValueError("0 is not a letter")
        if out and out[-1] == -l:
            out.pop()
        else:
            out.append(l)
    return tuple(out)


def inverse(w: Sequence[int]) -> Word:
    return tuple(-l for l in reversed(w))


def mul(*ws: Sequence[int]) -> Word:
    return reduce_word(l for w in ws for l in w)


def conjugate(g: Sequence[int], u: Sequence[int]) -> Word:
    """g^u = u^-1 g u."""
    return mul(inverse(u), g, u)


def words_of_length(k: int, n: int) -> Iterator[Word]:
    """Reduced words of length n in shortlex order."""
    letters = alphabet(k)

    def rec(prefix: list[int]) -> Iterator[Word]:
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for l in letters:
            if prefix and prefix[-1] == -l:
                continue
            prefix.append(l)
            yield from rec(prefix)
            prefix.pop()

    yield from rec([])


def shortlex_words(k: int, max_len: int | None = None, start: int = 0) -> Iterator[Word]:
    n = start
    while max_len is None or n <= max_len:
        yield from words_of_length(k, n)
        n += 1


def format_letters(w: Sequence[int]) -> str:
    """``a`` = x_1, ``A`` = x_1^-1, and so on; the empty word is ``""``."""
    out = []
    for l in w:
        if abs(l) > 26:
            raise ValueError("letter format supports rank <= 26")
        ch = string.ascii_lowercase[abs(l) - 1]
        out.append(ch if l > 0 else ch.upper())
    return "".join(out)


def parse_letters(s: str) -> Word:
    s = s.strip()
    if s in ("", "1", "e"):
        return ()
    out = []
    for ch in s:
        if ch.islower():
            out.append(ord(ch) - ord("a") + 1)
        elif ch.isupper():
            out.append(-(ord(ch) - ord("A") + 1))
        else:
            raise ValueError(f"bad letter {ch!r}")
    return reduce_word(out)


def parse_word(s: str) -> Word:
    """Letter string (``aBc``) or signed integers (``1 -2 3``)."""
    s = s.strip()
    if s and all(tok.lstrip("-").isdigit() for tok in s.replace(",", " ").split()):
        return reduce_word(int(t) for t in s.replace(",", " ").split())
    return parse_letters(s)


class _Folder:
    def __init__(self):
        self.parent: list[int] = []
        self.out: list[dict[int, int]] = []
        self.pending: list[tuple[int, int]] = []

    def new_vertex(self) -> int:
        self.parent.append(len(self.parent))
        self.out.append({})
        return len(self.parent) - 1

    def find(self, v: int) -> int:
        root = v
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[v] != root:
            self.parent[v], v = root, self.parent[v]
        return root

    def _attach(self, u: int, l: int, v: int) -> None:
        old = self.out[u].get(l)
        if old is None:
            self.out[u][l] = v
        elif self.find(old) != self.find(v):
            self.pending.append((old, v))

    def add_edge(self, u: int, l: int, v: int) -> None:
        u, v = self.find(u), self.find(v)
        self._attach(u, l, v)
        self._attach(v, -l, u)
        self.fold()

    def fold(self) -> None:
        while self.pending:
            a, b = self.pending.pop()
            a, b = self.find(a), self.find(b)
            if a == b:
                continue
            if b < a:
                a, b = b, a
            self.parent[b] = a
            moved = self.out[b]
            self.out[b] = {}
            for l, w in moved.items():
                self._attach(a, l, w)

    def add_loop(self, w: Sequence[int]) -> None:
        if not w:
            return
        cur = 0
        for i, l in enumerate(w):
            nxt = 0 if i == len(w) - 1 else self.new_vertex()
            self.add_edge(cur, l, nxt)
            cur = nxt


class CoreGraph:
    """Folded, trimmed core graph with basepoint 0.

    ``out[v]`` maps each letter (both signs) to the target vertex; vertices are
    numbered canonically by breadth-first search in letter order, so two core
    graphs of the same subgroup compare equal.
    """

    def __init__(self, k: int, out: list[dict[int, int]], generators: Sequence[Word] = ()):
        self.k = k
        self.out = out
        self.generators = [tuple(g) for g in generators]

    @property
    def num_vertices(self) -> int:
        return len(self.out)

    @property
    def num_edges(self) -> int:
        return sum(1 for d in self.out for l in d if l > 0)

    def rank(self) -> int:
        return self.num_edges - self.num_vertices + 1

    def edges(self) -> list[tuple[int, int, int]]:
        return sorted((v, l, w) for v, d in enumerate(self.out) for l, w in d.items() if l > 0)

    def key(self) -> tuple:
        return (self.k, tuple(tuple(sorted(d.items())) for d in self.out))

    def __eq__(self, other) -> bool:
        return isinstance(other, CoreGraph) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def read(self, w: Sequence[int], start: int = 0) -> tuple[int, int]:
        """Follow w from start; returns (vertex reached, letters consumed)."""
        v = start
        for i, l in enumerate(w):
            nxt = self.out[v].get(l)
            if nxt is None:
                return v, i
            v = nxt
        return v, len(w)

    def is_folded(self) -> bool:
        for v, d in enumerate(self.out):
            for l, w in d.items():
                if self.out[w].get(-l) != v:
                    return False
        return True

    def is_core(self) -> bool:
        return all(len(d) >= 2 for v, d in enumerate(self.out) if v != 0)

    def to_text(self) -> str:
        """Plain adjacency format: header line then ``u label v`` per edge."""
        lines = [f"core rank={self.k} vertices={self.num_vertices} basepoint=0"]
        lines += [f"{u} {format_letters((l,))} {v}" for u, l, v in self.edges()]
        return "\n".join(lines) + "\n"

    def to_dot(self) -> str:
        lines = ["digraph core {", '  0 [shape=doublecircle];']
        lines += [f'  {u} -> {v} [label="{format_letters((l,))}"];' for u, l, v in self.edges()]
        lines.append("}")
        return "\n".join(lines) + "\n"

    def __repr__(self) -> str:
        return f"CoreGraph(k={self.k}, V={self.num_vertices}, E={self.num_edges})"


def _canonical(k: int, folder: _Folder) -> list[dict[int, int]]:
    alive = {v for v in range(len(folder.parent)) if folder.find(v) == v}
    adj = {v: {l: folder.find(w) for l, w in folder.out[v].items()} for v in alive}
    # trim hanging trees
    stack = [v for v in alive if v != 0 and len(adj[v]) <= 1]
    while stack:
        v = stack.pop()
        if v not in adj or v == 0 or len(adj[v]) > 1:
            continue
        for l, w in adj.pop(v).items():
            del adj[w][-l]
            if w != 0 and len(adj[w]) <= 1:
                stack.append(w)
    order = {0: 0}
    queue = [0]
    letters = alphabet(k)
    for v in queue:
        for l in letters:
            w = adj[v].get(l)
            if w is not None and w not in order:
                order[w] = len(order)
                queue.append(w)
    out: list[dict[int, int]] = [dict() for _ in order]
    for v, idx in order.items():
        out[idx] = {l: order[w] for l, w in adj[v].items()}
    return out


def subgroup_from_words(words: Iterable[Sequence[int]], k: int,
                        edge_order: random.Random | None = None) -> CoreGraph:
    """Core graph of the subgroup generated by the given words.

    ``edge_order`` optionally shuffles the order in which petal edges are
    inserted; the folded result does not depend on it.
    """
    gens = [reduce_word(w) for w in words]
    for w in gens:
        if any(abs(l) > k for l in w):
            raise ValueError(f"word {w} uses letters beyond rank {k}")
    folder = _Folder()
    folder.new_vertex()
    if edge_order is None:
        for w in gens:
            folder.add_loop(w)
    else:
        edges = []
        for w in gens:
            if not w:
                continue
            ids = [0] + [folder.new_vertex() for _ in range(len(w) - 1)] + [0]
            edges += [(ids[i], l, ids[i + 1]) for i, l in enumerate(w)]
        edge_order.shuffle(edges)
        for u, l, v in edges:
            folder.add_edge(u, l, v)
    return CoreGraph(k, _canonical(k, folder), [g for g in gens if g])


def contains(H: CoreGraph, w: Sequence[int]) -> bool:
    v, used = H.read(reduce_word(w))
    return used == len(reduce_word(w)) and v == 0


def same_coset(H: CoreGraph, a: Sequence[int], b: Sequence[int]) -> bool:
    """aH == bH, i.e. a^-1 b in H."""
    return contains(H, mul(inverse(a), b))


def index(H: CoreGraph) -> int | float:
    """Number of cosets, or ``math.inf`` when some vertex misses a direction."""
    if all(len(d) == 2 * H.k for d in H.out):
        return H.num_vertices
    return math.inf


def is_subgroup(H: CoreGraph, K: CoreGraph) -> bool:
    """H <= K, checked on the generators of H."""
    return all(contains(K, w) for w in H.generators)


# -- coset actions ------------------------------------------------------------

Coset = tuple[int, Word]  # right coset H w: (core vertex, hanging suffix)


def _right_step(H: CoreGraph, c: Coset, l: int) -> Coset:
    v, suffix = c
    if not suffix:
        w = H.out[v].get(l)
        return (w, ()) if w is not None else (v, (l,))
    if suffix[-1] == -l:
        return (v, suffix[:-1])
    return (v, suffix + (l,))


def right_coset(H: CoreGraph, w: Sequence[int]) -> Coset:
    c: Coset = (0, ())
    for l in reduce_word(w):
        c = _right_step(H, c, l)
    return c


def left_coset(H: CoreGraph, a: Sequence[int]) -> Coset:
    """Canonical label of aH (via the right coset H a^-1)."""
    return right_coset(H, inverse(a))


def act_left(H: CoreGraph, g: Sequence[int], c: Coset) -> Coset:
    """g · (aH) = (ga)H."""
    for l in reversed(reduce_word(g)):
        c = _right_step(H, c, -l)
    return c


@dataclass
class ActionPrefix:
    """First N left cosets of H, with each generator's partial action."""

    k: int
    reps: list[Word]
    keys: list[Coset]
    maps: list[list[int | None]]  # maps[i-1][c]: image of coset c under x_i
    complete: bool

    def index_of(self, key: Coset) -> int | None:
        try:
            return self.keys.index(key)
        except ValueError:
            return None

    def apply(self, g: Sequence[int], c: int) -> int | None:
        """Act by the word g on coset number c; None if the path leaves the prefix."""
        for l in reversed(reduce_word(g)):
            if c is None:
                return None
            if l > 0:
                c = self.maps[l - 1][c]
            else:
                row = self.maps[-l - 1]
                c = row.index(c) if c in row else None
        return c

    def to_json(self) -> dict:
        return {
            "cosets": [format_letters(r) for r in self.reps],
            "generators": {format_letters((i + 1,)): [(-1 if x is None else x) for x in m]
                           for i, m in enumerate(self.maps)},
            "saturated": self.complete,
        }


def coset_action_prefix(H: CoreGraph, N: int) -> ActionPrefix:
    """Breadth-first enumeration of left cosets in shortlex order of their
    least representatives, truncated to N cosets."""
    if N < 1:
        raise ValueError("N must be positive")
    k = H.k
    letters = alphabet(k)
    start = left_coset(H, ())
    reps: dict[Coset, Word] = {start: ()}
    order = [start]
    layer = [start]
    while layer and len(order) < N:
        cand: dict[Coset, Word] = {}
        for c in layer:
            for l in letters:
                d = act_left(H, (l,), c)
                if d in reps:
                    continue
                rep = (l,) + reps[c]
                if d not in cand or shortlex_key(rep) < shortlex_key(cand[d]):
                    cand[d] = rep
        layer = sorted(cand, key=lambda d: shortlex_key(cand[d]))
        for d in layer:
            reps[d] = cand[d]
        order.extend(layer)
    order = order[:N]
    pos = {c: i for i, c in enumerate(order)}
    maps = [[pos.get(act_left(H, (i,), c)) for c in order] for i in range(1, k + 1)]
    complete = all(x is not None for m in maps for x in m)
    return ActionPrefix(k, [reps[c] for c in order], order, maps, complete)


# -- independent non-membership certificates --------------------------------

def separating_quotient(H: CoreGraph, w: Sequence[int]) -> list[tuple[int, ...]] | None:
    """Permutations p_1..p_k of {0..n-1} such that, for the right action
    v.x_i = p_i[v], every generator of H fixes 0 but w moves it.  None if w ∈ H.

    Built by gluing the path of w onto the core graph and completing each
    partial permutation with the smallest free targets.
    """
    w = reduce_word(w)
    if contains(H, w):
        return None
    out = [dict(d) for d in H.out]
    v = 0
    for l in w:
        nxt = out[v].get(l)
        if nxt is None:
            nxt = len(out)
            out.append({})
            out[v][l] = nxt
            out[nxt][-l] = v
        v = nxt
    n = len(out)
    perms = []
    for i in range(1, H.k + 1):
        fwd = {u: d[i] for u, d in enumerate(out) if i in d}
        free_src = [u for u in range(n) if u not in fwd]
        free_dst = sorted(set(range(n)) - set(fwd.values()))
        fwd.update(zip(free_src, free_dst))
        perms.append(tuple(fwd[u] for u in range(n)))
    return perms


def apply_perm_word(perms: Sequence[Sequence[int]], w: Sequence[int], point: int) -> int:
    """Right action of w on a point: letters applied left to right."""
    invs = []
    for p in perms:
        q = [0] * len(p)
        for i, j in enumerate(p):
            q[j] = i
        invs.append(q)
    for l in w:
        point = perms[l - 1][point] if l > 0 else invs[-l - 1][point]
    return point


def check_separating_quotient(perms: Sequence[Sequence[int]], gens: Sequence[Sequence[int]],
                              w: Sequence[int]) -> bool:
    """Pure permutation arithmetic: gens fix 0 and w does not."""
    for p in perms:
        if sorted(p) != list(range(len(p))):
            return False
    return (all(apply_perm_word(perms, g, 0) == 0 for g in gens)
            and apply_perm_word(perms, w, 0) != 0)


def brute_force_products(gens: Sequence[Sequence[int]], max_factors: int) -> set[Word]:
    """All reduced words that are products of at most max_factors generators^±1."""
    sym = [reduce_word(g) for g in gens] + [inverse(reduce_word(g)) for g in gens]
    found = {()}
    layer = {()}
    for _ in range(max_factors):
        layer = {mul(w, s) for w in layer for s in sym} - found
        found |= layer
    return found
