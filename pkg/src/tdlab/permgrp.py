"""Finite permutation groups acting on {1..n}.

Internally a permutation is a 0-based image tuple ``p`` with ``p[i]`` the
image of point ``i``; products are composed right to left, so
``_mul(p, q)[i] == p[q[i]]``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations, permutations
from math import factorial, prod
from operator import itemgetter
from typing import Callable, Iterable, Iterator, Sequence

from .perm import FinitaryPerm

Perm = tuple[int, ...]

DEFAULT_MAX_DEGREE = 64
DEFAULT_NORMAL_BOUND = 10**4
DEFAULT_TD_BUDGET = 60


class BoundExceeded(ValueError):
    """A configured size bound was exceeded."""


def _mul(p: Perm, q: Perm) -> Perm:
    """p∘q (apply q first)."""
    return itemgetter(*q)(p) if len(q) > 1 else tuple(p[i] for i in q)


def _inv(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def _identity(n: int) -> Perm:
    return tuple(range(n))


class StabChain:
    """Base and transversals from a deterministic Schreier–Sims run.

    Base points are taken in the order 0, 1, 2, ... (first point moved by the
    residue that forced a new level).
    """

    def __init__(self, degree: int, gens: Sequence[Perm]):
        self.degree = degree
        self.base: list[int] = []
        self.strong: list[list[Perm]] = []  # strong[i]: new generators at level i
        self.trans: list[dict[int, Perm]] = []
        self._build([g for g in gens if g != _identity(degree)])

    def _level_gens(self, i: int) -> list[Perm]:
        out = []
        for j in range(i, len(self.base)):
            out.extend(self.strong[j])
        return out

    def _orbit(self, i: int) -> None:
        b = self.base[i]
        ident = _identity(self.degree)
        tr = {b: ident}
        queue = [b]
        gens = self._level_gens(i)
        for pt in queue:
            u = tr[pt]
            for s in gens:
                img = s[pt]
                if img not in tr:
                    tr[img] = _mul(s, u)
                    queue.append(img)
        self.trans[i] = tr

    def sift(self, g: Perm, start: int = 0) -> tuple[Perm, int]:
        for i in range(start, len(self.base)):
            pt = g[self.base[i]]
            u = self.trans[i].get(pt)
            if u is None:
                return g, i
            g = _mul(_inv(u), g)
        return g, len(self.base)

    def _add(self, g: Perm, level: int) -> None:
        if level == len(self.base):
            moved = next(i for i in range(self.degree) if g[i] != i)
            self.base.append(moved)
            self.strong.append([])
            self.trans.append({})
        self.strong[level].append(g)
        for i in range(level + 1):
            self._orbit(i)

    def _build(self, gens: list[Perm]) -> None:
        ident = _identity(self.degree)
        for g in gens:
            h, lvl = self.sift(g)
            if h != ident:
                self._add(h, lvl)
        i = len(self.base) - 1
        while i >= 0:
            restart = None
            gens_i = self._level_gens(i)
            for pt, u in list(self.trans[i].items()):
                for s in gens_i:
                    v = self.trans[i][s[pt]]
                    sch = _mul(_inv(v), _mul(s, u))
                    if sch == ident:
                        continue
                    h, lvl = self.sift(sch, i + 1)
                    if h != ident:
                        self._add(h, lvl)
                        restart = lvl
                        break
                if restart is not None:
                    break
            if restart is None:
                i -= 1
            else:
                i = restart

    def order(self) -> int:
        return prod(len(t) for t in self.trans)

    def contains(self, g: Perm) -> bool:
        h, _ = self.sift(g)
        return h == _identity(self.degree)

    def elements(self) -> Iterator[Perm]:
        """Every group element exactly once, as products u_0 u_1 ... u_m."""
        levels = [list(t.values()) for t in self.trans]

        def rec(i: int, acc: Perm) -> Iterator[Perm]:
            if i < 0:
                yield acc
                return
            for u in levels[i]:
                yield from rec(i - 1, _mul(u, acc))

        yield from rec(len(levels) - 1, _identity(self.degree))


class PermGroup:
    """Permutation group on {1..n} given by generators."""

    def __init__(self, degree: int, generators: Iterable[FinitaryPerm | Perm] = (),
                 *, max_degree: int = DEFAULT_MAX_DEGREE, name: str = ""):
        if degree < 0:
            raise ValueError("degree must be non-negative")
        if degree > max_degree:
            raise BoundExceeded(f"degree {degree} exceeds bound {max_degree}")
        self.degree = degree
        self.name = name
        gens = []
        for g in generators:
            if isinstance(g, FinitaryPerm):
                g = g.to_tuple(degree)
            else:
                g = tuple(g)
                if sorted(g) != list(range(degree)):
                    raise ValueError(f"{g} is not a permutation of {degree} points")
            gens.append(g)
        self._gens: list[Perm] = gens
        self._chain: StabChain | None = None

    @property
    def chain(self) -> StabChain:
        if self._chain is None:
            self._chain = StabChain(self.degree, self._gens)
        return self._chain

    @property
    def generators(self) -> list[FinitaryPerm]:
        return [FinitaryPerm.from_images([x + 1 for x in g]) for g in self._gens]

    @property
    def gen_tuples(self) -> list[Perm]:
        return list(self._gens)

    def order(self) -> int:
        return self.chain.order()

    def __len__(self) -> int:
        return self.order()

    def contains(self, g: FinitaryPerm | Perm) -> bool:
        if isinstance(g, FinitaryPerm):
            if g.degree() > self.degree:
                return False
            g = g.to_tuple(self.degree)
        return self.chain.contains(tuple(g))

    __contains__ = contains

    def elements(self) -> Iterator[Perm]:
        return self.chain.elements()

    def orbit(self, point: int) -> list[int]:
        """Orbit of a 0-based point, in discovery order."""
        seen = {point}
        out = [point]
        for p in out:
            for g in self._gens:
                q = g[p]
                if q not in seen:
                    seen.add(q)
                    out.append(q)
        return out

    def orbits(self) -> list[list[int]]:
        seen: set[int] = set()
        out = []
        for p in range(self.degree):
            if p not in seen:
                orb = sorted(self.orbit(p))
                seen.update(orb)
                out.append(orb)
        return out

    def is_transitive(self) -> bool:
        return self.degree <= 1 or len(self.orbit(0)) == self.degree

    def stabilizer(self, point: int) -> "PermGroup":
        """Point stabilizer of a 0-based point (Schreier generators)."""
        tr = {point: _identity(self.degree)}
        queue = [point]
        for p in queue:
            for g in self._gens:
                q = g[p]
                if q not in tr:
                    tr[q] = _mul(g, tr[p])
                    queue.append(q)
        gens = set()
        for p, u in tr.items():
            for g in self._gens:
                sch = _mul(_inv(tr[g[p]]), _mul(g, u))
                if sch != _identity(self.degree):
                    gens.add(sch)
        return PermGroup(self.degree, sorted(gens), max_degree=max(self.degree, 1))

    def subgroup(self, gens: Iterable[Perm]) -> "PermGroup":
        return PermGroup(self.degree, gens, max_degree=max(self.degree, 1))

    def is_subgroup_of(self, other: "PermGroup") -> bool:
        return all(other.contains(g) for g in self._gens)

    def same_as(self, other: "PermGroup") -> bool:
        return (self.order() == other.order() and self.is_subgroup_of(other))

    def is_abelian(self) -> bool:
        return all(_mul(a, b) == _mul(b, a) for a, b in combinations(self._gens, 2))

    def is_elementary_abelian_2(self) -> bool:
        ident = _identity(self.degree)
        return self.is_abelian() and all(_mul(g, g) == ident for g in self._gens)

    def to_corpus(self, comment: str = "") -> str:
        lines = []
        if comment:
            lines += [f"# {c}" for c in comment.splitlines()]
        lines.append(f"domain {self.degree}")
        lines += [str(g) for g in self.generators]
        return "\n".join(lines) + "\n"

    def __repr__(self) -> str:
        label = self.name or "PermGroup"
        return f"<{label} degree={self.degree} gens={len(self._gens)}>"


@dataclass(frozen=True)
class BlockSystem:
    blocks: tuple[tuple[int, ...], ...]  # 1-based, each sorted, sorted by first point

    @property
    def block_size(self) -> int:
        return len(self.blocks[0])

    def __str__(self) -> str:
        return " ".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks)


# -- group-level operations ------------------------------------------------

def order_and_membership(G: PermGroup) -> tuple[int, Callable[[FinitaryPerm], bool]]:
    return G.order(), G.contains


def _tuple_orbit_size(G: PermGroup, k: int) -> int:
    start = tuple(range(k))
    seen = {start}
    queue = [start]
    gens = G.gen_tuples
    for t in queue:
        for g in gens:
            img = tuple(g[x] for x in t)
            if img not in seen:
                seen.add(img)
                queue.append(img)
    return len(seen)


def arrangements(n: int, k: int) -> int:
    return factorial(n) // factorial(n - k)


def is_k_transitive(G: PermGroup, k: int) -> bool:
    """Transitive on ordered k-tuples of distinct points."""
    if k < 1:
        raise ValueError("k must be positive")
    if k > G.degree:
        raise ValueError(f"k={k} exceeds the {G.degree} points acted on")
    target = arrangements(G.degree, k)
    if G.order() < target:
        return False
    return _tuple_orbit_size(G, k) == target


def transitivity_of_action(G: PermGroup) -> int:
    """Largest k such that G is k-transitive on its points (0 if intransitive)."""
    k = 0
    while k < G.degree and is_k_transitive(G, k + 1):
        k += 1
    return k


def _block_closure(G: PermGroup, beta: int) -> list[int]:
    """Finest G-invariant partition joining 0 and beta (union-find)."""
    parent = list(range(G.degree))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        a, b = find(a), find(b)
        if a == b:
            return False
        if b < a:
            a, b = b, a
        parent[b] = a
        return True

    union(0, beta)
    queue = [(0, beta)]
    gens = G.gen_tuples
    while queue:
        x, y = queue.pop()
        for g in gens:
            u, v = find(g[x]), find(g[y])
            if union(u, v):
                queue.append((u, v))
    return [find(x) for x in range(G.degree)]


def minimal_block_system(G: PermGroup) -> BlockSystem | str:
    """A nontrivial block system with smallest blocks, or ``"primitive"``."""
    if not G.is_transitive():
        raise ValueError("group is not transitive")
    best = None
    for beta in range(1, G.degree):
        labels = _block_closure(G, beta)
        size = labels.count(labels[0])
        if size < G.degree and (best is None or size < best[0]):
            best = (size, labels)
    if best is None:
        return "primitive"
    labels = best[1]
    blocks: dict[int, list[int]] = {}
    for x, lab in enumerate(labels):
        blocks.setdefault(lab, []).append(x + 1)
    return BlockSystem(tuple(sorted(tuple(b) for b in blocks.values())))


def is_primitive(G: PermGroup) -> bool:
    return G.is_transitive() and minimal_block_system(G) == "primitive"


def conjugacy_classes(G: PermGroup, bound: int = DEFAULT_NORMAL_BOUND) -> list[list[Perm]]:
    if G.order() > bound:
        raise BoundExceeded(f"|G|={G.order()} exceeds bound {bound}")
    gens = [(g, _inv(g)) for g in G.gen_tuples]
    assigned: set[Perm] = set()
    classes = []
    for x in G.elements():
        if x in assigned:
            continue
        cls = [x]
        assigned.add(x)
        for y in cls:
            for g, gi in gens:
                z = _mul(gi, _mul(y, g))
                if z not in assigned:
                    assigned.add(z)
                    cls.append(z)
        classes.append(cls)
    classes.sort(key=lambda c: (len(c), min(c)))
    return classes


def normal_closure(G: PermGroup, elems: Iterable[Perm]) -> PermGroup:
    gens: list[Perm] = []
    N = G.subgroup([])
    pending = list(elems)
    conj = [(g, _inv(g)) for g in G.gen_tuples]
    while pending:
        x = pending.pop()
        if N.contains(x):
            continue
        gens.append(x)
        N = G.subgroup(gens)
        pending.extend(_mul(gi, _mul(x, g)) for g, gi in conj)
    return N


def _dedupe(groups: list[PermGroup]) -> list[PermGroup]:
    out: list[PermGroup] = []
    for H in groups:
        if not any(H.same_as(K) for K in out):
            out.append(H)
    return out


def normal_subgroups(G: PermGroup, bound: int = DEFAULT_NORMAL_BOUND) -> list[PermGroup]:
    """All normal subgroups, sorted by order (trivial group first)."""
    classes = conjugacy_classes(G, bound)
    closures = _dedupe([normal_closure(G, [c[0]]) for c in classes])
    found = _dedupe([G.subgroup([])] + closures)
    frontier = list(found)
    while frontier:
        new = []
        for A in frontier:
            for B in closures:
                J = G.subgroup(A.gen_tuples + B.gen_tuples)
                if not any(J.same_as(K) for K in found + new):
                    new.append(J)
        found += new
        frontier = new
    found.sort(key=lambda H: H.order())
    return found


def intersection_order(A: PermGroup, B: PermGroup) -> int:
    small, big = (A, B) if A.order() <= B.order() else (B, A)
    return sum(1 for x in small.elements() if big.contains(x))


def is_product_like(G: PermGroup, bound: int = DEFAULT_NORMAL_BOUND
                    ) -> tuple[PermGroup, PermGroup] | None:
    nontriv = [N for N in normal_subgroups(G, bound) if N.order() > 1]
    for A, B in combinations(nontriv, 2):
        if intersection_order(A, B) == 1:
            return A, B
    return None


def is_minimal_normal(N: PermGroup, normals: Sequence[PermGroup]) -> bool:
    """N nontrivial and no nontrivial normal subgroup lies strictly inside."""
    if N.order() == 1:
        return False
    return not any(1 < M.order() < N.order() and M.is_subgroup_of(N) for M in normals)


def centralizer(G: PermGroup, S: PermGroup) -> PermGroup:
    gens = S.gen_tuples
    members = [x for x in G.elements() if all(_mul(x, s) == _mul(s, x) for s in gens)]
    return _generate_from_elements(G, members)


def _generate_from_elements(G: PermGroup, members: Iterable[Perm]) -> PermGroup:
    gens: list[Perm] = []
    H = G.subgroup([])
    for x in members:
        if not H.contains(x):
            gens.append(x)
            H = G.subgroup(gens)
    return H


def verify_cameron(G: PermGroup, k: int, bound: int = DEFAULT_NORMAL_BOUND) -> dict:
    """Check every nontrivial normal subgroup against the Cameron dichotomy."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if not is_k_transitive(G, k):
        raise ValueError(f"group is not {k}-transitive")
    entries = []
    for N in normal_subgroups(G, bound):
        if N.order() == 1:
            continue
        if is_k_transitive(N, k - 1):
            branch = "(k-1)-transitive"
        elif k == 3 and N.is_elementary_abelian_2():
            branch = "elementary abelian 2-group"
        else:
            branch = "violation"
        entries.append({"order": N.order(), "branch": branch,
                        "generators": [str(g) for g in N.generators]})
    return {
        "group": G.name,
        "degree": G.degree,
        "order": G.order(),
        "k": k,
        "normal_subgroups": entries,
        "passed": all(e["branch"] != "violation" for e in entries),
    }


# -- transitivity degree of small abstract groups --------------------------

def _mult_table(elems: list[Perm]) -> list[list[int]]:
    index = {e: i for i, e in enumerate(elems)}
    return [[index[_mul(a, b)] for b in elems] for a in elems]


def all_subgroups(elems: list[Perm], table: list[list[int]]) -> list[frozenset[int]]:
    """Every subgroup as a set of element indices (identity must be index 0).

    Subgroups are joins of cyclic subgroups, so joining repeatedly with cyclic
    subgroups until nothing new appears reaches all of them.
    """
    n = len(elems)

    def close(gens: Iterable[int]) -> frozenset[int]:
        gens = [g for g in gens if g != 0]
        seen = {0}
        queue = [0]
        for x in queue:
            for g in gens:
                y = table[x][g]
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return frozenset(seen)

    cyclic = {close([g]) for g in range(n)}
    found = set(cyclic)
    frontier = set(cyclic)
    while frontier:
        new = set()
        for H in frontier:
            for C in cyclic:
                if C <= H:
                    continue
                J = close(list(H) + list(C))
                if J not in found:
                    new.add(J)
        found |= new
        frontier = new
    return sorted(found, key=lambda H: (len(H), sorted(H)))


def coset_action(elems: list[Perm], table: list[list[int]], H: frozenset[int],
                 gens: Sequence[int]) -> PermGroup:
    """Action by left multiplication on the left cosets gH."""
    n = len(elems)
    coset_of = [-1] * n
    reps = []
    for g in range(n):
        if coset_of[g] < 0:
            idx = len(reps)
            reps.append(g)
            for h in H:
                coset_of[table[g][h]] = idx
    perms = []
    for s in gens:
        perms.append(tuple(coset_of[table[s][r]] for r in reps))
    return PermGroup(len(reps), perms, max_degree=max(len(reps), 1))


def transitivity_degree_finite(G: PermGroup, budget: int = DEFAULT_TD_BUDGET) -> dict:
    """Largest k with a faithful k-transitive action on some G/H."""
    order = G.order()
    if order > budget:
        raise BoundExceeded(f"|G|={order} exceeds budget {budget}")
    ident = _identity(G.degree)
    elems = [ident] + sorted(x for x in G.elements() if x != ident)
    table = _mult_table(elems)
    index = {e: i for i, e in enumerate(elems)}
    gen_idx = [index[g] for g in G.gen_tuples] or [0]
    inv = [row.index(0) for row in table]
    best = None
    for H in all_subgroups(elems, table):
        core = set(H)
        for g in range(len(elems)):
            core &= {table[table[g][h]][inv[g]] for h in H}
        if core != {0}:
            continue
        action = coset_action(elems, table, H, gen_idx)
        k = transitivity_of_action(action) if action.degree > 0 else 0
        if best is None or k > best["td"]:
            best = {"td": k, "stabilizer_order": len(H), "index": action.degree}
    best.update({"group": G.name, "order": order})
    return best


def burnside_td_upper_bound(n: int) -> int:
    """Largest k such that every p <= k divides n."""
    if n < 1:
        raise ValueError("n must be positive")
    k = 1
    while n % (k + 1) == 0:
        k += 1
    return k


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2)


# -- corpus file format ----------------------------------------------------

@dataclass
class CorpusEntry:
    group: PermGroup
    marking: list[FinitaryPerm] | None = None
    comments: list[str] | None = None


def parse_corpus(text: str, name: str = "", max_degree: int = DEFAULT_MAX_DEGREE) -> CorpusEntry:
    """Parse the ``domain <n>`` + one-generator-per-line format.

    An optional ``marking`` line lists generator images separated by ``|``.
    """
    degree = None
    gens: list[FinitaryPerm] = []
    marking = None
    comments = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            comments.append(line[1:].strip())
            continue
        if degree is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "domain":
                raise ValueError(f"first line must be 'domain <n>', got {line!r}")
            degree = int(parts[1])
            continue
        if line.startswith("marking"):
            body = line[len("marking"):].strip()
            marking = [FinitaryPerm.parse(tok) for tok in body.split("|")] if body else []
            continue
        gens.append(FinitaryPerm.parse(line))
    if degree is None:
        raise ValueError("missing 'domain' line")
    for g in gens + (marking or []):
        if g.degree() > degree:
            raise ValueError(f"generator {g} moves points outside 1..{degree}")
    return CorpusEntry(PermGroup(degree, gens, max_degree=max_degree, name=name), marking, comments)


def format_corpus(G: PermGroup, marking: Sequence[FinitaryPerm] | None = None,
                  comment: str = "") -> str:
    text = G.to_corpus(comment)
    if marking is not None:
        text += "marking " + " | ".join(str(m) for m in marking) + "\n"
    return text


def all_k_tuples_orbit_check(G: PermGroup, k: int) -> bool:
    """Brute-force k-transitivity: every pair of k-tuples is joined by an element."""
    pts = range(G.degree)
    elems = list(G.elements())
    src = tuple(range(k))
    images = {tuple(g[x] for x in src) for g in elems}
    return all(t in images for t in permutations(pts, k))
