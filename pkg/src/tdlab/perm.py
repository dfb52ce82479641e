"""Permutations of the natural numbers {1, 2, 3, ...}.

Two families are supported: finitary permutations (finite support, stored
sparsely) and oracle permutations whose support may be infinite.  The
separating-permutation constructor and the Alt(N) commutator sentence live
here as well because they only need these two types.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import count, islice
from typing import Callable, Iterable, Iterator, Mapping, Sequence


class FinitaryPerm:
    """A permutation of N moving only finitely many points.

    Composition follows function notation: ``(p * q)(n) == p(q(n))``.
    """

    __slots__ = ("_map", "_hash")

    def __init__(self, mapping: Mapping[int, int] | None = None):
        m = {}
        if mapping:
            for a, b in mapping.items():
                if a < 1 or b < 1:
                    raise ValueError("points of N are 1-based")
                if a != b:
                    m[a] = b
        if set(m) != set(m.values()):
            raise ValueError("mapping is not a permutation of its support")
        self._map = m
        self._hash = None

    @classmethod
    def identity(cls) -> "FinitaryPerm":
        return cls()

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]]) -> "FinitaryPerm":
        """Product of cycles, the rightmost cycle acting first."""
        result = cls()
        for cyc in reversed(list(cycles)):
            cyc = list(cyc)
            if len(set(cyc)) != len(cyc):
                raise ValueError(f"repeated point in cycle {cyc}")
            m = {cyc[i]: cyc[(i + 1) % len(cyc)] for i in range(len(cyc))}
            result = cls(m) * result
        return result

    @classmethod
    def from_images(cls, images: Sequence[int]) -> "FinitaryPerm":
        """Build from a 1-based image list: point i+1 goes to images[i]."""
        return cls({i + 1: v for i, v in enumerate(images)})

    @classmethod
    def parse(cls, text: str) -> "FinitaryPerm":
        return parse_cycles(text)

    def __call__(self, n: int) -> int:
        return self._map.get(n, n)

    @property
    def mapping(self) -> dict[int, int]:
        return dict(self._map)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(self._map)

    def degree(self) -> int:
        """Largest moved point (0 for the identity)."""
        return max(self._map, default=0)

    def is_identity(self) -> bool:
        return not self._map

    def __mul__(self, other: "FinitaryPerm") -> "FinitaryPerm":
        if not isinstance(other, FinitaryPerm):
            return NotImplemented
        return compose(self, other)

    def inverse(self) -> "FinitaryPerm":
        return FinitaryPerm({b: a for a, b in self._map.items()})

    def __invert__(self) -> "FinitaryPerm":
        return self.inverse()

    def __pow__(self, e: int) -> "FinitaryPerm":
        base = self if e >= 0 else self.inverse()
        e = abs(e)
        result = FinitaryPerm()
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def conjugate(self, g: "FinitaryPerm") -> "FinitaryPerm":
        """``self ** g == g^-1 self g``."""
        return g.inverse() * self * g

    def cycles(self) -> list[tuple[int, ...]]:
        return cycle_form(self)

    def is_even(self) -> bool:
        return is_even(self)

    def to_tuple(self, n: int) -> tuple[int, ...]:
        """0-based image tuple on {0..n-1}; requires support within {1..n}."""
        if self._map and max(self._map) > n:
            raise ValueError(f"permutation moves points beyond {n}")
        return tuple(self._map.get(i + 1, i + 1) - 1 for i in range(n))

    def __eq__(self, other) -> bool:
        if not isinstance(other, FinitaryPerm):
            return NotImplemented
        return self._map == other._map

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._map.items()))
        return self._hash

    def __str__(self) -> str:
        return format_cycles(self)

    def __repr__(self) -> str:
        return f"FinitaryPerm({format_cycles(self)!r})"


def compose(p: FinitaryPerm, q: FinitaryPerm) -> FinitaryPerm:
    """Return p∘q, i.e. apply q first."""
    m = {}
    for n in p._map.keys() | q._map.keys():
        img = p(q(n))
        if img != n:
            m[n] = img
    out = FinitaryPerm.__new__(FinitaryPerm)
    out._map = m
    out._hash = None
    return out


def cycle_form(p: FinitaryPerm) -> list[tuple[int, ...]]:
    """Disjoint cycles, smallest point first, sorted by first point."""
    seen: set[int] = set()
    out = []
    for start in sorted(p._map):
        if start in seen:
            continue
        cyc = [start]
        seen.add(start)
        n = p(start)
        while n != start:
            cyc.append(n)
            seen.add(n)
            n = p(n)
        out.append(tuple(cyc))
    return out


def is_even(p: FinitaryPerm) -> bool:
    # a cycle of length L is a product of L-1 transpositions
    return sum(len(c) - 1 for c in cycle_form(p)) % 2 == 0


def format_cycles(p: FinitaryPerm) -> str:
    cyc = cycle_form(p)
    if not cyc:
        return "()"
    return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc)


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str) -> FinitaryPerm:
    """Parse ``(1 2 3)(5 6)``; ``()`` is the identity.

    Points may be separated by whitespace or commas.  Non-disjoint cycles are
    multiplied right to left.
    """
    s = text.strip()
    if not s:
        raise ValueError("empty permutation text")
    pos = 0
    cycles = []
    for m in _CYCLE_RE.finditer(s):
        if s[pos:m.start()].strip():
            raise ValueError(f"unexpected text {s[pos:m.start()]!r} in {text!r}")
        pos = m.end()
        body = m.group(1).replace(",", " ").split()
        pts = [int(tok) for tok in body]
        if len(pts) == 1:
            raise ValueError(f"1-cycle in {text!r}")
        if pts:
            cycles.append(pts)
    if s[pos:].strip() or pos == 0:
        raise ValueError(f"cannot parse permutation {text!r}")
    return FinitaryPerm.from_cycles(cycles)


@dataclass(frozen=True)
class LazyPerm:
    """A permutation of N given by evaluation oracles.

    ``support`` must return a fresh iterator over the moved points in
    increasing order.  ``infinite`` declares whether that iterator is
    unbounded; the oracles must be pure.
    """

    eval: Callable[[int], int]
    eval_inverse: Callable[[int], int]
    support: Callable[[], Iterator[int]]
    infinite: bool = True
    name: str = "lazy"

    def __call__(self, n: int) -> int:
        return self.eval(n)

    def inverse(self) -> "LazyPerm":
        return LazyPerm(self.eval_inverse, self.eval, self.support,
                        self.infinite, f"{self.name}^-1")

    def support_prefix(self, n: int) -> list[int]:
        return list(islice(self.support(), n))

    @classmethod
    def from_finitary(cls, p: FinitaryPerm) -> "LazyPerm":
        inv = p.inverse()
        pts = sorted(p.support)
        return cls(p, inv, lambda: iter(pts), infinite=False, name=str(p))


def _moved_points(f: Callable[[int], int]) -> Iterator[int]:
    return (n for n in count(1) if f(n) != n)


def pairwise_swapper() -> LazyPerm:
    """The involution swapping 2k-1 and 2k for every k >= 1."""

    def f(n: int) -> int:
        return n + 1 if n % 2 else n - 1

    return LazyPerm(f, f, lambda: count(1), name="swap")


def triple_rotator() -> LazyPerm:
    """The product of the 3-cycles (3k-2, 3k-1, 3k) for all k >= 1."""

    def f(n: int) -> int:
        return n - 2 if n % 3 == 0 else n + 1

    def finv(n: int) -> int:
        return n + 2 if n % 3 == 1 else n - 1

    return LazyPerm(f, finv, lambda: count(1), name="rot3")


def shifted_swapper(offset: int) -> LazyPerm:
    """Swap offset+2k-1 and offset+2k for k >= 1, fixing 1..offset."""

    def f(n: int) -> int:
        if n <= offset:
            return n
        m = n - offset
        return n + 1 if m % 2 else n - 1

    return LazyPerm(f, f, lambda: count(offset + 1), name=f"swap+{offset}")


@dataclass(frozen=True)
class SeparatorPlan:
    n0: int
    m: tuple[int, ...]
    n: tuple[int, ...]
    l: tuple[tuple[int, ...], ...]
    cycles: tuple[FinitaryPerm, ...]
    s0: FinitaryPerm
    Y: tuple[frozenset[int], ...]

    def chain(self) -> list[int]:
        """n0, m1, n1, ..., mk, nk."""
        out = [self.n0]
        for mi, ni in zip(self.m, self.n):
            out += [mi, ni]
        return out

    def points(self) -> list[int]:
        return self.chain() + [x for row in self.l for x in row]

    def to_json(self) -> dict:
        return {
            "n0": self.n0,
            "m": list(self.m),
            "n": list(self.n),
            "l": [list(r) for r in self.l],
            "cycles": [str(c) for c in self.cycles],
            "s0": str(self.s0),
            "Y": [sorted(y) for y in self.Y],
        }


def complete_partial_injection(pairs: Mapping[int, int]) -> FinitaryPerm:
    """Extend an injection X -> s(X) to a permutation of X ∪ s(X).

    Points of s(X) \\ X are sent, in increasing order, to the smallest unused
    targets of X \\ s(X).
    """
    dom = set(pairs)
    img = set(pairs.values())
    if len(img) != len(dom):
        raise ValueError("not injective")
    m = dict(pairs)
    free_targets = sorted(dom - img)
    for src, tgt in zip(sorted(img - dom), free_targets):
        m[src] = tgt
    return FinitaryPerm(m)


def _smallest_outside(excluded: set[int], start: int = 1) -> int:
    n = start
    while n in excluded:
        n += 1
    return n


def construct_separating_permutation(
    s: FinitaryPerm,
    X: Iterable[int],
    pairs: Sequence[tuple[LazyPerm, int]],
) -> tuple[FinitaryPerm, SeparatorPlan]:
    """Find a finitary t agreeing with s on X such that
    ``a_k t^alpha_k ... a_1 t^alpha_1`` moves some point.

    Every free choice takes the smallest admissible point.
    """
    X = set(X)
    if not pairs:
        raise ValueError("need at least one (a_i, alpha_i) pair")
    for a, alpha in pairs:
        if isinstance(a, FinitaryPerm) or not getattr(a, "infinite", False):
            raise ValueError(f"{getattr(a, 'name', a)!r} does not have infinite support")
        if not isinstance(alpha, int) or alpha == 0:
            raise ValueError("exponents must be nonzero integers")

    sX = {s(x) for x in X}
    base = X | sX
    n0 = _smallest_outside(base)
    used = base | {n0}
    ms, ns, Ys = [], [], []
    for a, _ in pairs:
        Y = frozenset(used)
        bad = set(Y) | {a.eval_inverse(y) for y in Y}
        for cand in a.support():
            if cand not in bad:
                break
        else:
            raise ValueError(f"support of {a.name!r} exhausted")
        mi, ni = cand, a(cand)
        ms.append(mi)
        ns.append(ni)
        Ys.append(Y)
        used |= {mi, ni}

    # fillers avoid every chosen point, including m_k and n_k
    ls = []
    for _, alpha in pairs:
        row = []
        for _ in range(abs(alpha) - 1):
            x = _smallest_outside(used)
            row.append(x)
            used.add(x)
        ls.append(tuple(row))

    cycles = []
    prev = n0
    for (_, alpha), mi, row in zip(pairs, ms, ls):
        c = FinitaryPerm.from_cycles([[prev, *row, mi]])
        cycles.append(c if alpha > 0 else c.inverse())
        prev = ns[len(cycles) - 1]

    s0 = complete_partial_injection({x: s(x) for x in X})
    t = s0
    for c in cycles:
        t = t * c
    plan = SeparatorPlan(n0, tuple(ms), tuple(ns), tuple(ls), tuple(cycles), s0, tuple(Ys))
    return t, plan


def evaluate_word_chain(t: FinitaryPerm, pairs: Sequence[tuple[LazyPerm, int]], n: int) -> list[int]:
    """Trajectory of n under t^alpha_1, a_1, t^alpha_2, a_2, ... in that order."""
    traj = [n]
    for a, alpha in pairs:
        step = t if alpha > 0 else t.inverse()
        for _ in range(abs(alpha)):
            n = step(n)
        traj.append(n)
        n = a(n)
        traj.append(n)
    return traj


ALT_SENTENCE_CONSTANTS = (
    FinitaryPerm.from_cycles([(1, 2, 3)]),
    FinitaryPerm.from_cycles([(4, 5, 6)]),
    FinitaryPerm.from_cycles([(7, 8, 9)]),
    FinitaryPerm.from_cycles([(10, 11, 12)]),
)


def commutator(x: FinitaryPerm, y: FinitaryPerm) -> FinitaryPerm:
    """[x, y] = x^-1 y^-1 x y."""
    return x.inverse() * y.inverse() * x * y


def check_alt_sentence(g: FinitaryPerm) -> bool:
    """True iff one of [a^g, a], [b^g, a], [c^g, a], [d^g, a] is trivial,
    with a, b, c, d the 3-cycles on {1,2,3}, ..., {10,11,12}."""
    a = ALT_SENTENCE_CONSTANTS[0]
    return any(commutator(c.conjugate(g), a).is_identity() for c in ALT_SENTENCE_CONSTANTS)
