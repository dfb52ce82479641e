"""Explicit example groups: Houghton groups, the translation-plus-transposition
generators over a finite group, and affine actions over finite fields."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import product
from typing import Iterator, Sequence

from .perm import FinitaryPerm, LazyPerm, complete_partial_injection
from .permgrp import PermGroup
from .words import FiniteGroupTable

# Presentation data recorded for reference only; nothing is computed from it.
PRESENTATIONS = {
    "BS(1,2)": {"generators": ["a", "b"], "relators": ["b^-1 a b a^-2"]},
}


# -- Houghton groups --------------------------------------------------------

def flatten(n: int, ray: int, pos: int) -> int:
    """(ray r, position p), both 1-based, to the point n(p-1)+r of ℕ."""
    if not (1 <= ray <= n and pos >= 1):
        raise ValueError(f"no point ({ray}, {pos}) in Ω_{n}")
    return n * (pos - 1) + ray


def unflatten(n: int, x: int) -> tuple[int, int]:
    return (x - 1) % n + 1, (x - 1) // n + 1


def _gen_step(n: int, i: int, e: int, x: int) -> int:
    """Apply g_i (e = 1) or its inverse (e = -1) to the point x."""
    r, p = unflatten(n, x)
    if e == 1:
        if r == 1:
            return flatten(n, 1, p - 1) if p > 1 else flatten(n, i, 1)
        if r == i:
            return flatten(n, i, p + 1)
        return x
    if r == i:
        return flatten(n, i, p - 1) if p > 1 else flatten(n, 1, 1)
    if r == 1:
        return flatten(n, 1, p + 1)
    return x


def _translation(n: int, offsets: Sequence[int], x: int, inverse: bool = False) -> int:
    """τ_t = g_2^{t_2} ⋯ g_n^{t_n} (rightmost factor acts first), or its inverse."""
    seq = [(i, offsets[i - 1]) for i in range(2, n + 1)]
    if not inverse:
        seq.reverse()
    for i, t in seq:
        e = 1 if t > 0 else -1
        if inverse:
            e = -e
        for _ in range(abs(t)):
            x = _gen_step(n, i, e, x)
    return x


@dataclass(frozen=True)
class HoughtonElement:
    """s = f ∘ τ_t with f finitary on Ω_n and τ_t the canonical translation.

    ``offsets[r-1]`` is the eventual shift of ray r; they sum to zero.
    """

    n: int
    finitary: FinitaryPerm
    offsets: tuple[int, ...]

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("Houghton groups need n >= 2 rays")
        if len(self.offsets) != self.n or sum(self.offsets) != 0:
            raise ValueError("offsets must have length n and sum to 0")

    def __call__(self, x: int) -> int:
        return self.finitary(_translation(self.n, self.offsets, x))

    def inverse_eval(self, x: int) -> int:
        return _translation(self.n, self.offsets, self.finitary.inverse()(x), inverse=True)

    @property
    def radius(self) -> int:
        """Beyond this position every ray is shifted by its offset."""
        supp = max((unflatten(self.n, x)[1] for x in self.finitary.support), default=0)
        return supp + sum(abs(t) for t in self.offsets[1:])

    def is_finitary(self) -> bool:
        return not any(self.offsets)

    def __mul__(self, other: "HoughtonElement") -> "HoughtonElement":
        if other.n != self.n:
            raise ValueError("ray counts differ")
        offsets = tuple(a + b for a, b in zip(self.offsets, other.offsets))
        return _extract(self.n, lambda x: self(other(x)), offsets, self.radius + other.radius)

    def inverse(self) -> "HoughtonElement":
        offsets = tuple(-t for t in self.offsets)
        return _extract(self.n, self.inverse_eval, offsets, self.radius)

    def __invert__(self) -> "HoughtonElement":
        return self.inverse()

    def __pow__(self, e: int) -> "HoughtonElement":
        base = self if e >= 0 else self.inverse()
        out = HoughtonElement(self.n, FinitaryPerm.identity(), (0,) * self.n)
        for _ in range(abs(e)):
            out = out * base
        return out

    def window(self, positions: int) -> dict[int, int]:
        """Images of every point at position ≤ positions."""
        return {x: self(x) for x in range(1, self.n * positions + 1)}

    def as_lazy(self) -> LazyPerm:
        n, r = self.n, self.radius

        def support() -> Iterator[int]:
            x = 1
            while self.offsets != (0,) * n or unflatten(n, x)[1] <= r:
                if self(x) != x:
                    yield x
                x += 1

        return LazyPerm(self, self.inverse_eval, support, infinite=not self.is_finitary(),
                        name=f"H{n}-element")


def _extract(n: int, func, offsets: tuple[int, ...], radius: int) -> HoughtonElement:
    """Write func as f ∘ τ_offsets, reading f off a window large enough to hold it."""
    bound = radius + sum(abs(t) for t in offsets[1:]) + 1
    mapping = {}
    for x in range(1, n * bound + 1):
        y = func(_translation(n, offsets, x, inverse=True))
        if y != x:
            mapping[x] = y
    return HoughtonElement(n, FinitaryPerm(mapping), offsets)


def houghton_generators(n: int) -> list[HoughtonElement]:
    """g_2..g_n: g_i shifts ray 1 toward the origin, ray i away, bridging (1,1) ↦ (i,1)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    gens = []
    for i in range(2, n + 1):
        off = [0] * n
        off[0], off[i - 1] = -1, 1
        gens.append(HoughtonElement(n, FinitaryPerm.identity(), tuple(off)))
    return gens


def houghton_commutator(x: HoughtonElement, y: HoughtonElement) -> HoughtonElement:
    return x.inverse() * y.inverse() * x * y


def houghton_witness(n: int, a: Sequence[int], b: Sequence[int]) -> HoughtonElement:
    """Even finitary element sending a[i] ↦ b[i], built from transpositions."""
    if len(a) != len(b):
        raise ValueError("tuples must have equal length")
    if len(set(a)) != len(a) or len(set(b)) != len(b):
        raise ValueError("tuple entries must be distinct")
    s = complete_partial_injection(dict(zip(a, b)))
    # rebuild from explicit transpositions so the factorization is visible
    t = FinitaryPerm.identity()
    for cyc in s.cycles():
        for j in range(len(cyc) - 1, 0, -1):
            t = t * FinitaryPerm.from_cycles([(cyc[0], cyc[j])])
    if not t.is_even():
        far = max([*a, *b, *s.support, 0]) + 1
        t = t * FinitaryPerm.from_cycles([(far, far + 1)])
    return HoughtonElement(n, t, (0,) * n)


# -- translations and transpositions over a finite group --------------------

def _check_generates(Q: FiniteGroupTable, gens: Sequence[int]) -> None:
    if len(Q.closure(gens)) != Q.order:
        raise ValueError("given elements do not generate the group")


def left_translation(Q: FiniteGroupTable, x: int) -> FinitaryPerm:
    """λ(x): g ↦ xg, with element i as point i+1."""
    return FinitaryPerm.from_images([Q.mul[x][g] + 1 for g in range(Q.order)])


def prop_htA_generators(Q: FiniteGroupTable, gens: Sequence[int]) -> PermGroup:
    """⟨λ(x_i), (e x_i)⟩ acting on Q; points are element indices plus one."""
    _check_generates(Q, gens)
    perms = [left_translation(Q, x) for x in gens]
    perms += [FinitaryPerm.from_cycles([(1, x + 1)]) for x in gens if x != 0]
    return PermGroup(Q.order, perms, max_degree=max(64, Q.order), name="translations+transpositions")


Factor = tuple  # ("L", i, ±1) for λ(x_i)^{±1}; ("a", i) for the transposition (e x_i)


def _cayley_words(Q: FiniteGroupTable, gens: Sequence[int]) -> list[list[tuple[int, int]]]:
    """Shortest word (list of (generator slot, ±1)) for each element, g = product."""
    words: list[list[tuple[int, int]] | None] = [None] * Q.order
    words[0] = []
    queue = deque([0])
    steps = [(i, e) for i in range(len(gens)) for e in (1, -1)]
    while queue:
        g = queue.popleft()
        for i, e in steps:
            x = gens[i] if e == 1 else Q.inv[gens[i]]
            h = Q.mul[g][x]
            if words[h] is None:
                words[h] = words[g] + [(i, e)]
                queue.append(h)
    return words  # type: ignore[return-value]


def _lambda_word(word: list[tuple[int, int]]) -> list[Factor]:
    return [("L", i, e) for i, e in word]


def _invert_factors(fs: Sequence[Factor]) -> list[Factor]:
    return [f if f[0] == "a" else ("L", f[1], -f[2]) for f in reversed(fs)]


def transposition_factorization(Q: FiniteGroupTable, gens: Sequence[int], g: int,
                                h: int) -> list[Factor]:
    """Word in λ(x_i)^{±1} and a_i = (e x_i) evaluating to the transposition (g h).

    Follows a geodesic g = g_0, …, g_n = h with g_{j+1} = g_j x^{±1}.  Each
    edge gives t = λ(u) a_i λ(u)^{-1} with u the endpoint satisfying
    u x_i = other endpoint; the path is folded by conjugation,
    (g_0 g_n) = c (g_{n-1} g_n) c^{-1} with c = t_{g_0,g_1} ⋯ t_{g_{n-2},g_{n-1}}.
    """
    if g == h:
        raise ValueError("g and h must be distinct")
    _check_generates(Q, gens)
    words = _cayley_words(Q, gens)
    # geodesic from g to h: g · word(g^-1 h)
    path = [g]
    for i, e in words[Q.mul[Q.inv[g]][h]]:
        x = gens[i] if e == 1 else Q.inv[gens[i]]
        path.append(Q.mul[path[-1]][x])

    def edge(u: int, v: int) -> list[Factor]:
        for i, x in enumerate(gens):
            if Q.mul[u][x] == v:
                base = u
                break
            if Q.mul[v][x] == u:
                base = v
                break
        else:  # pragma: no cover - consecutive path points always differ by a generator
            raise AssertionError("path step is not a generator")
        lw = _lambda_word(words[base])
        return lw + [("a", i)] + _invert_factors(lw)

    word = edge(path[-2], path[-1])
    for j in range(len(path) - 3, -1, -1):
        t = edge(path[j], path[j + 1])
        word = t + word + _invert_factors(t)
    return word


def evaluate_factorization(Q: FiniteGroupTable, gens: Sequence[int],
                           word: Sequence[Factor]) -> FinitaryPerm:
    out = FinitaryPerm.identity()
    for f in word:
        if f[0] == "a":
            p = FinitaryPerm.from_cycles([(1, gens[f[1]] + 1)])
        else:
            p = left_translation(Q, gens[f[1]]) ** f[2]
        out = out * p
    return out


def format_factorization(word: Sequence[Factor]) -> str:
    parts = []
    for f in word:
        if f[0] == "a":
            parts.append(f"a{f[1] + 1}")
        else:
            parts.append(f"L{f[1] + 1}" + ("" if f[2] == 1 else "^-1"))
    return " ".join(parts) if parts else "1"


# -- affine groups ----------------------------------------------------------

def prime_power(q: int) -> tuple[int, int]:
    """(p, m) with q = p^m, or ValueError."""
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    m, r = 0, q
    while r % p == 0:
        r //= p
        m += 1
    if r != 1:
        raise ValueError(f"{q} is not a prime power")
    return p, m


@dataclass(frozen=True)
class FiniteField:
    """GF(p^m); element i has base-p digits as polynomial coefficients."""

    p: int
    m: int
    modulus: tuple[int, ...]  # monic, low degree first, length m+1
    primitive: int

    @property
    def q(self) -> int:
        return self.p ** self.m

    def digits(self, x: int) -> list[int]:
        return [(x // self.p ** i) % self.p for i in range(self.m)]

    def from_digits(self, ds: Sequence[int]) -> int:
        return sum(d * self.p ** i for i, d in enumerate(ds))

    def add(self, x: int, y: int) -> int:
        return self.from_digits([(a + b) % self.p for a, b in zip(self.digits(x), self.digits(y))])

    def mul(self, x: int, y: int) -> int:
        return _poly_mulmod(self.digits(x), self.digits(y), self.modulus, self.p, self)


def _poly_mulmod(a, b, mod, p, F) -> int:
    m = len(mod) - 1
    prod = [0] * (2 * m)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    for d in range(len(prod) - 1, m - 1, -1):
        c = prod[d]
        if c:
            for i in range(m + 1):
                prod[d - m + i] = (prod[d - m + i] - c * mod[i]) % p
    return F.from_digits(prod[:m])


def finite_field(q: int) -> FiniteField:
    """Brute force: first monic modulus admitting an element of order q-1."""
    p, m = prime_power(q)
    for tail in product(range(p), repeat=m):
        mod = tuple(tail) + (1,)
        F = FiniteField(p, m, mod, 0)
        for g in range(1, q):
            x, order = g, 1
            while x != 1 and order < q:
                x = F.mul(x, g)
                order += 1
            if x == 1 and order == q - 1:
                return FiniteField(p, m, mod, g)
    raise AssertionError("no field found")  # pragma: no cover


def affine_action(q: int) -> PermGroup:
    """AGL(1,q) = F ⋊ F* on the q field elements (element i is point i+1)."""
    F = finite_field(q)
    shift = FinitaryPerm.from_images([F.add(x, 1) + 1 for x in range(q)])
    scale = FinitaryPerm.from_images([F.mul(F.primitive, x) + 1 for x in range(q)])
    return PermGroup(q, [shift, scale], name=f"AGL(1,{q})")


def affine_f2_action(n: int) -> PermGroup:
    """AGL(n,2) on F_2^n (vector v as bitmask, point v+1): a translation and all transvections."""
    if not 1 <= n <= 4:
        raise ValueError("n must be between 1 and 4")
    size = 2 ** n
    gens = [FinitaryPerm.from_images([(v ^ 1) + 1 for v in range(size)])]
    for i in range(n):
        for j in range(n):
            if i != j:
                # x ↦ x + x_i e_j
                gens.append(FinitaryPerm.from_images(
                    [(v ^ (((v >> i) & 1) << j)) + 1 for v in range(size)]))
    return PermGroup(size, gens, name=f"AGL({n},2)")
