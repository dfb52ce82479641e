"""Words in free products G * F_n over a finite coefficient group G.

A letter is either a group constant ``("g", i)`` with ``i`` an element index
of the table, or a variable ``("x", ±j)`` standing for x_j^{±1}.  Commutators
use the convention [a, b] = a^-1 b^-1 a b and conjugation a^b = b^-1 a b.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from itertools import product
from math import factorial
from typing import Iterable, Sequence

from .perm import FinitaryPerm
from .permgrp import PermGroup, _identity, _inv, _mul

Letter = tuple[str, int]

DEFAULT_EVAL_BUDGET = 10**7


class FiniteGroupTable:
    """A finite group as a full multiplication table; element 0 is the identity."""

    def __init__(self, mul: Sequence[Sequence[int]], labels: Sequence[str] | None = None,
                 *, perms: Sequence[FinitaryPerm] | None = None, check: bool = True):
        self.mul = [list(row) for row in mul]
        n = len(self.mul)
        self.order = n
        self.labels = list(labels) if labels is not None else [f"e{i}" for i in range(n)]
        self.perms = list(perms) if perms is not None else None
        if len(set(self.labels)) != n or any(re.search(r"\s", s) for s in self.labels):
            raise ValueError("labels must be distinct and whitespace-free")
        if check:
            self._validate()
        self.inv = [row.index(0) for row in self.mul]
        self._label_index = {s: i for i, s in enumerate(self.labels)}
        self._perm_index = ({p: i for i, p in enumerate(self.perms)}
                            if self.perms is not None else None)

    def _validate(self) -> None:
        n = self.order
        for i, row in enumerate(self.mul):
            if sorted(row) != list(range(n)):
                raise ValueError(f"row {i} is not a permutation of the elements")
            if row[0] != i or self.mul[0][i] != i:
                raise ValueError("element 0 is not the identity")
        for j in range(n):
            if sorted(self.mul[i][j] for i in range(n)) != list(range(n)):
                raise ValueError(f"column {j} is not a permutation of the elements")
        # Light's test: (x a) y == x (a y) for a in a generating set suffices
        for a in self.generating_set():
            for x in range(n):
                xa = self.mul[x][a]
                for y in range(n):
                    if self.mul[xa][y] != self.mul[x][self.mul[a][y]]:
                        raise ValueError("multiplication table is not associative")

    def generating_set(self) -> list[int]:
        """Greedy generating set: add the first element outside the closure."""
        gens: list[int] = []
        closure = {0}
        for g in range(self.order):
            if g in closure:
                continue
            gens.append(g)
            closure = self.closure(gens)
        return gens

    def closure(self, gens: Iterable[int]) -> set[int]:
        gens = list(gens)
        seen = {0}
        queue = [0]
        for x in queue:
            for g in gens:
                y = self.mul[x][g]
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return seen

    @classmethod
    def from_perm_group(cls, G: PermGroup) -> "FiniteGroupTable":
        """Elements ordered by (support size, cycle notation); identity first."""
        n = G.degree
        perms = [FinitaryPerm.from_images([x + 1 for x in e]) for e in G.elements()]
        perms.sort(key=lambda p: (len(p.support), str(p)))
        index = {p.to_tuple(n): i for i, p in enumerate(perms)}
        tuples = [p.to_tuple(n) for p in perms]
        mul = [[index[_mul(a, b)] for b in tuples] for a in tuples]
        labels = [str(p).replace(" ", ",") for p in perms]
        return cls(mul, labels, perms=perms, check=False)

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroupTable":
        return cls([[(i + j) % n for j in range(n)] for i in range(n)],
                   [str(i) for i in range(n)])

    @classmethod
    def direct_product(cls, A: "FiniteGroupTable", B: "FiniteGroupTable") -> "FiniteGroupTable":
        pairs = [(a, b) for a in range(A.order) for b in range(B.order)]
        index = {p: i for i, p in enumerate(pairs)}
        mul = [[index[(A.mul[a1][a2], B.mul[b1][b2])] for (a2, b2) in pairs]
               for (a1, b1) in pairs]
        labels = [f"<{A.labels[a]};{B.labels[b]}>" for a, b in pairs]
        return cls(mul, labels, check=False)

    def product_index(self, a: int, b: int, B: "FiniteGroupTable") -> int:
        """Index of (a, b) in ``direct_product(self, B)``."""
        return a * B.order + b

    def index(self, label: str) -> int:
        return self._label_index[label]

    def index_of_perm(self, p: FinitaryPerm) -> int:
        if self._perm_index is None:
            raise ValueError("table was not built from a permutation group")
        try:
            return self._perm_index[p]
        except KeyError:
            raise ValueError(f"{p} is not an element of the group") from None

    def power(self, g: int, e: int) -> int:
        if e < 0:
            g, e = self.inv[g], -e
        out = 0
        for _ in range(e):
            out = self.mul[out][g]
        return out

    def conjugacy_class(self, a: int) -> set[int]:
        return {self.mul[self.mul[self.inv[g]][a]][g] for g in range(self.order)}

    def is_central(self, a: int) -> bool:
        return all(self.mul[a][g] == self.mul[g][a] for g in range(self.order))

    def word_length(self, gens: Sequence[int]) -> list[int]:
        """Cayley-graph distances from the identity w.r.t. gens and inverses."""
        sym = sorted(set(gens) | {self.inv[g] for g in gens})
        dist = [-1] * self.order
        dist[0] = 0
        queue = deque([0])
        while queue:
            x = queue.popleft()
            for s in sym:
                y = self.mul[x][s]
                if dist[y] < 0:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        return dist


@dataclass(frozen=True)
class MixedWord:
    """A word in G * F_n.  Letters are stored as given; see ``normal_form``."""

    group: FiniteGroupTable
    letters: tuple[Letter, ...]
    n: int

    def __post_init__(self):
        for kind, v in self.letters:
            if kind == "g":
                if not 0 <= v < self.group.order:
                    raise ValueError(f"bad group constant {v}")
            elif kind == "x":
                if v == 0 or abs(v) > self.n:
                    raise ValueError(f"variable x{abs(v)} outside 1..{self.n}")
            else:
                raise ValueError(f"bad letter kind {kind!r}")

    def __eq__(self, other):
        if not isinstance(other, MixedWord):
            return NotImplemented
        return (self.group is other.group and self.n == other.n
                and self.letters == other.letters)

    def __hash__(self):
        return hash((id(self.group), self.letters, self.n))

    @classmethod
    def const(cls, G: FiniteGroupTable, g: int, n: int = 1) -> "MixedWord":
        return cls(G, (("g", g),), n)

    @classmethod
    def var(cls, G: FiniteGroupTable, i: int, n: int | None = None) -> "MixedWord":
        return cls(G, (("x", i),), n if n is not None else abs(i))

    @classmethod
    def one(cls, G: FiniteGroupTable, n: int = 1) -> "MixedWord":
        return cls(G, (), n)

    def widen(self, n: int) -> "MixedWord":
        if n < self.n:
            raise ValueError("cannot narrow the variable count")
        return MixedWord(self.group, self.letters, n)

    def __mul__(self, other: "MixedWord") -> "MixedWord":
        if self.group is not other.group:
            raise ValueError("words over different coefficient groups")
        return MixedWord(self.group, self.letters + other.letters, max(self.n, other.n))

    def inverse(self) -> "MixedWord":
        G = self.group
        out = []
        for kind, v in reversed(self.letters):
            out.append(("g", G.inv[v]) if kind == "g" else ("x", -v))
        return MixedWord(G, tuple(out), self.n)

    __invert__ = inverse

    def __pow__(self, e: int) -> "MixedWord":
        base = self if e >= 0 else self.inverse()
        return MixedWord(self.group, base.letters * abs(e), self.n)

    def normal_form(self) -> "MixedWord":
        return normal_form(self)

    def is_trivial(self) -> bool:
        return not normal_form(self).letters

    def syllables(self) -> list[tuple[str, object]]:
        return syllables(self)

    def __str__(self) -> str:
        return format_word(self)


def commutator(a: MixedWord, b: MixedWord) -> MixedWord:
    return a.inverse() * b.inverse() * a * b


def iterated_commutator(items: Sequence[MixedWord]) -> MixedWord:
    """[a_1, ..., a_k] = [[a_1, ..., a_{k-1}], a_k]; a single item is itself."""
    acc = items[0]
    for b in items[1:]:
        acc = commutator(acc, b)
    return acc


def normal_form(w: MixedWord) -> MixedWord:
    """Unique reduced alternating form (stack reduction)."""
    G = w.group
    stack: list[Letter] = []
    for kind, v in w.letters:
        if kind == "g":
            if v == 0:
                continue
            if stack and stack[-1][0] == "g":
                p = G.mul[stack[-1][1]][v]
                stack.pop()
                if p != 0:
                    stack.append(("g", p))
                continue
            stack.append(("g", v))
        else:
            if stack and stack[-1] == ("x", -v):
                stack.pop()
                continue
            stack.append(("x", v))
    return MixedWord(G, tuple(stack), w.n)


def syllables(w: MixedWord) -> list[tuple[str, object]]:
    """Syllables of the normal form: ``("g", i)`` or ``("x", (letters...))``.

    A free syllable is a maximal run of variable letters; the free factor F_n
    counts as one factor of the product.
    """
    out: list[tuple[str, object]] = []
    for kind, v in normal_form(w).letters:
        if kind == "g":
            out.append(("g", v))
        elif out and out[-1][0] == "x":
            out[-1] = ("x", out[-1][1] + (v,))
        else:
            out.append(("x", (v,)))
    return out


def fp_length(w: MixedWord, S_G: Sequence[int]) -> int:
    """Word length in G * F_n w.r.t. S_G ∪ {x_1..x_n}: sum of syllable lengths."""
    dist = w.group.word_length(S_G)
    total = 0
    for kind, v in syllables(w):
        if kind == "g":
            if dist[v] < 0:
                raise ValueError(f"{w.group.labels[v]} is not generated by S_G")
            total += dist[v]
        else:
            total += len(v)
    return total


def evaluate(w: MixedWord, assignment: Sequence[int]) -> int:
    """Image under the retraction G * F_n -> G fixing G, x_i -> assignment[i-1]."""
    G = w.group
    if len(assignment) != w.n:
        raise ValueError(f"expected {w.n} values, got {len(assignment)}")
    inv = G.inv
    acc = 0
    for kind, v in w.letters:
        if kind == "g":
            acc = G.mul[acc][v]
        elif v > 0:
            acc = G.mul[acc][assignment[v - 1]]
        else:
            acc = G.mul[acc][inv[assignment[-v - 1]]]
    return acc


def substitute(w: MixedWord, images: Sequence[MixedWord], n: int | None = None) -> MixedWord:
    """w(a_1, ..., a_n): replace x_i by images[i-1], keeping constants."""
    if len(images) < w.n:
        raise ValueError("not enough substitution images")
    n_out = n if n is not None else max((a.n for a in images), default=0)
    inv_images = [a.inverse() for a in images]
    letters: list[Letter] = []
    for kind, v in w.letters:
        if kind == "g":
            letters.append((kind, v))
        elif v > 0:
            letters.extend(images[v - 1].letters)
        else:
            letters.extend(inv_images[-v - 1].letters)
    return MixedWord(w.group, tuple(letters), n_out)


@dataclass(frozen=True)
class IdentityCheck:
    holds: bool
    witness: tuple[int, ...] | None
    evaluations: int

    def __bool__(self) -> bool:
        return self.holds


def is_mixed_identity(G: FiniteGroupTable, w: MixedWord,
                      budget: int = DEFAULT_EVAL_BUDGET) -> IdentityCheck:
    """Exhaustive check of w(g_1..g_n) = 1, row-major over element indices."""
    if w.group is not G:
        raise ValueError("word is over a different coefficient group")
    total = G.order ** w.n
    if total > budget:
        raise ValueError(f"{total} evaluations exceed the budget {budget}")
    wn = normal_form(w)
    count = 0
    for assignment in product(range(G.order), repeat=w.n):
        count += 1
        if evaluate(wn, assignment) != 0:
            return IdentityCheck(False, assignment, count)
    return IdentityCheck(True, None, count)


def mixed_identity_from_finite_class(G: FiniteGroupTable, a: int, n: int) -> MixedWord:
    """[x^{n!}, a]; an identity of G when n is the class size of a."""
    if a == 0:
        raise ValueError("a must be nontrivial")
    x = MixedWord.var(G, 1)
    return commutator(x ** factorial(n), MixedWord.const(G, a))


def direct_product_identity(AB: FiniteGroupTable, a: int, b: int) -> MixedWord:
    """[[a, x], [b, x]] for constants a, b of the product group."""
    x = MixedWord.var(AB, 1)
    return commutator(commutator(MixedWord.const(AB, a), x),
                      commutator(MixedWord.const(AB, b), x))


def build_ui_word(ws: Sequence[MixedWord]) -> MixedWord:
    """u_i = [w_1, x^-1 w_2 x, ..., x^-(i-1) w_i x^(i-1)] with x = x_{n+1}."""
    if not ws:
        raise ValueError("need at least one word")
    G = ws[0].group
    n = max(w.n for w in ws)
    for j, w in enumerate(ws, 1):
        if w.is_trivial():
            raise ValueError(f"w_{j} is trivial")
    x = MixedWord.var(G, n + 1)
    terms = [(x ** -j) * w.widen(n + 1) * (x ** j) for j, w in enumerate(ws)]
    u = normal_form(iterated_commutator(terms))
    if not u.letters:
        raise RuntimeError("u_i reduced to the identity")
    return u


def embed_one_variable(w: MixedWord, g: int) -> MixedWord:
    """Substitute x_i -> x^i g x^i, mapping G * F_n into G * <x>."""
    G = w.group
    if g == 0:
        raise ValueError("g must be nontrivial")
    x = MixedWord.var(G, 1)
    c = MixedWord.const(G, g)
    images = [(x ** i) * c * (x ** i) for i in range(1, w.n + 1)]
    out = normal_form(substitute(w, images, n=1))
    if not out.letters and not w.is_trivial():
        raise RuntimeError("embedding sent a nontrivial word to 1")
    return out


# -- text formats ----------------------------------------------------------

def format_word(w: MixedWord) -> str:
    """Token format: ``g:<label>``, ``x<i>``, ``X<i>``; empty word is ``1``."""
    toks = []
    for kind, v in w.letters:
        if kind == "g":
            toks.append("g:" + w.group.labels[v])
        else:
            toks.append(("x" if v > 0 else "X") + str(abs(v)))
    return " ".join(toks) if toks else "1"


def parse_word(G: FiniteGroupTable, text: str, n: int | None = None) -> MixedWord:
    letters: list[Letter] = []
    nmax = 0
    for tok in text.split():
        if tok == "1":
            continue
        if tok.startswith("g:"):
            letters.append(("g", G.index(tok[2:])))
        elif re.fullmatch(r"[xX]\d+", tok):
            i = int(tok[1:])
            if i == 0:
                raise ValueError("variables are numbered from 1")
            nmax = max(nmax, i)
            letters.append(("x", i if tok[0] == "x" else -i))
        else:
            raise ValueError(f"bad token {tok!r}")
    return MixedWord(G, tuple(letters), max(nmax, n or 0, 1))


class _ExprParser:
    """Expressions such as ``[x1^2,(123)]`` or ``x1 (1 2) X1``.

    Grammar: product of factors; factor = atom ['^' int]; atom = x<i> | X<i> |
    '(' cycle ')' | '[' expr (',' expr)+ ']' | '{' expr '}' | 'g:'label.
    Cycles with no separators are read digit by digit.
    """

    def __init__(self, G: FiniteGroupTable, text: str):
        self.G = G
        self.s = text
        self.i = 0
        self.nmax = 0

    def peek(self) -> str:
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1
        return self.s[self.i] if self.i < len(self.s) else ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            raise ValueError(f"expected {ch!r} at position {self.i} in {self.s!r}")
        self.i += 1

    def expr(self) -> list[Letter]:
        out: list[Letter] = []
        while self.peek() and self.peek() not in ",]}":
            out.extend(self.factor())
        return out

    def factor(self) -> list[Letter]:
        base = self.atom()
        if self.peek() == "^":
            self.i += 1
            m = re.match(r"\s*(-?\d+)", self.s[self.i:])
            if not m:
                raise ValueError(f"bad exponent in {self.s!r}")
            self.i += m.end()
            e = int(m.group(1))
            w = MixedWord(self.G, tuple(base), max(self.nmax, 1))
            return list((w ** e).letters)
        return base

    def atom(self) -> list[Letter]:
        c = self.peek()
        G = self.G
        if c in "xX":
            m = re.match(r"[xX](\d+)", self.s[self.i:])
            if not m:
                raise ValueError(f"bad variable in {self.s!r}")
            self.i += m.end()
            k = int(m.group(1))
            self.nmax = max(self.nmax, k)
            return [("x", k if c == "x" else -k)]
        if c == "(":
            j = self.s.index(")", self.i)
            body = self.s[self.i + 1:j]
            self.i = j + 1
            if re.search(r"[\s,]", body.strip()):
                pts = [int(t) for t in body.replace(",", " ").split()]
            else:
                pts = [int(ch) for ch in body.strip()]
            p = FinitaryPerm.from_cycles([pts]) if len(pts) > 1 else FinitaryPerm()
            return [("g", G.index_of_perm(p))]
        if c == "[":
            self.i += 1
            parts = [self.expr()]
            while self.peek() == ",":
                self.i += 1
                parts.append(self.expr())
            self.expect("]")
            if len(parts) < 2:
                raise ValueError("commutator needs at least two entries")
            n = max(self.nmax, 1)
            ws = [MixedWord(G, tuple(p), n) for p in parts]
            return list(iterated_commutator(ws).letters)
        if c == "{":
            self.i += 1
            inner = self.expr()
            self.expect("}")
            return inner
        if self.s.startswith("g:", self.i):
            m = re.match(r"g:(\S+?)(?=[\s\]\[,{}^]|$)", self.s[self.i:])
            if not m:
                raise ValueError(f"bad constant in {self.s!r}")
            self.i += m.end()
            return [("g", G.index(m.group(1)))]
        raise ValueError(f"unexpected {c!r} at position {self.i} in {self.s!r}")


def parse_expression(G: FiniteGroupTable, text: str) -> MixedWord:
    p = _ExprParser(G, text)
    letters = p.expr()
    if p.peek():
        raise ValueError(f"trailing text in {text!r}")
    return MixedWord(G, tuple(letters), max(p.nmax, 1))


# -- free-product extension certificate ------------------------------------

def _coset_distinct(G: FiniteGroupTable, H: set[int], xs: Sequence[int]) -> bool:
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            if G.mul[G.inv[xs[i]]][xs[j]] in H:
                return False
    return True


def check_free_product_extension(G: FiniteGroupTable, H: Iterable[int], a: Sequence[int],
                                 b: Sequence[int], max_len: int,
                                 budget: int = 10**6) -> dict:
    """Enumerate products of at most max_len letters of
    Z = H ∪ {b_i^-1 t a_i} ∪ {a_i^-1 t^-1 b_i} in G * <t> and certify that
    the elements landing in G lie in H and that |h|_Z <= 3 |h|_{G ∪ {t}}."""
    H = set(H)
    if 0 not in H or any(G.mul[x][y] not in H for x in H for y in H):
        raise ValueError("H is not a subgroup")
    if len(a) != len(b) or not a:
        raise ValueError("tuples must have equal positive length")
    if not (_coset_distinct(G, H, a) and _coset_distinct(G, H, b)):
        raise ValueError("triple is not admissible")

    t = MixedWord.var(G, 1)
    Z = [MixedWord.const(G, h) for h in sorted(H) if h != 0]
    for ai, bi in zip(a, b):
        r = MixedWord.const(G, G.inv[bi]) * t * MixedWord.const(G, ai)
        Z += [normal_form(r), normal_form(r.inverse())]
    all_but_one = [g for g in range(1, G.order)]

    one = MixedWord.one(G)
    dist = {one.letters: 0}
    layer = [one]
    for d in range(1, max_len + 1):
        nxt = []
        for w in layer:
            for z in Z:
                v = normal_form(w * z)
                if v.letters not in dist:
                    dist[v.letters] = d
                    nxt.append(v)
        if len(dist) > budget:
            raise ValueError("enumeration budget exceeded")
        layer = nxt

    in_G_outside_H = []
    worst_ratio = 0.0
    lipschitz_fail = []
    for letters, dz in dist.items():
        w = MixedWord(G, letters, 1)
        if all(kind == "g" for kind, _ in letters):
            g = letters[0][1] if letters else 0
            if g not in H:
                in_G_outside_H.append(G.labels[g])
        if dz:
            da = fp_length(w, all_but_one)
            worst_ratio = max(worst_ratio, dz / da)
            if dz > 3 * da:
                lipschitz_fail.append(format_word(w))
    return {
        "enumerated": len(dist),
        "max_len": max_len,
        "L_cap_G_equals_H": not in_G_outside_H,
        "violations_L_cap_G": in_G_outside_H,
        "lipschitz_3": not lipschitz_fail,
        "violations_lipschitz": lipschitz_fail,
        "max_ratio": worst_ratio,
        "passed": not in_G_outside_H and not lipschitz_fail,
    }
