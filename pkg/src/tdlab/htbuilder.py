"""Inductive construction of a highly transitive action of F_k, with certificates.

Stage i keeps a finitely generated subgroup H_i ≤ F_k and a finite set B of
conjugates g_j^{u_j} that must stay outside every later H.  Each stage takes
the next tuple pair (ā, b̄); when the cosets a_jH (and b_jH) are pairwise
distinct, H grows by the words b_j^{-1} t a_j for a searched t, so that
t a_j H = b_j H.  Since the smallness condition of the general argument is not
checkable here, each accepted extension is certified by B-disjointness and
infinite index instead.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass, field
from itertools import product
from typing import Iterator, Sequence

from .stallings import (
    CoreGraph,
    Word,
    check_separating_quotient,
    contains,
    coset_action_prefix,
    format_letters,
    index,
    inverse,
    left_coset,
    mul,
    parse_letters,
    same_coset,
    separating_quotient,
    shortlex_words,
    subgroup_from_words,
    words_of_length,
)

REPORT_FORMAT = "tdlab-build-report/1"


class SearchExhausted(RuntimeError):
    """A bounded search ran out of candidates; carries the search trace."""

    def __init__(self, message: str, trace: dict):
        super().__init__(message)
        self.trace = trace


def show(w: Sequence[int]) -> str:
    return format_letters(w) or "1"


def read(s: str) -> Word:
    return parse_letters(s)


# -- stages -------------------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    stage: int
    a: tuple[Word, ...]
    b: tuple[Word, ...]
    t: Word


@dataclass(frozen=True)
class Stage:
    k: int
    i: int = 0
    H_generators: tuple[Word, ...] = ()
    B: tuple[Word, ...] = ()
    elements: tuple[Word, ...] = ()
    conjugators: tuple[Word, ...] = ()
    witnesses: tuple[Witness, ...] = ()
    H: CoreGraph = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "H", subgroup_from_words(self.H_generators, self.k))


def is_admissible(H: CoreGraph, a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> bool:
    """All a_iH pairwise distinct and all b_iH pairwise distinct."""
    if len(a) != len(b):
        raise ValueError("tuple lengths differ")
    if not a:
        raise ValueError("tuples must be nonempty")
    for xs in (a, b):
        for i in range(len(xs)):
            for j in range(i + 1, len(xs)):
                if same_coset(H, xs[i], xs[j]):
                    return False
    return True


def find_conjugator_outside(H: CoreGraph, g: Sequence[int], budget: int = 100_000) -> tuple[Word, int]:
    """Shortlex-least u with u^-1 g u ∉ H; returns (u, candidates tried).

    A finitely generated subgroup of infinite index in a free group contains
    no nontrivial normal subgroup, so some conjugate escapes and the search
    ends; the budget only guards against misuse.
    """
    g = tuple(g)
    if not g:
        raise ValueError("g must be nontrivial")
    if index(H) != math.inf:
        raise ValueError("H must have infinite index")
    tried = 0
    for u in shortlex_words(H.k):
        tried += 1
        if not contains(H, mul(inverse(u), g, u)):
            return u, tried
        if tried >= budget:
            raise SearchExhausted(f"no conjugator within {budget} candidates",
                                  {"g": show(g), "tried": tried})
    raise AssertionError("unreachable")  # pragma: no cover


def _t_candidates(k: int, stage: int, seed: int, shuffle: bool) -> Iterator[Word]:
    n = 0
    while True:
        layer = list(words_of_length(k, n))
        if shuffle:
            random.Random(f"{seed}:{stage}:{n}").shuffle(layer)
        yield from layer
        n += 1


def extension_words(H: CoreGraph, a: Sequence[Word], b: Sequence[Word], t: Word) -> list[Word]:
    """b_j^-1 t a_j, dropping those already in H (the empty word included)."""
    out: list[Word] = []
    for aj, bj in zip(a, b):
        w = mul(inverse(bj), t, aj)
        if not contains(H, w) and w not in out:
            out.append(w)
    return out


def add_conjugate(s: Stage, g: Word, budget: int = 100_000) -> tuple[Stage, int]:
    """Choose u for g and put g^u into B."""
    u, tried = find_conjugator_outside(s.H, g, budget)
    conj = mul(inverse(u), g, u)
    new = Stage(s.k, s.i, s.H_generators, s.B + (conj,), s.elements + (tuple(g),),
                s.conjugators + (u,), s.witnesses)
    return new, tried


def extend_stage(s: Stage, a: Sequence[Word], b: Sequence[Word], budget: int = 20_000,
                 seed: int = 0, shuffle: bool = False) -> tuple[Stage, dict]:
    """Next stage for the tuple pair (ā, b̄); B must already hold the new conjugate.

    Returns the new stage and a search summary.  Inadmissible input passes
    through with H unchanged.
    """
    a = tuple(tuple(x) for x in a)
    b = tuple(tuple(x) for x in b)
    if not is_admissible(s.H, a, b):
        return (Stage(s.k, s.i + 1, s.H_generators, s.B, s.elements, s.conjugators, s.witnesses),
                {"admissible": False, "t_candidates": 0, "t": None})
    tried = 0
    for t in _t_candidates(s.k, s.i + 1, seed, shuffle):
        tried += 1
        gens = s.H_generators + tuple(extension_words(s.H, a, b, t))
        K = subgroup_from_words(gens, s.k)
        if index(K) == math.inf and not any(contains(K, w) for w in s.B):
            w = Witness(s.i + 1, a, b, t)
            new = Stage(s.k, s.i + 1, gens, s.B, s.elements, s.conjugators, s.witnesses + (w,))
            return new, {"admissible": True, "t_candidates": tried, "t": t}
        if tried >= budget:
            raise SearchExhausted(
                f"no admissible t within {budget} candidates at stage {s.i + 1}",
                {"stage": s.i + 1, "a": [show(x) for x in a], "b": [show(x) for x in b],
                 "B": [show(x) for x in s.B], "tried": tried})
    raise AssertionError("unreachable")  # pragma: no cover


# -- schedules ------------------------------------------------------------------

def element_schedule(k: int) -> Iterator[Word]:
    """Nontrivial elements of F_k in shortlex order."""
    return shortlex_words(k, start=1)


def tuple_schedule(k: int, max_len: int = 3) -> Iterator[tuple[tuple[Word, ...], tuple[Word, ...]]]:
    """Diagonal enumeration of pairs of equal-length tuples.

    Level d lists tuple length L and shortlex rank bound r with L + r = d;
    within a level, pairs whose largest entry rank is exactly r, ordered by
    the rank vector (ā then b̄).  Entry rank 0 is the empty word.
    """
    elements: list[Word] = []
    gen = shortlex_words(k)

    def elem(r: int) -> Word:
        while len(elements) <= r:
            elements.append(next(gen))
        return elements[r]

    d = 1
    while True:
        for L in range(1, min(d, max_len) + 1):
            r = d - L
            for ranks in product(range(r + 1), repeat=2 * L):
                if max(ranks) != r:
                    continue
                a = tuple(elem(x) for x in ranks[:L])
                b = tuple(elem(x) for x in ranks[L:])
                yield a, b
        d += 1


# -- runs and reports -----------------------------------------------------------

@dataclass
class BuildConfig:
    rank: int = 2
    stages: int = 6
    max_tuple_len: int = 3
    u_budget: int = 100_000
    t_budget: int = 20_000
    prefix_size: int = 32
    seed: int = 0
    shuffle: bool = False

    def validate(self) -> None:
        if not 1 <= self.rank <= 26:
            raise ValueError("rank must be between 1 and 26")
        for name in ("stages",):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        for name in ("max_tuple_len", "u_budget", "t_budget", "prefix_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.rank == 1 and self.stages:
            raise ValueError("F_1 is abelian; the construction needs rank >= 2")

    @classmethod
    def from_text(cls, text: str) -> "BuildConfig":
        """JSON object, or ``key = value`` lines with ``#`` comments."""
        text = text.strip()
        if text.startswith("{"):
            raw = json.loads(text)
        else:
            raw = {}
            for line in text.splitlines():
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                key, sep, value = line.partition("=")
                if not sep:
                    raise ValueError(f"expected key = value, got {line!r}")
                raw[key.strip()] = value.strip()
        kwargs = {}
        types = {f: type(v) for f, v in asdict(cls()).items()}
        for key, value in raw.items():
            if key == "k":
                key = "rank"
            if key not in types:
                raise ValueError(f"unknown config key {key!r}")
            if types[key] is bool and isinstance(value, str):
                value = value.lower() in ("1", "true", "yes", "on")
            kwargs[key] = types[key](value)
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg


def _stage_certificates(s: Stage, prev: Stage | None) -> dict:
    H = s.H
    missing = next((v, l) for v, d in enumerate(H.out)
                   for l in sorted(range(-H.k, H.k + 1), key=abs) if l and l not in d)
    return {
        "B_disjoint": all(not contains(H, w) for w in s.B),
        "chain": prev is None or all(contains(H, w) for w in prev.H_generators),
        "witnesses": all(same_coset(H, mul(w.t, aj), bj)
                         for w in s.witnesses for aj, bj in zip(w.a, w.b)),
        "infinite_index": {"vertex": missing[0], "missing": show((missing[1],))},
        "separating_quotients": [
            [list(p) for p in separating_quotient(H, w)] for w in s.B],
    }


def _witness_check(prefix, H: CoreGraph, w: Witness) -> list:
    rows = []
    for aj, bj in zip(w.a, w.b):
        ca = prefix.index_of(left_coset(H, aj))
        cb = prefix.index_of(left_coset(H, bj))
        img = None if ca is None else prefix.apply(w.t, ca)
        rows.append([ca, img, cb])
    return rows


def run(config: BuildConfig) -> dict:
    """Execute the construction and return the report as a JSON-ready dict.

    A stage error is recorded under ``error`` and ends the run early.
    """
    config.validate()
    k = config.rank
    s = Stage(k)
    elements = element_schedule(k)
    tuples = tuple_schedule(k, config.max_tuple_len)
    stages = []
    error = None
    prev = s
    for _ in range(config.stages):
        g = next(elements)
        a, b = next(tuples)
        try:
            s1, u_tried = add_conjugate(prev, g, config.u_budget)
            s2, info = extend_stage(s1, a, b, config.t_budget, config.seed, config.shuffle)
        except SearchExhausted as exc:
            error = {"message": str(exc), "trace": exc.trace}
            break
        stages.append({
            "i": s2.i,
            "g": show(g),
            "u": show(s1.conjugators[-1]),
            "a": [show(x) for x in a],
            "b": [show(x) for x in b],
            "admissible": info["admissible"],
            "t": None if info["t"] is None else show(info["t"]),
            "H_generators": [show(w) for w in s2.H_generators],
            "B": [show(w) for w in s2.B],
            "core": {"vertices": s2.H.num_vertices, "edges": s2.H.num_edges, "rank": s2.H.rank()},
            "certificates": _stage_certificates(s2, prev),
            "search": {"u_candidates": u_tried, "t_candidates": info["t_candidates"]},
        })
        prev = s2
    prefix = coset_action_prefix(prev.H, config.prefix_size)
    report = {
        "format": REPORT_FORMAT,
        "config": asdict(config),
        "stages": stages,
        "final": {
            "H_generators": [show(w) for w in prev.H_generators],
            "B": [show(w) for w in prev.B],
            "index": "infinite" if index(prev.H) == math.inf else index(prev.H),
            "action_prefix": prefix.to_json(),
            "witness_checks": [_witness_check(prefix, prev.H, w) for w in prev.witnesses],
        },
        "error": error,
    }
    return report


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def verify_report(report: dict | str) -> bool:
    return not verify_report_problems(report)


def verify_report_problems(report: dict | str) -> list[str]:
    """Re-derive every stage from the stored words and list all mismatches."""
    if isinstance(report, str):
        try:
            report = json.loads(report)
        except json.JSONDecodeError as exc:
            return [f"not JSON: {exc}"]
    problems: list[str] = []
    try:
        _verify(report, problems)
    except (KeyError, TypeError, ValueError, IndexError, StopIteration) as exc:
        problems.append(f"malformed report: {exc!r}")
    return problems


def _verify(r: dict, problems: list[str]) -> None:
    if r.get("format") != REPORT_FORMAT:
        problems.append("unknown report format")
        return
    cfg = BuildConfig(**r["config"])
    cfg.validate()
    k = cfg.rank
    elements = element_schedule(k)
    tuples = tuple_schedule(k, cfg.max_tuple_len)
    H_gens: list[Word] = []
    B: list[Word] = []
    witnesses: list[Witness] = []
    H = subgroup_from_words([], k)
    if len(r["stages"]) != cfg.stages and r.get("error") is None:
        problems.append("stage count does not match config")
    for n, st in enumerate(r["stages"], start=1):
        tag = f"stage {n}"
        if st["i"] != n:
            problems.append(f"{tag}: index {st['i']}")
        g = next(elements)
        a, b = next(tuples)
        if read(st["g"]) != g:
            problems.append(f"{tag}: element out of schedule")
        if [read(x) for x in st["a"]] != list(a) or [read(x) for x in st["b"]] != list(b):
            problems.append(f"{tag}: tuple pair out of schedule")
        u = read(st["u"])
        conj = mul(inverse(u), g, u)
        if contains(H, conj):
            problems.append(f"{tag}: conjugate g^u lies in the previous subgroup")
        B.append(conj)
        if [read(x) for x in st["B"]] != B:
            problems.append(f"{tag}: B list differs from recomputed conjugates")
        admissible = is_admissible(H, a, b)
        if st["admissible"] != admissible:
            problems.append(f"{tag}: admissibility flag wrong")
        prev_gens = list(H_gens)
        if admissible:
            if st["t"] is None:
                problems.append(f"{tag}: missing t")
                continue
            t = read(st["t"])
            H_gens = H_gens + extension_words(H, a, b, t)
            witnesses.append(Witness(n, a, b, t))
        elif st["t"] is not None:
            problems.append(f"{tag}: t given for an inadmissible pair")
        if [read(x) for x in st["H_generators"]] != H_gens:
            problems.append(f"{tag}: subgroup generators differ from recomputation")
        H = subgroup_from_words(H_gens, k)
        for w in B:
            if contains(H, w):
                problems.append(f"{tag}: B element {show(w)} lies in H")
        if not all(contains(H, w) for w in prev_gens):
            problems.append(f"{tag}: chain inclusion fails")
        if index(H) != math.inf:
            problems.append(f"{tag}: finite index")
        for w in witnesses:
            for aj, bj in zip(w.a, w.b):
                if not same_coset(H, mul(w.t, aj), bj):
                    problems.append(f"{tag}: witness from stage {w.stage} broken")
        cert = st["certificates"]
        v, miss = cert["infinite_index"]["vertex"], read(cert["infinite_index"]["missing"])
        if v >= H.num_vertices or miss[0] in H.out[v]:
            problems.append(f"{tag}: infinite-index certificate invalid")
        quotients = cert["separating_quotients"]
        if len(quotients) != len(B):
            problems.append(f"{tag}: wrong number of separating quotients")
        for w, perms in zip(B, quotients):
            if not check_separating_quotient(perms, H_gens, w):
                problems.append(f"{tag}: separating quotient for {show(w)} fails")
        for key in ("B_disjoint", "chain", "witnesses"):
            if cert[key] is not True:
                problems.append(f"{tag}: certificate {key} not true")
    final = r["final"]
    if [read(x) for x in final["H_generators"]] != H_gens:
        problems.append("final: subgroup generators differ")
    if [read(x) for x in final["B"]] != B:
        problems.append("final: B differs")
    prefix = coset_action_prefix(H, cfg.prefix_size)
    if final["action_prefix"] != prefix.to_json():
        problems.append("final: action prefix differs from recomputation")
    if final["witness_checks"] != [_witness_check(prefix, H, w) for w in witnesses]:
        problems.append("final: witness checks differ")
    for rows in final["witness_checks"]:
        for ca, img, cb in rows:
            if img is not None and cb is not None and img != cb:
                problems.append("final: witness maps a coset to the wrong place")
