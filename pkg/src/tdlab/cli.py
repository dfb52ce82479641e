"""``tdlab`` command line.

Exit codes: 0 success, 1 the checked property fails, 2 usage or input error.
A human summary goes to stdout; ``--out`` writes the full JSON report.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .constructions import affine_action, affine_f2_action, prop_htA_generators
from .corpus import load_entry, load_group
from .htbuilder import BuildConfig, dumps, run, verify_report_problems
from .marked import load_marked, marked_distance
from .perm import (
    FinitaryPerm,
    LazyPerm,
    construct_separating_permutation,
    evaluate_word_chain,
    pairwise_swapper,
    shifted_swapper,
    triple_rotator,
)
from .permgrp import (
    BoundExceeded,
    format_corpus,
    is_k_transitive,
    minimal_block_system,
    report_json,
    transitivity_degree_finite,
    transitivity_of_action,
    verify_cameron,
)
from .words import (
    FiniteGroupTable,
    format_word,
    is_mixed_identity,
    normal_form,
    parse_expression,
    parse_word,
)


class UsageError(Exception):
    pass


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)


def _group(name: str):
    try:
        return load_group(name)
    except FileNotFoundError as exc:
        raise UsageError(str(exc)) from None


# -- subcommands ------------------------------------------------------------

def cmd_transitivity(args) -> int:
    G = _group(args.group)
    if args.k is not None:
        if not 1 <= args.k <= G.degree:
            raise UsageError(f"k must be between 1 and {G.degree}")
        ok = is_k_transitive(G, args.k)
        print("true" if ok else "false")
        _write(args.out, report_json({"group": G.name, "k": args.k, "k_transitive": ok}))
        return 0 if ok else 1
    report = {"group": G.name, "degree": G.degree, "order": G.order(),
              "transitivity": transitivity_of_action(G)}
    print(f"{G.name}: order {report['order']}, action is {report['transitivity']}-transitive")
    if G.is_transitive():
        blocks = minimal_block_system(G)
        report["blocks"] = blocks if isinstance(blocks, str) else [list(b) for b in blocks.blocks]
        print(f"blocks: {blocks}")
    if args.td:
        report["td"] = transitivity_degree_finite(G, args.budget)
        print(f"td = {report['td']['td']}")
    _write(args.out, report_json(report))
    return 0


def cmd_cameron(args) -> int:
    G = _group(args.group)
    try:
        report = verify_cameron(G, args.k, args.bound)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    for e in report["normal_subgroups"]:
        print(f"N of order {e['order']}: {e['branch']}")
    print("passed" if report["passed"] else "FAILED")
    _write(args.out, report_json(report))
    return 0 if report["passed"] else 1


def cmd_mif(args) -> int:
    G = FiniteGroupTable.from_perm_group(_group(args.group))
    try:
        w = parse_expression(G, args.word)
    except (ValueError, KeyError) as exc:
        try:
            w = parse_word(G, args.word)  # plain letter syntax: x1 g:(1,2) X1
        except (ValueError, KeyError):
            raise UsageError(f"cannot parse word: {exc}") from None
    res = is_mixed_identity(G, w, args.budget)
    report = {"word": format_word(normal_form(w)), "holds": res.holds,
              "evaluations": res.evaluations,
              "witness": None if res.witness is None else [G.labels[g] for g in res.witness]}
    if res.holds:
        print("identity holds")
    else:
        shown = ", ".join(f"x{i + 1}={G.labels[g]}" for i, g in enumerate(res.witness))
        print(f"not an identity; witness {shown}")
    _write(args.out, report_json(report))
    return 0 if res.holds else 1


ORACLES = {"swap": pairwise_swapper, "rot3": triple_rotator}


def _oracle(spec: str) -> tuple[LazyPerm, int]:
    name, _, alpha = spec.partition(":")
    try:
        exponent = int(alpha) if alpha else 1
    except ValueError:
        raise UsageError(f"bad exponent in {spec!r}") from None
    if name.startswith("swap+"):
        return shifted_swapper(int(name[5:])), exponent
    if name not in ORACLES:
        raise UsageError(f"unknown oracle {name!r}; use swap, rot3 or swap+<offset>")
    return ORACLES[name](), exponent


def cmd_nonrel(args) -> int:
    s = FinitaryPerm.parse(args.s)
    X = [int(x) for x in args.X.replace(",", " ").split()]
    pairs = [_oracle(p) for p in args.pair]
    try:
        t, plan = construct_separating_permutation(s, X, pairs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    traj = evaluate_word_chain(t, pairs, plan.n0)
    ok = all(t(x) == s(x) for x in X) and traj[-1] == plan.n[-1] != plan.n0
    print(f"t = {t}")
    print(f"n0 = {plan.n0} -> {traj[-1]}")
    report = {"t": str(t), "plan": plan.to_json(), "trajectory": traj, "verified": ok}
    _write(args.out, report_json(report))
    return 0 if ok else 1


def cmd_build(args) -> int:
    try:
        cfg = BuildConfig.from_text(Path(args.config).read_text()) if args.config else BuildConfig()
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    for key in ("rank", "stages", "seed", "max_tuple_len", "t_budget", "prefix_size"):
        value = getattr(args, key)
        if value is not None:
            setattr(cfg, key, value)
    if args.shuffle:
        cfg.shuffle = True
    try:
        cfg.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = run(cfg)
    text = dumps(report)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if report["error"]:
        print(f"stopped: {report['error']['message']}", file=sys.stderr)
        return 1
    print(f"{len(report['stages'])} stages certified; final index {report['final']['index']}",
          file=sys.stderr if not args.out else sys.stdout)
    return 0


def cmd_verify(args) -> int:
    try:
        text = Path(args.report).read_text()
    except OSError as exc:
        raise UsageError(str(exc)) from None
    problems = verify_report_problems(text)
    if problems:
        for p in problems:
            print(p)
        print("verification FAILED")
        return 1
    print("verification passed")
    return 0


def cmd_distance(args) -> int:
    try:
        M1, M2 = load_marked(args.a), load_marked(args.b)
    except (FileNotFoundError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    if M1.k != M2.k:
        raise UsageError("marked groups have different generator counts")
    d = marked_distance(M1, M2, args.radius)
    print(d)
    _write(args.out, report_json(d.to_json()))
    return 0


def cmd_construct(args) -> int:
    if args.kind == "affine":
        if args.q is None:
            raise UsageError("affine needs --q")
        try:
            G = affine_action(args.q)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        text = format_corpus(G, comment=f"AGL(1,{args.q}) on the field of order {args.q}")
    elif args.kind == "affine-f2":
        if args.n is None:
            raise UsageError("affine-f2 needs --n")
        try:
            G = affine_f2_action(args.n)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        text = format_corpus(G, comment=f"AGL({args.n},2) on F_2^{args.n}")
    else:
        if args.group is None:
            raise UsageError("transpositions needs --group")
        entry = load_entry(args.group)
        Q = FiniteGroupTable.from_perm_group(entry.group)
        gens = [Q.index_of_perm(p) for p in (entry.marking or entry.group.generators)]
        G = prop_htA_generators(Q, gens)
        text = format_corpus(G, comment=f"translations and transpositions over {entry.group.name}")
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tdlab", description="Transitivity-degree toolkit.")
    p.add_argument("--version", action="version", version=f"tdlab {__version__}")
    p.add_argument("--threads", type=int, default=1,
                   help="worker cap (computations currently run single-threaded)")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    t = sub.add_parser("transitivity", help="k-transitivity, blocks and td of a corpus group")
    t.add_argument("--group", required=True, help="corpus name or .grp file")
    t.add_argument("--k", type=int, help="test k-transitivity only")
    t.add_argument("--td", action="store_true", help="also compute td over coset actions")
    t.add_argument("--budget", type=int, default=60, help="largest |G| for --td")
    t.add_argument("--out")
    t.set_defaults(func=cmd_transitivity)

    c = sub.add_parser("cameron", help="check normal subgroups of a k-transitive group")
    c.add_argument("--group", required=True)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--bound", type=int, default=10**4, help="largest |G| for class enumeration")
    c.add_argument("--out")
    c.set_defaults(func=cmd_cameron)

    m = sub.add_parser("mif-test", help="exhaustive mixed-identity check")
    m.add_argument("--group", required=True)
    m.add_argument("--word", required=True, help='e.g. "[x1^2,(123)]" or "x1 g:(1,2) X1"')
    m.add_argument("--budget", type=int, default=10**7)
    m.add_argument("--out")
    m.set_defaults(func=cmd_mif)

    n = sub.add_parser("nonrel", help="build t with t|X = s|X separating a word")
    n.add_argument("--s", default="()", help="permutation in cycle notation")
    n.add_argument("--X", default="", help="points, comma or space separated")
    n.add_argument("--pair", action="append", required=True,
                   help="oracle:exponent with oracle swap, rot3 or swap+<offset>; repeatable")
    n.add_argument("--out")
    n.set_defaults(func=cmd_nonrel)

    b = sub.add_parser("build-ht", help="run the certified construction over F_k")
    b.add_argument("--config", help="JSON or key = value file")
    b.add_argument("--rank", type=int)
    b.add_argument("--stages", type=int)
    b.add_argument("--seed", type=int)
    b.add_argument("--max-tuple-len", dest="max_tuple_len", type=int)
    b.add_argument("--t-budget", dest="t_budget", type=int)
    b.add_argument("--prefix-size", dest="prefix_size", type=int)
    b.add_argument("--shuffle", action="store_true", help="seeded shuffle within t length classes")
    b.add_argument("--out")
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="re-check every certificate in a build report")
    v.add_argument("report")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("distance", help="distance between two marked groups")
    d.add_argument("--a", required=True, help="marked group file or corpus name")
    d.add_argument("--b", required=True)
    d.add_argument("--radius", type=int, default=12)
    d.add_argument("--out")
    d.set_defaults(func=cmd_distance)

    k = sub.add_parser("construct", help="emit a construction in corpus format")
    k.add_argument("kind", choices=["affine", "affine-f2", "transpositions"])
    k.add_argument("--q", type=int)
    k.add_argument("--n", type=int)
    k.add_argument("--group", help="base group for transpositions (its marking or generators are used)")
    k.add_argument("--out")
    k.set_defaults(func=cmd_construct)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    if args.threads < 1:
        print("tdlab: --threads must be positive", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (UsageError, BoundExceeded, json.JSONDecodeError) as exc:
        print(f"tdlab: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
