"""Bundled group corpus: ``*.grp`` files in the permgrp text format.

The directory can be overridden with the ``TDLAB_CORPUS`` environment
variable.  Files under ``optional/`` (the Mathieu groups) are only listed
when asked for.
"""
from __future__ import annotations

import os
from importlib import resources
from pathlib import Path

from .constructions import affine_action, affine_f2_action
from .perm import FinitaryPerm
from .permgrp import DEFAULT_MAX_DEGREE, CorpusEntry, PermGroup, format_corpus, parse_corpus

ENV_VAR = "TDLAB_CORPUS"


def corpus_dir() -> Path:
    override = os.environ.get(ENV_VAR)
    if override:
        return Path(override)
    return Path(str(resources.files("tdlab") / "corpus"))


def list_groups(include_optional: bool = False, directory: Path | None = None) -> list[str]:
    root = directory or corpus_dir()
    names = sorted(p.stem for p in root.glob("*.grp"))
    if include_optional:
        names += sorted("optional/" + p.stem for p in (root / "optional").glob("*.grp"))
    return names


def resolve(name_or_path: str | os.PathLike, directory: Path | None = None) -> Path:
    """A path that exists as given, else a corpus name with or without ``.grp``."""
    p = Path(name_or_path)
    if p.exists():
        return p
    root = directory or corpus_dir()
    for cand in (root / p, root / f"{p}.grp"):
        if cand.exists():
            return cand
    raise FileNotFoundError(f"no group file or corpus entry named {name_or_path!s}")


def load_entry(name_or_path: str | os.PathLike, max_degree: int = DEFAULT_MAX_DEGREE,
               directory: Path | None = None) -> CorpusEntry:
    path = resolve(name_or_path, directory)
    name = path.stem
    return parse_corpus(path.read_text(), name=name, max_degree=max_degree)


def load_group(name_or_path: str | os.PathLike, **kw) -> PermGroup:
    return load_entry(name_or_path, **kw).group


def load_corpus(include_optional: bool = False) -> dict[str, PermGroup]:
    return {n: load_group(n) for n in list_groups(include_optional)}


# -- regeneration -----------------------------------------------------------

def _cyc(*cycles) -> FinitaryPerm:
    return FinitaryPerm.from_cycles(cycles)


def _quaternion_regular() -> PermGroup:
    # elements ±1, ±i, ±j, ±k as (sign, unit) with unit in "1ijk"
    units = "1ijk"
    table = {("1", u): (1, u) for u in units}
    table.update({(u, "1"): (1, u) for u in units})
    table.update({("i", "i"): (-1, "1"), ("j", "j"): (-1, "1"), ("k", "k"): (-1, "1"),
                  ("i", "j"): (1, "k"), ("j", "k"): (1, "i"), ("k", "i"): (1, "j"),
                  ("j", "i"): (-1, "k"), ("k", "j"): (-1, "i"), ("i", "k"): (-1, "j")})
    elems = [(s, u) for u in units for s in (1, -1)]
    index = {e: n + 1 for n, e in enumerate(elems)}

    def left(x):
        images = []
        for s, u in elems:
            t, w = table[(x[1], u)]
            images.append(index[(x[0] * s * t, w)])
        return FinitaryPerm.from_images(images)

    return PermGroup(8, [left((1, "i")), left((1, "j"))], name="q8")


def standard_groups() -> dict[str, tuple[PermGroup, str]]:
    """Every bundled (non-optional) group with a one-line description."""
    out: dict[str, tuple[PermGroup, str]] = {}
    for n in range(2, 8):
        out[f"s{n}"] = (PermGroup(n, [_cyc((1, 2)), _cyc(tuple(range(1, n + 1)))]),
                        f"symmetric group S{n}, natural action")
    for n in range(3, 8):
        long = tuple(range(1, n + 1)) if n % 2 else tuple(range(2, n + 1))
        gens = [_cyc((1, 2, 3))] + ([_cyc(long)] if n > 3 else [])
        out[f"a{n}"] = (PermGroup(n, gens), f"alternating group A{n}, natural action")
    for n in range(2, 9):
        out[f"c{n}"] = (PermGroup(n, [_cyc(tuple(range(1, n + 1)))]), f"cyclic group C{n}, regular")
    out["d4"] = (PermGroup(4, [_cyc((1, 2, 3, 4)), _cyc((1, 3))]), "dihedral group of order 8 on 4 points")
    out["q8"] = (_quaternion_regular(), "quaternion group Q8, regular action")
    out["c2xc2"] = (PermGroup(4, [_cyc((1, 2), (3, 4)), _cyc((1, 3), (2, 4))]),
                    "Klein four-group, regular action")
    for q in (4, 5, 7, 8, 9):
        out[f"agl1_{q}"] = (affine_action(q), f"AGL(1,{q}) on the field of order {q}")
    for n in (2, 3, 4):
        out[f"agl{n}_2"] = (affine_f2_action(n), f"AGL({n},2) on F_2^{n}")
    return out


def optional_groups() -> dict[str, tuple[PermGroup, str]]:
    m11 = [_cyc(tuple(range(1, 12))), _cyc((3, 7, 11, 8), (4, 10, 5, 6))]
    m12 = m11 + [_cyc((1, 12), (2, 11), (3, 6), (4, 8), (5, 9), (7, 10))]
    return {"m11": (PermGroup(11, m11), "Mathieu group M11 (order 7920)"),
            "m12": (PermGroup(12, m12), "Mathieu group M12 (order 95040)")}


MARKED = {
    "marked_c2": ("c2", ["(1 2)"]),
    "marked_c3": ("c3", ["(1 2 3)"]),
    "marked_c4": ("c4", ["(1 2 3 4)"]),
    "marked_c6": ("c6", ["(1 2 3 4 5 6)"]),
    "marked_trivial1": (None, ["()"]),
    "marked_s3": ("s3", ["(1 2)", "(1 2 3)"]),
    "marked_s3_swapped": ("s3", ["(1 2 3)", "(1 2)"]),
    "marked_c6_pair": ("c6", ["(1 3 5)(2 4 6)", "(1 4)(2 5)(3 6)"]),
    "marked_trivial2": (None, ["()", "()"]),
}


def write_corpus(root: Path) -> list[Path]:
    """Regenerate every bundled file under root."""
    written = []
    root.mkdir(parents=True, exist_ok=True)
    (root / "optional").mkdir(exist_ok=True)
    groups = standard_groups()
    for name, (G, desc) in groups.items():
        path = root / f"{name}.grp"
        path.write_text(format_corpus(G, comment=desc))
        written.append(path)
    for name, (G, desc) in optional_groups().items():
        path = root / "optional" / f"{name}.grp"
        path.write_text(format_corpus(G, comment=desc))
        written.append(path)
    (root / "marked").mkdir(exist_ok=True)
    for name, (base, marks) in MARKED.items():
        G = groups[base][0] if base else PermGroup(1, [])
        desc = f"marked {base or 'trivial group'}"
        path = root / "marked" / f"{name}.grp"
        path.write_text(format_corpus(G, [FinitaryPerm.parse(m) for m in marks], comment=desc))
        written.append(path)
    return written


def list_marked(directory: Path | None = None) -> list[str]:
    root = directory or corpus_dir()
    return sorted("marked/" + p.stem for p in (root / "marked").glob("*.grp"))
