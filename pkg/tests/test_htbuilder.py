import copy
import json
import math
from itertools import islice

import pytest

from tdlab.htbuilder import (
    BuildConfig,
    SearchExhausted,
    Stage,
    add_conjugate,
    dumps,
    element_schedule,
    extend_stage,
    find_conjugator_outside,
    is_admissible,
    read,
    run,
    tuple_schedule,
    verify_report,
    verify_report_problems,
)
from tdlab.stallings import (
    contains,
    index,
    inverse,
    mul,
    same_coset,
    shortlex_key,
    shortlex_words,
    subgroup_from_words,
)

x1, x2 = (1,), (2,)


def sub(*words):
    return subgroup_from_words(list(words), 2)


def test_admissibility_examples():
    assert is_admissible(sub(), [()], [()])
    assert not is_admissible(sub(x1), [(), x1], [(), x2])
    assert is_admissible(sub(x1), [(), x2], [x2, ()])
    with pytest.raises(ValueError):
        is_admissible(sub(), [()], [(), x1])


def conjugator_oracle(H, g):
    for u in shortlex_words(2):
        if not contains(H, mul(inverse(u), g, u)):
            return u


def test_conjugator_examples():
    assert find_conjugator_outside(sub(), x1)[0] == ()
    u, tried = find_conjugator_outside(sub(x1), x1)
    assert u == x2 and tried == 4
    H = sub((1, 1), x2)
    u, _ = find_conjugator_outside(H, x2)
    assert u == conjugator_oracle(H, x2) and u != ()
    with pytest.raises(ValueError):
        find_conjugator_outside(sub(x1, x2), x1)
    with pytest.raises(ValueError):
        find_conjugator_outside(sub(), ())


def test_conjugator_budget():
    with pytest.raises(SearchExhausted) as exc:
        find_conjugator_outside(sub(x1), x1, budget=2)
    assert exc.value.trace["tried"] == 2


def test_extend_trivial_pair():
    s = Stage(2, B=((1, 2),))
    s1, info = extend_stage(s, [()], [()])
    assert info["t"] == () and s1.H_generators == ()
    assert s1.witnesses[0].t == ()


def test_extend_single_shift():
    s = Stage(2, B=(x1,))
    s1, info = extend_stage(s, [()], [x2])
    # t = ε would add x2^-1; the search settles on the first t passing both checks
    assert not contains(s1.H, x1) and index(s1.H) == math.inf
    assert same_coset(s1.H, mul(info["t"], ()), x2)
    # t = x2 is also certified: the added word is trivial
    K = subgroup_from_words([mul(inverse(x2), x2)], 2)
    assert not contains(K, x1) and same_coset(K, x2, x2)


def test_inadmissible_passes_through():
    s = Stage(2, H_generators=(x1,), B=(x2,))
    s1, info = extend_stage(s, [(), x1], [(), x2])
    assert not info["admissible"] and s1.H == s.H and s1.i == 1


def test_extend_budget_exhausted():
    # t = ε would put x1 into K, which B forbids
    s = Stage(2, B=(x1,))
    with pytest.raises(SearchExhausted) as exc:
        extend_stage(s, [()], [x1], budget=1)
    assert exc.value.trace["tried"] == 1
    assert extend_stage(s, [()], [x1], budget=2)[1]["t"] == x1


def test_schedules():
    elems = list(islice(element_schedule(2), 8))
    assert elems[:4] == [x1, (-1,), x2, (-2,)] and () not in elems
    assert elems == sorted(elems, key=shortlex_key)
    pairs = list(islice(tuple_schedule(2, 2), 60))
    assert pairs[0] == (((),), ((),))
    assert len(pairs) == len(set(pairs))
    assert all(len(a) == len(b) <= 2 for a, b in pairs)


def check_invariants(stages, k=2):
    prev = None
    witnesses = []
    B = []
    for st in stages:
        H = subgroup_from_words([read(w) for w in st["H_generators"]], k)
        B = [read(w) for w in st["B"]]
        assert all(not contains(H, w) for w in B)
        if prev is not None:
            assert all(contains(H, w) for w in prev)
        assert index(H) == math.inf
        if st["t"] is not None:
            witnesses.append(([read(x) for x in st["a"]], [read(x) for x in st["b"]], read(st["t"])))
        for a, b, t in witnesses:
            assert all(same_coset(H, mul(t, aj), bj) for aj, bj in zip(a, b))
        prev = [read(w) for w in st["H_generators"]]
    return B


def test_default_run_certified_and_deterministic():
    r = run(BuildConfig(stages=6))
    assert r["error"] is None and len(r["stages"]) == 6
    assert verify_report(r)
    assert r["final"]["index"] == "infinite"
    check_invariants(r["stages"])
    assert dumps(run(BuildConfig(stages=6))) == dumps(r)
    assert r["config"]["seed"] == 0


def test_regression_fixture():
    r = run(BuildConfig(stages=6))
    assert [s["t"] for s in r["stages"]] == ["1", "a", "a", "1", None, "a"]
    assert r["final"]["H_generators"] == ["aa"]
    assert r["final"]["B"] == ["a", "A", "b", "B", "Baab", "ab"]


def test_zero_stages_regular_prefix():
    r = run(BuildConfig(stages=0))
    prefix = r["final"]["action_prefix"]
    assert prefix["cosets"][:5] == ["", "a", "A", "b", "B"]
    assert not prefix["saturated"]
    assert verify_report(r)


def test_longer_and_shuffled_runs():
    for cfg in (BuildConfig(stages=30), BuildConfig(stages=12, seed=7, shuffle=True),
                BuildConfig(rank=3, stages=8)):
        r = run(cfg)
        assert r["error"] is None and verify_report(r)
        check_invariants(r["stages"], cfg.rank)


def test_tamper_deleted_B_entry():
    r = json.loads(dumps(run(BuildConfig(stages=6))))
    del r["stages"][3]["B"][1]
    problems = verify_report_problems(r)
    assert "stage 4: B list differs from recomputed conjugates" in problems


def test_tamper_witness_t():
    r = json.loads(dumps(run(BuildConfig(stages=6))))
    st = r["stages"][1]
    assert st["t"] == "a"
    st["t"] = "1"
    assert not verify_report(r)


def test_tamper_misc():
    base = json.loads(dumps(run(BuildConfig(stages=6))))
    mutations = [
        lambda r: r["stages"][2]["H_generators"].append("b"),
        lambda r: r["stages"][0].__setitem__("u", "b"),
        lambda r: r["stages"][4].__setitem__("admissible", True),
        lambda r: r["final"]["action_prefix"]["generators"]["a"].__setitem__(0, 3),
        lambda r: r["config"].__setitem__("max_tuple_len", 1),
        lambda r: r.__setitem__("format", "other"),
    ]
    for m in mutations:
        r = copy.deepcopy(base)
        m(r)
        assert not verify_report(r)
    assert not verify_report("{not json")


def test_config_parsing():
    cfg = BuildConfig.from_text("# comment\nk = 3\nstages = 4\nshuffle = yes\n")
    assert (cfg.rank, cfg.stages, cfg.shuffle) == (3, 4, True)
    assert BuildConfig.from_text('{"rank": 2, "seed": 5}').seed == 5
    for bad in ("rank = 0", "colour = red", "stages", '{"stages": -1}', "rank = 1\nstages = 2"):
        with pytest.raises(ValueError):
            BuildConfig.from_text(bad)


def test_add_conjugate_records_u():
    s, tried = add_conjugate(Stage(2, H_generators=(x1,)), x1)
    assert s.conjugators == (x2,) and s.B == ((-2, 1, 2),) and s.elements == (x1,)
    assert tried == 4
