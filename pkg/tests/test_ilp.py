import itertools
import random

import pytest
from hypothesis import given, settings

from _gen import instances, oracle_prefs, triangle_and_pair, random_instance
from _oracle import all_matchings
from almost_stable.classic import irving
from almost_stable.constructions import build_prop36
from almost_stable.core import Instance, Matching, blocking_report
from almost_stable.exact import solve_exact
from almost_stable.ilp import (
    IlpError,
    Mode,
    assignment_from_matching,
    build_model,
    check_solution,
    export_lp,
    objective_value,
    solve_model,
    variable_map,
)


def _rows(model, prefix):
    return [r for r in model.rows if r.name.startswith(prefix)]


def test_counts_on_three_cycle_plus_pair():
    model = build_model(triangle_and_pair())
    xs = [v for v in model.binaries if v.startswith("x_")]
    bs = [v for v in model.binaries if v.startswith("b_")]
    assert len(xs) == 4 and len(bs) == 4 and model.generals == ["r"]
    assert len(_rows(model, "m")) == 5
    assert len(_rows(model, "s")) == 4
    assert len(_rows(model, "c")) == 5


def test_weight_is_agents_plus_one():
    model = build_model(build_prop36(1), Mode.MINIMAX_MAX)
    assert model.weight == 5
    text = export_lp(model)
    obj = text.split("Subject To")[0]
    xs = [v for v in model.binaries if v.startswith("x_")]
    assert obj.count("5 x_") == len(xs) == 3 and "- r" in obj


def test_lp_text_shape():
    text = export_lp(build_model(triangle_and_pair()))
    lines = text.splitlines()
    assert lines[0] == "Minimize" and lines[1] == " obj: r"
    assert " c1: b_1_2 + b_1_3 - r <= 0" in lines
    assert " s1_2: 2 x_1_2 + x_2_3 + b_1_2 >= 1" in lines
    for head in ("Subject To", "Bounds", "Binaries", "Generals", "End"):
        assert head in lines
    assert " 0 <= r <= 2" in lines
    assert text == export_lp(build_model(triangle_and_pair()))


def test_rows_in_natural_order_and_wrapped():
    inst = random_instance(random.Random(1), 12, 0.9)
    text = export_lp(build_model(inst, Mode.MINIMAX_MAX))
    assert all(len(line) <= 78 for line in text.splitlines())
    caps = [line.split(":")[0].strip() for line in text.splitlines() if line.startswith(" c")]
    assert caps == [f"c{i}" for i in range(1, 13)]


def test_empty_list_agent_has_vacuous_rows():
    inst = Instance.from_one_based("smi", {1: [2], 2: [1]}, n=3)
    model = build_model(inst)
    assert model.row("m3").coeffs == ()
    assert model.row("c3").coeffs == (("r", -1),)
    text = export_lp(model)
    assert " m3: 0 r <= 1" in text and " c3: - r <= 0" in text


def test_variable_map():
    vm = variable_map(build_model(triangle_and_pair()))
    assert vm["pairs"][0] == {"pair": [1, 2], "x": "x_1_2", "b": "b_1_2"}
    assert len(vm["pairs"]) == 4


def test_check_solution_examples():
    inst = triangle_and_pair()
    model = build_model(inst)
    w = solve_exact(inst).witness
    ok, bad = check_solution(model, assignment_from_matching(model, inst, w))
    assert ok and not bad
    zero = {v: 0 for v in model.variables}
    ok, bad = check_solution(model, zero)
    assert not ok and "s1_2" in bad and "s4_5" in bad
    del zero["r"]
    with pytest.raises(IlpError) as e:
        check_solution(model, zero)
    assert e.value.code == "MISSING_VARIABLE"


def test_stable_instance_zero_solution():
    inst = Instance.from_one_based("sri", {1: [2, 3, 4], 2: [1, 3, 4], 3: [4, 1, 2], 4: [3, 1, 2]})
    model = build_model(inst)
    m = irving(inst)
    a = assignment_from_matching(model, inst, m)
    assert a["r"] == 0 and all(a[v] == 0 for v in model.binaries if v.startswith("b_"))
    assert check_solution(model, a)[0]


def _forced_b_minimum(inst, mode):
    """Brute force over x; b forced on blocking pairs, r = max count."""
    model = build_model(inst, mode)
    best = None
    for partner in all_matchings(inst.n, oracle_prefs(inst)):
        m = Matching(tuple(None if p < 0 else p for p in partner))
        a = assignment_from_matching(model, inst, m)
        assert check_solution(model, a)[0]
        key = objective_value(model, a)
        if best is None or (key > best[0] if model.sense == "max" else key < best[0]):
            best = (key, a["r"])
    return best[1]


@settings(max_examples=150, deadline=None)
@given(instances(max_n=8))
def test_model_minimum_matches_exact(inst):
    assert _forced_b_minimum(inst, Mode.MINIMAX) == solve_exact(inst).value
    assert _forced_b_minimum(inst, Mode.MINIMAX_MAX) == solve_exact(inst, "minimax", "max").value


@settings(max_examples=150, deadline=None)
@given(instances(max_n=8))
def test_non_blocking_pairs_need_no_b(inst):
    model = build_model(inst)
    for partner in itertools.islice(all_matchings(inst.n, oracle_prefs(inst)), 20):
        m = Matching(tuple(None if p < 0 else p for p in partner))
        a = assignment_from_matching(model, inst, m)
        blocking = set(blocking_report(inst, m).blocking_pairs)
        for i, j in model.pairs:
            row = model.row(f"s{i + 1}_{j + 1}")
            b = f"b_{i + 1}_{j + 1}"
            a2 = dict(a, **{b: 0})
            # dropping b violates the row exactly on blocking pairs
            assert row.satisfied(a2) == ((i, j) not in blocking)


@settings(max_examples=60, deadline=None)
@given(instances(max_n=10))
def test_in_process_solver_matches_exact(inst):
    for mode, card in ((Mode.MINIMAX, "any"), (Mode.MINIMAX_MAX, "max")):
        sol = solve_model(build_model(inst, mode))
        assert sol.optimal
        assert blocking_report(inst, sol.matching).max_bp == solve_exact(inst, "minimax", card).value
        if mode is Mode.MINIMAX_MAX:
            assert sol.matching.size == solve_exact(inst, "minimax", card).witness.size
