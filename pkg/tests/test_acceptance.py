"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line.

The lines are also collected into an "acceptance criteria" section at the
end of the pytest run.
"""

from __future__ import annotations

import contextlib
import random
import time

import conftest
from _gen import TWO_TRIANGLES, TRIANGLE_AND_PAIR, random_instance
from _oracle import all_matchings, stats
from almost_stable.bench import ExperimentConfig, gen_random, run_experiment, summarize
from almost_stable.classic import irving
from almost_stable.constructions import (
    build_prop34,
    build_prop36,
    example_formula,
    extract_assignment_sri,
    planted_formula,
    reduce_sat_to_smi,
    reduce_sat_to_sri,
    witness_from_assignment_smi,
    witness_from_assignment_sri,
    witness_prop34,
)
from almost_stable.core import Instance, Matching, blocking_report, ceil_half
from almost_stable.exact import solve_exact
from almost_stable.ilp import Mode, assignment_from_matching, build_model, check_solution, objective_value
from almost_stable.localsearch import approx_minimax_sri, balanced_cut, crossing_numbers
from almost_stable.shortlist import solve_minimax_max_smi_deg2, solve_minimax_sri_deg2


@contextlib.contextmanager
def criterion(number: int, title: str):
    detail: dict = {}
    try:
        yield detail
    except BaseException as e:
        line = f"FAIL criterion {number}: {title} ({type(e).__name__}: {str(e)[:200]})"
        print(line)
        conftest.ACCEPTANCE_LINES.append(line)
        raise
    extra = ", ".join(f"{k}={v}" for k, v in detail.items())
    line = f"PASS criterion {number}: {title}" + (f" [{extra}]" if extra else "")
    print(line)
    conftest.ACCEPTANCE_LINES.append(line)


def _prefs(inst):
    return [list(l) for l in inst.prefs]


def _oracle_table(inst):
    """(stats, size) for every matching, computed once per instance."""
    pr = _prefs(inst)
    return [stats(inst.n, pr, m) for m in all_matchings(inst.n, pr)]


def _oracle_best(table, objective, card):
    need = max(s["size"] for s in table) if card == "max" else 0
    return min(s[objective] for s in table if s["size"] >= need)


def test_criterion_01_oracle_cross_validation():
    with criterion(1, "exact solver equals naive enumeration (n <= 10, 3 objectives x 2 cardinalities)") as d:
        start = time.perf_counter()
        rng = random.Random(20240601)
        checked = 0
        for kind in ("sri", "smi"):
            for _ in range(1000):
                inst = random_instance(rng, rng.randint(1, 10), rng.uniform(0.1, 0.9), kind)
                table = _oracle_table(inst)
                for obj in ("minimax", "minbp", "minba"):
                    for card in ("any", "max"):
                        assert solve_exact(inst, obj, card).value == _oracle_best(table, obj, card), (
                            inst.prefs, obj, card)
                        checked += 1
        elapsed = time.perf_counter() - start
        d["instances"] = 2000
        d["solves"] = checked
        d["seconds"] = round(elapsed, 1)
        assert elapsed < 60


def test_criterion_02_small_fixtures():
    with criterion(2, "first three-pairs fixture: minBA 4, minBP 2, minimax 1; three-cycle fixture: minimax 1, unsolvable"):
        a = Instance.from_one_based("sri", TWO_TRIANGLES)
        assert solve_exact(a, "minba").value == 4
        assert solve_exact(a, "minbp").value == 2
        assert solve_exact(a, "minimax").value == 1
        b = Instance.from_one_based("sri", TRIANGLE_AND_PAIR)
        assert solve_exact(b, "minimax").value == 1
        assert irving(b) is None


def test_criterion_03_nested_cycles():
    with criterion(3, "nested-cycle family: optimum k for k=1,2; witness max_bp <= k for k=1..4") as d:
        for k in (1, 2):
            assert solve_exact(build_prop34(k)).value == k
        worst = {}
        for k in (1, 2, 3, 4):
            worst[k] = blocking_report(build_prop34(k), witness_prop34(k)).max_bp
            assert worst[k] <= k
        d["witness_max_bp"] = worst


def test_criterion_04_pendant_star():
    with criterion(4, "pendant-star family: minimax over maximum matchings = k, unique maximum matching, k <= 6"):
        for k in range(0, 7):
            inst = build_prop36(k)
            assert solve_exact(inst, "minimax", "max").value == k
            table = [s["size"] for s in _oracle_table(inst)]
            assert table.count(k + 1) == 1 and max(table) == k + 1


def test_criterion_05_short_lists():
    with criterion(5, "lists of length <= 2: linear-time outputs optimal and max_bp <= 1") as d:
        rng = random.Random(5150)
        count = 0
        for t in range(1000):
            kind = "smi" if t % 2 else "sri"
            inst = random_instance(rng, rng.randint(1, 12), rng.uniform(0.2, 1.0), kind, max_deg=2)
            table = _oracle_table(inst)
            m = solve_minimax_sri_deg2(inst)
            v = blocking_report(inst, m).max_bp
            assert v <= 1 and v == _oracle_best(table, "minimax", "any")
            if kind == "smi":
                m = solve_minimax_max_smi_deg2(inst)
                v = blocking_report(inst, m).max_bp
                assert v <= 1 and v == _oracle_best(table, "minimax", "max")
                assert m.size == max(s["size"] for s in table)
            count += 1
        d["instances"] = count


def test_criterion_06_balanced_cut():
    with criterion(6, "balanced cut: per-agent bound ceil(d_i/2), potential rises every flip, flips <= n*d_max/2") as d:
        rng = random.Random(606)
        most_flips = 0
        for t in range(1000):
            n = rng.randint(2, 60)
            l = rng.randint(1, min(10, n - 1))
            inst = gen_random(n, l, "sri", rng.getrandbits(48), "capped" if t % 2 else "closure")
            phis = [0]

            def on_flip(i, side):
                phis.append(sum(crossing_numbers(inst, side)) // 2)
                assert phis[-1] > phis[-2]

            cut = balanced_cut(inst, on_flip)
            assert 2 * cut.flips <= inst.n * inst.d_max
            most_flips = max(most_flips, cut.flips)
            rep = blocking_report(inst, approx_minimax_sri(inst))
            assert all(rep.per_agent[i] <= ceil_half(inst.degree(i)) for i in range(inst.n))
        d["most_flips"] = most_flips


def _forced_b_min_r(inst, mode):
    model = build_model(inst, mode)
    best = None
    for partner in all_matchings(inst.n, _prefs(inst)):
        m = Matching(tuple(None if p < 0 else p for p in partner))
        a = assignment_from_matching(model, inst, m)
        ok, _ = check_solution(model, a)
        assert ok
        key = objective_value(model, a)
        if model.sense == "max":
            key = -key
        if best is None or key < best[0]:
            best = (key, a["r"])
    return best[1]


def test_criterion_07_ilp_fidelity():
    with criterion(7, "integer program optimum equals enumeration (both modes, n <= 10)"):
        rng = random.Random(777)
        for t in range(200):
            inst = random_instance(rng, rng.randint(1, 10), rng.uniform(0.1, 0.9), "smi" if t % 3 == 0 else "sri")
            table = _oracle_table(inst)
            assert _forced_b_min_r(inst, Mode.MINIMAX) == _oracle_best(table, "minimax", "any")
            assert _forced_b_min_r(inst, Mode.MINIMAX_MAX) == _oracle_best(table, "minimax", "max")


def test_criterion_08_reduction_witnesses():
    with criterion(8, "SAT reductions: witnesses have max_bp <= 1, marriage witness perfect with n+m blocking pairs") as d:
        rng = random.Random(88)
        cases = [(example_formula(), (True, False, False))]
        cases += [planted_formula(3 * rng.randint(1, 6), rng) for _ in range(50)]
        for f, a in cases:
            r = reduce_sat_to_sri(f)
            m = witness_from_assignment_sri(r, a)
            assert blocking_report(r.instance, m).max_bp <= 1
            assert f.satisfied_by(extract_assignment_sri(r, m))
            s = reduce_sat_to_smi(f)
            w = witness_from_assignment_smi(s, a)
            rep = blocking_report(s.instance, w)
            assert rep.max_bp <= 1 and w.is_perfect() and rep.total_bp == f.num_vars + f.m
        d["formulas"] = len(cases)


# ------------------------------------------------------------------ experiments

COUNT = 300
_ROWS: dict = {}


def _cell(kind, mode, l, n=50, count=COUNT, seed=None):
    key = (kind, mode, l, n, count)
    if key not in _ROWS:
        base = seed if seed is not None else 10_000 * l + (1_000_000 if mode == "minimax-max" else 0)
        _ROWS[key] = run_experiment(ExperimentConfig(n=n, l=l, kind=kind, mode=mode, count=count, base_seed=base))
    return _ROWS[key]


def _proven(rows):
    ok = [r for r in rows if not r.failed and r.optimal]
    assert len(rows) - len(ok) < 0.05 * len(rows), "too many rows without proven optimum"
    return ok


def test_criterion_09_table_reproduction():
    with criterion(9, "n=50 experiment cells within tolerance of the reported table") as d:
        a = summarize(_proven(_cell("sri", "minimax", 5)))
        b = summarize(_proven(_cell("sri", "minimax-max", 5)))
        c = summarize(_proven(_cell("smi", "minimax-max", 25)))
        d["sri_minimax_l5"] = f"{a.stable_pct:.1f}% / {a.mean_max_bp:.3f}"
        d["sri_minimax_max_l5"] = f"{b.stable_pct:.1f}% / {b.mean_max_bp:.3f}"
        d["smi_minimax_max_l25"] = f"{c.stable_pct:.1f}% / {c.mean_max_bp:.3f}"
        assert abs(a.stable_pct - 77.37) <= 5 and abs(a.mean_max_bp - 0.23) <= 0.07
        assert abs(b.stable_pct - 4.30) <= 3 and abs(b.mean_max_bp - 0.96) <= 0.15
        assert c.stable_pct == 100.0 and c.mean_max_bp == 0
        # larger sizes are only smoke-run
        for n, kind, l in ((100, "sri", 5), (200, "smi", 5)):
            rows = _cell(kind, "minimax", l, n=n, count=3, seed=99)
            assert all(not r.failed for r in rows)


def test_criterion_10_no_agent_needs_two():
    with criterion(10, "n=50 roommates minimax cells: no instance needs max_bp > 1") as d:
        rows = []
        for l in (5, 15, 25):
            rows += _proven(_cell("sri", "minimax", l))
        d["instances"] = len(rows)
        d["exceedances"] = sum(1 for r in rows if r.max_bp > 1)
        assert len(rows) >= 900
        assert d["exceedances"] == 0
