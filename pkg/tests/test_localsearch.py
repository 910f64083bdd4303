import random

import pytest
from hypothesis import given, settings

from _gen import instances, triangle_and_pair, random_instance
from almost_stable.classic import irving
from almost_stable.core import blocking_report, ceil_half
from almost_stable.localsearch import (
    CutState,
    InconsistentCutError,
    approx_minimax_sri,
    approx_with_cut,
    balanced_cut,
    crossing_numbers,
    cut_subinstance,
    potential,
)


def test_cut_is_balanced_on_fixture():
    cut = balanced_cut(triangle_and_pair())
    for i, d in enumerate(triangle_and_pair().degrees):
        assert 2 * cut.cross[i] >= d
    assert cut.queue == []
    assert potential(triangle_and_pair(), cut) == cut.potential


def test_potential_detects_stale_crossings():
    inst = triangle_and_pair()
    cut = balanced_cut(inst)
    bad = CutState(side=list(cut.side), cross=[c + 1 for c in cut.cross])
    with pytest.raises(InconsistentCutError):
        potential(inst, bad)


def test_stable_instances_skip_the_cut():
    inst = random_instance(random.Random(0), 8, 0.0)
    m, cut = approx_with_cut(inst)
    assert cut is None and m.size == 0


@settings(max_examples=300, deadline=None)
@given(instances(max_n=14, kind="sri"))
def test_flip_invariants_and_bound(inst):
    seen = []
    prev = [0]

    def on_flip(i, side):
        cross = crossing_numbers(inst, side)
        phi = sum(cross) // 2
        # every flip strictly raises the number of crossing pairs
        assert phi > prev[0]
        prev[0] = phi
        seen.append(i)

    cut = balanced_cut(inst, on_flip)
    assert cut.flips == len(seen)
    assert 2 * cut.flips <= inst.n * inst.d_max
    assert potential(inst, cut) == cut.potential
    assert all(2 * cut.cross[i] >= inst.degree(i) for i in range(inst.n))

    sub = cut_subinstance(inst, cut.side)
    for i in range(inst.n):
        assert len(sub.prefs[i]) == cut.cross[i]
    m = approx_minimax_sri(inst)
    rep = blocking_report(inst, m)
    for i in range(inst.n):
        assert rep.per_agent[i] <= ceil_half(inst.degree(i))
    if irving(inst) is not None:
        assert rep.stable
