import pytest
from hypothesis import given, settings

from _gen import instances, oracle_prefs, two_triangles, triangle_and_pair
from _oracle import all_matchings, stats
from almost_stable.classic import (
    gale_shapley,
    irving,
    max_cardinality_matching,
    max_matching_deg2,
    max_matching_size,
)
from almost_stable.core import AlmostStableError, Instance, Kind, blocking_report


def _oracle_stable(inst):
    pr = oracle_prefs(inst)
    return [m for m in all_matchings(inst.n, pr) if stats(inst.n, pr, m)["minbp"] == 0]


def _oracle_max(inst):
    return max(stats(inst.n, oracle_prefs(inst), m)["size"] for m in all_matchings(inst.n, oracle_prefs(inst)))


def test_fixtures_unsolvable():
    assert irving(two_triangles()) is None
    assert irving(triangle_and_pair()) is None


def test_irving_classic_solvable():
    # a complete 4-agent instance with a unique stable matching {1,2},{3,4}
    inst = Instance.from_one_based("sri", {1: [2, 3, 4], 2: [1, 3, 4], 3: [4, 1, 2], 4: [3, 1, 2]})
    m = irving(inst)
    assert m is not None and m.pairs == [(0, 1), (2, 3)]


@settings(max_examples=400, deadline=None)
@given(instances(max_n=9))
def test_irving_agrees_with_oracle(inst):
    stable = _oracle_stable(inst)
    m = irving(inst)
    assert (m is not None) == bool(stable)
    if m is not None:
        assert blocking_report(inst, m).stable
        # every stable matching matches the same agents
        matched = {i for i, p in enumerate(stable[0]) if p != -1}
        assert set(range(inst.n)) - set(m.unmatched) == matched


@settings(max_examples=300, deadline=None)
@given(instances(max_n=10, kind="smi"))
def test_gale_shapley_is_stable_and_proposer_optimal(inst):
    m = gale_shapley(inst)
    assert blocking_report(inst, m).stable
    for s in _oracle_stable(inst):
        for i in range(inst.n):
            if inst.sides[i] == 0:
                other = None if s[i] == -1 else s[i]
                assert not inst.prefers(i, other, m.partner[i])


def test_gale_shapley_rejects_sri():
    with pytest.raises(AlmostStableError) as e:
        gale_shapley(triangle_and_pair())
    assert e.value.code == "NOT_SMI"


@settings(max_examples=400, deadline=None)
@given(instances(max_n=10))
def test_maximum_matching_size(inst):
    m = max_cardinality_matching(inst)
    blocking_report(inst, m)  # validates the matching
    assert m.size == _oracle_max(inst) == max_matching_size(inst)


@settings(max_examples=300, deadline=None)
@given(instances(max_n=11, max_deg=2))
def test_deg2_matching_is_maximum(inst):
    m = max_matching_deg2(inst)
    blocking_report(inst, m)
    assert m.size == _oracle_max(inst)


def test_deg2_rejects_long_lists():
    with pytest.raises(AlmostStableError) as e:
        max_matching_deg2(two_triangles())
    assert e.value.code == "DEGREE_EXCEEDED"


def test_blossom_on_odd_cycles():
    # two triangles joined by an edge: perfect matching of size 3
    inst = Instance.from_one_based("sri", {1: [2, 3], 2: [1, 3], 3: [1, 2, 4], 4: [3, 5, 6], 5: [4, 6], 6: [4, 5]})
    assert max_cardinality_matching(inst).size == 3
    assert Instance(Kind.SRI, ()).n == 0 and max_matching_size(Instance(Kind.SRI, ())) == 0
