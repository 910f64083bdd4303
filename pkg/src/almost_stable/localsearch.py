"""Balanced-cut local search giving a ceil(d_max/2)-approximation for roommates."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .classic import gale_shapley, irving
from .core import AlmostStableError, Instance, Kind, Matching


class InconsistentCutError(AlmostStableError):
    code = "INCONSISTENT_CUT"


@dataclass
class CutState:
    """Side bits and crossing numbers after the local search has settled.

    ``flips`` counts the flips performed; ``potential`` is the number of
    crossing acceptable pairs.
    """

    side: list[int]
    cross: list[int]
    flips: int = 0
    potential: int = 0
    queue: list[int] = field(default_factory=list)


def crossing_numbers(inst: Instance, side: list[int]) -> list[int]:
    return [sum(1 for j in lst if side[j] != side[i]) for i, lst in enumerate(inst.prefs)]


def balanced_cut(
    inst: Instance, on_flip: Callable[[int, list[int]], None] | None = None
) -> CutState:
    """Flip agents until every agent has at least half its list across the cut.

    All agents start on side 0. The work set is a LIFO stack with membership
    flags, seeded so that agents are popped in increasing id order.
    ``on_flip(agent, side)`` is called after each completed flip.
    """
    n = inst.n
    prefs = inst.prefs
    deg = inst.degrees
    side = [0] * n
    cross = [0] * n
    in_q = [deg[i] > 2 * cross[i] for i in range(n)]
    stack = [i for i in range(n - 1, -1, -1) if in_q[i]]
    phi = 0
    flips = 0
    while stack:
        i = stack.pop()
        if not in_q[i]:
            continue
        in_q[i] = False
        old = side[i]
        side[i] = 1 - old
        for j in prefs[i]:
            if side[j] == old:
                cross[j] += 1
            else:
                cross[j] -= 1
            if in_q[j] and deg[j] <= 2 * cross[j]:
                in_q[j] = False
            elif not in_q[j] and deg[j] > 2 * cross[j]:
                in_q[j] = True
                stack.append(j)
        gain = deg[i] - 2 * cross[i]
        cross[i] = deg[i] - cross[i]
        assert gain >= 1, "flip did not increase the cut potential"
        phi += gain
        flips += 1
        if on_flip is not None:
            on_flip(i, side)
    left = [i for i in range(n) if in_q[i]]
    return CutState(side=side, cross=cross, flips=flips, potential=phi, queue=left)


def potential(inst: Instance, cut: CutState) -> int:
    """Number of crossing acceptable pairs, i.e. half the sum of crossing numbers."""
    actual = crossing_numbers(inst, cut.side)
    if actual != list(cut.cross):
        raise InconsistentCutError("stored crossing numbers disagree with the side assignment")
    total = sum(actual)
    assert total % 2 == 0
    return total // 2


def cut_subinstance(inst: Instance, side: list[int]) -> Instance:
    """Bipartite sub-instance keeping only crossing pairs, in original order."""
    prefs = tuple(tuple(j for j in lst if side[j] != side[i]) for i, lst in enumerate(inst.prefs))
    return Instance(Kind.SMI, prefs)


def approx_with_cut(inst: Instance) -> tuple[Matching, CutState | None]:
    stable = irving(inst)
    if stable is not None:
        return stable, None
    cut = balanced_cut(inst)
    sub = cut_subinstance(inst, cut.side)
    return gale_shapley(sub, proposers=0, sides=cut.side), cut


def approx_minimax_sri(inst: Instance) -> Matching:
    """Stable matching if one exists, else a stable matching of the cut sub-instance.

    Every agent ends up in at most ceil(d_i / 2) blocking pairs.
    """
    return approx_with_cut(inst)[0]
