"""Linear-time minimax solvers for instances whose lists have length at most 2."""

from __future__ import annotations

from .classic import gale_shapley, irving, max_matching_deg2
from .core import AlmostStableError, DegreeExceededError, Instance, Kind, Matching


def _require_deg2(inst: Instance) -> None:
    if inst.d_max > 2:
        raise DegreeExceededError(f"lists of length at most 2 required, found {inst.d_max}")


def rematch_deg2(inst: Instance, m: Matching) -> Matching:
    """Repair a maximum matching until no agent is in two blocking pairs.

    An agent in two blocking pairs is necessarily unmatched. It takes the
    blocking partner it prefers, whose old partner becomes unmatched and is
    pushed for revalidation. Each swap lowers the number of over-blocked
    agents, so there are at most ``n`` swaps.
    """
    _require_deg2(inst)
    rank, prefs = inst.rank, inst.prefs
    partner = list(m.partner)

    def blocks(i: int, j: int) -> bool:
        pi, pj = partner[i], partner[j]
        if pi == j:
            return False
        ri = len(prefs[i]) if pi is None else rank[i][pi]
        rj = len(prefs[j]) if pj is None else rank[j][pj]
        return rank[i][j] < ri and rank[j][i] < rj

    stack = [i for i in range(inst.n - 1, -1, -1) if partner[i] is None]
    swaps = 0
    while stack:
        i = stack.pop()
        if partner[i] is not None:
            continue
        blockers = [j for j in prefs[i] if blocks(i, j)]
        if len(blockers) < 2:
            continue
        r = blockers[0]
        k = partner[r]
        partner[i], partner[r] = r, i
        if k is not None:
            partner[k] = None
            stack.append(k)
        swaps += 1
        assert swaps <= inst.n, "rematching did not terminate within n swaps"
    return Matching(tuple(partner))


def solve_minimax_sri_deg2(inst: Instance) -> Matching:
    """Optimal minimax matching when every list has length at most 2."""
    _require_deg2(inst)
    stable = irving(inst)
    if stable is not None:
        return stable
    return rematch_deg2(inst, max_matching_deg2(inst))


def solve_minimax_max_smi_deg2(inst: Instance) -> Matching:
    """Optimal minimax matching among maximum-cardinality matchings (bipartite, lists <= 2)."""
    if inst.kind is not Kind.SMI:
        raise AlmostStableError("solve_minimax_max_smi_deg2 needs an smi instance", "NOT_SMI")
    _require_deg2(inst)
    stable = gale_shapley(inst)
    largest = max_matching_deg2(inst)
    if stable.size == largest.size:
        return stable
    return rematch_deg2(inst, largest)
