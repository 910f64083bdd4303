"""Exhaustive branch-and-bound over matchings for the three instability objectives.

The search decides agents in increasing id order. An undecided agent is
either paired with an undecided acceptable partner (partners tried in
increasing id order) or left unmatched, which gives every matching exactly
once. Among optimal matchings the one returned has the lexicographically
smallest partner vector, with "unmatched" ordered after every partner.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .classic import irving, max_cardinality_matching, max_matching_size
from .core import AlmostStableError, Instance, Kind, Matching, blocking_report, objective_value
from .localsearch import approx_minimax_sri

DEFAULT_CAP = 24


class TooLargeError(AlmostStableError):
    code = "TOO_LARGE"


class InfeasibleError(AlmostStableError):
    code = "INFEASIBLE"


class Objective(str, Enum):
    MINIMAX = "minimax"
    MIN_BP = "minbp"
    MIN_BA = "minba"


class Cardinality(str, Enum):
    ANY = "any"
    MAX_CARD = "max"
    PERFECT = "perfect"


@dataclass(frozen=True)
class ExactResult:
    value: int
    witness: Matching
    explored: int


_UNDECIDED = -2
_SINGLE = -1


def required_size(inst: Instance, card: Cardinality) -> int:
    card = Cardinality(card)
    if card is Cardinality.ANY:
        return 0
    largest = max_matching_size(inst)
    if card is Cardinality.MAX_CARD:
        return largest
    if inst.n % 2 or largest * 2 < inst.n:
        raise InfeasibleError("instance admits no perfect matching")
    return inst.n // 2


class _Search:
    """Shared DFS machinery; ``bound`` is the pruning threshold on the objective."""

    def __init__(self, inst: Instance, objective: Objective, need: int):
        self.inst = inst
        self.objective = objective
        self.need = need
        n = inst.n
        self.n = n
        self.prefs = inst.prefs
        self.nbrs = [sorted(lst) for lst in inst.prefs]
        big = n + 1
        self.rank = [[big] * (n + 1) for _ in range(n)]
        for i, lst in enumerate(inst.prefs):
            for r, j in enumerate(lst):
                self.rank[i][j] = r
            # the unmatched sentinel column
            self.rank[i][n] = len(lst)
        self.state = [_UNDECIDED] * n
        self.count = [0] * n
        self.total = 0
        self.agents = 0
        self.peak = 0
        self.matched = 0
        self.undecided = n
        self.explored = 0

    # blocking bookkeeping ---------------------------------------------------

    def _cur_rank(self, a: int) -> int:
        s = self.state[a]
        return self.rank[a][self.n if s == _SINGLE else s]

    def _settle(self, a: int, log: list[tuple[int, int]]) -> None:
        """Record blocking pairs between newly decided ``a`` and decided neighbours."""
        state, rank = self.state, self.rank
        ra = self._cur_rank(a)
        row = rank[a]
        for b in self.prefs[a]:
            if row[b] >= ra:
                break
            sb = state[b]
            if sb == _UNDECIDED:
                continue
            if rank[b][a] < rank[b][self.n if sb == _SINGLE else sb]:
                log.append((a, b))
                for x in (a, b):
                    if self.count[x] == 0:
                        self.agents += 1
                    self.count[x] += 1
                    if self.count[x] > self.peak:
                        self.peak = self.count[x]
                self.total += 1

    def _undo(self, log: list[tuple[int, int]], peak: int) -> None:
        for a, b in log:
            for x in (a, b):
                self.count[x] -= 1
                if self.count[x] == 0:
                    self.agents -= 1
            self.total -= 1
        self.peak = peak

    def value(self) -> int:
        if self.objective is Objective.MINIMAX:
            return self.peak
        if self.objective is Objective.MIN_BP:
            return self.total
        return self.agents

    # cardinality bound ---------------------------------------------------------

    def _size_possible(self) -> bool:
        need = self.need - self.matched
        if need <= 0:
            return True
        if self.undecided // 2 < need:
            return False
        state = self.state
        live = [i for i in range(self.n) if state[i] == _UNDECIDED and any(state[j] == _UNDECIDED for j in self.prefs[i])]
        if len(live) // 2 < need:
            return False
        # a greedy matching is usually enough to confirm feasibility
        taken = [False] * self.n
        greedy = 0
        for i in live:
            if taken[i]:
                continue
            for j in self.nbrs[i]:
                if state[j] == _UNDECIDED and not taken[j] and j != i:
                    taken[i] = taken[j] = True
                    greedy += 1
                    break
        if greedy >= need:
            return True
        return _induced_max_matching(self.inst, live) >= need

    # branching -------------------------------------------------------------------

    def run(self, start: int, limit: int, on_leaf) -> bool:
        """DFS from agent ``start``; prune when the objective reaches ``limit``.

        ``on_leaf`` returns the new limit, or ``None`` to stop the search.
        Returns False if the search was stopped.
        """
        self.limit = limit
        self.on_leaf = on_leaf
        return self._dfs(start)

    def _dfs(self, i: int) -> bool:
        self.explored += 1
        state, n = self.state, self.n
        while i < n and state[i] != _UNDECIDED:
            i += 1
        if i == n:
            if self.matched < self.need:
                return True
            new = self.on_leaf(self)
            if new is None:
                return False
            self.limit = new
            return True
        for j in self.nbrs[i]:
            if j < i or state[j] != _UNDECIDED:
                continue
            if not self._try(i, j):
                return False
        return self._try(i, None)

    def _try(self, i: int, j: int | None) -> bool:
        state = self.state
        peak = self.peak
        log: list[tuple[int, int]] = []
        if j is None:
            state[i] = _SINGLE
            self.undecided -= 1
            self._settle(i, log)
        else:
            state[i], state[j] = j, i
            self.undecided -= 2
            self.matched += 1
            self._settle(i, log)
            self._settle(j, log)
        ok = True
        if self.value() < self.limit and self._size_possible():
            ok = self._dfs(i + 1)
        self._undo(log, peak)
        if j is None:
            state[i] = _UNDECIDED
            self.undecided += 1
        else:
            state[i] = state[j] = _UNDECIDED
            self.undecided += 2
            self.matched -= 1
        return ok

    def matching(self) -> Matching:
        return Matching(tuple(None if s < 0 else s for s in self.state))


def _induced_max_matching(inst: Instance, agents: list[int]) -> int:
    keep = set(agents)
    index = {a: k for k, a in enumerate(agents)}
    prefs = tuple(tuple(index[b] for b in inst.prefs[a] if b in keep) for a in agents)
    sub = Instance(Kind.SRI, prefs)
    if inst.kind is Kind.SMI:
        sub = Instance(Kind.SMI, prefs)
    return max_matching_size(sub)


def _check_size(inst: Instance, cap: int, force: bool) -> None:
    if inst.n > cap and not force:
        raise TooLargeError(f"{inst.n} agents exceeds the exhaustive-search cap of {cap}")


def _heuristic_upper(inst: Instance, objective: Objective, card: Cardinality, need: int) -> int:
    """Objective value of some feasible matching, or a trivial bound."""
    if objective is Objective.MINIMAX:
        trivial = inst.d_max
    elif objective is Objective.MIN_BP:
        trivial = len(inst.edges)
    else:
        trivial = inst.n
    candidates = [max_cardinality_matching(inst)]
    if card is Cardinality.ANY:
        candidates.append(approx_minimax_sri(inst))
    best = trivial
    for m in candidates:
        if m.size >= need:
            best = min(best, objective_value(blocking_report(inst, m), objective.value))
    return best


def solve_exact(
    inst: Instance,
    objective: Objective | str = Objective.MINIMAX,
    card: Cardinality | str = Cardinality.ANY,
    cap: int = DEFAULT_CAP,
    force: bool = False,
) -> ExactResult:
    """Global optimum of ``objective`` over matchings meeting ``card``."""
    objective, card = Objective(objective), Cardinality(card)
    _check_size(inst, cap, force)
    need = required_size(inst, card)
    search = _Search(inst, objective, need)
    best: dict = {}

    def on_leaf(s: _Search) -> int:
        v = s.value()
        best["value"] = v
        best["witness"] = s.matching()
        return v

    upper = _heuristic_upper(inst, objective, card, need)
    if objective is Objective.MINIMAX:
        # deepen from the trivial lower bound; every pass is cheap when k is small
        lower = 1 if card is Cardinality.ANY and irving(inst) is None else 0
        for k in range(lower, upper):
            search.run(0, k + 1, on_leaf)
            if "value" in best:
                break
    if "value" not in best:
        search.run(0, upper + 1, on_leaf)
    if "value" not in best:
        raise InfeasibleError("no matching satisfies the cardinality constraint")
    return ExactResult(best["value"], best["witness"], search.explored)


def decide_k_max(
    inst: Instance,
    k: int,
    card: Cardinality | str = Cardinality.ANY,
    cap: int = DEFAULT_CAP,
    force: bool = False,
) -> Matching | None:
    """A matching meeting ``card`` in which no agent is in more than ``k`` blocking pairs."""
    if k < 0:
        raise ValueError("k must be non-negative")
    card = Cardinality(card)
    _check_size(inst, cap, force)
    need = required_size(inst, card)
    search = _Search(inst, Objective.MINIMAX, need)
    found: list[Matching] = []

    def on_leaf(s: _Search) -> None:
        found.append(s.matching())
        return None

    search.run(0, k + 1, on_leaf)
    return found[0] if found else None
