"""Hard-instance families and the (2,2)-E3-SAT gadget reductions.

Both reductions come with witness builders (assignment to low-instability
matching) and, for roommates, the converse extraction.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .core import AlmostStableError, Instance, Kind, Matching, blocking_report

MAX_PROP34_K = 7


class ConstructionError(AlmostStableError):
    pass


# ---------------------------------------------------------------------------
# formulas


Literal = tuple[int, bool]  # (variable, negated), variables 0-based


@dataclass(frozen=True)
class SatFormula:
    num_vars: int
    clauses: tuple[tuple[Literal, ...], ...]

    @property
    def m(self) -> int:
        return len(self.clauses)

    def satisfied_by(self, assignment: Sequence[bool]) -> bool:
        return all(clause_true(c, assignment) for c in self.clauses)


def clause_true(clause: Sequence[Literal], assignment: Sequence[bool]) -> bool:
    return any(assignment[v] != neg for v, neg in clause)


def sat_violations(f: SatFormula) -> list[str]:
    """Every way ``f`` fails to be a (2,2)-E3-SAT formula; empty when valid."""
    out = []
    pos = [0] * f.num_vars
    neg = [0] * f.num_vars
    for j, clause in enumerate(f.clauses):
        if len(clause) != 3:
            out.append(f"clause {j + 1} has {len(clause)} literals")
        for v, negated in clause:
            if not 0 <= v < f.num_vars:
                out.append(f"clause {j + 1} uses unknown variable {v + 1}")
                continue
            (neg if negated else pos)[v] += 1
    for v in range(f.num_vars):
        if pos[v] != 2:
            out.append(f"variable {v + 1} occurs {pos[v]} times unnegated")
        if neg[v] != 2:
            out.append(f"variable {v + 1} occurs {neg[v]} times negated")
    return out


def validate_22e3sat(f: SatFormula) -> bool:
    return not sat_violations(f)


def parse_formula(text: str) -> SatFormula:
    """``vars: n`` then one clause per line as signed 1-based integers."""
    n = None
    clauses = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower().startswith("vars:"):
            n = int(line.split(":", 1)[1])
            continue
        try:
            lits = [int(t) for t in line.split()]
        except ValueError as e:
            raise ConstructionError(f"line {lineno}: {e}", "INVALID_FORMULA") from None
        if any(t == 0 for t in lits):
            raise ConstructionError(f"line {lineno}: literal 0", "INVALID_FORMULA")
        clauses.append(tuple((abs(t) - 1, t < 0) for t in lits))
    if n is None:
        raise ConstructionError("missing 'vars:' line", "INVALID_FORMULA")
    return SatFormula(n, tuple(clauses))


def format_formula(f: SatFormula) -> str:
    lines = [f"vars: {f.num_vars}"]
    for c in f.clauses:
        lines.append(" ".join(str(-(v + 1) if neg else v + 1) for v, neg in c))
    return "\n".join(lines) + "\n"


def example_formula() -> SatFormula:
    """(V1 | V2 | V3) & (~V1 | ~V2 | ~V3) & (V1 | ~V2 | V3) & (~V1 | V2 | ~V3)."""
    return parse_formula("vars: 3\n1 2 3\n-1 -2 -3\n1 -2 3\n-1 2 -3\n")


def planted_formula(num_vars: int, rng: random.Random) -> tuple[SatFormula, tuple[bool, ...]]:
    """Random valid formula together with an assignment that satisfies it.

    ``num_vars`` must be a positive multiple of 3. Literal occurrences are
    shuffled into clauses and repaired by random swaps until every clause has
    three distinct variables and a true literal under the planted assignment.
    """
    if num_vars <= 0 or num_vars % 3:
        raise ConstructionError("number of variables must be a positive multiple of 3", "BAD_SIZE")
    assignment = tuple(rng.random() < 0.5 for _ in range(num_vars))
    lits = [(v, neg) for v in range(num_vars) for neg in (False, False, True, True)]
    rng.shuffle(lits)
    m = len(lits) // 3

    def bad(j: int) -> bool:
        c = lits[3 * j : 3 * j + 3]
        return len({v for v, _ in c}) < 3 or not clause_true(c, assignment)

    while True:
        broken = [j for j in range(m) if bad(j)]
        if not broken:
            break
        j = rng.choice(broken)
        a = 3 * j + rng.randrange(3)
        b = rng.randrange(len(lits))
        lits[a], lits[b] = lits[b], lits[a]
    clauses = tuple(tuple(lits[3 * j : 3 * j + 3]) for j in range(m))
    return SatFormula(num_vars, clauses), assignment


# ---------------------------------------------------------------------------
# instance assembly


@dataclass
class Builder:
    """Mutable agent table used while wiring gadgets together."""

    names: list[str] = field(default_factory=list)
    lists: list[list[int]] = field(default_factory=list)

    def add(self, name: str) -> int:
        self.names.append(name)
        self.lists.append([])
        return len(self.names) - 1

    def build(self, kind: Kind) -> Instance:
        return Instance(kind, tuple(tuple(lst) for lst in self.lists))


def nested_cycle_lists(k: int) -> list[list[int]]:
    """Preference lists of the 3^k-agent nested-cycle instance (0-based).

    At level ``t`` the agents fall into blocks of 3^t, each split into three
    sub-blocks; an agent in sub-block ``b`` appends sub-block ``b+1`` and then
    ``b+2`` (mod 3), each in increasing index order.
    """
    n = 3**k
    lists: list[list[int]] = [[] for _ in range(n)]
    for t in range(1, k + 1):
        size = 3**t
        sub = size // 3
        for start in range(0, n, size):
            for i in range(start, start + size):
                b = (i - start) // sub
                for step in (1, 2):
                    s = start + ((b + step) % 3) * sub
                    lists[i].extend(range(s, s + sub))
    return lists


def _check_k(k: int) -> None:
    if not 1 <= k <= MAX_PROP34_K:
        raise ConstructionError(f"k must be between 1 and {MAX_PROP34_K}", "BAD_K")


def build_prop34(k: int) -> Instance:
    """Complete roommates instance on 3^k agents whose minimax optimum is k."""
    _check_k(k)
    return Instance(Kind.SRI, tuple(tuple(l) for l in nested_cycle_lists(k)))


def witness_prop34(k: int) -> Matching:
    """Pairs a1-a2, a3-a4, ... leaving the last agent single; max blocking count <= k."""
    _check_k(k)
    n = 3**k
    return Matching.from_pairs(n, [(t, t + 1) for t in range(0, n - 1, 2)])


def build_prop36(k: int) -> Instance:
    """Bipartite instance on 2(k+1) agents whose only maximum matching forces k blocking pairs.

    Agents 0..k are a_1..a_{k+1}; agents k+1..2k+1 are their pendant
    partners a'_1..a'_{k+1}.
    """
    if k < 0:
        raise ConstructionError("k must be non-negative", "BAD_K")
    hub = k
    lists: list[list[int]] = [[] for _ in range(2 * (k + 1))]
    for j in range(k):
        lists[j] = [hub, k + 1 + j]
        lists[k + 1 + j] = [j]
    lists[hub] = list(range(k)) + [2 * k + 1]
    lists[2 * k + 1] = [hub]
    return Instance(Kind.SMI, tuple(tuple(l) for l in lists))


def attach_forcing_gadget(b: Builder, target: int, omega: int = 2, label: str = "") -> list[int]:
    """Append 3^omega - 1 fresh agents making ``target`` the apex of a nested cycle.

    The target keeps its current list and then ranks the fresh agents
    ``f1, f2, ...`` in increasing order. Returns the fresh agent ids.
    """
    if omega < 2:
        raise ConstructionError("omega must be at least 2", "BAD_OMEGA")
    nested = nested_cycle_lists(omega)
    fresh = [b.add(f"f{t}{label}") for t in range(1, 3**omega)]
    ids = [target] + fresh
    b.lists[target].extend(ids[j] for j in nested[0])
    for pos, agent in enumerate(fresh, 1):
        b.lists[agent] = [ids[j] for j in nested[pos]]
    return fresh


# ---------------------------------------------------------------------------
# reductions


class ReductionKind(str, Enum):
    SRI = "sri"
    SMI = "smi"


@dataclass(frozen=True)
class ReductionOutput:
    instance: Instance
    formula: SatFormula
    agent_names: tuple[str, ...]
    # (clause, slot) -> variable-gadget agent, both 0-based
    literal_links: dict[tuple[int, int], int]
    kind: ReductionKind
    ids: dict[str, int]
    # fresh agents per forcing gadget (roommates reduction only)
    gadget_size: int = 0

    def agent(self, name: str) -> int:
        return self.ids[name]


def _occurrences(f: SatFormula) -> dict[tuple[int, int], tuple[int, bool, int]]:
    """(clause, slot) -> (variable, negated, occurrence number 0/1), scanning left to right."""
    seen: dict[tuple[int, bool], int] = {}
    out = {}
    for j, clause in enumerate(f.clauses):
        for s, (v, neg) in enumerate(clause):
            t = seen.get((v, neg), 0)
            seen[(v, neg)] = t + 1
            out[(j, s)] = (v, neg, t)
    return out


def _require_valid(f: SatFormula) -> None:
    problems = sat_violations(f)
    if problems:
        raise ConstructionError("; ".join(problems), "INVALID_FORMULA")


def reduce_sat_to_sri(f: SatFormula, omega: int = 2) -> ReductionOutput:
    """Roommates instance admitting max blocking count 1 iff ``f`` is satisfiable."""
    _require_valid(f)
    b = Builder()
    ids: dict[str, int] = {}

    def add(name: str) -> int:
        ids[name] = b.add(name)
        return ids[name]

    for i in range(1, f.num_vars + 1):
        for z in ("T", "F", "1", "2"):
            add(f"v{i}^{z}")
    for j in range(1, f.m + 1):
        for s in (1, 2, 3):
            add(f"x{j}^{s}")

    occ = _occurrences(f)
    links: dict[tuple[int, int], int] = {}
    # clause agents seen by each literal agent, in occurrence order
    slots: dict[int, list[int | None]] = {}
    for (j, s), (v, neg, t) in occ.items():
        lit = ids[f"v{v + 1}^{'F' if neg else 'T'}"]
        links[(j, s)] = lit
        slots.setdefault(lit, [None, None])[t] = ids[f"x{j + 1}^{s + 1}"]

    for i in range(1, f.num_vars + 1):
        vt, vf, v1, v2 = (ids[f"v{i}^{z}"] for z in ("T", "F", "1", "2"))
        for lit in (vt, vf):
            b.lists[lit] = [v1, *slots[lit], v2]
        b.lists[v1] = [vt, vf]
        b.lists[v2] = [vt, vf]
    for j in range(1, f.m + 1):
        xs = [ids[f"x{j}^{s}"] for s in (1, 2, 3)]
        for s in range(3):
            b.lists[xs[s]] = [xs[(s + 1) % 3], xs[(s + 2) % 3], links[(j - 1, s)]]
    for i in range(1, f.num_vars + 1):
        for z in ("1", "2"):
            fresh = attach_forcing_gadget(b, ids[f"v{i}^{z}"], omega, label=f"_{i}^{z}")
            for a in fresh:
                ids[b.names[a]] = a
    inst = b.build(Kind.SRI)
    return ReductionOutput(inst, f, tuple(b.names), links, ReductionKind.SRI, ids, 3**omega - 1)


def reduce_sat_to_smi(f: SatFormula) -> ReductionOutput:
    """Bipartite instance with a perfect matching of max blocking count 1 iff ``f`` is satisfiable."""
    _require_valid(f)
    b = Builder()
    ids: dict[str, int] = {}

    def add(name: str) -> int:
        ids[name] = b.add(name)
        return ids[name]

    for i in range(1, f.num_vars + 1):
        for s in range(1, 5):
            add(f"x{i}^{s}")
        for s in range(1, 5):
            add(f"y{i}^{s}")
    for j in range(1, f.m + 1):
        for s in (1, 2, 3):
            add(f"c{j}^{s}")
        for s in (1, 2, 3):
            add(f"p{j}^{s}")
        add(f"z{j}")
        add(f"q{j}")

    occ = _occurrences(f)
    links: dict[tuple[int, int], int] = {}
    partner_of: dict[int, int] = {}
    for (j, s), (v, neg, t) in occ.items():
        which = (3 if neg else 1) + t
        x = ids[f"x{v + 1}^{which}"]
        links[(j, s)] = x
        partner_of[x] = ids[f"c{j + 1}^{s + 1}"]

    for i in range(1, f.num_vars + 1):
        x = [ids[f"x{i}^{s}"] for s in range(1, 5)]
        y = [ids[f"y{i}^{s}"] for s in range(1, 5)]
        b.lists[x[0]] = [y[0], partner_of[x[0]], y[1]]
        b.lists[x[1]] = [y[1], partner_of[x[1]], y[2]]
        b.lists[x[2]] = [y[3], partner_of[x[2]], y[2]]
        b.lists[x[3]] = [y[0], partner_of[x[3]], y[3]]
        b.lists[y[0]] = [x[0], x[3]]
        b.lists[y[1]] = [x[0], x[1]]
        b.lists[y[2]] = [x[1], x[2]]
        b.lists[y[3]] = [x[2], x[3]]
    for j in range(1, f.m + 1):
        c = [ids[f"c{j}^{s}"] for s in (1, 2, 3)]
        p = [ids[f"p{j}^{s}"] for s in (1, 2, 3)]
        z, q = ids[f"z{j}"], ids[f"q{j}"]
        for s in range(3):
            b.lists[c[s]] = [p[s], links[(j - 1, s)], q]
            b.lists[p[s]] = [c[s], z]
        b.lists[z] = list(p)
        b.lists[q] = list(c)
    inst = b.build(Kind.SMI)
    return ReductionOutput(inst, f, tuple(b.names), links, ReductionKind.SMI, ids)


def _require_satisfying(f: SatFormula, assignment: Sequence[bool]) -> None:
    if len(assignment) != f.num_vars:
        raise ConstructionError("assignment has the wrong number of variables", "UNSATISFYING_ASSIGNMENT")
    for j, c in enumerate(f.clauses):
        if not clause_true(c, assignment):
            raise ConstructionError(f"clause {j + 1} is not satisfied", "UNSATISFYING_ASSIGNMENT")


def _first_true_slot(clause: Sequence[Literal], assignment: Sequence[bool]) -> int:
    return next(s for s, (v, neg) in enumerate(clause) if assignment[v] != neg)


def witness_from_assignment_sri(r: ReductionOutput, assignment: Sequence[bool]) -> Matching:
    """Matching with max blocking count 1 built from a satisfying assignment."""
    f = r.formula
    _require_satisfying(f, assignment)
    ids = r.ids
    pairs = []
    for i in range(1, f.num_vars + 1):
        vt, vf, v1, v2 = (ids[f"v{i}^{z}"] for z in ("T", "F", "1", "2"))
        pairs += [(vt, v1), (vf, v2)] if assignment[i - 1] else [(vt, v2), (vf, v1)]
        for z in ("1", "2"):
            fresh = [ids[f"f{t}_{i}^{z}"] for t in range(1, r.gadget_size + 1)]
            pairs += [(fresh[t], fresh[t + 1]) for t in range(0, len(fresh) - 1, 2)]
    for j, clause in enumerate(f.clauses, 1):
        d = _first_true_slot(clause, assignment)
        pairs.append((ids[f"x{j}^{(d + 2) % 3 + 1}"], ids[f"x{j}^{(d + 1) % 3 + 1}"]))
    return Matching.from_pairs(r.instance.n, pairs)


def extract_assignment_sri(r: ReductionOutput, m: Matching) -> tuple[bool, ...]:
    """Truth values read off the variable gadgets of a matching with max blocking count <= 1."""
    if blocking_report(r.instance, m).max_bp > 1:
        raise ConstructionError("some agent is in more than one blocking pair", "PRECONDITION_FAILED")
    out = []
    for i in range(1, r.formula.num_vars + 1):
        v1 = r.ids[f"v{i}^1"]
        if m.partner[v1] == r.ids[f"v{i}^T"]:
            out.append(True)
        elif m.partner[v1] == r.ids[f"v{i}^F"]:
            out.append(False)
        else:
            raise ConstructionError(f"variable gadget {i} matches neither pattern", "MALFORMED_WITNESS")
    return tuple(out)


def witness_from_assignment_smi(r: ReductionOutput, assignment: Sequence[bool]) -> Matching:
    """Perfect matching with max blocking count 1 built from a satisfying assignment."""
    f = r.formula
    _require_satisfying(f, assignment)
    ids = r.ids
    pairs = []
    for i in range(1, f.num_vars + 1):
        shift = 0 if assignment[i - 1] else 1
        for s in range(4):
            pairs.append((ids[f"x{i}^{s + 1}"], ids[f"y{i}^{(s + shift) % 4 + 1}"]))
    for j, clause in enumerate(f.clauses, 1):
        d = _first_true_slot(clause, assignment)
        for s in range(3):
            c = ids[f"c{j}^{s + 1}"]
            pairs.append((c, ids[f"q{j}"]) if s == d else (c, ids[f"p{j}^{s + 1}"]))
        pairs.append((ids[f"p{j}^{d + 1}"], ids[f"z{j}"]))
    return Matching.from_pairs(r.instance.n, pairs)
