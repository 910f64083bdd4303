"""Instances, matchings and blocking-pair analytics.

Agents are 0-based inside the library and 1-based in every text format.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence


class AlmostStableError(Exception):
    """Base error; ``code`` is a short machine-readable tag."""

    code = "ERROR"

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code


class InstanceError(AlmostStableError):
    code = "MALFORMED"


class InvalidMatchingError(AlmostStableError):
    code = "INVALID_MATCHING"


class DegreeExceededError(AlmostStableError):
    code = "DEGREE_EXCEEDED"


class Kind(str, Enum):
    SRI = "sri"
    SMI = "smi"


def _two_colour(n: int, prefs: Sequence[Sequence[int]]) -> tuple[int, ...] | None:
    # side 0 holds the smallest id of every component
    side = [-1] * n
    for root in range(n):
        if side[root] != -1:
            continue
        side[root] = 0
        stack = [root]
        while stack:
            u = stack.pop()
            for v in prefs[u]:
                if side[v] == -1:
                    side[v] = 1 - side[u]
                    stack.append(v)
                elif side[v] == side[u]:
                    return None
    return tuple(side)


@dataclass(frozen=True)
class Instance:
    """A roommates (``SRI``) or bipartite marriage (``SMI``) instance.

    ``prefs[i]`` lists the agents acceptable to ``i``, most preferred first.
    Construction validates symmetry of acceptability, list hygiene and, for
    ``SMI``, bipartiteness.
    """

    kind: Kind
    prefs: tuple[tuple[int, ...], ...]
    rank: tuple[dict[int, int], ...] = field(init=False, repr=False, compare=False)
    sides: tuple[int, ...] | None = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        kind = Kind(self.kind)
        prefs = tuple(tuple(int(j) for j in lst) for lst in self.prefs)
        n = len(prefs)
        rank: list[dict[int, int]] = []
        for i, lst in enumerate(prefs):
            r: dict[int, int] = {}
            for pos, j in enumerate(lst):
                if not 0 <= j < n:
                    raise InstanceError(f"agent {i + 1} ranks unknown agent {j + 1}", "BAD_ID")
                if j == i:
                    raise InstanceError(f"agent {i + 1} ranks itself", "SELF_RANKED")
                if j in r:
                    raise InstanceError(f"agent {i + 1} ranks agent {j + 1} twice", "DUPLICATE_ENTRY")
                r[j] = pos
            rank.append(r)
        for i, lst in enumerate(prefs):
            for j in lst:
                if i not in rank[j]:
                    raise InstanceError(
                        f"agent {i + 1} ranks agent {j + 1} but not vice versa", "ASYMMETRIC"
                    )
        sides = _two_colour(n, prefs)
        if kind is Kind.SMI and sides is None:
            raise InstanceError("smi instance has an odd cycle", "NOT_BIPARTITE")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "prefs", prefs)
        object.__setattr__(self, "rank", tuple(rank))
        object.__setattr__(self, "sides", sides if kind is Kind.SMI else None)

    @property
    def n(self) -> int:
        return len(self.prefs)

    def degree(self, i: int) -> int:
        return len(self.prefs[i])

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(p) for p in self.prefs)

    @property
    def d_max(self) -> int:
        return max(self.degrees, default=0)

    @property
    def edges(self) -> list[tuple[int, int]]:
        """Acceptable pairs ``(i, j)`` with ``i < j``, sorted."""
        return sorted((i, j) for i, lst in enumerate(self.prefs) for j in lst if i < j)

    def acceptable(self, i: int, j: int) -> bool:
        return j in self.rank[i]

    def prefers(self, i: int, a: int | None, b: int | None) -> bool:
        """True if ``i`` strictly prefers ``a`` to ``b`` (``None`` = unmatched)."""
        return self.rank_of(i, a) < self.rank_of(i, b)

    def rank_of(self, i: int, j: int | None) -> int:
        # unmatched sits just below the last acceptable agent
        if j is None or j == i:
            return len(self.prefs[i])
        return self.rank[i][j]

    def with_kind(self, kind: Kind) -> "Instance":
        return Instance(kind, self.prefs)

    @classmethod
    def from_one_based(cls, kind: Kind | str, prefs: Mapping[int, Sequence[int]] | Sequence[Sequence[int]], n: int | None = None) -> "Instance":
        """Build from 1-based lists (agent ``a_1`` is 1)."""
        if isinstance(prefs, Mapping):
            size = n if n is not None else max(prefs, default=0)
            lists = [[j - 1 for j in prefs.get(i + 1, ())] for i in range(size)]
        else:
            lists = [[j - 1 for j in lst] for lst in prefs]
            if n is not None:
                lists += [[] for _ in range(n - len(lists))]
        return cls(Kind(kind), tuple(tuple(l) for l in lists))


@dataclass(frozen=True)
class Matching:
    """A set of disjoint pairs; ``partner[i]`` is ``None`` when ``i`` is unmatched."""

    partner: tuple[int | None, ...]

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[Sequence[int]]) -> "Matching":
        partner: list[int | None] = [None] * n
        for pair in pairs:
            i, j = pair
            for a in (i, j):
                if not 0 <= a < n:
                    raise InvalidMatchingError(f"agent {a + 1} does not exist")
            if i == j:
                raise InvalidMatchingError(f"agent {i + 1} paired with itself")
            for a in (i, j):
                if partner[a] is not None:
                    raise InvalidMatchingError(f"agent {a + 1} occurs in more than one pair")
            partner[i] = j
            partner[j] = i
        return cls(tuple(partner))

    @classmethod
    def empty(cls, n: int) -> "Matching":
        return cls((None,) * n)

    @property
    def n(self) -> int:
        return len(self.partner)

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j in enumerate(self.partner) if j is not None and i < j]

    @property
    def size(self) -> int:
        return sum(1 for j in self.partner if j is not None) // 2

    @property
    def unmatched(self) -> list[int]:
        return [i for i, j in enumerate(self.partner) if j is None]

    def is_perfect(self) -> bool:
        return all(j is not None for j in self.partner)

    def __len__(self) -> int:
        return self.size


def build_matching(inst: Instance, pairs: Iterable[Sequence[int]]) -> Matching:
    """Validate 0-based ``pairs`` against ``inst`` and return the matching."""
    pairs = [tuple(p) for p in pairs]
    m = Matching.from_pairs(inst.n, pairs)
    for i, j in pairs:
        if not inst.acceptable(i, j):
            raise InvalidMatchingError(f"agents {i + 1} and {j + 1} are not mutually acceptable")
    return m


def check_matching(inst: Instance, m: Matching) -> None:
    if m.n != inst.n:
        raise InvalidMatchingError(f"matching covers {m.n} agents, instance has {inst.n}")
    for i, j in enumerate(m.partner):
        if j is None:
            continue
        if not 0 <= j < inst.n or m.partner[j] != i:
            raise InvalidMatchingError(f"partner table is not symmetric at agent {i + 1}")
        if not inst.acceptable(i, j):
            raise InvalidMatchingError(f"agents {i + 1} and {j + 1} are not mutually acceptable")


@dataclass(frozen=True)
class BlockingReport:
    blocking_pairs: tuple[tuple[int, int], ...]
    per_agent: tuple[int, ...]

    @property
    def total_bp(self) -> int:
        return len(self.blocking_pairs)

    @property
    def max_bp(self) -> int:
        return max(self.per_agent, default=0)

    @property
    def blocking_agents(self) -> int:
        return sum(1 for c in self.per_agent if c > 0)

    @property
    def stable(self) -> bool:
        return not self.blocking_pairs


def blocking_pairs(inst: Instance, m: Matching) -> list[tuple[int, int]]:
    rank, prefs, partner = inst.rank, inst.prefs, m.partner
    out = []
    for i, lst in enumerate(prefs):
        pi = partner[i]
        ri = len(lst) if pi is None else rank[i][pi]
        # only entries ranked above the current partner can block
        for j in lst[:ri]:
            if j <= i:
                continue
            pj = partner[j]
            rj = len(prefs[j]) if pj is None else rank[j][pj]
            if rank[j][i] < rj:
                out.append((i, j))
    out.sort()
    return out


def blocking_report(inst: Instance, m: Matching) -> BlockingReport:
    """Blocking pairs of ``m`` with per-agent counts."""
    check_matching(inst, m)
    bps = blocking_pairs(inst, m)
    per_agent = [0] * inst.n
    for i, j in bps:
        per_agent[i] += 1
        per_agent[j] += 1
    return BlockingReport(tuple(bps), tuple(per_agent))


def objective_value(report: BlockingReport, objective: str) -> int:
    objective = objective.lower()
    if objective == "minimax":
        return report.max_bp
    if objective == "minbp":
        return report.total_bp
    if objective == "minba":
        return report.blocking_agents
    raise ValueError(f"unknown objective {objective!r}")


# ---------------------------------------------------------------------------
# text formats


def parse_instance(text: str) -> Instance:
    """Parse the ``kind:`` / ``agents:`` / ``I: J K ...`` instance format."""
    kind: Kind | None = None
    n: int | None = None
    lists: dict[int, list[int]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, rest = line.partition(":")
        if not sep:
            raise InstanceError(f"line {lineno}: expected ':'", "MALFORMED")
        head = head.strip().lower()
        if head == "kind":
            try:
                kind = Kind(rest.strip().lower())
            except ValueError:
                raise InstanceError(f"line {lineno}: unknown kind {rest.strip()!r}", "MALFORMED") from None
            continue
        if head == "agents":
            try:
                n = int(rest)
            except ValueError:
                raise InstanceError(f"line {lineno}: bad agent count", "MALFORMED") from None
            if n < 0:
                raise InstanceError(f"line {lineno}: negative agent count", "MALFORMED")
            continue
        if n is None:
            raise InstanceError(f"line {lineno}: preference line before 'agents:'", "MALFORMED")
        try:
            agent = int(head)
            entries = [int(tok) for tok in rest.split()]
        except ValueError:
            raise InstanceError(f"line {lineno}: non-integer id", "MALFORMED") from None
        for a in (agent, *entries):
            if not 1 <= a <= n:
                raise InstanceError(f"line {lineno}: id {a} outside 1..{n}", "BAD_ID")
        if agent in lists:
            raise InstanceError(f"line {lineno}: second list for agent {agent}", "MALFORMED")
        lists[agent] = entries
    if kind is None or n is None:
        raise InstanceError("missing 'kind:' or 'agents:' header", "MALFORMED")
    return Instance.from_one_based(kind, lists, n=n)


def format_instance(inst: Instance, names: Mapping[int, str] | None = None) -> str:
    lines = [f"kind: {inst.kind.value}", f"agents: {inst.n}"]
    for i, lst in enumerate(inst.prefs):
        if names and i in names:
            lines.append(f"# {i + 1} = {names[i]}")
        if lst:
            lines.append(f"{i + 1}: " + " ".join(str(j + 1) for j in lst))
    return "\n".join(lines) + "\n"


def result_record(
    m: Matching, r: BlockingReport, objective: str = "minimax", value: int | None = None
) -> dict:
    if value is None:
        value = objective_value(r, objective)
    return {
        "pairs": [[i + 1, j + 1] for i, j in m.pairs],
        "unmatched": [i + 1 for i in m.unmatched],
        "size": m.size,
        "total_bp": r.total_bp,
        "max_bp": r.max_bp,
        "blocking_agents": r.blocking_agents,
        "blocking_pairs": [[i + 1, j + 1] for i, j in r.blocking_pairs],
        "stable": r.stable,
        "objective": objective,
        "value": int(value),
    }


def serialize_result(
    m: Matching, r: BlockingReport, objective: str = "minimax", value: int | None = None
) -> str:
    """One JSON object per solve, keys in a fixed order."""
    return json.dumps(result_record(m, r, objective, value))


def parse_result(text: str) -> dict:
    record = json.loads(text)
    missing = {"pairs", "unmatched", "size", "total_bp", "max_bp"} - record.keys()
    if missing:
        raise InvalidMatchingError(f"result record lacks {sorted(missing)}")
    return record


def parse_matching(inst: Instance, text: str) -> Matching:
    """Read a matching either as a result record or as ``i j`` lines (1-based)."""
    stripped = text.strip()
    if stripped.startswith("{"):
        pairs = parse_result(stripped)["pairs"]
    else:
        pairs = []
        for raw in stripped.splitlines():
            line = raw.split("#", 1)[0].replace(",", " ").split()
            if not line:
                continue
            if len(line) != 2:
                raise InvalidMatchingError(f"bad pair line {raw!r}")
            pairs.append([int(line[0]), int(line[1])])
    return build_matching(inst, [(i - 1, j - 1) for i, j in pairs])


def ceil_half(d: int) -> int:
    return math.ceil(d / 2)
