"""Seeded random instances and the experiment harness behind the summary tables."""

from __future__ import annotations

import csv
import io
import random
import time
from dataclasses import asdict, dataclass, fields
from enum import Enum
from pathlib import Path
from statistics import mean
from typing import Iterable, Sequence

from .classic import irving, max_cardinality_matching
from .core import AlmostStableError, Instance, Kind, Matching, blocking_report
from .exact import DEFAULT_CAP, Cardinality, Objective, solve_exact
from .ilp import Mode, build_model, export_lp, solve_model
from .localsearch import approx_minimax_sri
from .shortlist import solve_minimax_max_smi_deg2, solve_minimax_sri_deg2


class BenchError(AlmostStableError):
    pass


class Solver(str, Enum):
    EXACT = "exact"
    ILP = "ilp"
    APPROX = "approx"
    AUTO = "auto"


class Scheme(str, Enum):
    # every agent tops its list up to l among agents that still have room
    CAPPED = "capped"
    # every agent proposes l partners; acceptability is the symmetric closure
    CLOSURE = "closure"


# ---------------------------------------------------------------------------
# generation


def _check_config(n: int, l: int, kind: Kind) -> None:
    if n < 2 or l < 1:
        raise BenchError(f"need n >= 2 and l >= 1, got n={n}, l={l}", "BAD_CONFIG")
    if kind is Kind.SMI:
        if n % 2:
            raise BenchError("smi instances need an even number of agents", "BAD_CONFIG")
        if l > n // 2:
            raise BenchError(f"l={l} exceeds the side size {n // 2}", "BAD_CONFIG")
    elif l > n - 1:
        raise BenchError(f"l={l} exceeds the {n - 1} possible partners", "BAD_CONFIG")


def _shuffled_lists(adj: list[set[int]], rng: random.Random) -> tuple[tuple[int, ...], ...]:
    out = []
    for nbrs in adj:
        lst = sorted(nbrs)
        rng.shuffle(lst)
        out.append(tuple(lst))
    return tuple(out)


def gen_random(
    n: int, l: int, kind: Kind | str, seed: int, scheme: Scheme | str = Scheme.CAPPED
) -> Instance:
    """Random instance with target list length ``l``; deterministic in ``seed``.

    Marriage: agents ``0..n/2-1`` each rank a uniform ``l``-subset of the
    other side; the other side's lists are the induced acceptances. Roommates:
    see :class:`Scheme`. All lists are in uniform random order.
    """
    kind, scheme = Kind(kind), Scheme(scheme)
    _check_config(n, l, kind)
    rng = random.Random(seed)
    adj: list[set[int]] = [set() for _ in range(n)]
    if kind is Kind.SMI:
        half = n // 2
        for i in range(half):
            for j in rng.sample(range(half, n), l):
                adj[i].add(j)
                adj[j].add(i)
    elif scheme is Scheme.CLOSURE:
        for i in range(n):
            for j in rng.sample([x for x in range(n) if x != i], l):
                adj[i].add(j)
                adj[j].add(i)
    else:
        order = list(range(n))
        rng.shuffle(order)
        for i in order:
            while len(adj[i]) < l:
                room = [j for j in range(n) if j != i and j not in adj[i] and len(adj[j]) < l]
                if not room:
                    break
                j = rng.choice(room)
                adj[i].add(j)
                adj[j].add(i)
    return Instance(kind, _shuffled_lists(adj, rng))


# ---------------------------------------------------------------------------
# experiments


@dataclass
class ExperimentConfig:
    n: int
    l: int
    kind: Kind = Kind.SRI
    mode: Mode = Mode.MINIMAX
    count: int = 1
    base_seed: int = 0
    solver: Solver = Solver.AUTO
    out: Path | None = None
    budget_ms: int = 10_000
    cap: int = DEFAULT_CAP
    scheme: Scheme = Scheme.CAPPED
    timing: bool = False
    lp_dir: Path | None = None

    def __post_init__(self) -> None:
        self.kind = Kind(self.kind)
        self.mode = Mode(self.mode)
        self.solver = Solver(self.solver)
        self.scheme = Scheme(self.scheme)
        if self.count < 1:
            raise BenchError("count must be positive", "BAD_CONFIG")
        _check_config(self.n, self.l, self.kind)


@dataclass
class RunRow:
    index: int
    seed: int
    n: int
    l: int
    kind: str
    mode: str
    size: int
    max_size: int
    stable: int
    max_bp: int
    total_bp: int
    blocking_agents: int
    solve_ms: float
    optimal: int
    failed: int


COLUMNS = [f.name for f in fields(RunRow)]


def _card(mode: Mode) -> Cardinality:
    return Cardinality.ANY if mode is Mode.MINIMAX else Cardinality.MAX_CARD


def _shortcut(inst: Instance, mode: Mode, max_size: int) -> Matching | None:
    """A stable matching when it is already optimal for ``mode``."""
    stable = irving(inst)
    if stable is None:
        return None
    if mode is Mode.MINIMAX or stable.size == max_size:
        return stable
    return None


def _solve_ilp(
    inst: Instance, cfg: ExperimentConfig, index: int, max_size: int, probe: bool = False
) -> tuple[Matching, bool]:
    model = build_model(inst, cfg.mode)
    if cfg.lp_dir is not None:
        cfg.lp_dir.mkdir(parents=True, exist_ok=True)
        (cfg.lp_dir / f"instance_{index}.lp").write_text(export_lp(model))
    budget = cfg.budget_ms / 1000
    if probe:
        # value 0 is already ruled out, so any solution with r = 1 is optimal
        start = time.perf_counter()
        sol = solve_model(model, time_limit=budget, r_max=1)
        if sol.matching is not None and sol.optimal:
            if cfg.mode is Mode.MINIMAX or sol.matching.size == max_size:
                return sol.matching, True
        budget = max(budget - (time.perf_counter() - start), 0.001)
    sol = solve_model(model, time_limit=budget)
    if sol.matching is None:
        raise BenchError(f"ilp solver returned no solution: {sol.status}", "NO_SOLUTION")
    return sol.matching, sol.optimal


def _approx(inst: Instance, mode: Mode, max_size: int) -> tuple[Matching, bool]:
    if inst.d_max <= 2:
        if mode is Mode.MINIMAX:
            return solve_minimax_sri_deg2(inst), True
        if inst.kind is Kind.SMI:
            return solve_minimax_max_smi_deg2(inst), True
    if mode is Mode.MINIMAX:
        m = approx_minimax_sri(inst)
        return m, blocking_report(inst, m).max_bp == 0
    m = _shortcut(inst, mode, max_size)
    if m is not None:
        return m, True
    return max_cardinality_matching(inst), False


def solve_instance(inst: Instance, cfg: ExperimentConfig, index: int = 0) -> tuple[Matching, bool, int]:
    """Matching for one row, whether it is proven optimal, and the maximum matching size."""
    max_size = max_cardinality_matching(inst).size
    solver = cfg.solver
    if solver is Solver.AUTO:
        if inst.n > cfg.cap:
            m = _shortcut(inst, cfg.mode, max_size)
            if m is not None:
                return m, True, max_size
            m, optimal = _solve_ilp(inst, cfg, index, max_size, probe=True)
            return m, optimal, max_size
        solver = Solver.EXACT
    if solver is Solver.EXACT:
        res = solve_exact(inst, Objective.MINIMAX, _card(cfg.mode), cap=cfg.cap)
        return res.witness, True, max_size
    if solver is Solver.ILP:
        m, optimal = _solve_ilp(inst, cfg, index, max_size)
        return m, optimal, max_size
    m, optimal = _approx(inst, cfg.mode, max_size)
    return m, optimal, max_size


def run_row(cfg: ExperimentConfig, index: int) -> RunRow:
    seed = cfg.base_seed + index
    inst = gen_random(cfg.n, cfg.l, cfg.kind, seed, cfg.scheme)
    start = time.perf_counter()
    base = dict(index=index, seed=seed, n=cfg.n, l=cfg.l, kind=cfg.kind.value, mode=cfg.mode.value)
    try:
        m, optimal, max_size = solve_instance(inst, cfg, index)
    except AlmostStableError:
        ms = (time.perf_counter() - start) * 1000
        return RunRow(**base, size=0, max_size=0, stable=0, max_bp=0, total_bp=0,
                      blocking_agents=0, solve_ms=ms, optimal=0, failed=1)
    ms = (time.perf_counter() - start) * 1000
    rep = blocking_report(inst, m)
    return RunRow(
        **base,
        size=m.size,
        max_size=max_size,
        stable=int(rep.stable),
        max_bp=rep.max_bp,
        total_bp=rep.total_bp,
        blocking_agents=rep.blocking_agents,
        solve_ms=ms,
        optimal=int(optimal),
        failed=0,
    )


def run_experiment(cfg: ExperimentConfig) -> list[RunRow]:
    """One row per instance, instance ``i`` generated from seed ``base_seed + i``."""
    rows = [run_row(cfg, i) for i in range(cfg.count)]
    if cfg.out is not None:
        Path(cfg.out).write_text(rows_to_csv(rows, timing=cfg.timing), newline="")
    return rows


def rows_to_csv(rows: Iterable[RunRow], timing: bool = False) -> str:
    """CSV text with LF line endings; ``solve_ms`` is written as 0 unless ``timing``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        d = asdict(r)
        d["solve_ms"] = f"{r.solve_ms:.3f}" if timing else "0"
        w.writerow([d[c] for c in COLUMNS])
    return buf.getvalue()


def rows_from_csv(text: str) -> list[RunRow]:
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        kw = {}
        for f in fields(RunRow):
            v = rec[f.name]
            kw[f.name] = v if f.name in ("kind", "mode") else (float(v) if f.name == "solve_ms" else int(v))
        out.append(RunRow(**kw))
    return out


# ---------------------------------------------------------------------------
# summaries


@dataclass(frozen=True)
class Summary:
    n: int
    l: int
    kind: str
    mode: str
    count: int
    mean_size: float
    stable_pct: float
    mean_max_bp: float
    max_max_bp: int
    mean_solve_ms: float
    unproven: int
    failed: int


def summarize(rows: Sequence[RunRow]) -> Summary:
    """Aggregates over the solved rows of one configuration."""
    if not rows:
        raise BenchError("no rows to summarize", "EMPTY")
    ok = [r for r in rows if not r.failed]
    if not ok:
        raise BenchError("every row failed", "EMPTY")
    first = rows[0]
    return Summary(
        n=first.n,
        l=first.l,
        kind=first.kind,
        mode=first.mode,
        count=len(ok),
        mean_size=mean(r.size for r in ok),
        stable_pct=100.0 * sum(r.stable for r in ok) / len(ok),
        mean_max_bp=mean(r.max_bp for r in ok),
        max_max_bp=max(r.max_bp for r in ok),
        mean_solve_ms=mean(r.solve_ms for r in ok),
        unproven=sum(1 for r in ok if not r.optimal),
        failed=len(rows) - len(ok),
    )


def format_summary(summaries: Sequence[Summary]) -> str:
    """Aligned text table: one line per configuration."""
    head = ["kind", "mode", "n", "l", "count", "size", "stable", "max-bp", "max", "ms", "unproven", "failed"]
    body = [
        [
            s.kind,
            s.mode,
            str(s.n),
            str(s.l),
            str(s.count),
            f"{s.mean_size:.2f}",
            f"{s.stable_pct:.2f}%",
            f"{s.mean_max_bp:.2f}",
            str(s.max_max_bp),
            f"{s.mean_solve_ms:.1f}",
            str(s.unproven),
            str(s.failed),
        ]
        for s in summaries
    ]
    widths = [max(len(r[c]) for r in [head] + body) for c in range(len(head))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(r, widths)) for r in [head] + body]
    return "\n".join(lines) + "\n"
