"""Integer programs for minimax almost-stability and their LP-format export.

Variables are one binary ``x_i_j`` (pair is matched) and one binary
``b_i_j`` (pair may block) per acceptable pair with ``i < j`` in 1-based
ids, plus a general integer ``r`` bounding every agent's blocking count.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .core import AlmostStableError, Instance, Matching, blocking_report

LINE_WIDTH = 78


class IlpError(AlmostStableError):
    pass


class Mode(str, Enum):
    MINIMAX = "minimax"
    MINIMAX_MAX = "minimax-max"


@dataclass(frozen=True)
class Row:
    name: str
    coeffs: tuple[tuple[str, int], ...]
    sense: str  # "<=" or ">="
    rhs: int

    def activity(self, values: Mapping[str, float]) -> float:
        return sum(c * values[v] for v, c in self.coeffs)

    def satisfied(self, values: Mapping[str, float]) -> bool:
        a = self.activity(values)
        return a <= self.rhs if self.sense == "<=" else a >= self.rhs


@dataclass
class IlpModel:
    mode: Mode
    n: int
    pairs: list[tuple[int, int]]
    binaries: list[str]
    generals: list[str]
    bounds: dict[str, tuple[int, int]]
    rows: list[Row]
    sense: str  # "min" or "max"
    objective: list[tuple[str, int]]
    weight: int = 0

    @property
    def variables(self) -> list[str]:
        return self.binaries + self.generals

    def row(self, name: str) -> Row:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)


def x_name(i: int, j: int) -> str:
    i, j = min(i, j), max(i, j)
    return f"x_{i + 1}_{j + 1}"


def b_name(i: int, j: int) -> str:
    i, j = min(i, j), max(i, j)
    return f"b_{i + 1}_{j + 1}"


def _row_key(name: str) -> tuple:
    # natural order: c2 before c10
    return tuple(int(t) if t.isdigit() else t for t in re.findall(r"\d+|\D+", name))


def build_model(inst: Instance, mode: Mode | str = Mode.MINIMAX) -> IlpModel:
    mode = Mode(mode)
    pairs = inst.edges
    rows: list[Row] = []
    for i in range(inst.n):
        rows.append(Row(f"m{i + 1}", tuple((x_name(i, j), 1) for j in sorted(inst.prefs[i])), "<=", 1))
    for i, j in pairs:
        coeffs: dict[str, int] = {}
        for a, other in ((i, j), (j, i)):
            # partners a likes at least as much as ``other``
            for k in inst.prefs[a][: inst.rank[a][other] + 1]:
                v = x_name(a, k)
                coeffs[v] = coeffs.get(v, 0) + 1
        coeffs[b_name(i, j)] = 1
        ordered = sorted(coeffs.items(), key=lambda kv: (kv[0][0] != "x", _row_key(kv[0])))
        rows.append(Row(f"s{i + 1}_{j + 1}", tuple(ordered), ">=", 1))
    for i in range(inst.n):
        coeffs = [(b_name(i, j), 1) for j in sorted(inst.prefs[i])]
        rows.append(Row(f"c{i + 1}", tuple(coeffs + [("r", -1)]), "<=", 0))
    rows.sort(key=lambda r: _row_key(r.name))

    xs = [x_name(i, j) for i, j in pairs]
    bs = [b_name(i, j) for i, j in pairs]
    # one more matched pair outweighs any change in r, since r <= n - 1
    weight = inst.n + 1
    if mode is Mode.MINIMAX:
        sense, objective, weight = "min", [("r", 1)], 0
    else:
        sense, objective = "max", [(v, weight) for v in xs] + [("r", -1)]
    return IlpModel(
        mode=mode,
        n=inst.n,
        pairs=list(pairs),
        binaries=xs + bs,
        generals=["r"],
        bounds={"r": (0, inst.d_max)},
        rows=rows,
        sense=sense,
        objective=objective,
        weight=weight,
    )


def _terms(coeffs) -> list[str]:
    out = []
    for k, (v, c) in enumerate(coeffs):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = v if mag == 1 else f"{mag} {v}"
        if k == 0:
            out.append(body if c >= 0 else f"- {body}")
        else:
            out.append(f"{sign} {body}")
    return out


def _wrap(head: str, pieces: list[str]) -> list[str]:
    lines, cur = [], head
    for p in pieces:
        if len(cur) + 1 + len(p) > LINE_WIDTH and cur.strip():
            lines.append(cur)
            cur = "   " + p
        else:
            cur = f"{cur} {p}" if cur else p
    lines.append(cur)
    return lines


def export_lp(model: IlpModel) -> str:
    """LP-format text; deterministic for a given model."""
    out = ["Maximize" if model.sense == "max" else "Minimize"]
    out += _wrap(" obj:", _terms(model.objective))
    out.append("Subject To")
    for row in model.rows:
        terms = _terms(row.coeffs) if row.coeffs else ["0 r"]
        out += _wrap(f" {row.name}:", terms + [row.sense, str(row.rhs)])
    out.append("Bounds")
    for v in model.generals:
        lo, hi = model.bounds[v]
        out.append(f" {lo} <= {v} <= {hi}")
    if model.binaries:
        out.append("Binaries")
        out += _wrap("", model.binaries)
    out.append("Generals")
    out += _wrap("", model.generals)
    out.append("End")
    return "\n".join(out) + "\n"


def variable_map(model: IlpModel) -> dict:
    """Sidecar record linking each acceptable pair (1-based) to its variables."""
    return {
        "mode": model.mode.value,
        "weight": model.weight,
        "r": "r",
        "pairs": [
            {"pair": [i + 1, j + 1], "x": x_name(i, j), "b": b_name(i, j)} for i, j in model.pairs
        ],
    }


def format_variable_map(model: IlpModel) -> str:
    return json.dumps(variable_map(model), indent=2) + "\n"


def check_solution(model: IlpModel, assignment: Mapping[str, float]) -> tuple[bool, list[str]]:
    """Whether ``assignment`` satisfies every row; also returns violated row names.

    Bound violations are reported as ``bound:<variable>``.
    """
    missing = [v for v in model.variables if v not in assignment]
    if missing:
        raise IlpError(f"assignment lacks variable {missing[0]}", "MISSING_VARIABLE")
    bad = []
    for v in model.binaries:
        if assignment[v] not in (0, 1):
            bad.append(f"bound:{v}")
    for v in model.generals:
        lo, hi = model.bounds[v]
        val = assignment[v]
        if val != int(val) or not lo <= val <= hi:
            bad.append(f"bound:{v}")
    bad += [row.name for row in model.rows if not row.satisfied(assignment)]
    return not bad, bad


def assignment_from_matching(model: IlpModel, inst: Instance, m: Matching) -> dict[str, int]:
    """x from ``m``, b set exactly on blocking pairs, r the largest blocking count."""
    rep = blocking_report(inst, m)
    blocking = set(rep.blocking_pairs)
    values: dict[str, int] = {}
    for i, j in model.pairs:
        values[x_name(i, j)] = int(m.partner[i] == j)
        values[b_name(i, j)] = int((i, j) in blocking)
    values["r"] = rep.max_bp
    return values


def objective_value(model: IlpModel, assignment: Mapping[str, float]) -> float:
    return sum(c * assignment[v] for v, c in model.objective)


@dataclass(frozen=True)
class IlpSolution:
    matching: Matching | None
    r: int | None
    optimal: bool
    status: str


def solve_model(
    model: IlpModel, time_limit: float | None = None, r_max: int | None = None
) -> IlpSolution:
    """Solve the model in-process with the HiGHS MILP solver shipped with scipy.

    ``r_max`` tightens the upper bound on ``r`` for a feasibility probe.
    """
    import numpy as np
    from scipy.optimize import Bounds, LinearConstraint, milp
    from scipy.sparse import coo_matrix

    names = model.variables
    index = {v: k for k, v in enumerate(names)}
    nv = len(names)
    c = np.zeros(nv)
    for v, w in model.objective:
        c[index[v]] = w
    if model.sense == "max":
        c = -c
    rr, cc, vv, lo, hi = [], [], [], [], []
    for k, row in enumerate(model.rows):
        for v, w in row.coeffs:
            rr.append(k)
            cc.append(index[v])
            vv.append(w)
        if row.sense == "<=":
            lo.append(-np.inf)
            hi.append(row.rhs)
        else:
            lo.append(row.rhs)
            hi.append(np.inf)
    a = coo_matrix((vv, (rr, cc)), shape=(len(model.rows), nv)).tocsr()
    ub = np.ones(nv)
    ub[index["r"]] = model.bounds["r"][1] if r_max is None else r_max
    options = {"disp": False}
    if time_limit is not None:
        options["time_limit"] = time_limit
    res = milp(
        c,
        constraints=[LinearConstraint(a, lo, hi)],
        integrality=np.ones(nv),
        bounds=Bounds(np.zeros(nv), ub),
        options=options,
    )
    if res.x is None:
        return IlpSolution(None, None, False, res.message)
    x = np.round(res.x).astype(int)
    pairs = [(i, j) for i, j in model.pairs if x[index[x_name(i, j)]] == 1]
    return IlpSolution(Matching.from_pairs(model.n, pairs), int(x[index["r"]]), res.status == 0, res.message)
