"""Gale-Shapley, Irving's roommates algorithm and maximum-cardinality matching."""

from __future__ import annotations

from collections import deque
from typing import Sequence

from .core import DegreeExceededError, Instance, Kind, Matching, AlmostStableError


def gale_shapley(
    inst: Instance, proposers: int = 0, sides: Sequence[int] | None = None
) -> Matching:
    """Proposer-optimal stable matching of a bipartite instance.

    ``proposers`` is the side label (0 or 1) that proposes. By default side 0
    holds the smallest id of every connected component; ``sides`` overrides
    the labelling with any proper 2-colouring.
    """
    if inst.kind is not Kind.SMI:
        raise AlmostStableError("gale_shapley needs an smi instance", "NOT_SMI")
    if sides is None:
        sides = inst.sides
    assert sides is not None
    rank, prefs = inst.rank, inst.prefs
    nxt = [0] * inst.n
    held: list[int | None] = [None] * inst.n
    free = [i for i in range(inst.n - 1, -1, -1) if sides[i] == proposers and prefs[i]]
    while free:
        x = free.pop()
        if nxt[x] >= len(prefs[x]):
            continue
        y = prefs[x][nxt[x]]
        nxt[x] += 1
        cur = held[y]
        if cur is None:
            held[y] = x
        elif rank[y][x] < rank[y][cur]:
            held[y] = x
            free.append(cur)
        else:
            free.append(x)
    pairs = [(x, y) for y, x in enumerate(held) if x is not None]
    return Matching.from_pairs(inst.n, pairs)


def irving(inst: Instance) -> Matching | None:
    """A stable matching of ``inst`` or ``None`` if it is unsolvable.

    Works with incomplete lists: agents whose lists empty out in phase 1 are
    unmatched in every stable matching.
    """
    n = inst.n
    lists = [list(p) for p in inst.prefs]

    def delete(a: int, b: int) -> None:
        lists[a].remove(b)
        lists[b].remove(a)

    # phase 1: proposals with truncation
    holds: list[int | None] = [None] * n
    free = [i for i in range(n - 1, -1, -1) if lists[i]]
    while free:
        x = free.pop()
        if not lists[x]:
            continue
        y = lists[x][0]
        prev = holds[y]
        holds[y] = x
        cut = lists[y].index(x) + 1
        for z in lists[y][cut:]:
            delete(y, z)
            if z == prev:
                free.append(z)
    active = [bool(lst) for lst in lists]

    # phase 2: rotation elimination
    while True:
        start = next((i for i in range(n) if len(lists[i]) >= 2), None)
        if start is None:
            break
        seen: dict[int, int] = {}
        ps: list[int] = []
        p = start
        while p not in seen:
            seen[p] = len(ps)
            ps.append(p)
            p = lists[lists[p][1]][-1]
        cycle = ps[seen[p]:]
        seconds = [lists[x][1] for x in cycle]
        doomed = set()
        for x, y in zip(cycle, seconds):
            cut = lists[y].index(x) + 1
            doomed.update((min(y, z), max(y, z)) for z in lists[y][cut:])
        for y, z in sorted(doomed):
            delete(y, z)
        if any(active[i] and not lists[i] for i in range(n)):
            return None

    pairs = [(x, lists[x][0]) for x in range(n) if lists[x] and x < lists[x][0]]
    return Matching.from_pairs(n, pairs)


def max_matching_deg2(inst: Instance) -> Matching:
    """Maximum matching of a graph whose components are paths and cycles.

    Paths are walked from their lowest-id endpoint and cycles from their
    lowest-id vertex, taking every second edge.
    """
    if inst.d_max > 2:
        raise DegreeExceededError("max_matching_deg2 needs lists of length at most 2")
    n = inst.n
    adj = inst.prefs
    seen = [False] * n
    pairs: list[tuple[int, int]] = []

    def walk(start: int, first: int | None) -> list[int]:
        order = [start]
        seen[start] = True
        prev, cur = start, first
        while cur is not None and not seen[cur]:
            seen[cur] = True
            order.append(cur)
            nxt = [v for v in adj[cur] if v != prev]
            prev, cur = cur, (nxt[0] if nxt else None)
        return order

    # paths first, so that cycles are exactly the leftover components
    for v in range(n):
        if not seen[v] and len(adj[v]) <= 1:
            order = walk(v, adj[v][0] if adj[v] else None)
            pairs.extend((order[k], order[k + 1]) for k in range(0, len(order) - 1, 2))
    for v in range(n):
        if not seen[v]:
            order = walk(v, min(adj[v]))
            pairs.extend((order[k], order[k + 1]) for k in range(0, len(order) - 1, 2))
    return Matching.from_pairs(n, pairs)


def _bipartite_matching(inst: Instance) -> list[int | None]:
    sides = inst.sides
    if sides is None:
        from .core import _two_colour

        sides = _two_colour(inst.n, inst.prefs)
    assert sides is not None
    mate: list[int | None] = [None] * inst.n
    adj = inst.prefs

    def augment(u: int, visited: list[bool]) -> bool:
        # iterative DFS over alternating paths
        stack = [(u, iter(adj[u]))]
        path: list[tuple[int, int]] = []
        while stack:
            x, it = stack[-1]
            advanced = False
            for y in it:
                if visited[y]:
                    continue
                visited[y] = True
                if mate[y] is None:
                    path.append((x, y))
                    for a, b in path:
                        mate[a] = b
                        mate[b] = a
                    return True
                path.append((x, y))
                stack.append((mate[y], iter(adj[mate[y]])))
                advanced = True
                break
            if not advanced:
                stack.pop()
                if path:
                    path.pop()
        return False

    for u in range(inst.n):
        if sides[u] == 0 and mate[u] is None and adj[u]:
            augment(u, [False] * inst.n)
    return mate


def _blossom_matching(inst: Instance) -> list[int | None]:
    """Edmonds' blossom algorithm, BFS formulation, O(n^3)."""
    n = inst.n
    adj = inst.prefs
    mate = [-1] * n
    parent = [-1] * n
    base = list(range(n))
    used = [False] * n
    blossom = [False] * n

    def lca(a: int, b: int) -> int:
        on_path = [False] * n
        while True:
            a = base[a]
            on_path[a] = True
            if mate[a] == -1:
                break
            a = parent[mate[a]]
        while True:
            b = base[b]
            if on_path[b]:
                return b
            b = parent[mate[b]]

    def mark_path(v: int, b: int, child: int) -> None:
        while base[v] != b:
            blossom[base[v]] = blossom[base[mate[v]]] = True
            parent[v] = child
            child = mate[v]
            v = parent[mate[v]]

    def find_path(root: int) -> int:
        for i in range(n):
            used[i] = False
            parent[i] = -1
            base[i] = i
        used[root] = True
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for to in adj[v]:
                if base[v] == base[to] or mate[v] == to:
                    continue
                if to == root or (mate[to] != -1 and parent[mate[to]] != -1):
                    cur = lca(v, to)
                    for i in range(n):
                        blossom[i] = False
                    mark_path(v, cur, to)
                    mark_path(to, cur, v)
                    for i in range(n):
                        if blossom[base[i]]:
                            base[i] = cur
                            if not used[i]:
                                used[i] = True
                                queue.append(i)
                elif parent[to] == -1:
                    parent[to] = v
                    if mate[to] == -1:
                        return to
                    used[mate[to]] = True
                    queue.append(mate[to])
        return -1

    # greedy start keeps the number of augmentations small
    for v in range(n):
        if mate[v] == -1:
            for to in adj[v]:
                if mate[to] == -1:
                    mate[v], mate[to] = to, v
                    break
    for v in range(n):
        if mate[v] == -1 and adj[v]:
            end = find_path(v)
            while end != -1:
                pv = parent[end]
                ppv = mate[pv]
                mate[end], mate[pv] = pv, end
                end = ppv
    return [None if m == -1 else m for m in mate]


def max_cardinality_matching(inst: Instance) -> Matching:
    """A maximum-cardinality matching of the acceptability graph."""
    if inst.kind is Kind.SMI:
        mate = _bipartite_matching(inst)
    else:
        mate = _blossom_matching(inst)
    return Matching(tuple(mate))


def max_matching_size(inst: Instance) -> int:
    return max_cardinality_matching(inst).size
