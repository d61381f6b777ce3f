"""Exact optimal values for Deep Sea Treasure maps.

Every deterministic policy either reaches one treasure along some path or
never terminates (and is cut off at the step cap), so the convex coverage
set is found by enumerating treasures at their shortest-path distances.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from ..envs.dst import _MOVES, DstMap

TIMEOUT = "timeout"


@dataclass(frozen=True)
class DstCandidate:
    """One deterministic behaviour and its discounted value vector."""

    policy_id: str
    value: np.ndarray
    treasure: tuple[int, int] | None
    actions: tuple[int, ...]


def shortest_paths(m: DstMap) -> dict[tuple[int, int], tuple[int, ...]]:
    """BFS from the start; returns the action sequence to every reachable treasure.

    Treasure cells are terminal, so paths never pass through one.
    """
    start = m.start
    parent: dict[tuple[int, int], tuple[tuple[int, int], int] | None] = {start: None}
    queue = deque([start])
    while queue:
        pos = queue.popleft()
        if pos in m.treasures:
            continue
        for a, (dr, dc) in _MOVES.items():
            nxt = (pos[0] + dr, pos[1] + dc)
            if m.is_free(nxt) and nxt not in parent:
                parent[nxt] = (pos, a)
                queue.append(nxt)
    paths = {}
    for t in m.treasures:
        if t not in parent:
            continue
        acts = []
        node = t
        while parent[node] is not None:
            node, a = parent[node]
            acts.append(a)
        paths[t] = tuple(reversed(acts))
    return paths


def time_penalty(steps: int, gamma: float) -> float:
    return -float(sum(gamma**t for t in range(steps)))


def dst_candidates(m: DstMap, gamma: float, include_timeout: bool = True) -> list[DstCandidate]:
    """Value vector of the best path to each treasure (plus the step-cap option)."""
    key = (m.cells, tuple(sorted(m.treasures.items())), m.start, m.max_steps, float(gamma), include_timeout)
    if key not in _CACHE:
        _CACHE[key] = _candidates(m, float(gamma), include_timeout)
    return list(_CACHE[key])


_CACHE: dict = {}


def _candidates(m: DstMap, gamma: float, include_timeout: bool) -> tuple[DstCandidate, ...]:
    out = []
    for t, path in sorted(shortest_paths(m).items(), key=lambda kv: (len(kv[1]), kv[0])):
        d = len(path)
        if d == 0:
            continue
        value = np.array([gamma ** (d - 1) * m.treasures[t], time_penalty(d, gamma)])
        out.append(DstCandidate(f"T{t[0]}_{t[1]}", value, t, path))
    if include_timeout:
        out.append(DstCandidate(TIMEOUT, np.array([0.0, time_penalty(m.max_steps, gamma)]), None, ()))
    return tuple(out)


def dst_optimal_value(m: DstMap, gamma: float, w) -> tuple[np.ndarray, DstCandidate]:
    """Optimal value vector for weight `w` and the candidate achieving it.

    Ties go to the earlier candidate (shorter path).
    """
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    w = np.asarray(w, dtype=float)
    cands = dst_candidates(m, gamma)
    scores = np.array([c.value @ w for c in cands])
    best = cands[int(np.argmax(scores))]
    return best.value.copy(), best


def convex_coverage_set(m: DstMap, gamma: float, resolution: int = 1001) -> list[DstCandidate]:
    """Candidates that are optimal for at least one weight on a fine grid."""
    seen: dict[str, DstCandidate] = {}
    for lam in np.linspace(0.0, 1.0, resolution):
        _, c = dst_optimal_value(m, gamma, [lam, 1.0 - lam])
        seen.setdefault(c.policy_id, c)
    return list(seen.values())
