"""Weight-simplex partition by optimal policy."""

from __future__ import annotations

import csv
import itertools
from collections import Counter, deque
from typing import Callable

import numpy as np


def simplex_grid(n_objectives: int, resolution: int) -> np.ndarray:
    """Lattice points of the simplex with `resolution` points along every edge.

    Resolution 2 gives the corners only.  Rows are in lexicographic order
    of their integer coordinates.
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    if n_objectives < 1:
        raise ValueError("need at least one objective")
    steps = resolution - 1
    pts = [c for c in itertools.product(range(steps + 1), repeat=n_objectives - 1) if sum(c) <= steps]
    grid = np.array([list(c) + [steps - sum(c)] for c in pts], dtype=float) / steps
    return grid


def partition_simplex(oracle: Callable[[np.ndarray], str], n_objectives: int, resolution: int) -> tuple[np.ndarray, list[str]]:
    """Label every grid weight with the id returned by ``oracle(w)``."""
    grid = simplex_grid(n_objectives, resolution)
    return grid, [str(oracle(w)) for w in grid]


def region_shares(labels) -> dict[str, float]:
    counts = Counter(labels)
    return {k: v / len(labels) for k, v in counts.most_common()}


def region_components(grid: np.ndarray, labels, resolution: int) -> dict[str, int]:
    """Number of connected pieces of each region on the lattice.

    Two lattice points are neighbours when one is reached from the other by
    moving one unit of weight between two objectives.
    """
    steps = resolution - 1
    keys = [tuple(np.rint(w * steps).astype(int)) for w in grid]
    index = {k: i for i, k in enumerate(keys)}
    seen = [False] * len(keys)
    pieces: Counter = Counter()
    n = grid.shape[1]
    for s in range(len(keys)):
        if seen[s]:
            continue
        pieces[labels[s]] += 1
        seen[s] = True
        queue = deque([s])
        while queue:
            k = keys[queue.popleft()]
            for i, j in itertools.permutations(range(n), 2):
                if k[i] == 0:
                    continue
                nb = list(k)
                nb[i] -= 1
                nb[j] += 1
                t = index.get(tuple(nb))
                if t is not None and not seen[t] and labels[t] == labels[s]:
                    seen[t] = True
                    queue.append(t)
    return dict(pieces)


def write_partition_csv(path, grid: np.ndarray, labels) -> None:
    """Columns ``w_0..w_{N-1},policy``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"w_{i}" for i in range(grid.shape[1])] + ["policy"])
        for row, label in zip(grid, labels):
            w.writerow([repr(float(x)) for x in row] + [label])
