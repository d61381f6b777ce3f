"""Weight-change scenarios.

``sparse``  piecewise constant, a fresh Dirichlet(1) weight every `period` steps
``regular`` linear interpolation between Dirichlet(1) targets, `period` episodes per leg
``fixed``   one weight for the whole run
"""

from __future__ import annotations

import numpy as np

from .momath import normalize_weight

MODES = ("sparse", "regular", "fixed")


class WeightSchedule:
    """Lazily sampled, seeded weight stream.

    Queries may come in any order; the n-th target is always the n-th
    Dirichlet draw from the schedule's own generator.
    """

    def __init__(self, mode: str, n_objectives: int, period: int, seed=None, fixed=None, alpha: float = 1.0):
        if mode not in MODES:
            raise ValueError(f"unknown schedule mode {mode!r}; expected one of {MODES}")
        if period < 1:
            raise ValueError("period must be >= 1")
        self.mode = mode
        self.n = n_objectives
        self.period = int(period)
        self.alpha = alpha
        self._rng = np.random.default_rng(seed)
        self._targets: list[np.ndarray] = []
        self.fixed = None
        if mode == "fixed":
            if fixed is None:
                fixed = self._target(0)
            self.fixed = normalize_weight(fixed)
            if len(self.fixed) != n_objectives:
                raise ValueError("fixed weight has the wrong length")

    def _target(self, k: int) -> np.ndarray:
        while len(self._targets) <= k:
            self._targets.append(self._rng.dirichlet(np.full(self.n, self.alpha)))
        return self._targets[k]

    def sparse_weight(self, step: int) -> np.ndarray:
        if step < 0:
            raise ValueError("step must be >= 0")
        return self._target(step // self.period).copy()

    def regular_weight(self, episode: int) -> np.ndarray:
        if episode < 0:
            raise ValueError("episode must be >= 0")
        leg, pos = divmod(episode, self.period)
        frac = pos / self.period
        w = (1.0 - frac) * self._target(leg) + frac * self._target(leg + 1)
        return normalize_weight(w)

    def weight(self, step: int, episode: int) -> np.ndarray:
        """Active weight for the given agent step and episode index."""
        if self.mode == "sparse":
            return self.sparse_weight(step)
        if self.mode == "regular":
            return self.regular_weight(episode)
        return self.fixed.copy()


def sparse_weight(t: int, schedule: WeightSchedule) -> np.ndarray:
    return schedule.sparse_weight(t)


def regular_weight(episode: int, schedule: WeightSchedule) -> np.ndarray:
    return schedule.regular_weight(episode)
