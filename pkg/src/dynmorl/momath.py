"""Vector arithmetic for linear scalarization, regret and policy-set bookkeeping.

Value, return and weight vectors are plain 1-d numpy arrays (lists are
accepted everywhere and converted).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

WEIGHT_TOL = 1e-9


class DimensionError(ValueError):
    """Raised when vectors of different lengths are combined."""


def _vec(x) -> np.ndarray:
    return np.asarray(x, dtype=np.float64).reshape(-1)


def _check_same_len(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")


def as_weight(w, tol: float = WEIGHT_TOL) -> np.ndarray:
    """Validate `w` as a point on the simplex and return it as an array."""
    w = _vec(w)
    if w.size == 0:
        raise ValueError("weight vector is empty")
    if np.any(w < -tol):
        raise ValueError(f"negative weight component in {w}")
    if abs(w.sum() - 1.0) > tol:
        raise ValueError(f"weights must sum to 1, got {w.sum()!r}")
    return w


def normalize_weight(w) -> np.ndarray:
    """Project a non-negative vector onto the simplex by rescaling."""
    w = np.clip(_vec(w), 0.0, None)
    s = w.sum()
    if s <= 0:
        raise ValueError("cannot normalize an all-zero weight vector")
    return w / s


def scalarize(v, w) -> float:
    v, w = _vec(v), _vec(w)
    _check_same_len(v, w)
    return float(v @ w)


def regret(g, w, v_star) -> float:
    """Optimal scalarized value minus the scalarized return `g`."""
    g, w, v_star = _vec(g), _vec(w), _vec(v_star)
    _check_same_len(g, w)
    _check_same_len(v_star, w)
    return float(v_star @ w - g @ w)


def crowding_distance(signatures) -> np.ndarray:
    """NSGA-II crowding distance of every point, in input order.

    Boundary points in any objective get ``inf``.  An objective whose
    values are all equal contributes nothing to interior points.
    """
    pts = np.asarray(signatures, dtype=np.float64)
    if pts.size == 0:
        return np.zeros(0)
    if pts.ndim == 1:
        pts = pts[:, None]
    n, m = pts.shape
    dist = np.zeros(n)
    if n <= 2:
        dist[:] = np.inf
        return dist
    for k in range(m):
        order = np.argsort(pts[:, k], kind="stable")
        col = pts[order, k]
        dist[order[0]] = np.inf
        dist[order[-1]] = np.inf
        span = col[-1] - col[0]
        if span > 0:
            dist[order[1:-1]] += (col[2:] - col[:-2]) / span
    return dist


@dataclass
class PolicyEntry:
    """A stored policy: network parameters, its training weight and value."""

    params: Any
    weight: np.ndarray
    value: np.ndarray
    # insertion counter; larger means more recent
    stamp: int = field(default=0, compare=False)


def _values(policy_set: Sequence[PolicyEntry]) -> np.ndarray:
    return np.array([_vec(p.value) for p in policy_set])


def is_improvement(candidate_value, policy_set: Sequence[PolicyEntry], encountered_weights, kappa: float = 0.0) -> bool:
    """True if the candidate beats every stored policy minus `kappa` somewhere in W."""
    if kappa < 0:
        raise ValueError("kappa must be non-negative")
    if len(policy_set) == 0:
        return True
    ws = np.atleast_2d(np.asarray(encountered_weights, dtype=np.float64))
    if ws.size == 0:
        return False
    cand = ws @ _vec(candidate_value)
    best = (ws @ _values(policy_set).T).max(axis=1)
    return bool(np.any(cand > best - kappa))


def _selected_indices(values: np.ndarray, ws: np.ndarray, kappa: float) -> set[int]:
    # values are ordered oldest -> newest; per weight, pick the newest entry
    # within kappa of the best scalarized value
    scores = ws @ values.T
    ok = scores >= scores.max(axis=1, keepdims=True) - kappa
    newest = ok.shape[1] - 1 - np.argmax(ok[:, ::-1], axis=1)
    return set(np.unique(newest).tolist())


def prune_redundant(policy_set: Sequence[PolicyEntry], encountered_weights, kappa: float = 0.0) -> list[PolicyEntry]:
    """Drop entries that are not the (kappa-tolerant, newest-first) choice for any weight.

    Entries are assumed ordered oldest first.  The selection is repeated
    until nothing more is removed, so the result is a fixed point.
    """
    entries = list(policy_set)
    ws = np.atleast_2d(np.asarray(encountered_weights, dtype=np.float64))
    if not entries or ws.size == 0:
        return entries
    while True:
        keep = _selected_indices(_values(entries), ws, kappa)
        if len(keep) == len(entries):
            return entries
        entries = [e for i, e in enumerate(entries) if i in keep]


def best_policy_for(policy_set: Sequence[PolicyEntry], w) -> PolicyEntry:
    """Entry with maximal scalarized value; exact ties go to the newest."""
    if len(policy_set) == 0:
        raise LookupError("policy set is empty; initialize fresh parameters instead")
    scores = _values(policy_set) @ _vec(w)
    best = np.flatnonzero(scores == scores.max())
    return policy_set[int(best[-1])]
