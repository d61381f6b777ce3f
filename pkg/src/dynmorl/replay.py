"""Experience replay: prioritized sampling and the diverse trajectory buffer.

Transitions live in one slot array shared by the FIFO part and the diverse
part, so moving a trajectory from one to the other never copies data and
its priorities carry over.  Sampling draws from all occupied slots with
probability proportional to ``(delta + eps) ** alpha``.

Trajectories are atomic: a trajectory is stored, moved and evicted as a
whole.
"""

from __future__ import annotations

import csv
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .momath import crowding_distance

log = logging.getLogger(__name__)


class SumTree:
    """Binary sum tree over `capacity` leaves with vectorized sampling."""

    def __init__(self, capacity: int):
        self.capacity = int(capacity)
        size = 1
        while size < self.capacity:
            size *= 2
        self._leaves = size
        self._depth = size.bit_length() - 1
        self.tree = np.zeros(2 * size)

    @property
    def total(self) -> float:
        return float(self.tree[1])

    def get(self, idx) -> np.ndarray:
        return self.tree[self._leaves + np.asarray(idx)]

    def update(self, idx, values) -> None:
        nodes = self._leaves + np.atleast_1d(np.asarray(idx, dtype=np.int64))
        self.tree[nodes] = values
        # duplicate nodes are harmless: each write stores the same sum
        for _ in range(self._depth):
            nodes = nodes >> 1
            self.tree[nodes] = self.tree[2 * nodes] + self.tree[2 * nodes + 1]

    def find(self, mass: np.ndarray) -> np.ndarray:
        """Leaf index whose cumulative interval contains each value of `mass`."""
        mass = np.array(mass, dtype=float)
        nodes = np.ones(mass.shape, dtype=np.int64)
        for _ in range(self._depth):
            left = 2 * nodes
            go_right = mass >= self.tree[left]
            mass = np.where(go_right, mass - self.tree[left], mass)
            nodes = left + go_right
        return nodes - self._leaves


@dataclass
class Transition:
    obs: np.ndarray
    action: int
    reward: np.ndarray
    next_obs: np.ndarray
    terminal: bool
    trajectory_id: int = -1
    priority: float = 0.0


@dataclass(eq=False)
class Trajectory:
    """Slots of one episode, oldest first, plus its signature once complete."""

    id: int
    slots: list[int] = field(default_factory=list)
    complete: bool = False
    signature: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.slots)


def signature(rewards, gamma: float) -> np.ndarray:
    """Discounted return of a reward sequence, counted from its first step."""
    if not 0.0 < gamma <= 1.0:
        raise ValueError("gamma must lie in (0, 1]")
    rewards = np.atleast_2d(np.asarray(rewards, dtype=float))
    disc = gamma ** np.arange(len(rewards))
    return disc @ rewards


@dataclass
class Batch:
    indices: np.ndarray
    obs: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_obs: np.ndarray
    terminals: np.ndarray

    def __len__(self) -> int:
        return len(self.indices)


class ReplayBuffer:
    """FIFO replay with optional diverse secondary buffer.

    Parameters
    ----------
    capacity:
        Transitions kept in the FIFO part.
    diverse_capacity:
        Transitions kept in the diverse part; 0 disables it.
    gamma:
        Discount used for trajectory signatures.
    alpha, eps:
        Priority shape: sampling mass is ``(delta + eps) ** alpha``.
    diversity:
        Maps an ``(n, N)`` array of signatures to per-row diversities.
    """

    def __init__(
        self,
        capacity: int,
        obs_dim: int,
        n_objectives: int,
        diverse_capacity: int = 0,
        gamma: float = 1.0,
        alpha: float = 2.0,
        eps: float = 0.01,
        diversity: Callable[[np.ndarray], np.ndarray] = crowding_distance,
    ):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = int(capacity)
        self.diverse_capacity = int(diverse_capacity)
        self.gamma = gamma
        self.alpha = alpha
        self.eps = eps
        self.diversity = diversity
        size = self.capacity + self.diverse_capacity
        self.obs = np.zeros((size, obs_dim))
        self.next_obs = np.zeros((size, obs_dim))
        self.actions = np.zeros(size, dtype=np.int64)
        self.rewards = np.zeros((size, n_objectives))
        self.terminals = np.zeros(size, dtype=bool)
        self.traj_ids = np.full(size, -1, dtype=np.int64)
        self.deltas = np.zeros(size)
        self.tree = SumTree(size)
        self._free = list(range(size - 1, -1, -1))
        self.fifo: deque[Trajectory] = deque()
        self.diverse: list[Trajectory] = []
        self._fifo_count = 0
        self._diverse_count = 0
        self._next_id = 0
        self._open: Trajectory | None = None
        self._dropping = False

    # -- bookkeeping -------------------------------------------------------

    def __len__(self) -> int:
        return self._fifo_count + self.diverse_count

    @property
    def fifo_count(self) -> int:
        return self._fifo_count

    @property
    def diverse_count(self) -> int:
        return self._diverse_count

    @property
    def der(self) -> bool:
        return self.diverse_capacity > 0

    def _release(self, traj: Trajectory) -> None:
        slots = np.array(traj.slots, dtype=np.int64)
        if len(slots):
            self.tree.update(slots, 0.0)
            self.deltas[slots] = 0.0
            self.traj_ids[slots] = -1
        self._free.extend(traj.slots)

    def _priority(self, delta) -> np.ndarray:
        return (np.asarray(delta, dtype=float) + self.eps) ** self.alpha

    # -- storing -----------------------------------------------------------

    def push(self, obs, action, reward, next_obs, terminal) -> Trajectory | None:
        """Store one transition; returns the trajectory evicted from the FIFO, if any.

        A transition following a terminal one starts a new trajectory.
        """
        if self._dropping:
            # rest of an episode too long to ever fit in the FIFO
            if terminal:
                self._dropping = False
            return None
        evicted = None
        while self._fifo_count + 1 > self.capacity:
            evicted = self._evict_oldest()
            if evicted is None:
                return None
        if self._open is None:
            self._open = Trajectory(self._next_id)
            self._next_id += 1
            self.fifo.append(self._open)
        slot = self._free.pop()
        self.obs[slot] = obs
        self.next_obs[slot] = next_obs
        self.actions[slot] = action
        self.rewards[slot] = reward
        self.terminals[slot] = terminal
        self.traj_ids[slot] = self._open.id
        # empty slots hold delta 0, so the max over all slots is the max over stored ones
        delta = float(self.deltas.max()) if len(self) > 0 else 1.0
        self.deltas[slot] = delta
        self.tree.update([slot], self._priority(delta))
        self._open.slots.append(slot)
        self._fifo_count += 1
        if terminal:
            self._finish(self._open)
            self._open = None
        return evicted

    def push_transition(self, t: Transition) -> Trajectory | None:
        return self.push(t.obs, t.action, t.reward, t.next_obs, t.terminal)

    def _finish(self, traj: Trajectory) -> None:
        traj.complete = True
        traj.signature = signature(self.rewards[traj.slots], self.gamma)

    def _evict_oldest(self) -> Trajectory | None:
        traj = self.fifo.popleft()
        self._fifo_count -= len(traj)
        if not traj.complete:
            log.warning("episode longer than the FIFO capacity (%d); dropping it", self.capacity)
            self._release(traj)
            self._open = None
            self._dropping = True
            return None
        if self.der:
            self.der_consider(traj)
        else:
            self._release(traj)
        return traj

    def der_consider(self, traj: Trajectory) -> bool:
        """Try to move a complete trajectory into the diverse buffer.

        While there is not enough room, the least diverse stored trajectory
        is evicted; if the candidate itself is (jointly) the least diverse it
        is discarded and the evictions of this call are undone.
        """
        if traj.signature is None:
            self._finish(traj)
        if len(traj) > self.diverse_capacity:
            log.warning("trajectory of length %d exceeds diverse capacity %d; discarded", len(traj), self.diverse_capacity)
            self._release(traj)
            return False
        kept = list(self.diverse)
        removed = []
        used = sum(len(t) for t in kept)
        while self.diverse_capacity - used < len(traj):
            sigs = np.array([t.signature for t in kept] + [traj.signature])
            div = np.asarray(self.diversity(sigs), dtype=float)
            j = int(np.argmin(div[:-1]))
            if div[-1] <= div[j]:
                # candidate contributes least: the stored set is left untouched
                self._release(traj)
                return False
            removed.append(kept.pop(j))
            used -= len(removed[-1])
        for t in removed:
            self._release(t)
        kept.append(traj)
        self.diverse = kept
        self._diverse_count = used + len(traj)
        return True

    # -- sampling ----------------------------------------------------------

    def sample(self, batch_size: int, rng: np.random.Generator) -> Batch:
        """Draw `batch_size` transitions (with replacement) proportionally to priority."""
        if len(self) == 0:
            raise ValueError("cannot sample from an empty buffer")
        total = self.tree.total
        idx = self.tree.find(rng.random(batch_size) * total)
        bad = self.traj_ids[idx] < 0
        while bad.any():
            # float round-off can land on an empty leaf at the very end
            idx[bad] = self.tree.find(rng.random(int(bad.sum())) * total)
            bad = self.traj_ids[idx] < 0
        return Batch(idx, self.obs[idx], self.actions[idx], self.rewards[idx], self.next_obs[idx], self.terminals[idx])

    def probabilities(self) -> np.ndarray:
        """Sampling probability of every slot (zeros for empty slots)."""
        leaves = self.tree.get(np.arange(len(self.deltas)))
        return leaves / leaves.sum()

    def update_priorities(self, indices, td_active, td_sampled=None) -> None:
        """Set new priorities from TD errors.

        With two errors (conditioned-network training) the priority input is
        their mean absolute value; otherwise the active-weight error alone.
        """
        indices = np.asarray(indices, dtype=np.int64)
        if indices.size and (indices.min() < 0 or indices.max() >= len(self.deltas)):
            raise IndexError("priority index out of range")
        delta = np.abs(np.asarray(td_active, dtype=float))
        if td_sampled is not None:
            delta = 0.5 * (delta + np.abs(np.asarray(td_sampled, dtype=float)))
        if not np.all(np.isfinite(delta)):
            raise ValueError("non-finite TD error")
        live = self.traj_ids[indices] >= 0
        indices, delta = indices[live], delta[live]
        self.deltas[indices] = delta
        self.tree.update(indices, self._priority(delta))

    # -- inspection --------------------------------------------------------

    def trajectories(self) -> list[tuple[str, Trajectory]]:
        return [("fifo", t) for t in self.fifo] + [("diverse", t) for t in self.diverse]

    def transitions(self, traj: Trajectory) -> list[Transition]:
        return [
            Transition(
                self.obs[s].copy(),
                int(self.actions[s]),
                self.rewards[s].copy(),
                self.next_obs[s].copy(),
                bool(self.terminals[s]),
                int(self.traj_ids[s]),
                float(self._priority(self.deltas[s])),
            )
            for s in traj.slots
        ]

    def dump_signatures(self, path) -> None:
        """Write one CSV row per complete stored trajectory.

        Columns: ``buffer,trajectory,length,s_0..s_{N-1}`` where buffer is
        'fifo' or 'diverse'.
        """
        n = self.rewards.shape[1]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["buffer", "trajectory", "length"] + [f"s_{i}" for i in range(n)])
            for where, t in self.trajectories():
                if t.complete:
                    w.writerow([where, t.id, len(t)] + [repr(float(x)) for x in t.signature])
