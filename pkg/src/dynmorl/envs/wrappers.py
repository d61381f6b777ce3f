from __future__ import annotations

import numpy as np


class FrameSkip:
    """Repeat every agent action `k` times, summing rewards.

    The inner loop stops early on a terminal frame.  Everything else is
    delegated to the wrapped environment.
    """

    def __init__(self, env, k: int):
        if int(k) < 1:
            raise ValueError(f"frame skip must be >= 1, got {k}")
        self.env = env
        self.k = int(k)

    def __getattr__(self, name):
        return getattr(self.env, name)

    @property
    def max_steps(self) -> int:
        # agent-level episode bound
        return -(-self.env.max_steps // self.k)

    def reset(self, rng=None):
        return self.env.reset(rng)

    def step(self, action: int):
        total = None
        info = {"frames": 0}
        for _ in range(self.k):
            obs, reward, done, _ = self.env.step(action)
            total = reward.copy() if total is None else total + reward
            info["frames"] += 1
            if done:
                break
        return obs, total, done, info

    def clone(self):
        return FrameSkip(self.env.clone(), self.k)


class PixelObservation:
    """Replace observations by the last `frames` renders, flattened.

    Renders are nearest-neighbour resized to `size` x `size`.
    """

    def __init__(self, env, size: int = 48, frames: int = 2):
        self.env = env
        self.size = size
        self.frames = frames
        self._stack: list[np.ndarray] = []

    def __getattr__(self, name):
        return getattr(self.env, name)

    @property
    def obs_dim(self) -> int:
        return self.size * self.size * self.frames

    def _frame(self) -> np.ndarray:
        img = np.asarray(self.env.render(), dtype=float)
        rows = (np.arange(self.size) * img.shape[0]) // self.size
        cols = (np.arange(self.size) * img.shape[1]) // self.size
        return img[np.ix_(rows, cols)]

    def reset(self, rng=None):
        self.env.reset(rng)
        frame = self._frame()
        self._stack = [frame] * self.frames
        return np.concatenate([f.ravel() for f in self._stack])

    def step(self, action: int):
        _, reward, done, info = self.env.step(action)
        self._stack = self._stack[1:] + [self._frame()]
        return np.concatenate([f.ravel() for f in self._stack]), reward, done, info
