"""Deep Sea Treasure gridworld.

Objectives are (treasure, time).  Every step costs -1 time; stepping onto a
treasure pays its value and ends the episode.  Moves into the sea bottom or
off the map leave the submarine where it is.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .fileformat import FormatError, format_text, parse_text

LEFT, RIGHT, UP, DOWN = range(4)
ACTION_NAMES = ("left", "right", "up", "down")
_MOVES = {LEFT: (0, -1), RIGHT: (0, 1), UP: (-1, 0), DOWN: (1, 0)}

OCEAN, BOTTOM = ".", "#"


@dataclass(frozen=True)
class DstMap:
    """Grid layout: `cells` holds '.', '#' or 'T'; treasure values are in `treasures`."""

    cells: tuple[tuple[str, ...], ...]
    treasures: dict[tuple[int, int], float]
    start: tuple[int, int]
    max_steps: int = 200
    name: str = "dst"

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.cells), len(self.cells[0])

    def is_free(self, pos: tuple[int, int]) -> bool:
        r, c = pos
        rows, cols = self.shape
        return 0 <= r < rows and 0 <= c < cols and self.cells[r][c] != BOTTOM

    @classmethod
    def from_grid(cls, grid: list[list[str]], max_steps: int = 200, name: str = "dst") -> "DstMap":
        cells, treasures, start = [], {}, None
        for r, row in enumerate(grid):
            out = []
            for c, tok in enumerate(row):
                if tok == "S":
                    if start is not None:
                        raise FormatError("more than one start cell")
                    start = (r, c)
                    out.append(OCEAN)
                elif tok in (OCEAN, BOTTOM):
                    out.append(tok)
                elif tok.startswith("T"):
                    try:
                        treasures[(r, c)] = float(tok[1:])
                    except ValueError:
                        raise FormatError(f"bad treasure token {tok!r} at {(r, c)}") from None
                    out.append("T")
                else:
                    raise FormatError(f"unknown cell token {tok!r} at {(r, c)}")
            cells.append(tuple(out))
        if start is None:
            raise FormatError("map has no start cell 'S'")
        if not treasures:
            raise FormatError("map has no treasure")
        return cls(tuple(cells), treasures, start, max_steps, name)

    def to_grid(self) -> list[list[str]]:
        grid = []
        for r, row in enumerate(self.cells):
            out = []
            for c, cell in enumerate(row):
                if (r, c) == self.start:
                    out.append("S")
                elif cell == "T":
                    out.append(f"T{self.treasures[(r, c)]:g}")
                else:
                    out.append(cell)
            grid.append(out)
        return grid


def parse_dst_map(text: str) -> DstMap:
    fields, grid = parse_text(text)
    if grid is None:
        raise FormatError("DST map needs a 'grid:' block")
    kind = fields.get("kind", ["dst"])[-1]
    if kind != "dst":
        raise FormatError(f"not a DST map (kind = {kind})")
    max_steps = int(fields.get("max_steps", ["200"])[-1])
    name = fields.get("name", ["dst"])[-1]
    return DstMap.from_grid(grid, max_steps=max_steps, name=name)


def load_dst_map(path) -> DstMap:
    return parse_dst_map(Path(path).read_text())


def dump_dst_map(m: DstMap) -> str:
    return format_text({"kind": "dst", "name": m.name, "max_steps": m.max_steps}, m.to_grid())


def builtin_map(name: str = "default") -> DstMap:
    """Load one of the packaged maps ('default' or '6x6')."""
    text = resources.files("dynmorl.data").joinpath(f"dst_{name}.txt").read_text()
    return parse_dst_map(text)


@dataclass
class DstState:
    position: tuple[int, int]
    step_count: int = 0


def dst_reset(m: DstMap) -> DstState:
    return DstState(m.start, 0)


def dst_step(state: DstState, action: int, m: DstMap) -> tuple[DstState, np.ndarray, bool]:
    if action not in _MOVES:
        raise ValueError(f"invalid DST action {action!r}")
    dr, dc = _MOVES[action]
    nxt = (state.position[0] + dr, state.position[1] + dc)
    if not m.is_free(nxt):
        nxt = state.position
    new = DstState(nxt, state.step_count + 1)
    treasure = m.treasures.get(nxt)
    if treasure is not None:
        return new, np.array([treasure, -1.0]), True
    return new, np.array([0.0, -1.0]), new.step_count >= m.max_steps


@dataclass
class DeepSeaTreasure:
    """Stateful wrapper with feature observations.

    `observation` is 'onehot' (one unit per cell) or 'coords' (row and
    column scaled to [0, 1]).
    """

    map: DstMap = field(default_factory=builtin_map)
    observation: str = "onehot"

    n_actions = 4
    n_objectives = 2
    deterministic = True

    def __post_init__(self):
        if self.observation not in ("onehot", "coords"):
            raise ValueError(f"unknown observation mode {self.observation!r}")
        self.state = dst_reset(self.map)

    @property
    def obs_dim(self) -> int:
        rows, cols = self.map.shape
        return rows * cols if self.observation == "onehot" else 2

    @property
    def max_steps(self) -> int:
        return self.map.max_steps

    def observe(self, state: DstState | None = None) -> np.ndarray:
        r, c = (state or self.state).position
        rows, cols = self.map.shape
        if self.observation == "onehot":
            obs = np.zeros(rows * cols)
            obs[r * cols + c] = 1.0
            return obs
        return np.array([r / max(rows - 1, 1), c / max(cols - 1, 1)])

    def reset(self, rng=None) -> np.ndarray:
        self.state = dst_reset(self.map)
        return self.observe()

    def step(self, action: int):
        self.state, reward, done = dst_step(self.state, int(action), self.map)
        return self.observe(), reward, done, {}

    def render(self) -> np.ndarray:
        """Grayscale raster of the grid: bottom 0, ocean 0.5, treasure 0.8, submarine 1."""
        rows, cols = self.map.shape
        img = np.full((rows, cols), 0.5)
        for r in range(rows):
            for c in range(cols):
                if self.map.cells[r][c] == BOTTOM:
                    img[r, c] = 0.0
                elif self.map.cells[r][c] == "T":
                    img[r, c] = 0.8
        img[self.state.position] = 1.0
        return img
