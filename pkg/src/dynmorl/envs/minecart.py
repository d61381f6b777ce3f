"""Minecart resource-collection environment.

The cart lives in the unit square.  The base is a quarter disc at the
corner (0, 0); mines are small discs.  Rewards are
``(sold ore_1, ..., sold ore_{N-1}, fuel)``.  Only mining is stochastic.

Angles are in degrees; heading 0 points along +x, 90 along +y.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .fileformat import FormatError, format_text, parse_text

ACCELERATE, BRAKE, TURN_LEFT, TURN_RIGHT, MINE, DO_NOTHING = range(6)
ACTION_NAMES = ("accelerate", "brake", "turn_left", "turn_right", "mine", "do_nothing")

# (c) .. (g); ore means per mine
DEFAULT_ORE_MEANS = ((0.2, 0.0), (0.15, 0.1), (0.2, 0.2), (0.1, 0.15), (0.0, 0.2))
MINE_LABELS = ("c", "d", "e", "f", "g")


@dataclass(frozen=True)
class Mine:
    position: tuple[float, float]
    ore_means: tuple[float, ...]
    label: str = ""


def default_mines(arc_radius: float = 0.75, spacing: float = 20.0, ore_means=DEFAULT_ORE_MEANS) -> tuple[Mine, ...]:
    """Mines on an arc around the base corner, `spacing` degrees apart, centred on 45 degrees.

    The default spacing puts the outer and middle mines on headings the cart
    can hold exactly (multiples of four 10-degree turns from the start).
    """
    n = len(ore_means)
    mines = []
    for i, means in enumerate(ore_means):
        angle = math.radians(45.0 + spacing * (i - (n - 1) / 2))
        pos = (arc_radius * math.cos(angle), arc_radius * math.sin(angle))
        label = MINE_LABELS[i] if i < len(MINE_LABELS) else str(i)
        mines.append(Mine(pos, tuple(means), label))
    return tuple(mines)


@dataclass(frozen=True)
class MinecartConfig:
    capacity: float = 1.5
    acceleration: float = 0.0075
    rotation: float = 10.0
    idle_cost: float = -0.005
    mining_cost: float = -0.05
    accel_cost: float = -0.025
    ore_std: float = 0.05
    max_speed: float = 0.05
    # braking halves the speed; below this it snaps to zero
    stop_speed: float = 0.001
    base_radius: float = 0.15
    mine_radius: float = 0.05
    start_position: tuple[float, float] = (0.05, 0.05)
    start_heading: float = 45.0
    max_episode_steps: int = 1000
    mines: tuple[Mine, ...] = field(default_factory=default_mines)

    def __post_init__(self):
        if not self.mines:
            raise ValueError("config needs at least one mine")
        n_ores = {len(m.ore_means) for m in self.mines}
        if len(n_ores) != 1:
            raise ValueError("all mines must list the same number of ores")
        for name in ("idle_cost", "mining_cost", "accel_cost"):
            if getattr(self, name) > 0:
                raise ValueError(f"{name} must be <= 0")
        if self.ore_std < 0 or any(mu < 0 for m in self.mines for mu in m.ore_means):
            raise ValueError("ore means and std must be non-negative")
        if self.capacity <= 0 or self.max_speed <= 0:
            raise ValueError("capacity and max_speed must be positive")

    @property
    def n_ores(self) -> int:
        return len(self.mines[0].ore_means)

    @property
    def n_objectives(self) -> int:
        return self.n_ores + 1


_SCALAR_KEYS = {
    "capacity": float,
    "acceleration": float,
    "rotation": float,
    "idle_cost": float,
    "mining_cost": float,
    "accel_cost": float,
    "ore_std": float,
    "max_speed": float,
    "stop_speed": float,
    "base_radius": float,
    "mine_radius": float,
    "start_heading": float,
    "max_episode_steps": int,
}


def parse_minecart_config(text: str) -> MinecartConfig:
    """Parse ``key = value`` lines; each ``mine = x y mu_1 ... mu_k [label]``."""
    fields, _ = parse_text(text)
    kwargs = {}
    for key, values in fields.items():
        if key in ("kind", "name"):
            continue
        if key in _SCALAR_KEYS:
            kwargs[key] = _SCALAR_KEYS[key](values[-1])
        elif key == "start_position":
            x, y = (float(t) for t in values[-1].split())
            kwargs[key] = (x, y)
        elif key == "mine":
            mines = []
            for v in values:
                toks = v.split()
                label = ""
                try:
                    float(toks[-1])
                except ValueError:
                    label = toks.pop()
                nums = [float(t) for t in toks]
                if len(nums) < 3:
                    raise FormatError(f"mine needs 'x y mean...', got {v!r}")
                mines.append(Mine((nums[0], nums[1]), tuple(nums[2:]), label))
            kwargs["mines"] = tuple(mines)
        else:
            raise FormatError(f"unknown minecart key {key!r}")
    kind = fields.get("kind", ["minecart"])[-1]
    if kind != "minecart":
        raise FormatError(f"not a minecart config (kind = {kind})")
    return MinecartConfig(**kwargs)


def load_minecart_config(path) -> MinecartConfig:
    return parse_minecart_config(Path(path).read_text())


def dump_minecart_config(cfg: MinecartConfig) -> str:
    fields: dict[str, object] = {"kind": "minecart"}
    for key in _SCALAR_KEYS:
        fields[key] = repr(getattr(cfg, key))
    fields["start_position"] = f"{cfg.start_position[0]!r} {cfg.start_position[1]!r}"
    fields["mine"] = [
        " ".join([repr(m.position[0]), repr(m.position[1])] + [repr(mu) for mu in m.ore_means] + ([m.label] if m.label else []))
        for m in cfg.mines
    ]
    return format_text(fields)


@dataclass
class MinecartState:
    position: np.ndarray
    speed: float
    heading: float
    cart_content: np.ndarray
    step_count: int = 0
    left_base: bool = False

    def copy(self) -> "MinecartState":
        return replace(self, position=self.position.copy(), cart_content=self.cart_content.copy())


def in_base(pos, cfg: MinecartConfig) -> bool:
    return math.hypot(pos[0], pos[1]) <= cfg.base_radius


def mine_at(pos, cfg: MinecartConfig) -> int | None:
    for i, m in enumerate(cfg.mines):
        if math.hypot(pos[0] - m.position[0], pos[1] - m.position[1]) <= cfg.mine_radius:
            return i
    return None


def minecart_reset(cfg: MinecartConfig, rng=None) -> MinecartState:
    return MinecartState(
        position=np.array(cfg.start_position, dtype=float),
        speed=0.0,
        heading=cfg.start_heading,
        cart_content=np.zeros(cfg.n_ores),
    )


def _draw_ore(mine: Mine, cfg: MinecartConfig, rng, expected: bool) -> np.ndarray:
    means = np.array(mine.ore_means)
    if expected or rng is None:
        return means.copy()
    return np.maximum(rng.normal(means, cfg.ore_std), 0.0)


def minecart_step(state: MinecartState, action: int, cfg: MinecartConfig, rng=None, expected_ore: bool = False):
    """One unskipped frame. Returns ``(new_state, reward, terminal)``.

    With ``expected_ore`` mining adds the distribution means instead of a
    random draw (used by oracles and value estimation).
    """
    if action not in range(6):
        raise ValueError(f"invalid minecart action {action!r}")
    s = state.copy()
    fuel = cfg.idle_cost
    if action == ACCELERATE:
        fuel += cfg.accel_cost
        s.speed = min(s.speed + cfg.acceleration, cfg.max_speed)
    elif action == BRAKE:
        s.speed *= 0.5
        if s.speed < cfg.stop_speed:
            s.speed = 0.0
    elif action == TURN_LEFT:
        s.heading = (s.heading - cfg.rotation) % 360.0
    elif action == TURN_RIGHT:
        s.heading = (s.heading + cfg.rotation) % 360.0
    elif action == MINE:
        fuel += cfg.mining_cost
        i = mine_at(s.position, cfg)
        if i is not None:
            room = cfg.capacity - s.cart_content.sum()
            if room > 0:
                drawn = _draw_ore(cfg.mines[i], cfg, rng, expected_ore)
                total = drawn.sum()
                if total > room:
                    drawn *= room / total
                s.cart_content = s.cart_content + drawn
                # guard against float creep past capacity
                over = s.cart_content.sum() - cfg.capacity
                if over > 0:
                    s.cart_content *= cfg.capacity / s.cart_content.sum()

    rad = math.radians(s.heading)
    s.position = np.clip(s.position + s.speed * np.array([math.cos(rad), math.sin(rad)]), 0.0, 1.0)
    s.step_count += 1

    reward = np.zeros(cfg.n_objectives)
    reward[-1] = fuel
    terminal = False
    if in_base(s.position, cfg):
        if s.left_base:
            reward[:-1] = s.cart_content
            s.cart_content = np.zeros(cfg.n_ores)
            terminal = True
    else:
        s.left_base = True
    if s.step_count >= cfg.max_episode_steps:
        terminal = True
    return s, reward, terminal


class Minecart:
    """Stateful Minecart with a 7-feature observation (for 2 ores).

    Features: x, y, speed / max_speed, sin(heading), cos(heading), and cart
    content / capacity per ore.  `max_steps` counts unskipped frames.
    """

    n_actions = 6
    deterministic = False

    def __init__(self, config: MinecartConfig | None = None, expected_ore: bool = False, seed=None):
        self.config = config or MinecartConfig()
        self.expected_ore = expected_ore
        self.rng = np.random.default_rng(seed)
        self.state = minecart_reset(self.config)

    @property
    def n_objectives(self) -> int:
        return self.config.n_objectives

    @property
    def obs_dim(self) -> int:
        return 5 + self.config.n_ores

    @property
    def max_steps(self) -> int:
        return self.config.max_episode_steps

    def observe(self, state: MinecartState | None = None) -> np.ndarray:
        s = state or self.state
        rad = math.radians(s.heading)
        return np.concatenate(
            [
                s.position,
                [s.speed / self.config.max_speed, math.sin(rad), math.cos(rad)],
                s.cart_content / self.config.capacity,
            ]
        )

    def reset(self, rng=None) -> np.ndarray:
        if rng is not None:
            self.rng = rng
        self.state = minecart_reset(self.config, self.rng)
        return self.observe()

    def step(self, action: int):
        self.state, reward, done = minecart_step(self.state, int(action), self.config, self.rng, self.expected_ore)
        return self.observe(), reward, done, {}

    def clone(self) -> "Minecart":
        other = copy.copy(self)
        other.state = self.state.copy()
        other.rng = copy.deepcopy(self.rng)
        return other

    def render(self, size: int = 48) -> np.ndarray:
        """Grayscale `size` x `size` raster (rows = y)."""
        cfg = self.config
        ys, xs = np.mgrid[0:size, 0:size]
        px = (xs + 0.5) / size
        py = (ys + 0.5) / size
        img = np.zeros((size, size))
        img[np.hypot(px, py) <= cfg.base_radius] = 0.3
        for m in cfg.mines:
            img[np.hypot(px - m.position[0], py - m.position[1]) <= cfg.mine_radius] = 0.6
        cx, cy = self.state.position
        img[np.hypot(px - cx, py - cy) <= 1.5 / size] = 1.0
        return img
