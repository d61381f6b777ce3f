"""Policy-family oracle for Minecart.

The candidates are scripted behaviours: for every mine, drive there fast
or slow, mine until the cart is full, drive back and sell; plus an idle
behaviour that collects nothing.  Each is simulated once with expected ore
draws, giving an exact discounted value vector for the deterministic
surrogate.  For the default geometry the family covers the optimal
behaviours; for other geometries the result is a lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..envs.minecart import (
    ACCELERATE,
    BRAKE,
    DO_NOTHING,
    MINE,
    TURN_LEFT,
    TURN_RIGHT,
    MinecartConfig,
    MinecartState,
    in_base,
    mine_at,
    minecart_reset,
    minecart_step,
)

IDLE = "idle"


@dataclass(frozen=True)
class MinecartCandidate:
    policy_id: str
    value: np.ndarray
    actions: tuple[int, ...]
    mine: int | None = None
    speed_cap: float | None = None


def _wrap(angle: float) -> float:
    return (angle + 180.0) % 360.0 - 180.0


def _bearing(pos, target) -> float:
    return math.degrees(math.atan2(target[1] - pos[1], target[0] - pos[0]))


class ScriptedDriver:
    """Drives to a mine, fills the cart and returns to base.

    Decisions are made every `frame_skip` frames.  The cart turns whenever
    that reduces its heading error (i.e. the error exceeds half a turn
    action), otherwise it accelerates while below `speed_cap`, braking
    early enough to stop inside the target mine.
    """

    def __init__(self, cfg: MinecartConfig, mine: int | None, speed_cap: float, frame_skip: int = 1):
        self.cfg = cfg
        self.mine = mine
        self.speed_cap = speed_cap
        self.k = frame_skip
        self.phase = "leave" if mine is None else "go"

    def _simulate(self, s: MinecartState, actions) -> MinecartState:
        for a in actions:
            s, _, _ = minecart_step(s, a, self.cfg, expected_ore=True)
        return s

    def _rest(self, s: MinecartState, plan) -> tuple[MinecartState, int]:
        """Follow `plan` (agent actions) then brake to rest; returns the state and step count."""
        steps = 0
        for a in plan:
            s = self._simulate(s, [a] * self.k)
            steps += 1
        while s.speed > 0.0 and steps < 64:
            s = self._simulate(s, [BRAKE] * self.k)
            steps += 1
        return s, steps

    def _approach(self, s: MinecartState, target) -> int:
        """First action of the quickest short plan that comes to rest inside the mine."""
        cfg = self.cfg
        best = None
        moves = (ACCELERATE, DO_NOTHING, BRAKE)
        plans = [()] + [(a,) for a in moves] + [(a, b) for a in moves for b in moves]
        plans += [(a, b, c) for a in moves for b in moves for c in moves]
        for plan in plans:
            # the speed cap is checked along the plan
            sim, ok = s, True
            for a in plan:
                if a == ACCELERATE and sim.speed >= self.speed_cap - 1e-12:
                    ok = False
                    break
                sim = self._simulate(sim, [a] * self.k)
            if not ok:
                continue
            rest, steps = self._rest(s, plan)
            dist = math.hypot(rest.position[0] - target[0], rest.position[1] - target[1])
            if dist <= 0.8 * cfg.mine_radius:
                key = (steps, sum(a == ACCELERATE for a in plan))
                if best is None or key < best[0]:
                    best = (key, plan)
        if best is not None:
            return best[1][0] if best[1] else BRAKE
        # out of reach of a short plan: cruise, but not past the mine
        u = np.array([math.cos(math.radians(s.heading)), math.sin(math.radians(s.heading))])
        ahead = float((np.asarray(target) - s.position) @ u)
        move = ACCELERATE if s.speed < self.speed_cap else DO_NOTHING
        for a in dict.fromkeys((move, DO_NOTHING)):
            rest, _ = self._rest(s, (a,))
            if float((rest.position - s.position) @ u) <= ahead:
                return a
        return BRAKE

    def _steer(self, s: MinecartState, target, tol: float) -> int | None:
        """Turn action toward `target`, or None when the current ray passes within `tol` of it."""
        u = np.array([math.cos(math.radians(s.heading)), math.sin(math.radians(s.heading))])
        rel = np.asarray(target) - s.position
        if rel @ u > 0 and abs(u[0] * rel[1] - u[1] * rel[0]) <= tol:
            return None
        err = _wrap(_bearing(s.position, target) - s.heading)
        if abs(err) > self.cfg.rotation * self.k / 2 + 1.0:
            return TURN_RIGHT if err > 0 else TURN_LEFT
        return None

    def act(self, s: MinecartState) -> int:
        cfg = self.cfg
        if self.phase == "leave":
            if not in_base(s.position, cfg):
                self.phase = "return"
            else:
                return ACCELERATE if s.speed < self.speed_cap else DO_NOTHING
        if self.phase == "go":
            target = cfg.mines[self.mine].position
            if mine_at(s.position, cfg) == self.mine:
                if s.speed > 0:
                    return BRAKE
                self.phase = "mine"
            else:
                turn = self._steer(s, target, 0.5 * cfg.mine_radius)
                if turn is not None:
                    # a turn at speed close to the mine swings wide; slow down first
                    dist = math.hypot(target[0] - s.position[0], target[1] - s.position[1])
                    if s.speed * self.k > 0.5 * dist:
                        return BRAKE
                    return turn
                return self._approach(s, target)
        if self.phase == "mine":
            if s.cart_content.sum() < cfg.capacity - 1e-9:
                return MINE
            self.phase = "return"
        turn = self._steer(s, (0.0, 0.0), 0.8 * cfg.base_radius)
        if turn is not None:
            return turn
        return ACCELERATE if s.speed < self.speed_cap else DO_NOTHING


def rollout(cfg: MinecartConfig, policy, gamma: float, frame_skip: int) -> tuple[np.ndarray, tuple[int, ...]]:
    """Discounted (per agent step) return of a scripted policy on expected-ore dynamics."""
    s = minecart_reset(cfg)
    value = np.zeros(cfg.n_objectives)
    actions = []
    t = 0
    done = False
    while not done:
        a = policy(s)
        actions.append(a)
        r = np.zeros(cfg.n_objectives)
        for _ in range(frame_skip):
            s, fr, done = minecart_step(s, a, cfg, expected_ore=True)
            r += fr
            if done:
                break
        value += gamma**t * r
        t += 1
    return value, tuple(actions)


def minecart_candidates(cfg: MinecartConfig, gamma: float = 0.98, frame_skip: int = 4) -> list[MinecartCandidate]:
    key = (cfg, float(gamma), int(frame_skip))
    if key not in _CACHE:
        _CACHE[key] = _candidates(cfg, gamma, frame_skip)
    return list(_CACHE[key])


_CACHE: dict = {}


def _candidates(cfg, gamma, frame_skip):
    out = []
    # idle: whichever of "never leave" and "step out and straight back" burns less fuel
    stay, stay_acts = rollout(cfg, lambda s: DO_NOTHING, gamma, frame_skip)
    driver = ScriptedDriver(cfg, None, cfg.max_speed, frame_skip)
    hop, hop_acts = rollout(cfg, driver.act, gamma, frame_skip)
    out.append(MinecartCandidate(IDLE, stay, stay_acts) if stay[-1] >= hop[-1] else MinecartCandidate(IDLE, hop, hop_acts))
    for i, mine in enumerate(cfg.mines):
        label = mine.label or str(i)
        for profile, cap in (("fast", cfg.max_speed), ("slow", cfg.max_speed / 2)):
            driver = ScriptedDriver(cfg, i, cap, frame_skip)
            value, acts = rollout(cfg, driver.act, gamma, frame_skip)
            out.append(MinecartCandidate(f"{label}-{profile}", value, acts, i, cap))
    return tuple(out)


def minecart_optimal_value(cfg: MinecartConfig, gamma: float, w, frame_skip: int = 4) -> tuple[np.ndarray, MinecartCandidate]:
    """Best scripted behaviour for weight `w`; earlier candidates win ties."""
    w = np.asarray(w, dtype=float)
    cands = minecart_candidates(cfg, gamma, frame_skip)
    scores = np.array([c.value @ w for c in cands])
    best = cands[int(np.argmax(scores))]
    return best.value.copy(), best
