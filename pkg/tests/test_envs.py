import math

import numpy as np
import pytest

from dynmorl.envs import (
    DeepSeaTreasure,
    DstMap,
    FormatError,
    FrameSkip,
    Minecart,
    MinecartConfig,
    PixelObservation,
    builtin_map,
    dst_reset,
    dst_step,
    dump_dst_map,
    dump_minecart_config,
    minecart_reset,
    minecart_step,
    parse_dst_map,
    parse_minecart_config,
)
from dynmorl.envs.dst import DOWN, LEFT, RIGHT, UP
from dynmorl.envs.minecart import ACCELERATE, BRAKE, DO_NOTHING, MINE, TURN_LEFT, TURN_RIGHT, MinecartState

TINY = """\
kind = dst
name = tiny
max_steps = 5
grid:
S   .   .
T2  .   T9
#   #   .
"""


def test_dst_parse_roundtrip():
    m = parse_dst_map(TINY)
    assert m.shape == (3, 3) and m.start == (0, 0)
    assert m.treasures == {(1, 0): 2.0, (1, 2): 9.0}
    assert parse_dst_map(dump_dst_map(m)) == m


@pytest.mark.parametrize(
    "text",
    ["grid:\nS .\n. . .\n", "grid:\n. .\n. T1\n", "grid:\nS S\n. T1\n", "grid:\nS X\n. T1\n", "max_steps\ngrid:\nS T1\n"],
)
def test_dst_parse_errors(text):
    with pytest.raises(FormatError):
        parse_dst_map(text)


def test_dst_step_rules():
    m = parse_dst_map(TINY)
    s = dst_reset(m)
    s2, r, done = dst_step(s, UP, m)
    assert s2.position == (0, 0) and r.tolist() == [0.0, -1.0] and not done
    s2, r, done = dst_step(s, LEFT, m)
    assert s2.position == (0, 0)
    s2, r, done = dst_step(s, DOWN, m)
    assert r.tolist() == [2.0, -1.0] and done
    s3, _, _ = dst_step(s, RIGHT, m)
    s3, _, _ = dst_step(s3, DOWN, m)
    # bottom cell blocks the move
    s4, r, done = dst_step(s3, DOWN, m)
    assert s4.position == s3.position and not done
    with pytest.raises(ValueError):
        dst_step(s, 7, m)


def test_dst_step_cap():
    m = parse_dst_map(TINY)
    s = dst_reset(m)
    for t in range(5):
        s, r, done = dst_step(s, UP, m)
    assert done and s.step_count == 5


def test_dst_per_step_reward_random_walk():
    env = DeepSeaTreasure(builtin_map())
    rng = np.random.default_rng(0)
    env.reset()
    for _ in range(20000):
        obs, r, done, _ = env.step(int(rng.integers(4)))
        if r[0] != 0:
            assert env.state.position in env.map.treasures
            assert r[0] == env.map.treasures[env.state.position]
        assert r[1] == -1.0
        if done:
            env.reset()


def test_dst_observations():
    env = DeepSeaTreasure(builtin_map("6x6"))
    obs = env.reset()
    assert obs.shape == (env.obs_dim,) and obs.sum() == 1.0 and obs[0] == 1.0
    env2 = DeepSeaTreasure(builtin_map("6x6"), observation="coords")
    assert env2.reset().tolist() == [0.0, 0.0]
    with pytest.raises(ValueError):
        DeepSeaTreasure(builtin_map(), observation="pixels")


def test_builtin_maps_load():
    for name in ("default", "6x6"):
        m = builtin_map(name)
        assert isinstance(m, DstMap) and m.treasures


# -- Minecart ---------------------------------------------------------------


def test_minecart_config_roundtrip():
    cfg = MinecartConfig()
    assert parse_minecart_config(dump_minecart_config(cfg)) == cfg
    with pytest.raises(FormatError):
        parse_minecart_config("capacity = 2\nwheels = 4\n")
    with pytest.raises(ValueError):
        MinecartConfig(idle_cost=0.1)


@pytest.mark.parametrize(
    "action,extra",
    [(ACCELERATE, "accel_cost"), (MINE, "mining_cost"), (BRAKE, None), (TURN_LEFT, None), (TURN_RIGHT, None), (DO_NOTHING, None)],
)
def test_minecart_fuel_accounting(action, extra):
    cfg = MinecartConfig()
    s = minecart_reset(cfg)
    _, r, _ = minecart_step(s, action, cfg, np.random.default_rng(0))
    expected = cfg.idle_cost + (getattr(cfg, extra) if extra else 0.0)
    assert r[-1] == expected
    assert np.all(r[:-1] == 0)


def test_minecart_mining_and_selling():
    cfg = MinecartConfig(ore_std=0.0)
    mine = cfg.mines[2]
    s = MinecartState(np.array(mine.position), 0.0, 45.0, np.zeros(2), 0, True)
    s, r, _ = minecart_step(s, MINE, cfg, expected_ore=True)
    assert s.cart_content.tolist() == pytest.approx(list(mine.ore_means))
    for _ in range(20):
        s, r, _ = minecart_step(s, MINE, cfg, expected_ore=True)
    assert s.cart_content.sum() == pytest.approx(cfg.capacity)
    # drop the cart next to the base, facing it, and roll in
    s = MinecartState(np.array([0.16, 0.0]), cfg.max_speed, 180.0, s.cart_content.copy(), 10, True)
    s, r, done = minecart_step(s, DO_NOTHING, cfg)
    assert done and r[:-1].sum() == pytest.approx(cfg.capacity)
    assert s.cart_content.sum() == 0.0


def test_minecart_brake_and_turns():
    cfg = MinecartConfig()
    s = minecart_reset(cfg)
    s.speed = 0.04
    s2, _, _ = minecart_step(s, BRAKE, cfg)
    assert s2.speed == pytest.approx(0.02)
    s.speed = 0.0015
    assert minecart_step(s, BRAKE, cfg)[0].speed == 0.0
    assert minecart_step(s, TURN_RIGHT, cfg)[0].heading == 55.0
    assert minecart_step(s, TURN_LEFT, cfg)[0].heading == 35.0
    with pytest.raises(ValueError):
        minecart_step(s, 6, cfg)


def test_minecart_capacity_never_exceeded():
    cfg = MinecartConfig()
    rng = np.random.default_rng(1)
    for _ in range(200):
        m = cfg.mines[int(rng.integers(len(cfg.mines)))]
        s = MinecartState(np.array(m.position), 0.0, float(rng.uniform(0, 360)), rng.uniform(0, 0.7, 2), 0, True)
        for _ in range(50):
            a = MINE if rng.random() < 0.7 else int(rng.integers(6))
            s, _, done = minecart_step(s, a, cfg, rng)
            assert s.cart_content.sum() <= cfg.capacity + 1e-12
            assert np.all(s.cart_content >= 0)
            if done:
                break


def test_minecart_env_and_clone():
    env = Minecart(seed=3)
    obs = env.reset()
    assert obs.shape == (env.obs_dim,) == (7,)
    twin = env.clone()
    for a in (ACCELERATE, ACCELERATE, MINE, TURN_LEFT):
        o1, r1, d1, _ = env.step(a)
        o2, r2, d2, _ = twin.step(a)
        assert np.array_equal(o1, o2) and np.array_equal(r1, r2)
    assert env.render().shape == (48, 48)


def test_frame_skip_sums_rewards():
    env = FrameSkip(Minecart(seed=0), 4)
    env.reset()
    _, r, done, info = env.step(ACCELERATE)
    cfg = env.config
    assert info["frames"] == 4
    assert r[-1] == pytest.approx(4 * (cfg.idle_cost + cfg.accel_cost))
    assert env.max_steps == math.ceil(cfg.max_episode_steps / 4)
    with pytest.raises(ValueError):
        FrameSkip(Minecart(), 0)


def test_frame_skip_stops_at_terminal():
    m = parse_dst_map(TINY)
    env = FrameSkip(DeepSeaTreasure(m), 3)
    env.reset()
    _, r, done, info = env.step(DOWN)
    assert done and info["frames"] == 1 and r.tolist() == [2.0, -1.0]


def test_pixel_observation_stack():
    env = PixelObservation(DeepSeaTreasure(builtin_map("6x6")), size=12, frames=2)
    obs = env.reset()
    assert obs.shape == (env.obs_dim,) == (288,)
    obs2, *_ = env.step(RIGHT)
    assert np.array_equal(obs2[:144], obs[144:])
