import itertools

import numpy as np
import pytest

from dynmorl.envs import DstMap, MinecartConfig, builtin_map, dst_reset, dst_step, parse_dst_map
from dynmorl.momath import normalize_weight
from dynmorl.oracle import (
    IDLE,
    dst_optimal_value,
    minecart_candidates,
    minecart_optimal_value,
    partition_simplex,
    region_components,
    region_shares,
    shortest_paths,
    simplex_grid,
)
from dynmorl.oracle.minecart import rollout
from dynmorl.runner import EnvSpec, Oracle

GAMMA = 0.95


def exhaustive_values(m: DstMap, gamma: float, horizon: int):
    """Value vectors of every outcome reachable by some action sequence.

    Sequences are expanded level by level; sequences ending in the same
    cell at the same time have identical futures, so one representative
    per (cell, time) suffices.  Nothing assumes shortest paths are best.
    """
    outcomes = set()
    frontier = {m.start}
    for t in range(1, horizon + 1):
        nxt = set()
        for pos in frontier:
            for a in range(4):
                s, r, done = dst_step(type(dst_reset(m))(pos, t - 1), a, m)
                if s.position in m.treasures:
                    outcomes.add((m.treasures[s.position], t))
                elif not done:
                    nxt.add(s.position)
                else:
                    outcomes.add((0.0, t))
        frontier = nxt
        if not frontier:
            break
    return [np.array([gamma ** (t - 1) * v, -sum(gamma**k for k in range(t))]) for v, t in outcomes]


def literal_sequences(m: DstMap, gamma: float, length: int):
    vals = []
    for seq in itertools.product(range(4), repeat=length):
        s = dst_reset(m)
        ret, disc = np.zeros(2), 1.0
        for a in seq:
            s, r, done = dst_step(s, a, m)
            ret += disc * r
            disc *= gamma
            if done:
                vals.append(ret)
                break
    return vals


def random_map(rng, rows, cols):
    grid = [["." for _ in range(cols)] for _ in range(rows)]
    grid[0][0] = "S"
    cells = [(r, c) for r in range(rows) for c in range(cols) if (r, c) != (0, 0)]
    rng.shuffle(cells)
    k = int(rng.integers(1, 4))
    for r, c in cells[:k]:
        grid[r][c] = f"T{int(rng.integers(1, 30))}"
    for r, c in cells[k : k + int(rng.integers(0, 6))]:
        grid[r][c] = "#"
    return DstMap.from_grid(grid, max_steps=2 * rows * cols)


def test_adjacent_treasure_value():
    m = parse_dst_map("grid:\nS\nT1\n")
    v, c = dst_optimal_value(m, GAMMA, [0.5, 0.5])
    assert v.tolist() == [1.0, -1.0]


@pytest.mark.parametrize("w", [[1.0, 0.0], [0.0, 1.0], [0.5, 0.5], [0.8, 0.2], [0.3, 0.7]])
def test_dst_oracle_equals_exhaustive_on_6x6(w):
    m = builtin_map("6x6")
    best = max(v @ np.array(w) for v in exhaustive_values(m, GAMMA, m.max_steps))
    v, _ = dst_optimal_value(m, GAMMA, w)
    assert v @ np.array(w) == pytest.approx(best, abs=1e-9)


def test_dst_oracle_equals_exhaustive_on_random_maps():
    rng = np.random.default_rng(7)
    for _ in range(40):
        rows, cols = int(rng.integers(2, 7)), int(rng.integers(2, 7))
        m = random_map(rng, rows, cols)
        vals = exhaustive_values(m, GAMMA, m.max_steps)
        for w in rng.dirichlet([1, 1], 5):
            v, _ = dst_optimal_value(m, GAMMA, w)
            assert v @ w == pytest.approx(max(x @ w for x in vals), abs=1e-9)


def test_exhaustive_helper_against_literal_enumeration():
    m = parse_dst_map("max_steps = 6\ngrid:\nS . T5\nT1 . .\n")
    lit = literal_sequences(m, GAMMA, 6)
    ex = exhaustive_values(m, GAMMA, 6)
    for w in ([1, 0], [0, 1], [0.5, 0.5]):
        w = np.array(w, dtype=float)
        assert max(x @ w for x in lit) == pytest.approx(max(x @ w for x in ex))


def test_dst_edge_weights():
    m = builtin_map()
    _, c = dst_optimal_value(m, GAMMA, [0, 1])
    assert c.actions == (3,)  # the treasure right below the start
    v, c = dst_optimal_value(m, GAMMA, [1, 0])
    assert v[0] == max(GAMMA ** (len(p) - 1) * m.treasures[t] for t, p in shortest_paths(m).items())
    with pytest.raises(ValueError):
        dst_optimal_value(m, 1.0, [1, 0])


def test_dst_default_regions_roughly_equal():
    m = builtin_map()
    grid, labels = partition_simplex(lambda w: dst_optimal_value(m, GAMMA, w)[1].policy_id, 2, 1001)
    shares = region_shares(labels)
    assert 9 <= len(shares) <= 11
    assert all(abs(s - 0.1) <= 0.05 for s in shares.values())


def test_minecart_seven_contiguous_regions():
    cfg = MinecartConfig()
    grid, labels = partition_simplex(lambda w: minecart_optimal_value(cfg, 0.98, w)[1].policy_id, 3, 20)
    assert len(grid) >= 200
    pieces = region_components(grid, labels, 20)
    assert len(pieces) == 7 and all(n == 1 for n in pieces.values())


def test_minecart_edge_weights():
    cfg = MinecartConfig()
    v, c = minecart_optimal_value(cfg, 0.98, [0, 0, 1])
    assert c.policy_id == IDLE and v[0] == 0 and v[1] == 0
    _, c = minecart_optimal_value(cfg, 0.98, [0.05, 0.9, 0.05])
    assert cfg.mines[c.mine].ore_means[0] == 0.0


def test_minecart_candidate_values_replay():
    cfg = MinecartConfig()
    for cand in minecart_candidates(cfg):
        acts = iter(cand.actions)
        v, _ = rollout(cfg, lambda s: next(acts), 0.98, 4)
        assert np.allclose(v, cand.value)


def test_simplex_grid():
    g = simplex_grid(3, 2)
    assert sorted(map(tuple, g)) == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]
    assert len(simplex_grid(3, 20)) == 210
    assert np.allclose(simplex_grid(2, 5).sum(1), 1)
    with pytest.raises(ValueError):
        simplex_grid(3, 1)


def test_resolution_two_labels_corners():
    oracle = Oracle(EnvSpec(kind="minecart", frame_skip=4), 0.98)
    grid, labels = partition_simplex(lambda w: oracle(w)[1], 3, 2)
    for w, lab in zip(grid, labels):
        assert lab == oracle(w)[1]


def test_oracle_lower_bound_flag():
    assert Oracle(EnvSpec(kind="minecart", frame_skip=4), 0.98).exact
    assert Oracle(EnvSpec(kind="dst"), 0.95).exact


def test_normalized_weights_on_grid():
    for w in simplex_grid(3, 7):
        assert np.allclose(normalize_weight(w), w)
