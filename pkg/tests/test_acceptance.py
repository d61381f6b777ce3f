"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line with the measured
quantity, whatever the outcome, and then asserts.  The learning
experiments (8 to 10) take most of the runtime; ``-m "not slow"`` skips them.
"""

import math
import time
from functools import lru_cache

import numpy as np
import pytest
from scipy.stats import binomtest, chisquare

from dynmorl.envs import DeepSeaTreasure, Minecart, MinecartConfig, builtin_map, minecart_reset, minecart_step
from dynmorl.envs.minecart import ACCELERATE, BRAKE, DO_NOTHING, MINE, TURN_LEFT, TURN_RIGHT
from dynmorl.momath import PolicyEntry, crowding_distance, is_improvement, prune_redundant
from dynmorl.net import NetSpec, QNetwork
from dynmorl.oracle import dst_optimal_value, minecart_optimal_value, partition_simplex, region_components, simplex_grid
from dynmorl.replay import ReplayBuffer
from dynmorl.runner import mean_regret, parse_config, run_experiment, write_logs

from test_momath import brute_crowding
from test_net import numeric_grad
from test_oracle import exhaustive_values, random_map
from test_replay import check_invariants


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
        assert ok, detail

    return emit


def test_criterion_01_gradients(report):
    rng = np.random.default_rng(11)
    t0 = time.time()
    worst = 0.0
    for trial in range(100):
        wd = 2 if trial % 2 else 0
        net = QNetwork(NetSpec(4, 3, 2, hidden=(5, 6), stream_hidden=4, weight_dim=wd), trial)
        for name, v in net.params.items():
            if name.startswith("b"):
                v[:] = rng.normal(size=v.shape) * 0.5
        obs = rng.normal(size=(3, 4))
        w = rng.dirichlet([1, 1], 3) if wd else None
        actions = rng.integers(0, 3, 3)
        targets = rng.normal(size=(3, 2)) * 3
        _, grads, _ = net.loss_and_grad(obs, actions, targets, w, "abs")
        for name in net.params:
            num = numeric_grad(net, name, obs, actions, targets, w, "abs")
            scale = max(np.abs(num).max(), np.abs(grads[name]).max(), 1e-6)
            worst = max(worst, float(np.abs(num - grads[name]).max() / scale))
    dt = time.time() - t0
    report(1, worst < 1e-4 and dt < 60, f"worst relative error {worst:.2e} over 100 triples in {dt:.1f}s")


def test_criterion_02_dueling_identity(report):
    rng = np.random.default_rng(2)
    worst = 0.0
    for i in range(1000):
        wd = 3 if i % 2 else 0
        net = QNetwork(NetSpec(6, 5, 3, hidden=(16, 16), stream_hidden=8, weight_dim=wd), i)
        obs = rng.normal(size=(1, 6)) * 5
        w = rng.dirichlet(np.ones(3)) if wd else None
        worst = max(worst, float(np.abs(net.forward(obs, w).mean(axis=1) - net.value_stream(obs, w)).max()))
    report(2, worst <= 1e-6, f"max |mean_a Q - V| = {worst:.1e} on 1000 inputs")


def test_criterion_03_crowding(report):
    rng = np.random.default_rng(3)
    mismatches = 0
    for _ in range(500):
        n, m = int(rng.integers(1, 21)), int(rng.integers(1, 5))
        pts = rng.integers(-3, 4, size=(n, m)).astype(float) if rng.random() < 0.5 else rng.normal(size=(n, m))
        mismatches += crowding_distance(pts).tolist() != brute_crowding(pts)
    report(3, mismatches == 0, f"{mismatches} mismatches against brute force on 500 sets")


class Checked(ReplayBuffer):
    """Verifies bit-exact restoration after every rejected consideration."""

    def der_consider(self, traj):
        before = [(t.id, tuple(t.slots), t.signature.tobytes()) for t in self.diverse]
        data = {s: (self.obs[s].tobytes(), self.next_obs[s].tobytes(), self.rewards[s].tobytes(), self.deltas[s]) for t in self.diverse for s in t.slots}
        accepted = super().der_consider(traj)
        if not accepted:
            self.rejections += 1
            self.restore_ok &= [(t.id, tuple(t.slots), t.signature.tobytes()) for t in self.diverse] == before
            self.restore_ok &= all(
                (self.obs[s].tobytes(), self.next_obs[s].tobytes(), self.rewards[s].tobytes(), self.deltas[s]) == d for s, d in data.items()
            )
        return accepted


def box_volume(sigs):
    sigs = np.asarray(sigs)
    return float(np.prod(sigs.max(0) - sigs.min(0)))


def test_criterion_04_der(report):
    # The first 5% of trajectories come from all four orthants, the
    # remaining 95% from a tight cluster in the positive one, like a
    # replay stream that ends up biased towards the current weight.
    rng = np.random.default_rng(4)
    buf = Checked(600, 1, 2, diverse_capacity=600, gamma=1.0)
    buf.rejections, buf.restore_ok = 0, True
    n, spread = 10_000, 500
    x = 0.0
    for i in range(n):
        if i < spread:
            sig = rng.uniform(-10, 10, 2)
        else:
            sig = np.abs(rng.normal(3.0, 0.5, 2))
        length = int(rng.integers(1, 6))
        for t in range(length):
            buf.push([x + t], 0, sig if t == 0 else np.zeros(2), [x + t + 1], t == length - 1)
            check_invariants(buf)
        x += 10
    fifo = [t.signature for t in buf.fifo if t.complete]
    diverse = [t.signature for t in buf.diverse]
    ratio = box_volume(diverse) / box_volume(fifo)
    ok = ratio >= 10 and buf.restore_ok and buf.rejections > 0
    report(4, ok, f"bounding-box ratio {ratio:.1f}, invariants held on every push, {buf.rejections} rejections restored bit-exactly")


def test_criterion_05_sampling(report):
    buf = ReplayBuffer(100, 1, 2)
    for i in range(100):
        buf.push([i], 0, [0, 0], [i + 1], True)
    deltas = np.linspace(0.1, 1.0, 100)
    buf.update_priorities(np.arange(100), deltas)
    rng = np.random.default_rng(5)
    idx = np.concatenate([buf.sample(10_000, rng).indices for _ in range(10)])
    expected = (deltas + 0.01) ** 2
    expected = expected / expected.sum() * len(idx)
    p = chisquare(np.bincount(idx, minlength=100), expected).pvalue
    report(5, p > 0.01, f"chi-square p = {p:.3f} over {len(idx)} draws")


def test_criterion_06_environments(report):
    cfg = MinecartConfig()
    fuel = {ACCELERATE: -0.03, MINE: -0.055, BRAKE: -0.005, TURN_LEFT: -0.005, TURN_RIGHT: -0.005, DO_NOTHING: -0.005}
    fuel_ok = True
    for a, expected in fuel.items():
        _, r, _ = minecart_step(minecart_reset(cfg), a, cfg, np.random.default_rng(0))
        fuel_ok &= r[-1] == cfg.idle_cost + {ACCELERATE: cfg.accel_cost, MINE: cfg.mining_cost}.get(a, 0.0)
        fuel_ok &= math.isclose(r[-1], expected, abs_tol=1e-15)
    fuel_ok &= (cfg.idle_cost, cfg.accel_cost, cfg.mining_cost) == (-0.005, -0.025, -0.05)

    env = Minecart(seed=6)
    env.reset()
    rng = np.random.default_rng(6)
    actions = np.where(rng.random(1_000_000) < 0.5, MINE, rng.integers(0, 6, 1_000_000))
    worst = 0.0
    for a in actions:
        _, _, done, _ = env.step(int(a))
        worst = max(worst, float(env.state.cart_content.sum()))
        if done:
            env.reset()
    cap_ok = worst <= cfg.capacity + 1e-12

    dst = DeepSeaTreasure(builtin_map())
    dst.reset()
    dst_ok = True
    for a in rng.integers(0, 4, 100_000):
        _, r, done, _ = dst.step(int(a))
        at_treasure = dst.state.position in dst.map.treasures
        dst_ok &= r[1] == -1.0 and (r[0] == (dst.map.treasures[dst.state.position] if at_treasure else 0.0))
        if done:
            dst.reset()
    report(6, fuel_ok and cap_ok and dst_ok, f"fuel exact={fuel_ok}, max load {worst:.4f} <= {cfg.capacity} over 1e6 steps, DST rewards ok={dst_ok}")


def test_criterion_07_oracles(report):
    rng = np.random.default_rng(7)
    gamma = 0.95
    worst = 0.0
    maps = [builtin_map("6x6")] + [random_map(rng, int(rng.integers(2, 7)), int(rng.integers(2, 7))) for _ in range(30)]
    for m in maps:
        vals = exhaustive_values(m, gamma, m.max_steps)
        for w in rng.dirichlet([1, 1], 5):
            v, _ = dst_optimal_value(m, gamma, w)
            worst = max(worst, abs(float(v @ w) - max(float(x @ w) for x in vals)))
    # resolution 20 gives 210 grid points, the smallest regular grid with at least 200
    cfg = MinecartConfig()
    grid, labels = partition_simplex(lambda w: minecart_optimal_value(cfg, 0.98, w)[1].policy_id, 3, 20)
    pieces = region_components(grid, labels, 20)
    ok = worst < 1e-9 and len(pieces) == 7 and len(grid) >= 200
    report(7, ok, f"DST max |DP - exhaustive| = {worst:.1e} on {len(maps)} maps; Minecart {len(pieces)} regions on {len(grid)} weights")


FIXED_6X6 = """
[env]
kind = dst
map = 6x6
[agent]
kind = {kind}
[schedule]
mode = fixed
weight = 0.5 0.5
[run]
steps = 30000
"""


@pytest.mark.slow
@pytest.mark.parametrize("kind", ["mo", "cn", "cn-active", "cn-uvfa", "uvfa", "naive"])
def test_criterion_08_convergence(report, kind):
    cfg = parse_config(FIXED_6X6.format(kind=kind))
    w = np.array([0.5, 0.5])
    v_star = float(dst_optimal_value(builtin_map("6x6"), cfg.agent.gamma, w)[0] @ w)
    t0 = time.time()
    results = [mean_regret(run_experiment(cfg, seed), last_k=2000, total_steps=30000) for seed in range(3)]
    dt = time.time() - t0
    bound = 0.05 * abs(v_star)
    ok = all(r <= bound for r in results) and dt < 300
    shown = ", ".join(f"{r:.3f}" for r in results)
    report(8, ok, f"{kind}: last-2k mean regret per seed [{shown}] vs bound {bound:.3f} (|V*.w| = {abs(v_star):.3f}), {dt:.0f}s")


SPARSE = """
[agent]
kind = {kind}
[schedule]
mode = sparse
period = 5000
[replay]
der = {der}
[run]
steps = 50000
"""

REGULAR = """
[agent]
kind = {kind}
[schedule]
mode = regular
period = 10
[run]
steps = 50000
"""

SEEDS = range(5)


@lru_cache(maxsize=None)
def seed_regrets(text):
    cfg = parse_config(text)
    t0 = time.time()
    out = tuple(mean_regret(run_experiment(cfg, s)) for s in SEEDS)
    return out, time.time() - t0


def directional(a, b):
    """Strict improvement of the mean plus the one-sided sign-test p-value."""
    a, b = np.asarray(a), np.asarray(b)
    wins = int(np.sum(a < b))
    p = binomtest(wins, len(a), 0.5, alternative="greater").pvalue
    return a.mean() < b.mean(), wins, p


@pytest.mark.slow
def test_criterion_09_cn_der_beats_mo(report):
    cn, t_cn = seed_regrets(SPARSE.format(kind="cn", der="true"))
    mo, t_mo = seed_regrets(SPARSE.format(kind="mo", der="false"))
    better, wins, p = directional(cn, mo)
    dt = t_cn + t_mo
    ok = better and dt < 1800
    report(
        9,
        ok,
        f"CN+DER {np.mean(cn):.3f} vs MO {np.mean(mo):.3f} mean regret ({(np.mean(cn) / np.mean(mo) - 1) * 100:+.0f}%), "
        f"CN+DER lower on {wins}/5 seeds, sign test p = {p:.3f}, {dt:.0f}s",
    )


@pytest.mark.slow
def test_criterion_10_cn_beats_mn_regular(report):
    cn, _ = seed_regrets(REGULAR.format(kind="cn"))
    mn, _ = seed_regrets(REGULAR.format(kind="mn"))
    better, wins, p = directional(cn, mn)
    report(10, better, f"CN {np.mean(cn):.3f} vs MN {np.mean(mn):.3f} mean regret, CN lower on {wins}/5 seeds, sign test p = {p:.3f}")


def brute_prune(values, ws, kappa):
    kept = list(range(len(values)))
    while True:
        chosen = set()
        for w in ws:
            scores = [float(np.dot(w, values[i])) for i in kept]
            best = max(scores)
            chosen.add(max(i for i, s in zip(kept, scores) if s >= best - kappa))
        if len(chosen) == len(kept):
            return kept
        kept = [i for i in kept if i in chosen]


def test_criterion_11_mn_bookkeeping(report):
    rng = np.random.default_rng(11)
    agree = 0
    for _ in range(1000):
        n = int(rng.integers(2, 4))
        values = rng.normal(size=(int(rng.integers(0, 7)), n))
        ws = rng.dirichlet(np.ones(n), int(rng.integers(1, 6)))
        kappa = float(rng.choice([0.0, 0.05, 0.3]))
        cand = rng.normal(size=n)
        entries = [PolicyEntry(None, ws[0], v, i) for i, v in enumerate(values)]
        brute_imp = len(values) == 0 or any(np.dot(w, cand) > max(np.dot(w, v) for v in values) - kappa for w in ws)
        same = is_improvement(cand, entries, ws, kappa) == brute_imp
        if len(values):
            same &= [e.stamp for e in prune_redundant(entries, ws, kappa)] == brute_prune(values, ws, kappa)
        agree += same

    dominated = 0
    for _ in range(200):
        n = int(rng.integers(2, 4))
        kappa = float(rng.choice([0.0, 0.1]))
        pi, history = [], []
        w = rng.dirichlet(np.ones(n))
        for stamp in range(30):
            history.append(w)
            value = rng.normal(size=n) + stamp * 0.02
            if is_improvement(value, pi, history, kappa):
                pi = prune_redundant(pi + [PolicyEntry(None, w, value, stamp)], history, kappa)
            for e in pi:
                # e must be within kappa of the best at some encountered weight
                if not any(np.dot(h, e.value) >= max(np.dot(h, o.value) for o in pi) - kappa for h in history):
                    dominated += 1
            w = rng.dirichlet(np.ones(n))
    ok = agree == 1000 and dominated == 0
    report(11, ok, f"{agree}/1000 instances match brute force; {dominated} kappa-dominated entries over 200 simulated sequences")


def test_criterion_12_determinism(report, tmp_path):
    text = SPARSE.format(kind="cn", der="true").replace("steps = 50000", "steps = 3000").replace("period = 5000", "period = 500")
    cfg = parse_config(text)
    for name in ("a", "b"):
        write_logs(tmp_path / f"{name}.csv", [run_experiment(cfg, 42)])
    same = (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    mn = parse_config(REGULAR.format(kind="mn").replace("steps = 50000", "steps = 2000"))
    for name in ("c", "d"):
        write_logs(tmp_path / f"{name}.csv", [run_experiment(mn, 42)])
    same &= (tmp_path / "c.csv").read_bytes() == (tmp_path / "d.csv").read_bytes()
    report(12, same, "two runs of the same config and seed gave byte-identical logs" if same else "logs differ")
