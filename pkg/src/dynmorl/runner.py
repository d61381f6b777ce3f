"""Experiment orchestration: configs, seeded runs, regret logs, aggregation, plots.

Config files are INI with sections ``[env] [agent] [schedule] [replay]
[net] [run]``.  Unknown sections or keys raise `ConfigError` naming them.
Every key has a default; environment-dependent defaults (discount,
exploration, buffer size, batch size, schedule period, frame skip) follow
the environment's hyperparameter table.
"""

from __future__ import annotations

import configparser
import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .agents import AGENT_KINDS, AgentConfig, make_agent
from .envs import DeepSeaTreasure, FrameSkip, Minecart, MinecartConfig, builtin_map, load_dst_map, load_minecart_config
from .momath import regret as regret_of
from .oracle import dst_optimal_value, minecart_optimal_value
from .schedule import MODES, WeightSchedule


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


# per-environment defaults
ENV_DEFAULTS = {
    "dst": dict(
        gamma=0.95, eps_start=0.1, eps_end=0.01, eps_steps=10_000, buffer_size=10_000, batch_size=16, period=5_000, frame_skip=1
    ),
    "minecart": dict(
        gamma=0.98, eps_start=1.0, eps_end=0.05, eps_steps=100_000, buffer_size=100_000, batch_size=64, period=50_000, frame_skip=4
    ),
}


@dataclass(frozen=True)
class EnvSpec:
    kind: str = "dst"
    map: str = "default"  # builtin name or path (DST)
    observation: str = "onehot"
    config: str = ""  # Minecart config file; empty uses the default geometry
    frame_skip: int = 1


@dataclass(frozen=True)
class ScheduleSpec:
    mode: str = "sparse"
    period: int = 5_000
    weight: tuple[float, ...] | None = None  # fixed mode
    alpha: float = 1.0


@dataclass(frozen=True)
class RunSpec:
    steps: int = 50_000
    seeds: tuple[int, ...] = (0,)
    workers: int = 1


@dataclass(frozen=True)
class ExperimentConfig:
    env: EnvSpec = field(default_factory=EnvSpec)
    agent: AgentConfig = field(default_factory=AgentConfig)
    schedule: ScheduleSpec = field(default_factory=ScheduleSpec)
    run: RunSpec = field(default_factory=RunSpec)


# section -> key -> (target, field, parser)
def _floats(s: str) -> tuple[float, ...]:
    return tuple(float(x) for x in s.replace(",", " ").split())


def _ints(s: str) -> tuple[int, ...]:
    return tuple(int(x) for x in s.replace(",", " ").split())


def _bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


_KEYS = {
    "env": {
        "kind": ("env", "kind", str),
        "map": ("env", "map", str),
        "observation": ("env", "observation", str),
        "config": ("env", "config", str),
        "frame_skip": ("env", "frame_skip", int),
    },
    "agent": {
        "kind": ("agent", "kind", str),
        "gamma": ("agent", "gamma", float),
        "batch_size": ("agent", "batch_size", int),
        "eps_start": ("agent", "eps_start", float),
        "eps_end": ("agent", "eps_end", float),
        "eps_steps": ("agent", "eps_steps", int),
        "target_sync": ("agent", "target_sync", int),
        "loss": ("agent", "loss", str),
        "kappa": ("agent", "kappa", float),
        "eval_episodes": ("agent", "eval_episodes", int),
    },
    "schedule": {
        "mode": ("schedule", "mode", str),
        "period": ("schedule", "period", int),
        "weight": ("schedule", "weight", _floats),
        "alpha": ("schedule", "alpha", float),
    },
    "replay": {
        "size": ("agent", "buffer_size", int),
        "der": ("agent", "der", _bool),
        "alpha": ("agent", "alpha", float),
        "eps": ("agent", "priority_eps", float),
    },
    "net": {
        "hidden": ("agent", "hidden", _ints),
        "stream_hidden": ("agent", "stream_hidden", int),
        "lr": ("agent", "lr", float),
        "momentum": ("agent", "momentum", float),
    },
    "run": {
        "steps": ("run", "steps", int),
        "seeds": ("run", "seeds", _ints),
        "workers": ("run", "workers", int),
    },
}


def parse_config(text: str) -> ExperimentConfig:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as e:
        raise ConfigError(f"malformed config: {e}") from e
    values: dict[str, dict] = {"env": {}, "agent": {}, "schedule": {}, "run": {}}
    for section in cp.sections():
        if section not in _KEYS:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in cp.items(section):
            if key not in _KEYS[section]:
                raise ConfigError(f"unknown key '{key}' in [{section}]")
            target, name, parse = _KEYS[section][key]
            try:
                values[target][name] = parse(raw)
            except ValueError as e:
                raise ConfigError(f"bad value for '{key}' in [{section}]: {raw!r}") from e
    kind = values["env"].get("kind", "dst")
    if kind not in ENV_DEFAULTS:
        raise ConfigError(f"unknown value for 'kind' in [env]: {kind!r}")
    d = ENV_DEFAULTS[kind]
    env_vals = {"frame_skip": d["frame_skip"], **values["env"]}
    agent_vals = {k: d[k] for k in ("gamma", "eps_start", "eps_end", "eps_steps", "buffer_size", "batch_size")}
    agent_vals.update(values["agent"])
    sched_vals = {"period": d["period"], **values["schedule"]}
    if sched_vals.get("mode", "sparse") not in MODES:
        raise ConfigError(f"unknown value for 'mode' in [schedule]: {sched_vals['mode']!r}")
    if agent_vals.get("kind", "cn") not in AGENT_KINDS:
        raise ConfigError(f"unknown value for 'kind' in [agent]: {agent_vals['kind']!r}")
    if env_vals.get("observation", "onehot") not in ("onehot", "coords"):
        raise ConfigError(f"unknown value for 'observation' in [env]: {env_vals['observation']!r}")
    try:
        cfg = ExperimentConfig(
            EnvSpec(**env_vals), AgentConfig(**agent_vals), ScheduleSpec(**sched_vals), RunSpec(**values["run"])
        )
    except ValueError as e:
        raise ConfigError(str(e)) from e
    if cfg.run.steps < 0:
        raise ConfigError("'steps' in [run] must be >= 0")
    if cfg.schedule.period < 1:
        raise ConfigError("'period' in [schedule] must be >= 1")
    if cfg.env.frame_skip < 1:
        raise ConfigError("'frame_skip' in [env] must be >= 1")
    return cfg


def load_config(path) -> ExperimentConfig:
    """Read a config file; a bare name like ``dst_sparse`` loads a packaged config."""
    p = Path(path)
    if not p.exists() and not p.suffix:
        res = resources.files("dynmorl.data").joinpath(f"{path}.ini")
        if res.is_file():
            return parse_config(res.read_text())
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    return parse_config(p.read_text())


def dump_config(cfg: ExperimentConfig) -> str:
    """INI text that parses back to `cfg`."""
    cp = configparser.ConfigParser(interpolation=None)
    objs = {"env": cfg.env, "agent": cfg.agent, "schedule": cfg.schedule, "run": cfg.run}
    for section, keys in _KEYS.items():
        cp[section] = {}
        for key, (target, name, _) in keys.items():
            v = getattr(objs[target], name)
            if v is None:
                continue
            if isinstance(v, tuple):
                v = " ".join(repr(x) for x in v)
            elif isinstance(v, float):
                v = repr(v)
            cp[section][key] = str(v)
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def with_overrides(cfg: ExperimentConfig, env=None, agent=None, schedule=None, run=None) -> ExperimentConfig:
    """Copy of `cfg` with fields replaced per section (dicts of field -> value)."""
    from dataclasses import replace

    return ExperimentConfig(
        replace(cfg.env, **(env or {})),
        replace(cfg.agent, **(agent or {})),
        replace(cfg.schedule, **(schedule or {})),
        replace(cfg.run, **(run or {})),
    )


# -- environments and oracle ------------------------------------------------


def _minecart_config(spec: EnvSpec) -> MinecartConfig:
    return load_minecart_config(spec.config) if spec.config else MinecartConfig()


def _dst_map(spec: EnvSpec):
    p = Path(spec.map)
    return load_dst_map(p) if p.suffix or p.exists() else builtin_map(spec.map)


def make_env(spec: EnvSpec, seed=None, expected_ore: bool = False):
    if spec.kind == "dst":
        env = DeepSeaTreasure(_dst_map(spec), spec.observation)
    elif spec.kind == "minecart":
        env = Minecart(_minecart_config(spec), expected_ore=expected_ore, seed=seed)
    else:
        raise ConfigError(f"unknown value for 'kind' in [env]: {spec.kind!r}")
    return FrameSkip(env, spec.frame_skip) if spec.frame_skip > 1 else env


class Oracle:
    """Optimal value vector and policy id for a weight, for one environment spec."""

    def __init__(self, spec: EnvSpec, gamma: float):
        self.spec = spec
        self.gamma = gamma
        if spec.kind == "dst":
            self.map = _dst_map(spec)
            if spec.frame_skip != 1:
                raise ConfigError("the DST oracle assumes 'frame_skip' = 1")
            self.n_objectives = 2
            self.exact = True
        else:
            self.config = _minecart_config(spec)
            self.n_objectives = self.config.n_objectives
            # the scripted family is only known to cover the default geometry
            self.exact = self.config == MinecartConfig()

    def __call__(self, w) -> tuple[np.ndarray, str]:
        if self.spec.kind == "dst":
            v, c = dst_optimal_value(self.map, self.gamma, w)
        else:
            v, c = minecart_optimal_value(self.config, self.gamma, w, self.spec.frame_skip)
        return v, c.policy_id


# -- running ------------------------------------------------------------------


@dataclass
class RunLog:
    run: int
    n_objectives: int
    rows: list[dict] = field(default_factory=list)

    @property
    def steps(self) -> np.ndarray:
        return np.array([r["step"] for r in self.rows], dtype=np.int64)

    @property
    def regrets(self) -> np.ndarray:
        return np.array([r["regret"] for r in self.rows], dtype=float)


def log_header(n_objectives: int) -> list[str]:
    return (
        ["run", "episode", "step"]
        + [f"w_{i}" for i in range(n_objectives)]
        + [f"g_{i}" for i in range(n_objectives)]
        + ["scalarized", "optimal", "regret"]
    )


def run_experiment(cfg: ExperimentConfig, seed: int = 0, run: int | None = None, progress=None) -> RunLog:
    """Train one agent for ``cfg.run.steps`` agent steps; one log row per finished episode.

    Regret uses the weight active at the start of the episode and the
    return discounted per agent step.
    """
    run = seed if run is None else run
    ss = np.random.SeedSequence(seed)
    env_seed, agent_seed, sched_seed = (int(s.generate_state(1)[0]) for s in ss.spawn(3))
    env = make_env(cfg.env, env_seed)
    oracle = Oracle(cfg.env, cfg.agent.gamma)
    n = env.n_objectives
    sc = cfg.schedule
    schedule = WeightSchedule(sc.mode, n, sc.period, seed=sched_seed, fixed=sc.weight, alpha=sc.alpha)
    agent = make_agent(cfg.agent, env.obs_dim, env.n_actions, n, agent_seed)
    eval_env = make_env(cfg.env, env_seed, expected_ore=True) if cfg.agent.kind == "mn" else None
    gamma = cfg.agent.gamma
    log = RunLog(run, n)
    if cfg.run.steps <= 0:
        return log
    step = episode = 0
    w = schedule.weight(0, 0)
    agent.set_weight(w)
    while step < cfg.run.steps:
        obs = env.reset()
        w_new = schedule.weight(step, episode)
        if not np.array_equal(w_new, w):
            agent.on_weight_change(w, w_new, eval_env)
            w = w_new
        w_episode = w
        ret = np.zeros(n)
        disc = 1.0
        done = False
        while not done and step < cfg.run.steps:
            w_new = schedule.weight(step, episode)
            if not np.array_equal(w_new, w):
                agent.on_weight_change(w, w_new, eval_env)
                w = w_new
            a = agent.act(obs)
            nxt, r, done, _ = env.step(a)
            agent.observe(obs, a, r, nxt, done)
            ret += disc * r
            disc *= gamma
            obs = nxt
            step += 1
        if done:
            v_star, _ = oracle(w_episode)
            g = float(ret @ w_episode)
            opt = float(v_star @ w_episode)
            row = {"run": run, "episode": episode, "step": step}
            row.update({f"w_{i}": float(w_episode[i]) for i in range(n)})
            row.update({f"g_{i}": float(ret[i]) for i in range(n)})
            row.update(scalarized=g, optimal=opt, regret=regret_of(ret, w_episode, v_star))
            log.rows.append(row)
            if progress is not None:
                progress(log, step)
        episode += 1
    return log


def _run_one(args):
    cfg, seed = args
    return run_experiment(cfg, seed)


def run_many(cfg: ExperimentConfig, seeds=None, workers: int | None = None) -> list[RunLog]:
    """Independent runs, one per seed, optionally in a process pool."""
    seeds = list(cfg.run.seeds if seeds is None else seeds)
    workers = cfg.run.workers if workers is None else workers
    if workers <= 1 or len(seeds) <= 1:
        return [run_experiment(cfg, s) for s in seeds]
    with ProcessPoolExecutor(max_workers=min(workers, len(seeds))) as pool:
        return list(pool.map(_run_one, [(cfg, s) for s in seeds]))


def write_logs(path, logs: list[RunLog]) -> None:
    if not logs:
        raise ValueError("no logs to write")
    header = log_header(logs[0].n_objectives)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for log in logs:
            for row in log.rows:
                w.writerow([row[k] if k in ("run", "episode", "step") else repr(row[k]) for k in header])


def read_logs(path) -> list[RunLog]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        n = sum(1 for c in reader.fieldnames if c.startswith("w_"))
        logs: dict[int, RunLog] = {}
        for rec in reader:
            row = {k: int(v) if k in ("run", "episode", "step") else float(v) for k, v in rec.items()}
            logs.setdefault(row["run"], RunLog(row["run"], n)).rows.append(row)
    return [logs[k] for k in sorted(logs)]


# -- aggregation ----------------------------------------------------------------


def moving_average(x, window: int) -> np.ndarray:
    """Trailing mean over the last `window` entries (fewer at the start)."""
    if window < 1:
        raise ValueError("window must be >= 1")
    x = np.asarray(x, dtype=float)
    if window == 1 or x.size == 0:
        return x.copy()
    c = np.concatenate([[0.0], np.cumsum(x)])
    idx = np.arange(1, x.size + 1)
    lo = np.maximum(idx - window, 0)
    out = (c[idx] - c[lo]) / (idx - lo)
    # exact for constant input regardless of cumsum round-off
    const = np.all(x == x[0])
    return np.full_like(x, x[0]) if const else out


def mean_regret(log: RunLog, last_k: int | None = None, total_steps: int | None = None) -> float:
    """Mean episodic regret of one run, optionally over episodes ending in the last `last_k` steps."""
    r, s = log.regrets, log.steps
    if last_k is not None:
        end = total_steps if total_steps is not None else (int(s.max()) if s.size else 0)
        r = r[s > end - last_k]
    return float(r.mean()) if r.size else math.nan


@dataclass
class CurveTable:
    steps: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    cum_mean: np.ndarray
    cum_std: np.ndarray
    mean_delta: float
    mean_delta_std: float
    last_mean_delta: float | None = None
    last_k: int | None = None

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["step", "regret_mean", "regret_std", "cumulative_mean", "cumulative_std"])
            for row in zip(self.steps, self.mean, self.std, self.cum_mean, self.cum_std):
                w.writerow([int(row[0])] + [repr(float(x)) for x in row[1:]])


def smooth_and_aggregate(logs: list[RunLog], window: int = 200, last_k: int | None = None, points: int = 200) -> CurveTable:
    """Smooth each run's episodic regret, then average across runs on a common step grid.

    On the grid every run contributes its latest smoothed value (0 before
    its first episode) and its cumulative regret so far.  Runs are sorted
    by run id first, so the result does not depend on their order.
    """
    if not logs:
        raise ValueError("need at least one log")
    logs = sorted(logs, key=lambda l: l.run)
    end = max((int(l.steps.max()) for l in logs if l.rows), default=0)
    grid = np.unique(np.linspace(0, end, points).astype(np.int64)) if end > 0 else np.zeros(1, dtype=np.int64)
    sm, cum = [], []
    for log in logs:
        s = log.steps
        smoothed = moving_average(log.regrets, window)
        total = np.cumsum(log.regrets)
        pos = np.searchsorted(s, grid, side="right") - 1
        sm.append(np.where(pos >= 0, smoothed[np.maximum(pos, 0)] if s.size else 0.0, 0.0))
        cum.append(np.where(pos >= 0, total[np.maximum(pos, 0)] if s.size else 0.0, 0.0))
    sm, cum = np.array(sm), np.array(cum)
    per_run = np.array([mean_regret(l) for l in logs])
    last = None
    if last_k is not None:
        last = float(np.nanmean([mean_regret(l, last_k, end) for l in logs]))
    return CurveTable(
        grid, sm.mean(0), sm.std(0), cum.mean(0), cum.std(0), float(np.nanmean(per_run)), float(np.nanstd(per_run)), last, last_k
    )


# -- SVG --------------------------------------------------------------------------

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def _frame(width, height, title, xlabel, ylabel, xlo, xhi, ylo, yhi):
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2}" y="16" text-anchor="middle" font-size="13">{_esc(title)}</text>',
        f'<text x="{width / 2}" y="{height - 6}" text-anchor="middle">{_esc(xlabel)}</text>',
        f'<text x="12" y="{height / 2}" text-anchor="middle" transform="rotate(-90 12 {height / 2})">{_esc(ylabel)}</text>',
        f'<rect x="50" y="26" width="{width - 70}" height="{height - 66}" fill="none" stroke="black"/>',
        f'<text x="50" y="{height - 26}" text-anchor="start">{xlo:.4g}</text>',
        f'<text x="{width - 20}" y="{height - 26}" text-anchor="end">{xhi:.4g}</text>',
        f'<text x="46" y="{height - 40}" text-anchor="end">{ylo:.4g}</text>',
        f'<text x="46" y="34" text-anchor="end">{yhi:.4g}</text>',
    ]
    return parts


def _esc(s: str) -> str:
    return str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _scaler(lo, hi, a, b):
    span = hi - lo if hi > lo else 1.0
    return lambda v: a + (np.asarray(v, dtype=float) - lo) / span * (b - a)


def svg_lines(series: dict[str, tuple], title: str = "", xlabel: str = "", ylabel: str = "", width: int = 640, height: int = 400) -> str:
    """Line chart; `series` maps a name to ``(x, y)`` or ``(x, y, std)``."""
    xs = np.concatenate([np.asarray(s[0], dtype=float) for s in series.values()]) if series else np.zeros(1)
    ys = [np.asarray(s[1], dtype=float) for s in series.values()]
    lo_hi = [np.asarray(s[1], dtype=float) + sgn * np.asarray(s[2], dtype=float) for s in series.values() if len(s) > 2 for sgn in (-1, 1)]
    yall = np.concatenate(ys + lo_hi) if ys else np.zeros(1)
    xlo, xhi = float(xs.min()), float(xs.max())
    ylo, yhi = float(np.nanmin(yall)), float(np.nanmax(yall))
    fx, fy = _scaler(xlo, xhi, 50, width - 20), _scaler(ylo, yhi, height - 40, 26)
    parts = _frame(width, height, title, xlabel, ylabel, xlo, xhi, ylo, yhi)
    for i, (name, s) in enumerate(series.items()):
        color = _PALETTE[i % len(_PALETTE)]
        x, y = np.asarray(s[0], dtype=float), np.asarray(s[1], dtype=float)
        if len(s) > 2:
            sd = np.asarray(s[2], dtype=float)
            top = [f"{a:.2f},{b:.2f}" for a, b in zip(fx(x), fy(y + sd))]
            bot = [f"{a:.2f},{b:.2f}" for a, b in zip(fx(x[::-1]), fy((y - sd)[::-1]))]
            parts.append(f'<polygon points="{" ".join(top + bot)}" fill="{color}" fill-opacity="0.15" stroke="none"/>')
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(fx(x), fy(y)))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{width - 24}" y="{44 + 14 * i}" text-anchor="end" fill="{color}">{_esc(name)}</text>')
    parts.append("</svg>")
    return "\n".join(parts)


def svg_scatter(groups: dict[str, np.ndarray], title: str = "", xlabel: str = "", ylabel: str = "", width: int = 480, height: int = 480) -> str:
    """Scatter plot; `groups` maps a label to an ``(n, 2)`` array of points."""
    allpts = np.concatenate([np.asarray(g, dtype=float).reshape(-1, 2) for g in groups.values()]) if groups else np.zeros((1, 2))
    xlo, xhi = float(allpts[:, 0].min()), float(allpts[:, 0].max())
    ylo, yhi = float(allpts[:, 1].min()), float(allpts[:, 1].max())
    fx, fy = _scaler(xlo, xhi, 56, width - 26), _scaler(ylo, yhi, height - 46, 32)
    parts = _frame(width, height, title, xlabel, ylabel, xlo, xhi, ylo, yhi)
    for i, (name, pts) in enumerate(groups.items()):
        color = _PALETTE[i % len(_PALETTE)]
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        for a, b in zip(fx(pts[:, 0]), fy(pts[:, 1])):
            parts.append(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="2.5" fill="{color}" fill-opacity="0.7"/>')
        parts.append(f'<text x="{width - 30}" y="{48 + 14 * i}" text-anchor="end" fill="{color}">{_esc(name)}</text>')
    parts.append("</svg>")
    return "\n".join(parts)


def simplex_xy(weights: np.ndarray) -> np.ndarray:
    """2-d coordinates for plotting 3-objective weights in a triangle (2 objectives: w_0 on a line)."""
    weights = np.atleast_2d(weights)
    if weights.shape[1] == 2:
        return np.stack([weights[:, 0], np.zeros(len(weights))], axis=1)
    return np.stack([weights[:, 1] + 0.5 * weights[:, 2], weights[:, 2] * math.sqrt(3) / 2], axis=1)


def aggregate_dir(directory, window: int = 200, last_k: int | None = None) -> CurveTable:
    """Aggregate ``runs.csv`` in `directory`; writes curves.csv, summary.csv and two SVG charts."""
    d = Path(directory)
    logs = read_logs(d / "runs.csv")
    if not logs:
        raise ValueError(f"no episodes in {d / 'runs.csv'}")
    table = smooth_and_aggregate(logs, window, last_k)
    table.write_csv(d / "curves.csv")
    with open(d / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["runs", "episodes", "mean_regret", "mean_regret_std", "last_k", "last_k_mean_regret"])
        w.writerow(
            [len(logs), sum(len(l.rows) for l in logs), repr(table.mean_delta), repr(table.mean_delta_std), table.last_k or "", "" if table.last_mean_delta is None else repr(table.last_mean_delta)]
        )
    (d / "regret.svg").write_text(
        svg_lines({"regret": (table.steps, table.mean, table.std)}, f"Episodic regret (window {window})", "step", "regret")
    )
    (d / "cumulative.svg").write_text(
        svg_lines({"cumulative regret": (table.steps, table.cum_mean, table.cum_std)}, "Cumulative regret", "step", "regret")
    )
    return table


__all__ = [
    "ConfigError",
    "CurveTable",
    "EnvSpec",
    "ExperimentConfig",
    "Oracle",
    "RunLog",
    "RunSpec",
    "ScheduleSpec",
    "aggregate_dir",
    "dump_config",
    "load_config",
    "log_header",
    "make_env",
    "mean_regret",
    "moving_average",
    "parse_config",
    "read_logs",
    "run_experiment",
    "run_many",
    "simplex_xy",
    "smooth_and_aggregate",
    "svg_lines",
    "svg_scatter",
    "with_overrides",
    "write_logs",
]
