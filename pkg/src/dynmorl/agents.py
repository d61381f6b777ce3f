"""Dynamic-weights DQN agents.

=========  ==========================================================
mo         one vector-output network trained on the active weight only
cn         weight-conditioned network, loss on the active weight plus a
           weight drawn from the history
cn-active  conditioned network, active-weight term only
cn-uvfa    conditioned network, history-sampled term only
uvfa       conditioned network with a scalar output (scalarized reward)
mn         mo plus a policy set that is stored / re-used on weight changes
naive      one scalar network per objective, scalarized at action time
=========  ==========================================================

All targets are double-DQN: the online network picks the next action, the
target network supplies its value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .momath import PolicyEntry, best_policy_for, is_improvement, prune_redundant
from .net import DuelingQ, NetSpec, QNetwork
from .replay import Batch, ReplayBuffer

AGENT_KINDS = ("mo", "cn", "cn-active", "cn-uvfa", "uvfa", "mn", "naive")
CN_MODES = ("cn", "active", "uvfa")


@dataclass(frozen=True)
class AgentConfig:
    kind: str = "cn"
    gamma: float = 0.95
    batch_size: int = 16
    eps_start: float = 0.1
    eps_end: float = 0.01
    eps_steps: int = 10_000
    target_sync: int = 150
    lr: float = 0.02
    momentum: float = 0.9
    hidden: tuple[int, ...] = (64, 64)
    stream_hidden: int = 64
    loss: str | None = None  # None picks the agent's default
    buffer_size: int = 10_000
    der: bool = False
    alpha: float = 2.0
    priority_eps: float = 0.01
    kappa: float = 0.0
    eval_episodes: int = 5

    def __post_init__(self):
        if self.kind not in AGENT_KINDS:
            raise ValueError(f"unknown agent kind {self.kind!r}")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must lie in (0, 1]")
        for e in (self.eps_start, self.eps_end):
            if not 0.0 <= e <= 1.0:
                raise ValueError("epsilon must lie in [0, 1]")
        if self.batch_size < 1 or self.buffer_size < 2 or self.target_sync < 1:
            raise ValueError("batch_size, buffer_size and target_sync must be positive")
        if self.loss not in (None, "abs", "sq"):
            raise ValueError("loss must be 'abs' or 'sq'")

    @classmethod
    def minecart(cls, **kw) -> "AgentConfig":
        base = dict(gamma=0.98, batch_size=64, eps_start=1.0, eps_end=0.05, eps_steps=100_000, buffer_size=100_000)
        return cls(**{**base, **kw})

    @classmethod
    def dst(cls, **kw) -> "AgentConfig":
        return cls(**kw)


def linear_epsilon(step: int, start: float, end: float, steps: int) -> float:
    if steps <= 0 or step >= steps:
        return end
    return start + (end - start) * step / steps


def select_action(q, w, epsilon: float, rng: np.random.Generator) -> int:
    """Epsilon-greedy on ``q @ w``; q is ``(|A|, K)`` or ``(|A|,)`` for scalar Q.

    np.argmax returns the first maximum, so ties go to the lowest action id.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must lie in [0, 1]")
    q = np.asarray(q, dtype=float)
    if epsilon > 0 and rng.random() < epsilon:
        return int(rng.integers(q.shape[0]))
    scores = q if q.ndim == 1 else q @ np.asarray(w, dtype=float)
    return int(np.argmax(scores))


# -- targets ---------------------------------------------------------------


def double_dqn_targets(model: DuelingQ, batch: Batch, gamma: float, w_select, w_input=None, rewards=None) -> np.ndarray:
    """``y = r + gamma * Q_target(s', argmax_a Q_online(s', a) . w_select)``; terminal gives ``y = r``.

    `w_select` is ``(B, K)`` (or broadcastable); `w_input` is fed to
    conditioned networks.  `rewards` overrides the batch rewards (``(B, K)``).
    """
    r = batch.rewards if rewards is None else rewards
    q_on = model.online.forward(batch.next_obs, w_input)
    w_sel = np.broadcast_to(np.asarray(w_select, dtype=float), (len(batch), q_on.shape[2]))
    a_star = np.argmax(np.einsum("bak,bk->ba", q_on, w_sel), axis=1)
    q_next = model.target.forward(batch.next_obs, w_input)[np.arange(len(batch)), a_star]
    return r + gamma * (~batch.terminals)[:, None] * q_next


def mo_train_step(model: DuelingQ, batch: Batch, w_t, gamma: float, loss: str = "abs"):
    """Returns ``(loss, td)`` with td the scalarized TD error on `w_t`."""
    w_t = np.asarray(w_t, dtype=float)
    y = double_dqn_targets(model, batch, gamma, w_t)
    value, err = model.step(batch.obs, batch.actions, y, None, loss)
    return value, err @ w_t


def cn_train_step(model: DuelingQ, batch: Batch, w_t, history, rng: np.random.Generator, gamma: float, mode: str = "cn", loss: str = "abs"):
    """Conditioned-network update. Returns ``(loss, td_active, td_sampled)``.

    One history weight per transition is always drawn from `rng`, whatever
    the mode, so all three variants consume random numbers identically.
    The two halves are differentiated separately and averaged, which makes
    cn with a single-weight history bit-identical to the active variant.
    """
    if mode not in CN_MODES:
        raise ValueError(f"mode must be one of {CN_MODES}")
    if len(history) == 0:
        raise ValueError("weight history is empty")
    hist = np.asarray(history, dtype=float)
    B = len(batch)
    w_j = hist[rng.integers(len(hist), size=B)]
    w_a = np.broadcast_to(np.asarray(w_t, dtype=float), w_j.shape)

    def half(W):
        y = double_dqn_targets(model, batch, gamma, W, W)
        value, grads, err = model.online.loss_and_grad(batch.obs, batch.actions, y, W, loss)
        return value, grads, np.einsum("bk,bk->b", err, W)

    if mode == "active":
        value, grads, td_a = half(w_a)
        model.opt.apply(model.online, grads)
        return value, td_a, None
    if mode == "uvfa":
        value, grads, td_j = half(w_j)
        model.opt.apply(model.online, grads)
        return value, td_j, None
    v_a, g_a, td_a = half(w_a)
    v_j, g_j, td_j = half(w_j)
    grads = {k: 0.5 * (g_a[k] + g_j[k]) for k in g_a}
    model.opt.apply(model.online, grads)
    return 0.5 * (v_a + v_j), td_a, td_j


def uvfa_train_step(model: DuelingQ, batch: Batch, history, rng: np.random.Generator, gamma: float, loss: str = "abs"):
    """Scalar conditioned network on scalarized rewards ``r . w_j``. Returns ``(loss, td)``."""
    if len(history) == 0:
        raise ValueError("weight history is empty")
    hist = np.asarray(history, dtype=float)
    w_j = hist[rng.integers(len(hist), size=len(batch))]
    r = np.einsum("bk,bk->b", batch.rewards, w_j)[:, None]
    y = double_dqn_targets(model, batch, gamma, np.ones(1), w_j, rewards=r)
    value, err = model.step(batch.obs, batch.actions, y, w_j, loss)
    return value, err[:, 0]


def naive_train_step(models: list[DuelingQ], batch: Batch, gamma: float, loss: str = "abs"):
    """Each scalar network learns its own reward component. Returns ``(mean loss, mean |td|)``."""
    losses, tds = [], []
    for n, model in enumerate(models):
        r = batch.rewards[:, n : n + 1]
        y = double_dqn_targets(model, batch, gamma, np.ones(1), rewards=r)
        value, err = model.step(batch.obs, batch.actions, y, None, loss)
        losses.append(value)
        tds.append(np.abs(err[:, 0]))
    return float(np.mean(losses)), np.mean(tds, axis=0)


def naive_select(models: list[QNetwork], obs, w, epsilon: float = 0.0, rng=None) -> int:
    q = np.stack([m.forward(obs)[0, :, 0] for m in models], axis=1)
    return select_action(q, w, epsilon, rng if rng is not None else np.random.default_rng())


# -- agents ----------------------------------------------------------------


class Agent:
    """Common loop plumbing: exploration, replay, target sync, weight history."""

    default_loss = "abs"

    def __init__(self, cfg: AgentConfig, obs_dim: int, n_actions: int, n_objectives: int, seed=None):
        self.cfg = cfg
        self.obs_dim = obs_dim
        self.n_actions = n_actions
        self.n_objectives = n_objectives
        ss = np.random.SeedSequence(seed)
        net_seed, act_seed, buf_seed, w_seed = ss.spawn(4)
        self.rng = np.random.default_rng(act_seed)
        self.buffer_rng = np.random.default_rng(buf_seed)
        self.weight_rng = np.random.default_rng(w_seed)
        self.loss = cfg.loss or self.default_loss
        half = cfg.buffer_size // 2 if cfg.der else cfg.buffer_size
        self.buffer = ReplayBuffer(
            half,
            obs_dim,
            n_objectives,
            diverse_capacity=cfg.buffer_size - half if cfg.der else 0,
            gamma=cfg.gamma,
            alpha=cfg.alpha,
            eps=cfg.priority_eps,
        )
        self.steps = 0
        self.updates = 0
        self.history: list[np.ndarray] = []
        self._history_keys: set[tuple] = set()
        self.w: np.ndarray | None = None
        self._build(np.random.default_rng(net_seed))

    def _build(self, rng):
        raise NotImplementedError

    def _spec(self, n_outputs: int, weight_dim: int = 0) -> NetSpec:
        return NetSpec(self.obs_dim, self.n_actions, n_outputs, tuple(self.cfg.hidden), self.cfg.stream_hidden, weight_dim)

    def _model(self, spec: NetSpec, rng) -> DuelingQ:
        return DuelingQ(spec, rng, self.cfg.lr, self.cfg.momentum)

    @property
    def epsilon(self) -> float:
        c = self.cfg
        return linear_epsilon(self.steps, c.eps_start, c.eps_end, c.eps_steps)

    def set_weight(self, w) -> None:
        """Make `w` the active weight and record it in the unique history."""
        w = np.asarray(w, dtype=float)
        self.w = w
        key = tuple(w.tolist())
        if key not in self._history_keys:
            self._history_keys.add(key)
            self.history.append(w.copy())

    def history_matrix(self) -> np.ndarray:
        """The weight history as a ``(len, K)`` array view (amortized growth)."""
        buf = getattr(self, "_history_buf", None)
        n = len(self.history)
        if buf is None or len(buf) < n:
            grown = np.empty((max(16, 2 * n), len(self.history[0])))
            done = 0 if buf is None else self._history_rows
            if done:
                grown[:done] = buf[:done]
            buf = self._history_buf = grown
            self._history_rows = done
        for i in range(self._history_rows, n):
            buf[i] = self.history[i]
        self._history_rows = n
        return buf[:n]

    def q_values(self, obs, w) -> np.ndarray:
        """Q rows for one observation: ``(|A|, K)`` or ``(|A|,)`` for scalar agents."""
        raise NotImplementedError

    def act(self, obs, greedy: bool = False) -> int:
        eps = 0.0 if greedy else self.epsilon
        if eps > 0 and self.rng.random() < eps:
            return int(self.rng.integers(self.n_actions))
        return select_action(self.q_values(obs, self.w), self.w, 0.0, self.rng)

    def greedy_action(self, obs, w) -> int:
        return select_action(self.q_values(obs, w), w, 0.0, self.rng)

    def observe(self, obs, action, reward, next_obs, terminal) -> float | None:
        """Store a transition, train on one batch and sync the target when due."""
        self.buffer.push(obs, action, reward, next_obs, terminal)
        self.steps += 1
        loss = None
        if len(self.buffer) >= self.cfg.batch_size:
            batch = self.buffer.sample(self.cfg.batch_size, self.buffer_rng)
            loss = self.train(batch)
            self.updates += 1
        if self.steps % self.cfg.target_sync == 0:
            self.sync_target()
        return loss

    def train(self, batch: Batch) -> float:
        raise NotImplementedError

    def sync_target(self) -> None:
        raise NotImplementedError

    def on_weight_change(self, w_old, w_new, eval_env=None) -> None:
        self.set_weight(w_new)


class MOAgent(Agent):
    def _build(self, rng):
        self.model = self._model(self._spec(self.n_objectives), rng)

    def q_values(self, obs, w):
        return self.model.online.forward(obs)[0]

    def train(self, batch):
        loss, td = mo_train_step(self.model, batch, self.w, self.cfg.gamma, self.loss)
        self.buffer.update_priorities(batch.indices, td)
        return loss

    def sync_target(self):
        self.model.sync_target()


class CNAgent(Agent):
    def __init__(self, cfg, obs_dim, n_actions, n_objectives, seed=None, mode: str = "cn"):
        if mode not in CN_MODES:
            raise ValueError(f"mode must be one of {CN_MODES}")
        self.mode = mode
        super().__init__(cfg, obs_dim, n_actions, n_objectives, seed)

    def _build(self, rng):
        self.model = self._model(self._spec(self.n_objectives, self.n_objectives), rng)

    def q_values(self, obs, w):
        return self.model.online.forward(obs, w)[0]

    def train(self, batch):
        loss, td_a, td_j = cn_train_step(self.model, batch, self.w, self.history, self.weight_rng, self.cfg.gamma, self.mode, self.loss)
        self.buffer.update_priorities(batch.indices, td_a, td_j)
        return loss

    def sync_target(self):
        self.model.sync_target()


class UVFAAgent(Agent):
    def _build(self, rng):
        self.model = self._model(self._spec(1, self.n_objectives), rng)

    def q_values(self, obs, w):
        return self.model.online.forward(obs, w)[0, :, 0]

    def train(self, batch):
        loss, td = uvfa_train_step(self.model, batch, self.history, self.weight_rng, self.cfg.gamma, self.loss)
        self.buffer.update_priorities(batch.indices, td)
        return loss

    def sync_target(self):
        self.model.sync_target()


class NaiveAgent(Agent):
    def _build(self, rng):
        self.models = [self._model(self._spec(1), rng) for _ in range(self.n_objectives)]

    def q_values(self, obs, w):
        return np.stack([m.online.forward(obs)[0, :, 0] for m in self.models], axis=1)

    def train(self, batch):
        loss, td = naive_train_step(self.models, batch, self.cfg.gamma, self.loss)
        self.buffer.update_priorities(batch.indices, td)
        return loss

    def sync_target(self):
        for m in self.models:
            m.sync_target()


def evaluate_policy(net: QNetwork, env, w, gamma: float, episodes: int, rng: np.random.Generator) -> np.ndarray:
    """Mean discounted return of the greedy policy of an unconditioned vector network."""
    w = np.asarray(w, dtype=float)
    total = np.zeros(env.n_objectives)
    for _ in range(episodes):
        obs = env.reset(rng)
        disc = 1.0
        for _ in range(env.max_steps):
            a = int(np.argmax(net.forward(obs)[0] @ w))
            obs, r, done, _ = env.step(a)
            total += disc * np.asarray(r)
            disc *= gamma
            if done:
                break
    return total / episodes


class MNAgent(MOAgent):
    """MO agent with a policy set Pi of ``(params, weight, value)`` entries."""

    def _build(self, rng):
        super()._build(rng)
        self.policies: list[PolicyEntry] = []
        self._stamp = 0
        self.eval_rng = np.random.default_rng(rng.integers(2**63))

    def on_weight_change(self, w_old, w_new, eval_env=None) -> None:
        mn_on_weight_change(self, w_old, w_new, eval_env)


def mn_on_weight_change(agent: MNAgent, w_old, w_new, eval_env) -> None:
    """Store the outgoing policy if it improves Pi, then switch to Pi's best policy for `w_new`.

    Deterministic environments need a single evaluation episode.
    """
    cfg = agent.cfg
    w_old = np.asarray(w_old, dtype=float)
    if eval_env is not None:
        episodes = 1 if getattr(eval_env, "deterministic", False) else cfg.eval_episodes
        value = evaluate_policy(agent.model.online, eval_env, w_old, cfg.gamma, episodes, agent.eval_rng)
        agent.set_weight(w_old)
        ws = agent.history_matrix()
        if is_improvement(value, agent.policies, ws, cfg.kappa):
            agent._stamp += 1
            agent.policies.append(PolicyEntry(agent.model.online.copy(), w_old.copy(), value, agent._stamp))
            agent.policies = prune_redundant(agent.policies, ws, cfg.kappa)
    agent.set_weight(w_new)
    if agent.policies:
        agent.model.load_policy(best_policy_for(agent.policies, w_new).params)
        agent.model.opt.reset()


def make_agent(cfg: AgentConfig, obs_dim: int, n_actions: int, n_objectives: int, seed=None) -> Agent:
    kind = cfg.kind
    if kind == "mo":
        return MOAgent(cfg, obs_dim, n_actions, n_objectives, seed)
    if kind == "mn":
        return MNAgent(cfg, obs_dim, n_actions, n_objectives, seed)
    if kind == "naive":
        return NaiveAgent(cfg, obs_dim, n_actions, n_objectives, seed)
    if kind == "uvfa":
        return UVFAAgent(cfg, obs_dim, n_actions, n_objectives, seed)
    mode = {"cn": "cn", "cn-active": "active", "cn-uvfa": "uvfa"}[kind]
    return CNAgent(cfg, obs_dim, n_actions, n_objectives, seed, mode)


__all__ = [
    "AGENT_KINDS",
    "Agent",
    "AgentConfig",
    "CNAgent",
    "MNAgent",
    "MOAgent",
    "NaiveAgent",
    "UVFAAgent",
    "cn_train_step",
    "double_dqn_targets",
    "evaluate_policy",
    "linear_epsilon",
    "make_agent",
    "mn_on_weight_change",
    "mo_train_step",
    "naive_select",
    "naive_train_step",
    "select_action",
    "uvfa_train_step",
]
