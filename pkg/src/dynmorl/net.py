"""Dense dueling Q-network with hand-written backprop.

Layout::

    obs -> dense stack (ReLU) -> f
    z = f              (plain)
    z = [f, w]         (conditioned on a weight vector)
    z -> value hidden (ReLU) -> V        shape (K,)
    z -> advantage hidden (ReLU) -> A    shape (|A|, K)
    Q = V + A - mean_a A                 per output column

K is the number of objectives (1 for scalar networks).  Everything works
on batches: observations ``(B, obs_dim)`` give Q of shape ``(B, |A|, K)``.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

LOSSES = ("abs", "sq")
_MAGIC = b"DMQN"


@dataclass(frozen=True)
class NetSpec:
    obs_dim: int
    n_actions: int
    n_outputs: int
    hidden: tuple[int, ...] = (64, 64)
    stream_hidden: int = 64
    weight_dim: int = 0  # >0 means the weight vector is concatenated after the feature stack

    @property
    def conditioned(self) -> bool:
        return self.weight_dim > 0


def _layer_shapes(spec: NetSpec) -> list[tuple[str, tuple[int, ...]]]:
    shapes = []
    width = spec.obs_dim
    for i, h in enumerate(spec.hidden):
        shapes += [(f"W{i}", (width, h)), (f"b{i}", (h,))]
        width = h
    width += spec.weight_dim
    sh = spec.stream_hidden
    shapes += [("Wvh", (width, sh)), ("bvh", (sh,)), ("Wv", (sh, spec.n_outputs)), ("bv", (spec.n_outputs,))]
    shapes += [("Wah", (width, sh)), ("bah", (sh,))]
    shapes += [("Wa", (sh, spec.n_actions * spec.n_outputs)), ("ba", (spec.n_actions * spec.n_outputs,))]
    return shapes


class QNetwork:
    """Parameters plus forward/backward passes; optimizer state lives in `Nesterov`."""

    def __init__(self, spec: NetSpec, rng: np.random.Generator | int | None = None):
        self.spec = spec
        rng = np.random.default_rng(rng)
        self.params: dict[str, np.ndarray] = {}
        for name, shape in _layer_shapes(spec):
            if name.startswith("W"):
                # He-uniform on fan-in
                bound = np.sqrt(6.0 / shape[0])
                self.params[name] = rng.uniform(-bound, bound, size=shape)
            else:
                self.params[name] = np.zeros(shape)

    def copy(self) -> "QNetwork":
        other = QNetwork.__new__(QNetwork)
        other.spec = self.spec
        other.params = {k: v.copy() for k, v in self.params.items()}
        return other

    def load_from(self, other: "QNetwork") -> None:
        if other.spec != self.spec:
            raise ValueError("network specs differ")
        for k, v in other.params.items():
            np.copyto(self.params[k], v)

    # -- forward / backward ----------------------------------------------

    def _check(self, obs, w):
        obs = np.atleast_2d(np.asarray(obs, dtype=float))
        if obs.shape[1] != self.spec.obs_dim:
            raise ValueError(f"observation width {obs.shape[1]} != {self.spec.obs_dim}")
        if self.spec.conditioned:
            if w is None:
                raise ValueError("conditioned network needs a weight input")
            w = np.asarray(w, dtype=float)
            w = np.broadcast_to(w, (obs.shape[0], w.shape[-1]))
            if w.shape[1] != self.spec.weight_dim:
                raise ValueError(f"weight width {w.shape[1]} != {self.spec.weight_dim}")
        elif w is not None:
            raise ValueError("unconditioned network takes no weight input")
        return obs, w

    def forward(self, obs, w=None, keep: bool = False):
        """Q values ``(B, |A|, K)``; with ``keep`` also returns the activation cache."""
        obs, w = self._check(obs, w)
        p = self.params
        acts = [obs]
        h = obs
        for i in range(len(self.spec.hidden)):
            h = np.maximum(h @ p[f"W{i}"] + p[f"b{i}"], 0.0)
            acts.append(h)
        z = np.concatenate([h, w], axis=1) if w is not None else h
        hv = np.maximum(z @ p["Wvh"] + p["bvh"], 0.0)
        ha = np.maximum(z @ p["Wah"] + p["bah"], 0.0)
        v = hv @ p["Wv"] + p["bv"]
        a = (ha @ p["Wa"] + p["ba"]).reshape(len(obs), self.spec.n_actions, self.spec.n_outputs)
        q = v[:, None, :] + (a - a.mean(axis=1, keepdims=True))
        if keep:
            return q, (acts, z, hv, ha)
        return q

    def value_stream(self, obs, w=None) -> np.ndarray:
        obs, w = self._check(obs, w)
        p = self.params
        h = obs
        for i in range(len(self.spec.hidden)):
            h = np.maximum(h @ p[f"W{i}"] + p[f"b{i}"], 0.0)
        z = np.concatenate([h, w], axis=1) if w is not None else h
        return np.maximum(z @ p["Wvh"] + p["bvh"], 0.0) @ p["Wv"] + p["bv"]

    def loss_and_grad(self, obs, actions, targets, w=None, loss: str = "abs"):
        """Loss on the taken actions' rows and its gradient.

        The loss is the mean over batch rows and output columns of
        ``|y - Q|`` (``abs``) or ``(y - Q)**2`` (``sq``).  Returns
        ``(loss, grads, errors)`` where ``errors = y - Q`` has shape ``(B, K)``.
        """
        if loss not in LOSSES:
            raise ValueError(f"loss must be one of {LOSSES}")
        targets = np.asarray(targets, dtype=float)
        if not np.all(np.isfinite(targets)):
            raise ValueError("non-finite targets")
        q, (acts, z, hv, ha) = self.forward(obs, w, keep=True)
        B, nA, K = q.shape
        targets = targets.reshape(B, K)
        actions = np.asarray(actions, dtype=np.int64)
        rows = np.arange(B)
        err = targets - q[rows, actions]
        scale = 1.0 / (B * K)
        if loss == "abs":
            value = float(np.abs(err).sum() * scale)
            dq = -np.sign(err) * scale
        else:
            value = float((err**2).sum() * scale)
            dq = -2.0 * err * scale
        p = self.params
        g: dict[str, np.ndarray] = {}
        # dueling combination: dQ/dV = 1, dQ_a/dA_a' = [a == a'] - 1/|A|
        dv = dq
        da = np.repeat(-dq[:, None, :] / nA, nA, axis=1)
        da[rows, actions] += dq
        da = da.reshape(B, nA * K)
        g["Wv"] = hv.T @ dv
        g["bv"] = dv.sum(0)
        g["Wa"] = ha.T @ da
        g["ba"] = da.sum(0)
        dhv = (dv @ p["Wv"].T) * (hv > 0)
        dha = (da @ p["Wa"].T) * (ha > 0)
        g["Wvh"] = z.T @ dhv
        g["bvh"] = dhv.sum(0)
        g["Wah"] = z.T @ dha
        g["bah"] = dha.sum(0)
        dz = dhv @ p["Wvh"].T + dha @ p["Wah"].T
        dh = dz[:, : dz.shape[1] - self.spec.weight_dim]
        for i in reversed(range(len(self.spec.hidden))):
            dh = dh * (acts[i + 1] > 0)
            g[f"W{i}"] = acts[i].T @ dh
            g[f"b{i}"] = dh.sum(0)
            if i:
                dh = dh @ p[f"W{i}"].T
        return value, g, err

    # -- persistence -------------------------------------------------------

    def save(self, path) -> None:
        """Flat binary: magic, u32 header length, JSON header, float64 little-endian data.

        The header holds the spec and the ordered ``(name, shape)`` list.
        """
        header = json.dumps(
            {
                "spec": {**self.spec.__dict__, "hidden": list(self.spec.hidden)},
                "layout": [[n, list(s)] for n, s in _layer_shapes(self.spec)],
            }
        ).encode()
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(struct.pack("<I", len(header)))
            fh.write(header)
            for name, _ in _layer_shapes(self.spec):
                fh.write(self.params[name].astype("<f8").tobytes())

    @classmethod
    def load(cls, path) -> "QNetwork":
        data = Path(path).read_bytes()
        if data[:4] != _MAGIC:
            raise ValueError("not a network parameter file")
        (n,) = struct.unpack("<I", data[4:8])
        header = json.loads(data[8 : 8 + n])
        s = header["spec"]
        spec = NetSpec(**{**s, "hidden": tuple(s["hidden"])})
        net = cls.__new__(cls)
        net.spec = spec
        net.params = {}
        off = 8 + n
        for name, shape in header["layout"]:
            size = int(np.prod(shape)) * 8
            net.params[name] = np.frombuffer(data[off : off + size], dtype="<f8").reshape(shape).astype(float)
            off += size
        if off != len(data):
            raise ValueError("trailing bytes in parameter file")
        return net


class Nesterov:
    """SGD with Nesterov momentum: ``v = mu*v + g``, ``p -= lr*(g + mu*v)``."""

    def __init__(self, net: QNetwork, lr: float = 0.02, momentum: float = 0.9):
        self.lr = lr
        self.momentum = momentum
        self.slots = {k: np.zeros_like(v) for k, v in net.params.items()}

    def reset(self) -> None:
        for v in self.slots.values():
            v.fill(0.0)

    def apply(self, net: QNetwork, grads: dict[str, np.ndarray]) -> None:
        mu, lr = self.momentum, self.lr
        for k, g in grads.items():
            if g.shape != net.params[k].shape:
                raise ValueError(f"gradient shape mismatch for {k}")
            v = self.slots[k]
            v *= mu
            v += g
            p = net.params[k]
            p -= lr * (g + mu * v)
            if not math.isfinite(float(p.sum())):
                raise FloatingPointError(f"non-finite parameters in {k} after update")


class DuelingQ:
    """Online network, target network and optimizer bundled together."""

    def __init__(self, spec: NetSpec, rng=None, lr: float = 0.02, momentum: float = 0.9):
        self.online = QNetwork(spec, rng)
        self.target = self.online.copy()
        self.opt = Nesterov(self.online, lr, momentum)

    @property
    def spec(self) -> NetSpec:
        return self.online.spec

    def sync_target(self) -> None:
        self.target.load_from(self.online)

    def step(self, obs, actions, targets, w=None, loss: str = "abs"):
        value, grads, err = self.online.loss_and_grad(obs, actions, targets, w, loss)
        self.opt.apply(self.online, grads)
        return value, err

    def load_policy(self, net: QNetwork) -> None:
        """Full re-use: copy `net` into both online and target networks."""
        self.online.load_from(net)
        self.target.load_from(net)
