"""Minimal dense Q-network with dueling heads, written directly in numpy.

Architecture: 4 inputs -> one rectified hidden layer (20 units) -> a scalar
state-value head and an action-advantage head. Q-values use the identifiable
dueling aggregation Q(s,a) = V(s) + A(s,a) - mean_a' A(s,a'). Forward and
backward passes are hand-coded; the backward pass is checked against central
finite differences in the test suite.
"""

from __future__ import annotations

import struct

import numpy as np

_MAGIC = b"QNET"
_VERSION = 1


class DuelingNet:
    """Dueling MLP; parameters are float64 numpy arrays.

    Initialization draws every weight and bias of a layer uniformly from
    [-1/sqrt(fan_in), +1/sqrt(fan_in)], from a generator seeded with ``seed``.
    """

    def __init__(self, n_actions: int, n_inputs: int = 4, n_hidden: int = 20, seed: int = 0):
        self.n_actions = int(n_actions)
        self.n_inputs = int(n_inputs)
        self.n_hidden = int(n_hidden)
        self.seed = int(seed)
        rng = np.random.default_rng(self.seed)

        def layer(fan_in, *shape):
            bound = 1.0 / np.sqrt(fan_in)
            return rng.uniform(-bound, bound, size=shape)

        self.w1 = layer(n_inputs, n_inputs, n_hidden)
        self.b1 = layer(n_inputs, n_hidden)
        self.wv = layer(n_hidden, n_hidden, 1)
        self.bv = layer(n_hidden, 1)
        self.wa = layer(n_hidden, n_hidden, n_actions)
        self.ba = layer(n_hidden, n_actions)

    # -- forward ----------------------------------------------------------

    def _forward_full(self, x: np.ndarray):
        """Batch forward returning intermediates needed by backprop."""
        z1 = x @ self.w1 + self.b1
        h = np.maximum(z1, 0.0)
        v = h @ self.wv + self.bv
        a = h @ self.wa + self.ba
        q = v + a - a.sum(axis=1, keepdims=True) / self.n_actions
        return z1, h, q

    def forward(self, state) -> np.ndarray:
        """Q-vector for a single state or a batch of states."""
        x = np.asarray(state, dtype=np.float64)
        single = x.ndim == 1
        if single:
            x = x[None, :]
        if x.shape[1] != self.n_inputs:
            raise ValueError(f"expected state width {self.n_inputs}, got {x.shape[1]}")
        q = self._forward_full(x)[2]
        return q[0] if single else q

    # -- parameter plumbing -------------------------------------------------

    def parameters(self) -> list[np.ndarray]:
        return [self.w1, self.b1, self.wv, self.bv, self.wa, self.ba]

    def same_architecture(self, other: "DuelingNet") -> bool:
        return (
            self.n_inputs == other.n_inputs
            and self.n_hidden == other.n_hidden
            and self.n_actions == other.n_actions
        )


def forward(net: DuelingNet, state) -> np.ndarray:
    return net.forward(state)


def backward_batch(net: DuelingNet, states, actions, targets, weights):
    """Gradients of the weighted MSE over a batch.

    Loss = mean_i weights[i] * (targets[i] - Q(states[i], actions[i]))^2.
    Returns (loss, gradients, td_errors) where td_errors[i] = targets[i] - Q_i
    and gradients aligns with ``net.parameters()``.
    """
    x = np.asarray(states, dtype=np.float64)
    acts = np.asarray(actions, dtype=np.intp)
    t = np.asarray(targets, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    if np.any(w < 0):
        raise ValueError("importance weights must be >= 0")
    if np.any((acts < 0) | (acts >= net.n_actions)):
        raise ValueError("action index out of range")
    batch = x.shape[0]

    z1, h, q = net._forward_full(x)
    rows = np.arange(batch)
    delta = t - q[rows, acts]
    loss = float(np.mean(w * delta**2))

    g_q = np.zeros_like(q)
    g_q[rows, acts] = -2.0 * w * delta / batch
    g_v = g_q.sum(axis=1, keepdims=True)
    g_a = g_q - g_v / net.n_actions

    g_wv = h.T @ g_v
    g_bv = g_v.sum(axis=0)
    g_wa = h.T @ g_a
    g_ba = g_a.sum(axis=0)
    g_h = g_v @ net.wv.T + g_a @ net.wa.T
    g_z1 = g_h * (z1 > 0.0)
    g_w1 = x.T @ g_z1
    g_b1 = g_z1.sum(axis=0)
    return loss, [g_w1, g_b1, g_wv, g_bv, g_wa, g_ba], delta


def backward(net: DuelingNet, state, action: int, target: float, weight: float):
    """Gradients of weight * (target - Q(state, action))^2 for one sample."""
    _, grads, _ = backward_batch(net, [state], [action], [target], [weight])
    return grads


def sgd_step(net: DuelingNet, grads, lr: float, velocity=None, momentum: float = 0.0):
    """Gradient-descent update, optionally with momentum.

    Returns the velocity list (None while momentum is 0). Raises if the
    update produces a non-finite parameter.
    """
    params = net.parameters()
    if len(grads) != len(params):
        raise ValueError("gradient list does not match parameter list")
    for p, g in zip(params, grads):
        if p.shape != np.shape(g):
            raise ValueError(f"gradient shape {np.shape(g)} != parameter shape {p.shape}")
    if momentum != 0.0:
        if velocity is None:
            velocity = [np.zeros_like(p) for p in params]
        for p, g, v in zip(params, grads, velocity):
            v *= momentum
            v += g
            p -= lr * v
    else:
        for p, g in zip(params, grads):
            p -= lr * g
    # a single non-finite entry makes the total non-finite (inf-inf -> nan)
    total = 0.0
    for p in params:
        total += float(p.sum())
    if not np.isfinite(total):
        raise FloatingPointError("network parameters became non-finite")
    return velocity


def copy_into(source: DuelingNet, target: DuelingNet) -> None:
    """Copy all parameters of ``source`` into ``target`` (deep copy)."""
    if not source.same_architecture(target):
        raise ValueError("networks have different architectures")
    for src, dst in zip(source.parameters(), target.parameters()):
        np.copyto(dst, src)


# -- serialization ----------------------------------------------------------
#
# Byte layout (little-endian):
#   bytes 0-3   magic "QNET"
#   bytes 4-7   uint32 format version (1)
#   bytes 8-19  uint32 n_inputs, uint32 n_hidden, uint32 n_actions
#   bytes 20-27 uint64 init seed
#   then float64 parameters, C order: w1, b1, wv, bv, wa, ba


def save_weights(net: DuelingNet, path) -> None:
    header = _MAGIC + struct.pack(
        "<IIIIQ", _VERSION, net.n_inputs, net.n_hidden, net.n_actions, net.seed & 0xFFFFFFFFFFFFFFFF
    )
    body = b"".join(np.ascontiguousarray(p, dtype="<f8").tobytes() for p in net.parameters())
    with open(path, "wb") as fh:
        fh.write(header + body)


def load_weights(path) -> DuelingNet:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != _MAGIC:
        raise ValueError(f"{path}: not a network snapshot")
    version, n_in, n_hidden, n_actions, seed = struct.unpack("<IIIIQ", blob[4:28])
    if version != _VERSION:
        raise ValueError(f"{path}: unsupported snapshot version {version}")
    net = DuelingNet(n_actions=n_actions, n_inputs=n_in, n_hidden=n_hidden, seed=seed)
    offset = 28
    for p in net.parameters():
        nbytes = p.size * 8
        flat = np.frombuffer(blob[offset : offset + nbytes], dtype="<f8")
        if flat.size != p.size:
            raise ValueError(f"{path}: truncated snapshot")
        np.copyto(p, flat.reshape(p.shape))
        offset += nbytes
    if offset != len(blob):
        raise ValueError(f"{path}: trailing bytes in snapshot")
    return net
