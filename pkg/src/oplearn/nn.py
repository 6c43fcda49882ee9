"""Dense feed-forward networks with Tanh hidden layers, trained by Adam.

All arithmetic is float64.  Forward/backward are pure with respect to the
parameters, so batches may be evaluated concurrently against a shared
snapshot; updates happen on a single stream via :func:`adam_step`.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "MLP",
    "AdamState",
    "LrSchedule",
    "mlp_init",
    "mlp_forward",
    "mlp_backward",
    "parameters",
    "set_parameters",
    "adam_init",
    "adam_step",
    "lr_at",
    "save_mlp",
    "load_mlp",
]


@dataclass
class MLP:
    """Fully connected net: Tanh on hidden layers, identity on the output."""

    layer_dims: list[int]
    weights: list[np.ndarray]  # weights[i] has shape (layer_dims[i], layer_dims[i+1])
    biases: list[np.ndarray]

    def __post_init__(self):
        dims = self.layer_dims
        if len(dims) < 3:
            raise ValueError(f"need at least one hidden layer, got dims {dims}")
        if any(d <= 0 for d in dims):
            raise ValueError(f"layer dims must be positive, got {dims}")
        if len(self.weights) != len(dims) - 1 or len(self.biases) != len(dims) - 1:
            raise ValueError("one weight matrix and bias vector per layer expected")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (dims[i], dims[i + 1]):
                raise ValueError(
                    f"weight {i} has shape {w.shape}, expected {(dims[i], dims[i + 1])}"
                )
            if b.shape != (dims[i + 1],):
                raise ValueError(f"bias {i} has shape {b.shape}, expected ({dims[i + 1]},)")

    @property
    def input_dim(self) -> int:
        return self.layer_dims[0]

    @property
    def output_dim(self) -> int:
        return self.layer_dims[-1]


def mlp_init(layer_dims: list[int], rng: np.random.Generator) -> MLP:
    """Glorot-uniform weights (bound sqrt(6/(fan_in+fan_out))), zero biases."""
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_dims[:-1], layer_dims[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MLP(list(layer_dims), weights, biases)


def _as_batch(x: np.ndarray, dim: int, what: str) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != dim:
        raise ValueError(f"{what} has shape {np.asarray(x).shape}, expected (*, {dim})")
    return x, single


def _forward_cached(net: MLP, X: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
    """Forward pass keeping post-activation values for the backward pass."""
    acts = [X]
    a = X
    last = len(net.weights) - 1
    for i, (W, b) in enumerate(zip(net.weights, net.biases)):
        z = a @ W + b
        a = z if i == last else np.tanh(z)
        if i != last:
            acts.append(a)
    return a, acts


def mlp_forward(net: MLP, x: np.ndarray) -> np.ndarray:
    """Evaluate the net on a vector of length input_dim (or a batch of them)."""
    X, single = _as_batch(x, net.input_dim, "input")
    out, _ = _forward_cached(net, X)
    return out[0] if single else out


def _backward_from_cache(
    net: MLP, acts: list[np.ndarray], upstream: np.ndarray
) -> list[np.ndarray]:
    grads: list[np.ndarray | None] = [None] * (2 * len(net.weights))
    delta = upstream
    for i in range(len(net.weights) - 1, -1, -1):
        a_prev = acts[i]
        grads[2 * i] = a_prev.T @ delta
        grads[2 * i + 1] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ net.weights[i].T) * (1.0 - a_prev * a_prev)
    return grads  # type: ignore[return-value]


def mlp_backward(net: MLP, x: np.ndarray, upstream: np.ndarray) -> list[np.ndarray]:
    """Parameter gradients of sum(upstream * output) w.r.t. all weights/biases.

    Returned in the canonical flat order ``[W0, b0, W1, b1, ...]`` matching
    :func:`parameters`.
    """
    X, single = _as_batch(x, net.input_dim, "input")
    G, gsingle = _as_batch(upstream, net.output_dim, "upstream")
    if single != gsingle or X.shape[0] != G.shape[0]:
        raise ValueError(
            f"input batch {X.shape[0]} and upstream batch {G.shape[0]} disagree"
        )
    _, acts = _forward_cached(net, X)
    return _backward_from_cache(net, acts, G)


def parameters(net: MLP) -> list[np.ndarray]:
    """Flat parameter list [W0, b0, W1, b1, ...]."""
    out = []
    for W, b in zip(net.weights, net.biases):
        out.extend([W, b])
    return out


def set_parameters(net: MLP, params: list[np.ndarray]) -> None:
    if len(params) != 2 * len(net.weights):
        raise ValueError("parameter count mismatch")
    for i in range(len(net.weights)):
        net.weights[i] = params[2 * i]
        net.biases[i] = params[2 * i + 1]


# -- Adam ------------------------------------------------------------------


@dataclass
class AdamState:
    first_moment: list[np.ndarray]
    second_moment: list[np.ndarray]
    step_count: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


def adam_init(params: list[np.ndarray], **kwargs) -> AdamState:
    return AdamState(
        first_moment=[np.zeros_like(p) for p in params],
        second_moment=[np.zeros_like(p) for p in params],
        **kwargs,
    )


def adam_step(
    params: list[np.ndarray],
    grads: list[np.ndarray],
    state: AdamState,
    lr: float,
) -> tuple[list[np.ndarray], AdamState]:
    """One bias-corrected Adam update.  Pure: inputs are left untouched."""
    if lr <= 0:
        raise ValueError(f"lr must be positive, got {lr}")
    if len(params) != len(grads) or len(params) != len(state.first_moment):
        raise ValueError("params/grads/state length mismatch")
    t = state.step_count + 1
    b1, b2, eps = state.beta1, state.beta2, state.eps
    new_params, new_m, new_v = [], [], []
    for i, (p, g, m, v) in enumerate(
        zip(params, grads, state.first_moment, state.second_moment)
    ):
        if g.shape != p.shape:
            raise ValueError(f"gradient {i} has shape {g.shape}, parameter {p.shape}")
        if not np.all(np.isfinite(g)):
            raise FloatingPointError(f"non-finite gradient in tensor {i}")
        m = b1 * m + (1.0 - b1) * g
        v = b2 * v + (1.0 - b2) * g * g
        m_hat = m / (1.0 - b1**t)
        v_hat = v / (1.0 - b2**t)
        new_params.append(p - lr * m_hat / (np.sqrt(v_hat) + eps))
        new_m.append(m)
        new_v.append(v)
    return new_params, AdamState(new_m, new_v, t, b1, b2, eps)


# -- learning-rate schedule --------------------------------------------------


@dataclass(frozen=True)
class LrSchedule:
    """Step-wise exponential decay: rate gamma applied every step_size iterations."""

    base_lr: float
    step_size: int
    decay_rate: float

    def __post_init__(self):
        if self.base_lr <= 0:
            raise ValueError(f"base_lr must be > 0, got {self.base_lr}")
        if self.step_size < 1:
            raise ValueError(f"step_size must be >= 1, got {self.step_size}")
        if not 0.0 < self.decay_rate <= 1.0:
            raise ValueError(f"decay_rate must be in (0, 1], got {self.decay_rate}")


def lr_at(schedule: LrSchedule, iteration: int) -> float:
    if iteration < 0:
        raise ValueError(f"iteration must be >= 0, got {iteration}")
    return schedule.base_lr * schedule.decay_rate ** (iteration // schedule.step_size)


# -- checkpoint I/O ----------------------------------------------------------
#
# A checkpoint is a directory with manifest.json plus params.bin, a raw blob
# of little-endian float64 tensors at the byte offsets listed in the manifest
# (weights row-major, then biases, per layer).

CHECKPOINT_SCHEMA = 1


def write_checkpoint(path, header: dict, tensors: list[tuple[str, np.ndarray]]) -> None:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    blob = bytearray()
    entries = []
    for name, arr in tensors:
        raw = np.ascontiguousarray(arr, dtype="<f8").tobytes()
        entries.append({"name": name, "shape": list(arr.shape), "offset": len(blob)})
        blob += raw
    manifest = dict(header)
    manifest["schema_version"] = CHECKPOINT_SCHEMA
    manifest["tensors"] = entries
    manifest["blob_bytes"] = len(blob)
    manifest["blob_sha256"] = hashlib.sha256(bytes(blob)).hexdigest()
    (path / "params.bin").write_bytes(bytes(blob))
    (path / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True))


def read_checkpoint(path) -> tuple[dict, dict[str, np.ndarray]]:
    path = Path(path)
    manifest = json.loads((path / "manifest.json").read_text())
    if manifest.get("schema_version") != CHECKPOINT_SCHEMA:
        raise ValueError(
            f"unsupported checkpoint schema_version {manifest.get('schema_version')}"
        )
    blob = (path / "params.bin").read_bytes()
    if len(blob) != manifest["blob_bytes"]:
        raise ValueError(
            f"truncated checkpoint blob: {len(blob)} bytes, expected {manifest['blob_bytes']}"
        )
    if hashlib.sha256(blob).hexdigest() != manifest["blob_sha256"]:
        raise ValueError("checkpoint blob failed its checksum")
    tensors = {}
    for entry in manifest["tensors"]:
        count = int(np.prod(entry["shape"])) if entry["shape"] else 1
        arr = np.frombuffer(blob, dtype="<f8", count=count, offset=entry["offset"])
        tensors[entry["name"]] = arr.reshape(entry["shape"]).astype(float)
    return manifest, tensors


def _mlp_tensors(net: MLP, prefix: str = "") -> list[tuple[str, np.ndarray]]:
    out = []
    for i, (W, b) in enumerate(zip(net.weights, net.biases)):
        out.append((f"{prefix}W{i}", W))
        out.append((f"{prefix}b{i}", b))
    return out


def _mlp_from_tensors(layer_dims: list[int], tensors: dict, prefix: str = "") -> MLP:
    weights = [tensors[f"{prefix}W{i}"] for i in range(len(layer_dims) - 1)]
    biases = [tensors[f"{prefix}b{i}"] for i in range(len(layer_dims) - 1)]
    return MLP(list(layer_dims), weights, biases)


def save_mlp(net: MLP, path) -> None:
    header = {"format": "mlp-checkpoint", "activation": "tanh", "layer_dims": net.layer_dims}
    write_checkpoint(path, header, _mlp_tensors(net))


def load_mlp(path) -> MLP:
    manifest, tensors = read_checkpoint(path)
    if manifest.get("format") != "mlp-checkpoint":
        raise ValueError(f"not an MLP checkpoint: format={manifest.get('format')}")
    return _mlp_from_tensors(manifest["layer_dims"], tensors)
