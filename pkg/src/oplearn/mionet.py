"""Multi-input operator networks.

One branch net per input function encodes its sensor samples; a trunk net
encodes the query location.  The model output is the sum over the shared
latent dimension of the elementwise product of all branch outputs with the
trunk output, plus a trainable scalar bias.  With a single branch this reduces
to the classic branch/trunk operator network.

The complex-split variant keeps, per input function, one branch for the real
part and one for the imaginary part of the sensor samples, a single shared
trunk, and separate output biases for the two heads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import nn
from .nn import MLP

__all__ = [
    "MIONet",
    "ComplexMIONet",
    "mionet_forward",
    "complex_mionet_forward",
    "mionet_gradients",
    "complex_mionet_gradients",
    "mionet_parameters",
    "mionet_set_parameters",
    "save_mionet",
    "load_mionet",
]


@dataclass
class MIONet:
    branches: list[MLP]
    trunk: MLP
    bias: float = 0.0

    def __post_init__(self):
        if not self.branches:
            raise ValueError("need at least one branch net")
        p = self.trunk.output_dim
        for i, br in enumerate(self.branches):
            if br.output_dim != p:
                raise ValueError(
                    f"branch {i} outputs {br.output_dim} components, trunk outputs {p}"
                )

    @property
    def latent_dim(self) -> int:
        return self.trunk.output_dim

    @property
    def sensor_counts(self) -> list[int]:
        return [br.input_dim for br in self.branches]


@dataclass
class ComplexMIONet:
    branches_re: list[MLP]
    branches_im: list[MLP]
    trunk: MLP
    bias_re: float = 0.0
    bias_im: float = 0.0

    def __post_init__(self):
        if not self.branches_re or len(self.branches_re) != len(self.branches_im):
            raise ValueError("need matching real/imaginary branch lists")
        p = self.trunk.output_dim
        for i, br in enumerate(self.branches_re + self.branches_im):
            if br.output_dim != p:
                raise ValueError(
                    f"branch {i} outputs {br.output_dim} components, trunk outputs {p}"
                )

    @property
    def latent_dim(self) -> int:
        return self.trunk.output_dim

    @property
    def sensor_counts(self) -> list[int]:
        return [br.input_dim for br in self.branches_re]


def _branch_batches(branches: list[MLP], sensor_vectors, label: str):
    if len(sensor_vectors) != len(branches):
        raise ValueError(
            f"model has {len(branches)} {label} nets, got {len(sensor_vectors)} sensor vectors"
        )
    single = np.asarray(sensor_vectors[0]).ndim == 1
    outs = []
    for i, (br, v) in enumerate(zip(branches, sensor_vectors)):
        v = np.asarray(v, dtype=float)
        if v.shape[-1] != br.input_dim:
            raise ValueError(
                f"{label} {i} expects {br.input_dim} sensor values, got {v.shape[-1]}"
            )
        outs.append(nn.mlp_forward(br, v if not single else v[None, :]))
    return outs, single


def mionet_forward(model: MIONet, sensor_vectors, y) -> float | np.ndarray:
    """Operator output at query location(s) y for the given sensor samples."""
    outs, single = _branch_batches(model.branches, sensor_vectors, "branch")
    Y = np.asarray(y, dtype=float)
    T = nn.mlp_forward(model.trunk, Y if not single else Y[None, :])
    prod = outs[0]
    for o in outs[1:]:
        prod = prod * o
    val = np.sum(prod * T, axis=1) + model.bias
    return float(val[0]) if single else val


def complex_mionet_forward(model: ComplexMIONet, sensor_vectors_re, sensor_vectors_im, y):
    """(real, imaginary) head outputs; the trunk is evaluated once per y."""
    outs_re, single = _branch_batches(model.branches_re, sensor_vectors_re, "real branch")
    outs_im, _ = _branch_batches(model.branches_im, sensor_vectors_im, "imaginary branch")
    Y = np.asarray(y, dtype=float)
    T = nn.mlp_forward(model.trunk, Y if not single else Y[None, :])
    prod_re, prod_im = outs_re[0], outs_im[0]
    for o in outs_re[1:]:
        prod_re = prod_re * o
    for o in outs_im[1:]:
        prod_im = prod_im * o
    re = np.sum(prod_re * T, axis=1) + model.bias_re
    im = np.sum(prod_im * T, axis=1) + model.bias_im
    if single:
        return float(re[0]), float(im[0])
    return re, im


def _leave_one_out(products: list[np.ndarray]) -> list[np.ndarray]:
    """For outputs [B1..Bn], the products of all but one, per slot."""
    n = len(products)
    if n == 1:
        return [np.ones_like(products[0])]
    prefix = [None] * n
    suffix = [None] * n
    acc = None
    for i in range(n):
        prefix[i] = acc
        acc = products[i] if acc is None else acc * products[i]
    acc = None
    for i in range(n - 1, -1, -1):
        suffix[i] = acc
        acc = products[i] if acc is None else acc * products[i]
    out = []
    for i in range(n):
        if prefix[i] is None:
            out.append(suffix[i])
        elif suffix[i] is None:
            out.append(prefix[i])
        else:
            out.append(prefix[i] * suffix[i])
    return out


def mionet_parameters(model: MIONet) -> list[np.ndarray]:
    """Canonical flat order: branch nets, trunk, then the scalar bias."""
    params = []
    for br in model.branches:
        params.extend(nn.parameters(br))
    params.extend(nn.parameters(model.trunk))
    params.append(np.asarray(model.bias, dtype=float))
    return params


def mionet_set_parameters(model: MIONet, params: list[np.ndarray]) -> None:
    i = 0
    for br in model.branches:
        k = 2 * len(br.weights)
        nn.set_parameters(br, params[i : i + k])
        i += k
    k = 2 * len(model.trunk.weights)
    nn.set_parameters(model.trunk, params[i : i + k])
    i += k
    model.bias = float(params[i])


def complex_mionet_parameters(model: ComplexMIONet) -> list[np.ndarray]:
    params = []
    for br in model.branches_re + model.branches_im:
        params.extend(nn.parameters(br))
    params.extend(nn.parameters(model.trunk))
    params.append(np.asarray(model.bias_re, dtype=float))
    params.append(np.asarray(model.bias_im, dtype=float))
    return params


def complex_mionet_set_parameters(model: ComplexMIONet, params: list[np.ndarray]) -> None:
    i = 0
    for br in model.branches_re + model.branches_im:
        k = 2 * len(br.weights)
        nn.set_parameters(br, params[i : i + k])
        i += k
    k = 2 * len(model.trunk.weights)
    nn.set_parameters(model.trunk, params[i : i + k])
    i += k
    model.bias_re = float(params[i])
    model.bias_im = float(params[i + 1])


def mionet_gradients(model: MIONet, sensor_batch, y_batch, u_batch):
    """Mean-squared-error loss and its gradients over all parameters.

    ``sensor_batch`` is one (batch, m_i) matrix per branch, ``y_batch`` is
    (batch, trunk_in), ``u_batch`` is (batch,).  Gradients come back in the
    :func:`mionet_parameters` order.
    """
    u = np.asarray(u_batch, dtype=float)
    if u.size == 0:
        raise ValueError("empty batch")
    branch_caches = []
    branch_outs = []
    for i, (br, X) in enumerate(zip(model.branches, sensor_batch)):
        X = np.asarray(X, dtype=float)
        out, acts = nn._forward_cached(br, X)
        branch_caches.append(acts)
        branch_outs.append(out)
    Y = np.asarray(y_batch, dtype=float)
    T, trunk_acts = nn._forward_cached(model.trunk, Y)

    prod = branch_outs[0]
    for o in branch_outs[1:]:
        prod = prod * o
    pred = np.sum(prod * T, axis=1) + model.bias
    err = pred - u
    if not np.all(np.isfinite(err)):
        raise FloatingPointError("non-finite model output in gradient computation")
    loss = float(np.mean(err * err))

    dpred = (2.0 / err.size) * err
    grads = []
    loo = _leave_one_out(branch_outs)
    for i, br in enumerate(model.branches):
        upstream = dpred[:, None] * loo[i] * T
        grads.extend(nn._backward_from_cache(br, branch_caches[i], upstream))
    trunk_up = dpred[:, None] * prod
    grads.extend(nn._backward_from_cache(model.trunk, trunk_acts, trunk_up))
    grads.append(np.asarray(np.sum(dpred)))
    return loss, grads


def complex_mionet_gradients(model: ComplexMIONet, sensor_re, sensor_im, y_batch, u_batch):
    """Loss (summed squared errors of both heads) and gradients.

    ``u_batch`` is a complex array; heads are scored against its real and
    imaginary parts.
    """
    u = np.asarray(u_batch)
    if u.size == 0:
        raise ValueError("empty batch")
    caches_re, outs_re = [], []
    caches_im, outs_im = [], []
    for br, X in zip(model.branches_re, sensor_re):
        out, acts = nn._forward_cached(br, np.asarray(X, dtype=float))
        caches_re.append(acts)
        outs_re.append(out)
    for br, X in zip(model.branches_im, sensor_im):
        out, acts = nn._forward_cached(br, np.asarray(X, dtype=float))
        caches_im.append(acts)
        outs_im.append(out)
    Y = np.asarray(y_batch, dtype=float)
    T, trunk_acts = nn._forward_cached(model.trunk, Y)

    prod_re = outs_re[0]
    for o in outs_re[1:]:
        prod_re = prod_re * o
    prod_im = outs_im[0]
    for o in outs_im[1:]:
        prod_im = prod_im * o
    pred_re = np.sum(prod_re * T, axis=1) + model.bias_re
    pred_im = np.sum(prod_im * T, axis=1) + model.bias_im
    err_re = pred_re - u.real
    err_im = pred_im - u.imag
    if not (np.all(np.isfinite(err_re)) and np.all(np.isfinite(err_im))):
        raise FloatingPointError("non-finite model output in gradient computation")
    loss = float(np.mean(err_re * err_re + err_im * err_im))

    dre = (2.0 / err_re.size) * err_re
    dim = (2.0 / err_im.size) * err_im
    grads = []
    for i, br in enumerate(model.branches_re):
        upstream = dre[:, None] * _leave_one_out(outs_re)[i] * T
        grads.extend(nn._backward_from_cache(br, caches_re[i], upstream))
    for i, br in enumerate(model.branches_im):
        upstream = dim[:, None] * _leave_one_out(outs_im)[i] * T
        grads.extend(nn._backward_from_cache(br, caches_im[i], upstream))
    trunk_up = dre[:, None] * prod_re + dim[:, None] * prod_im
    grads.extend(nn._backward_from_cache(model.trunk, trunk_acts, trunk_up))
    grads.append(np.asarray(np.sum(dre)))
    grads.append(np.asarray(np.sum(dim)))
    return loss, grads


# -- checkpoints -------------------------------------------------------------


def save_mionet(model: MIONet | ComplexMIONet, path) -> None:
    tensors: list[tuple[str, np.ndarray]] = []
    if isinstance(model, MIONet):
        header = {
            "format": "mionet-checkpoint",
            "variant": "real",
            "activation": "tanh",
            "n_branches": len(model.branches),
            "latent_dim": model.latent_dim,
            "sensor_counts": model.sensor_counts,
            "branch_dims": [br.layer_dims for br in model.branches],
            "trunk_dims": model.trunk.layer_dims,
        }
        for i, br in enumerate(model.branches):
            tensors.extend(nn._mlp_tensors(br, prefix=f"branch{i}."))
        tensors.extend(nn._mlp_tensors(model.trunk, prefix="trunk."))
        tensors.append(("bias", np.asarray(model.bias, dtype=float)))
    else:
        header = {
            "format": "mionet-checkpoint",
            "variant": "complex-split",
            "activation": "tanh",
            "n_branches": len(model.branches_re),
            "latent_dim": model.latent_dim,
            "sensor_counts": model.sensor_counts,
            "branch_re_dims": [br.layer_dims for br in model.branches_re],
            "branch_im_dims": [br.layer_dims for br in model.branches_im],
            "trunk_dims": model.trunk.layer_dims,
        }
        for i, br in enumerate(model.branches_re):
            tensors.extend(nn._mlp_tensors(br, prefix=f"branch_re{i}."))
        for i, br in enumerate(model.branches_im):
            tensors.extend(nn._mlp_tensors(br, prefix=f"branch_im{i}."))
        tensors.extend(nn._mlp_tensors(model.trunk, prefix="trunk."))
        tensors.append(("bias_re", np.asarray(model.bias_re, dtype=float)))
        tensors.append(("bias_im", np.asarray(model.bias_im, dtype=float)))
    nn.write_checkpoint(path, header, tensors)


def load_mionet(path) -> MIONet | ComplexMIONet:
    manifest, tensors = nn.read_checkpoint(path)
    if manifest.get("format") != "mionet-checkpoint":
        raise ValueError(f"not a MIONet checkpoint: format={manifest.get('format')}")
    trunk = nn._mlp_from_tensors(manifest["trunk_dims"], tensors, prefix="trunk.")
    if manifest["variant"] == "real":
        branches = [
            nn._mlp_from_tensors(dims, tensors, prefix=f"branch{i}.")
            for i, dims in enumerate(manifest["branch_dims"])
        ]
        return MIONet(branches, trunk, bias=float(tensors["bias"]))
    if manifest["variant"] == "complex-split":
        branches_re = [
            nn._mlp_from_tensors(dims, tensors, prefix=f"branch_re{i}.")
            for i, dims in enumerate(manifest["branch_re_dims"])
        ]
        branches_im = [
            nn._mlp_from_tensors(dims, tensors, prefix=f"branch_im{i}.")
            for i, dims in enumerate(manifest["branch_im_dims"])
        ]
        return ComplexMIONet(
            branches_re,
            branches_im,
            trunk,
            bias_re=float(tensors["bias_re"]),
            bias_im=float(tensors["bias_im"]),
        )
    raise ValueError(f"unknown checkpoint variant {manifest['variant']!r}")
