"""Dense numerical core: parameters with Adam state, the forward ops used
by the encoders/decoders together with their vector-Jacobian products, seeded
dropout, a central finite-difference gradient checker, and checkpoint I/O.

Everything trains in float64. The computation graph is fixed (two-layer
message passing plus a pair decoder), so gradients are hand-derived per op
rather than taped.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import _kernels


class NonFiniteError(ArithmeticError):
    """A value that must be finite is NaN or infinite."""


def check_finite(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"non-finite values in {what}")


class ParamStore:
    """Named float64 parameters, each with a gradient buffer and Adam moments.

    Single writer: the training loop owns mutation; forward passes may read
    concurrently. Gradients accumulate via ``accumulate`` and are zeroed by
    each optimizer step.
    """

    def __init__(self) -> None:
        self._values: dict[str, np.ndarray] = {}
        self._grads: dict[str, np.ndarray] = {}
        self._m: dict[str, np.ndarray] = {}
        self._v: dict[str, np.ndarray] = {}
        self.step = 0

    def add(self, name: str, value: np.ndarray) -> None:
        if name in self._values:
            raise KeyError(f"parameter {name!r} already registered")
        value = np.ascontiguousarray(value, dtype=np.float64)
        self._values[name] = value
        self._grads[name] = np.zeros_like(value)
        self._m[name] = np.zeros_like(value)
        self._v[name] = np.zeros_like(value)

    def __getitem__(self, name: str) -> np.ndarray:
        return self._values[name]

    def __contains__(self, name: str) -> bool:
        return name in self._values

    @property
    def names(self) -> list[str]:
        return list(self._values)

    def grad(self, name: str) -> np.ndarray:
        return self._grads[name]

    def accumulate(self, name: str, g: np.ndarray) -> None:
        param = self._values[name]
        if g.shape != param.shape:
            raise ValueError(
                f"gradient shape {g.shape} != parameter shape {param.shape} for {name!r}"
            )
        self._grads[name] += g

    def zero_grads(self) -> None:
        for g in self._grads.values():
            g[:] = 0.0

    def adam_step(
        self,
        lr: float,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ) -> None:
        """Bias-corrected Adam update; increments the step counter and
        zeroes the gradients."""
        self.step += 1
        bc1 = 1.0 - beta1**self.step
        bc2 = 1.0 - beta2**self.step
        for name, value in self._values.items():
            g = self._grads[name]
            m = self._m[name]
            v = self._v[name]
            m *= beta1
            m += (1.0 - beta1) * g
            v *= beta2
            v += (1.0 - beta2) * np.square(g)
            value -= lr * (m / bc1) / (np.sqrt(v / bc2) + eps)
        self.zero_grads()

    def snapshot(self) -> dict[str, np.ndarray]:
        return {name: value.copy() for name, value in self._values.items()}

    def load_values(self, values: dict[str, np.ndarray]) -> None:
        for name, value in values.items():
            self._values[name][:] = value


def glorot_uniform(shape: tuple[int, int], rng: np.random.Generator) -> np.ndarray:
    limit = np.sqrt(6.0 / (shape[0] + shape[1]))
    return rng.uniform(-limit, limit, size=shape)


# --- primitive ops and their VJPs ------------------------------------------


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[-1] != b.shape[0]:
        raise ValueError(f"matmul shape mismatch: {a.shape} @ {b.shape}")
    return a @ b


def matmul_vjp(g: np.ndarray, a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return g @ b.T, a.T @ g


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def relu_vjp(g: np.ndarray, x: np.ndarray) -> np.ndarray:
    return g * (x > 0.0)


def sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x, dtype=np.float64)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def sigmoid_vjp(g: np.ndarray, y: np.ndarray) -> np.ndarray:
    # y is the sigmoid output saved from the forward pass.
    return g * y * (1.0 - y)


def inverse_degrees(indptr: np.ndarray) -> np.ndarray:
    deg = np.diff(indptr).astype(np.float64)
    out = np.zeros_like(deg)
    nz = deg > 0
    out[nz] = 1.0 / deg[nz]
    return out


def mean_neighbors(h: np.ndarray, indptr: np.ndarray, indices: np.ndarray,
                   inv_deg: np.ndarray) -> np.ndarray:
    """Row v = mean of h over v's neighbors; zero row when v has none."""
    return _kernels.neighbor_sum(h, indptr, indices) * inv_deg[:, None]


def mean_neighbors_vjp(
    g: np.ndarray, indptr: np.ndarray, indices: np.ndarray, inv_deg: np.ndarray
) -> np.ndarray:
    """Backward of mean_neighbors for a symmetric adjacency.

    dL/dh_u = sum over receivers v with u in N(v) of g_v / deg_v; symmetry
    turns the scatter into a gather over u's own neighbor list.
    """
    return _kernels.neighbor_sum(g * inv_deg[:, None], indptr, indices)


# --- dropout ----------------------------------------------------------------


def dropout_forward(
    x: np.ndarray, p: float, rng: np.random.Generator | None, training: bool
) -> tuple[np.ndarray, np.ndarray | None]:
    """Inverted dropout. In inference mode the op is the identity and the
    returned mask is None."""
    if not training or p <= 0.0:
        return x, None
    if rng is None:
        raise ValueError("training-mode dropout requires an rng")
    keep = rng.random(x.shape) >= p
    mask = keep.astype(np.float64) / (1.0 - p)
    return x * mask, mask


def dropout_backward(g: np.ndarray, mask: np.ndarray | None) -> np.ndarray:
    return g if mask is None else g * mask


# --- gradient checking ------------------------------------------------------


def grad_check(
    store: ParamStore,
    loss_and_grad,
    eps: float = 1e-5,
    coords_per_param: int = 200,
    seed: int = 0,
) -> float:
    """Central finite differences vs analytic gradients.

    ``loss_and_grad(store, compute_grads)`` returns the scalar loss and,
    when asked, accumulates gradients into the store. The loss must be
    deterministic (dropout off); this is checked by evaluating it twice.
    Up to ``coords_per_param`` coordinates are probed per tensor. Returns
    the max relative error |a - n| / max(|a|, |n|, 1e-8).
    """
    l1 = float(loss_and_grad(store, False))
    l2 = float(loss_and_grad(store, False))
    if not np.isfinite(l1):
        raise NonFiniteError("loss is non-finite at the checked point")
    if l1 != l2:
        raise ValueError(
            "loss is not deterministic; disable dropout before gradient checking"
        )
    store.zero_grads()
    loss_and_grad(store, True)
    analytic = {name: store.grad(name).copy() for name in store.names}
    store.zero_grads()

    rng = np.random.default_rng(seed)
    worst = 0.0
    for name in store.names:
        value = store[name]
        flat = value.reshape(-1)
        size = flat.shape[0]
        coords = np.arange(size) if size <= coords_per_param else np.sort(
            rng.choice(size, size=coords_per_param, replace=False)
        )
        aflat = analytic[name].reshape(-1)
        for c in coords:
            orig = flat[c]
            flat[c] = orig + eps
            lp = float(loss_and_grad(store, False))
            flat[c] = orig - eps
            lm = float(loss_and_grad(store, False))
            flat[c] = orig
            if not (np.isfinite(lp) and np.isfinite(lm)):
                raise NonFiniteError(f"non-finite loss while perturbing {name}[{c}]")
            numeric = (lp - lm) / (2.0 * eps)
            denom = max(abs(aflat[c]), abs(numeric), 1e-8)
            worst = max(worst, abs(aflat[c] - numeric) / denom)
    return worst


# --- checkpoints -------------------------------------------------------------


def save_checkpoint(
    path: str | Path,
    store: ParamStore,
    rng_state: dict | None = None,
    meta: dict | None = None,
) -> None:
    """Single-file NPZ checkpoint: parameter values and Adam moments by
    name, the step counter, the serialized rng state, and free-form meta."""
    payload: dict[str, np.ndarray] = {}
    for name in store.names:
        payload[f"param/{name}"] = store[name]
        payload[f"adam_m/{name}"] = store._m[name]
        payload[f"adam_v/{name}"] = store._v[name]
    payload["step"] = np.asarray(store.step, dtype=np.int64)
    payload["rng_state"] = np.frombuffer(
        json.dumps(rng_state or {}).encode(), dtype=np.uint8
    )
    payload["meta"] = np.frombuffer(json.dumps(meta or {}).encode(), dtype=np.uint8)
    np.savez(path, **payload)


def load_checkpoint(path: str | Path) -> tuple[ParamStore, dict, dict]:
    """Inverse of save_checkpoint; returns (store, rng_state, meta)."""
    with np.load(path) as data:
        store = ParamStore()
        for key in data.files:
            if key.startswith("param/"):
                store.add(key[len("param/") :], data[key])
        for key in data.files:
            if key.startswith("adam_m/"):
                store._m[key[len("adam_m/") :]][:] = data[key]
            elif key.startswith("adam_v/"):
                store._v[key[len("adam_v/") :]][:] = data[key]
        store.step = int(data["step"])
        rng_state = json.loads(bytes(data["rng_state"]).decode() or "{}")
        meta = json.loads(bytes(data["meta"]).decode() or "{}")
    return store, rng_state, meta
