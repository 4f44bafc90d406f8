"""Dense feed-forward training whose matrix products route through a backend.

Models are stacks of fully connected layers: hidden layers use ReLU, the last
layer emits logits consumed by softmax cross-entropy (mean over the batch).
Every matrix product in forward and backward goes through a MatmulBackend, so
the same step can run against the reference contraction, the native host
kernels, or the device simulator. One step of a model with H weight layers
performs exactly 3*H backend products: forward, input gradient, and weight
gradient per layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from gemmbench.device import DeviceProfile
from gemmbench.kernels import KernelVariant, host_gemm, simulate_gemm
from gemmbench.tensor import Matrix, Seed, ShapeError, as_matrix, matmul_reference, random_matrix


@dataclass(frozen=True)
class ModelSpec:
    """Layer widths, input first: (d0, d1, ..., dL) builds L weight layers."""

    name: str
    layer_dims: tuple[int, ...]

    def __post_init__(self):
        if len(self.layer_dims) < 2:
            raise ValueError("a model needs an input width and at least one layer")
        if any(d <= 0 for d in self.layer_dims):
            raise ValueError(f"layer dims must be positive, got {self.layer_dims}")

    @property
    def num_layers(self) -> int:
        return len(self.layer_dims) - 1

    def capped(self, width: int = 16) -> "ModelSpec":
        """Same depth with every width clamped, for cheap gradient checks."""
        return ModelSpec(self.name, tuple(min(d, width) for d in self.layer_dims))


def preset_models() -> dict[str, ModelSpec]:
    """The four benchmark models, shallow to deep."""
    return {
        "model1": ModelSpec("model1", (16, 16)),
        "model2": ModelSpec("model2", (16, 16, 16, 16)),
        "model3": ModelSpec("model3", (256, 256)),
        "model4": ModelSpec("model4", (784, 256, 128, 16)),
    }


@dataclass
class DenseLayer:
    """One fully connected layer: weights [d_in, d_out] and a bias row."""

    weights: Matrix
    bias: np.ndarray

    def __post_init__(self):
        if self.weights.ndim != 2:
            raise ShapeError("weights must be 2-D")
        if self.bias.shape != (self.weights.shape[1],):
            raise ShapeError(
                f"bias shape {self.bias.shape} does not match output width {self.weights.shape[1]}"
            )


@dataclass(frozen=True)
class Batch:
    """A batch of inputs [B, d0] with integer class labels [B]."""

    inputs: Matrix
    labels: np.ndarray

    def __post_init__(self):
        if self.inputs.ndim != 2:
            raise ShapeError("batch inputs must be 2-D")
        if self.labels.ndim != 1 or self.labels.shape[0] != self.inputs.shape[0]:
            raise ShapeError("labels must be one int per batch row")

    @property
    def size(self) -> int:
        return self.inputs.shape[0]


class MatmulBackend(Protocol):
    def matmul(self, a: Matrix, b: Matrix) -> Matrix: ...


class ReferenceBackend:
    """Fixed-order float64 contraction; bitwise deterministic everywhere."""

    def matmul(self, a: Matrix, b: Matrix) -> Matrix:
        return matmul_reference(a, b)


class HostBackend:
    """Native numpy kernels in the chosen variant's blocking."""

    def __init__(self, variant: KernelVariant = KernelVariant.tiled_vectorized()):
        self.variant = variant

    def matmul(self, a: Matrix, b: Matrix) -> Matrix:
        return host_gemm(self.variant, a, b)


class SimBackend:
    """Every product runs on the device simulator; counters accumulate."""

    def __init__(self, variant: KernelVariant, profile: DeviceProfile):
        self.variant = variant
        self.profile = profile
        self.total_counters = None

    def matmul(self, a: Matrix, b: Matrix) -> Matrix:
        out, counters = simulate_gemm(a, b, self.variant, self.profile)
        self.total_counters = counters if self.total_counters is None else self.total_counters + counters
        return out


def init_model(spec: ModelSpec, seed: Seed) -> list[DenseLayer]:
    """Uniform weights in +-sqrt(6 / (d_in + d_out)), zero biases.

    Layer i draws from the seed + i stream of the package generator, so a
    model is bitwise reproducible from (spec, seed) alone.
    """
    layers = []
    for i, (din, dout) in enumerate(zip(spec.layer_dims, spec.layer_dims[1:])):
        limit = math.sqrt(6.0 / (din + dout))
        weights = (limit * random_matrix(din, dout, seed + i)).astype(np.float32)
        layers.append(DenseLayer(weights=weights, bias=np.zeros(dout, dtype=np.float32)))
    return layers


@dataclass
class ForwardState:
    """Everything backward needs: per-layer inputs and pre-activations."""

    acts: list[Matrix] = field(default_factory=list)  # acts[l] feeds layer l
    pre_acts: list[Matrix] = field(default_factory=list)

    @property
    def logits(self) -> Matrix:
        return self.pre_acts[-1]


def forward(model: list[DenseLayer], inputs: Matrix, backend: MatmulBackend) -> ForwardState:
    x = as_matrix(inputs)
    if x.shape[1] != model[0].weights.shape[0]:
        raise ShapeError(
            f"batch width {x.shape[1]} does not match model input {model[0].weights.shape[0]}"
        )
    state = ForwardState(acts=[x])
    last = len(model) - 1
    for l, layer in enumerate(model):
        z = backend.matmul(x, layer.weights) + layer.bias
        state.pre_acts.append(z)
        if l < last:
            x = np.maximum(z, 0.0).astype(np.float32)
            state.acts.append(x)
    return state


def softmax_cross_entropy(logits: Matrix, labels: np.ndarray) -> tuple[float, Matrix]:
    """Mean cross-entropy over the batch and its gradient w.r.t. the logits.

    The loss itself is evaluated in float64 for a stable scalar; the gradient
    stays float32 like the rest of the pipeline.
    """
    b, nclass = logits.shape
    labels = np.asarray(labels)
    if labels.shape != (b,):
        raise ShapeError(f"expected {b} labels, got shape {labels.shape}")
    if labels.min() < 0 or labels.max() >= nclass:
        raise ValueError(f"labels must lie in [0, {nclass})")
    z = logits.astype(np.float64)
    z -= z.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(z).sum(axis=1))
    loss = float(np.mean(log_norm - z[np.arange(b), labels]))
    probs = np.exp(z - log_norm[:, None])
    grad = probs.astype(np.float32)
    grad[np.arange(b), labels] -= 1.0
    grad /= np.float32(b)
    return loss, grad


@dataclass
class LayerGrads:
    d_weights: Matrix
    d_bias: np.ndarray


def backward(
    model: list[DenseLayer],
    state: ForwardState,
    d_logits: Matrix,
    backend: MatmulBackend,
) -> list[LayerGrads]:
    """Backpropagate through every layer; two backend products per layer.

    The input gradient is computed for layer 0 as well, matching a device
    pipeline where each layer's products are issued unconditionally.
    """
    grads: list[LayerGrads] = [None] * len(model)  # type: ignore[list-item]
    g = d_logits
    for l in range(len(model) - 1, -1, -1):
        layer = model[l]
        x = state.acts[l]
        d_w = backend.matmul(np.ascontiguousarray(x.T), g)
        d_b = g.sum(axis=0).astype(np.float32)
        g_in = backend.matmul(g, np.ascontiguousarray(layer.weights.T))
        if l > 0:
            g = (g_in * (state.pre_acts[l - 1] > 0)).astype(np.float32)
        grads[l] = LayerGrads(d_weights=d_w, d_bias=d_b)
    return grads


def sgd_step(model: list[DenseLayer], grads: list[LayerGrads], lr: float) -> None:
    for layer, g in zip(model, grads):
        layer.weights -= np.float32(lr) * g.d_weights
        layer.bias -= np.float32(lr) * g.d_bias


def train_step(model: list[DenseLayer], batch: Batch, lr: float, backend: MatmulBackend) -> float:
    """One forward/backward/update pass; returns the pre-update loss."""
    state = forward(model, batch.inputs, backend)
    loss, d_logits = softmax_cross_entropy(state.logits, batch.labels)
    grads = backward(model, state, d_logits, backend)
    sgd_step(model, grads, lr)
    return loss


def synthetic_batch(spec: ModelSpec, batch_size: int, seed: Seed) -> Batch:
    """Separable toy data: one well-spread center per class plus small noise."""
    din, nclass = spec.layer_dims[0], spec.layer_dims[-1]
    labels = np.arange(batch_size, dtype=np.int64) % nclass
    centers = 3.0 * random_matrix(nclass, din, seed)
    noise = 0.1 * random_matrix(batch_size, din, seed + 1)
    inputs = (centers[labels] + noise).astype(np.float32)
    return Batch(inputs=inputs, labels=labels)


def _loss_f64(model: list[DenseLayer], batch: Batch) -> float:
    """Plain-numpy double-precision loss, independent of every backend path."""
    x = batch.inputs.astype(np.float64)
    for l, layer in enumerate(model):
        z = x @ layer.weights.astype(np.float64) + layer.bias.astype(np.float64)
        x = np.maximum(z, 0.0) if l < len(model) - 1 else z
    z = x - x.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(z).sum(axis=1))
    b = batch.size
    return float(np.mean(log_norm - z[np.arange(b), batch.labels]))


@dataclass
class GradCheckResult:
    max_rel_error: float
    per_layer: list[dict]

    @property
    def passed(self) -> bool:
        return self.max_rel_error < 1e-3


def grad_check(
    spec: ModelSpec,
    *,
    seed: Seed = 0,
    batch_size: int = 4,
    backend: MatmulBackend | None = None,
    epsilon: float = 1e-3,
) -> GradCheckResult:
    """Compare analytic gradients against central finite differences.

    Widths are capped at 16 so the parameter sweep stays small. The finite
    difference side perturbs each parameter of a float64 copy of the loss,
    fully independent of the backend under test.
    """
    capped = spec.capped(16)
    model = init_model(capped, seed)
    batch = synthetic_batch(capped, batch_size, seed + 100)
    backend = backend or ReferenceBackend()

    state = forward(model, batch.inputs, backend)
    _, d_logits = softmax_cross_entropy(state.logits, batch.labels)
    analytic = backward(model, state, d_logits, backend)

    report = []
    worst = 0.0
    for l, layer in enumerate(model):
        for attr, got in (("weights", analytic[l].d_weights), ("bias", analytic[l].d_bias)):
            param = getattr(layer, attr)
            fd = np.zeros(param.shape, dtype=np.float64)
            flat_param = param.reshape(-1)
            flat_fd = fd.reshape(-1)
            for idx in range(flat_param.size):
                original = flat_param[idx]
                flat_param[idx] = original + epsilon
                hi = _loss_f64(model, batch)
                flat_param[idx] = original - epsilon
                lo = _loss_f64(model, batch)
                flat_param[idx] = original
                flat_fd[idx] = (hi - lo) / (2.0 * epsilon)
            scale = max(float(np.max(np.abs(fd))), float(np.max(np.abs(got))), 1e-12)
            err = float(np.max(np.abs(fd - got.astype(np.float64)))) / scale
            worst = max(worst, err)
            report.append({"layer": l, "param": attr, "rel_error": err})
    return GradCheckResult(max_rel_error=worst, per_layer=report)
