"""Measurement protocol and the copy-versus-compute decomposition.

Wall-clock measurements bind operands first, run a few warmups, then average
a fixed number of hot runs on the monotonic nanosecond clock. Throughput is
reported as 2*n^3 / avg_time for an n-cubed product.

The device-cost side has no wall clock: compute time comes from flop counts
at a documented sustained rate, and every product pays one bundled transfer
(both operands plus the result) priced by the device profile's latency and
bandwidth. Operands are copied per product; nothing stays resident.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from gemmbench.device import ConfigError, DeviceProfile, transfer_time
from gemmbench.kernels import (
    KernelVariant,
    expected_counters,
    host_gemm,
    host_gemm_cpu,
    simulate_gemm,
)
from gemmbench.tensor import Seed, random_matrix
from gemmbench.training import (
    Batch,
    ModelSpec,
    init_model,
    backward,
    forward,
    softmax_cross_entropy,
    synthetic_batch,
)

# Sustained throughput of the modeled device core, flops/second. The device
# profile JSON schema carries link parameters only, so the compute rate lives
# here as a documented package constant.
MODEL_COMPUTE_FLOPS = 4.0e10

# Per-transaction costs for modeled kernel time, seconds. Global transactions
# dominate by an order of magnitude over local ones, which is what makes the
# tiled variants pay off.
SIM_GLOBAL_TXN_S = 1e-9
SIM_LOCAL_TXN_S = 1e-10
SIM_BARRIER_S = 1e-9

DEFAULT_SWEEP_SIZES = tuple(range(32, 513, 32))
DEFAULT_WARMUPS = 10
DEFAULT_HOT_RUNS = 500

SWEEP_BACKENDS = ("host", "sim")
CPU_BASELINE = "cpu"  # single-call product, host backend only


@dataclass(frozen=True)
class TimingEvent:
    """Nanosecond lifecycle stamps of one run: queued -> submitted -> start -> end."""

    queued: int
    submitted: int
    start: int
    end: int

    def __post_init__(self):
        if not (self.queued <= self.submitted <= self.start <= self.end):
            raise ValueError(
                f"event stamps must be ordered, got {self.queued}, {self.submitted}, "
                f"{self.start}, {self.end}"
            )

    @property
    def duration_s(self) -> float:
        return (self.end - self.start) * 1e-9


@dataclass
class MeasureResult:
    warmups: int
    hot_runs: int
    times: list[float]
    last_event: TimingEvent

    @property
    def min_time(self) -> float:
        return min(self.times)

    @property
    def avg_time(self) -> float:
        return sum(self.times) / len(self.times)

    @property
    def max_time(self) -> float:
        return max(self.times)


def measure(fn: Callable[[], object], warmups: int = DEFAULT_WARMUPS, hot_runs: int = DEFAULT_HOT_RUNS) -> MeasureResult:
    """Run fn warmups + hot_runs times; statistics cover the hot runs only."""
    if warmups < 0:
        raise ValueError(f"warmups must be non-negative, got {warmups}")
    if hot_runs < 1:
        raise ValueError(f"hot_runs must be at least 1, got {hot_runs}")
    for _ in range(warmups):
        fn()
    times = []
    event = None
    for _ in range(hot_runs):
        t0 = time.perf_counter_ns()
        fn()
        t1 = time.perf_counter_ns()
        # Host dispatch is immediate: the first three stamps coincide.
        event = TimingEvent(queued=t0, submitted=t0, start=t0, end=t1)
        times.append((t1 - t0) * 1e-9)
    return MeasureResult(warmups=warmups, hot_runs=hot_runs, times=times, last_event=event)


def flops(n: int, seconds: float) -> float:
    """Raw rate for an n^3 product: 2*n^3 / seconds."""
    if n <= 0:
        raise ValueError(f"n must be positive, got {n}")
    if seconds <= 0:
        raise ValueError(f"seconds must be positive, got {seconds}")
    return 2.0 * n**3 / seconds

def gflops(n: int, seconds: float) -> float:
    return flops(n, seconds) / 1e9


def modeled_kernel_time(variant: KernelVariant, m: int, n: int, k: int) -> float:
    """Deterministic kernel cost: flops at the modeled rate plus transaction costs."""
    counters = expected_counters(variant, m, n, k)
    pm, pn, pk = (-(-d // 16) * 16 for d in (m, n, k))
    work = 2.0 * pm * pn * pk / MODEL_COMPUTE_FLOPS
    return (
        work
        + counters.total_global() * SIM_GLOBAL_TXN_S
        + counters.total_local() * SIM_LOCAL_TXN_S
        + counters.barriers * SIM_BARRIER_S
    )


@dataclass(frozen=True)
class SweepRecord:
    n: int
    variant: str
    backend: str
    avg_time_s: float
    gflops: float


def sweep(
    variants: Sequence[str],
    sizes: Iterable[int] = DEFAULT_SWEEP_SIZES,
    *,
    backend: str = "sim",
    warmups: int = DEFAULT_WARMUPS,
    hot_runs: int = DEFAULT_HOT_RUNS,
    seed: Seed = 0,
) -> list[SweepRecord]:
    """Throughput of each variant at each square size n.

    Host backend: operands are bound first, then the warmup/hot protocol runs
    on the wall clock. Sim backend: the modeled kernel time is evaluated
    directly, so repeated sweeps are bit-identical; warmups/hot_runs are
    ignored there. The "cpu" pseudo-variant (single-call product) is allowed
    on the host backend only.
    """
    if backend not in SWEEP_BACKENDS:
        raise ConfigError(f"backend must be one of {SWEEP_BACKENDS}, got {backend!r}")
    records = []
    for name in variants:
        if name != CPU_BASELINE:
            KernelVariant.from_name(name)  # validate early, before any timing
    for size in sizes:
        if size <= 0:
            raise ConfigError(f"sweep sizes must be positive, got {size}")
        operands = {}
        for name in variants:
            if name == CPU_BASELINE:
                if backend != "host":
                    raise ConfigError("the cpu baseline only exists on the host backend")
                variant = None
            else:
                variant = KernelVariant.from_name(name)
            if backend == "sim":
                avg = modeled_kernel_time(variant, size, size, size)
            else:
                if "ab" not in operands:
                    operands["ab"] = (
                        random_matrix(size, size, seed + 2 * size),
                        random_matrix(size, size, seed + 2 * size + 1),
                    )
                a, b = operands["ab"]
                if variant is None:
                    run = lambda: host_gemm_cpu(a, b)
                else:
                    run = lambda: host_gemm(variant, a, b)
                avg = measure(run, warmups=warmups, hot_runs=hot_runs).avg_time
            # One record per (variant, n), gflops derived from the same avg time.
            records.append(
                SweepRecord(n=size, variant=name, backend=backend, avg_time_s=avg, gflops=gflops(size, avg))
            )
    return records


@dataclass(frozen=True)
class OpProfile:
    """One matrix product inside a training step."""

    op: str
    m: int
    k: int
    n: int
    flops: int
    bytes_moved: int
    compute_time: float
    copy_time: float


@dataclass
class TrainingReport:
    """Copy/compute decomposition of one training step's products."""

    model: str
    layer_dims: tuple[int, ...]
    batch_size: int
    variant: str
    compute_mode: str
    ops: list[OpProfile] = field(default_factory=list)

    @property
    def total_compute(self) -> float:
        return sum(op.compute_time for op in self.ops)

    @property
    def total_copy(self) -> float:
        return sum(op.copy_time for op in self.ops)

    @property
    def total_time(self) -> float:
        return self.total_compute + self.total_copy

    @property
    def compute_fraction(self) -> float:
        return self.total_compute / self.total_time

    @property
    def copy_fraction(self) -> float:
        return self.total_copy / self.total_time

    @property
    def copy_compute_ratio(self) -> float:
        return self.total_copy / self.total_compute

    @property
    def ratio_device_over_host(self) -> float:
        """Modeled device step against a copy-free compute-only run."""
        return self.total_time / self.total_compute

    def layer_ratios(self) -> dict[str, float]:
        """Copy:compute ratio per layer, ops grouped by their layer prefix."""
        copy: dict[str, float] = {}
        compute: dict[str, float] = {}
        for op in self.ops:
            layer = op.op.split("/")[0]
            copy[layer] = copy.get(layer, 0.0) + op.copy_time
            compute[layer] = compute.get(layer, 0.0) + op.compute_time
        return {layer: copy[layer] / compute[layer] for layer in copy}

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "layer_dims": list(self.layer_dims),
            "batch_size": self.batch_size,
            "variant": self.variant,
            "compute_mode": self.compute_mode,
            "ops": [
                {
                    "op": op.op,
                    "m": op.m,
                    "k": op.k,
                    "n": op.n,
                    "flops": op.flops,
                    "bytes_moved": op.bytes_moved,
                    "compute_time": op.compute_time,
                    "copy_time": op.copy_time,
                }
                for op in self.ops
            ],
            "total_compute": self.total_compute,
            "total_copy": self.total_copy,
            "total_time": self.total_time,
            "compute_fraction": self.compute_fraction,
            "copy_fraction": self.copy_fraction,
            "copy_compute_ratio": self.copy_compute_ratio,
            "ratio_device_over_host": self.ratio_device_over_host,
        }


class _RecordingBackend:
    """Captures every product's operands in execution order."""

    def __init__(self):
        self.calls: list[tuple[np.ndarray, np.ndarray]] = []

    def matmul(self, a, b):
        self.calls.append((a.copy(), b.copy()))
        return a @ b  # shapes are all that matter for the recording pass


def _op_names(num_layers: int) -> list[str]:
    names = [f"layer{l}/forward" for l in range(1, num_layers + 1)]
    for l in range(num_layers, 0, -1):
        names.append(f"layer{l}/grad_weight")
        names.append(f"layer{l}/grad_input")
    return names


def profile_training_step(
    spec: ModelSpec,
    profile: DeviceProfile,
    *,
    variant: KernelVariant | None = None,
    batch: Batch | None = None,
    batch_size: int = 32,
    seed: Seed = 0,
    compute_mode: str = "model",
    compute_rate: float = MODEL_COMPUTE_FLOPS,
    warmups: int = 3,
    hot_runs: int = 10,
) -> TrainingReport:
    """Decompose one training step into per-product copy and compute time.

    Every product pays one bundled transfer of its operands and result
    (nothing is device-resident between products). compute_mode "model"
    prices the flops at compute_rate deterministically; "host" measures the
    native kernel for the chosen variant on the wall clock.
    """
    if compute_mode not in ("model", "host"):
        raise ConfigError(f"compute_mode must be 'model' or 'host', got {compute_mode!r}")
    if compute_rate <= 0:
        raise ValueError(f"compute_rate must be positive, got {compute_rate}")
    variant = variant or KernelVariant.tiled_vectorized()
    if batch is None:
        batch = synthetic_batch(spec, batch_size, seed + 100)
    model = init_model(spec, seed)

    recorder = _RecordingBackend()
    state = forward(model, batch.inputs, recorder)
    _, d_logits = softmax_cross_entropy(state.logits, batch.labels)
    backward(model, state, d_logits, recorder)
    names = _op_names(spec.num_layers)
    assert len(recorder.calls) == len(names)

    ops = []
    for name, (a, b) in zip(names, recorder.calls):
        m, k = a.shape
        n = b.shape[1]
        op_flops = 2 * m * k * n
        nbytes = 4 * (m * k + k * n + m * n)
        if compute_mode == "model":
            compute_time = op_flops / compute_rate
        else:
            compute_time = measure(
                lambda: host_gemm(variant, a, b), warmups=warmups, hot_runs=hot_runs
            ).avg_time
        ops.append(
            OpProfile(
                op=name,
                m=m,
                k=k,
                n=n,
                flops=op_flops,
                bytes_moved=nbytes,
                compute_time=compute_time,
                copy_time=transfer_time(nbytes, profile),
            )
        )
    return TrainingReport(
        model=spec.name,
        layer_dims=spec.layer_dims,
        batch_size=batch.size,
        variant=variant.name,
        compute_mode=compute_mode,
        ops=ops,
    )
