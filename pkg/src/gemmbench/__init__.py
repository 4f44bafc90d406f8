"""GEMM kernel variants, a data-parallel device simulator, and a training profiler."""

from gemmbench.device import (
    DeviceProfile,
    KernelProgram,
    LaunchConfig,
    MemCounters,
    load_profile,
    packaged_profile,
    simulate_launch,
    transfer_time,
    validate_config,
)
from gemmbench.kernels import (
    KernelVariant,
    expected_counters,
    gemm_naive,
    gemm_tiled,
    gemm_tiled_vectorized,
    gemm_vectorized,
    host_gemm,
    simulate_gemm,
)
from gemmbench.profiler import (
    MODEL_COMPUTE_FLOPS,
    SweepRecord,
    TimingEvent,
    TrainingReport,
    gflops,
    measure,
    profile_training_step,
    sweep,
)
from gemmbench.tensor import (
    Matrix,
    Seed,
    ShapeError,
    as_matrix,
    matmul_reference,
    pad_to_multiple,
    random_matrix,
    relative_error,
)
from gemmbench.training import (
    Batch,
    DenseLayer,
    ModelSpec,
    grad_check,
    init_model,
    preset_models,
    train_step,
)

__version__ = "0.1.0"

__all__ = [
    "Batch",
    "DenseLayer",
    "DeviceProfile",
    "KernelProgram",
    "KernelVariant",
    "LaunchConfig",
    "Matrix",
    "MemCounters",
    "MODEL_COMPUTE_FLOPS",
    "ModelSpec",
    "Seed",
    "ShapeError",
    "SweepRecord",
    "TimingEvent",
    "TrainingReport",
    "as_matrix",
    "expected_counters",
    "gemm_naive",
    "gemm_tiled",
    "gemm_tiled_vectorized",
    "gemm_vectorized",
    "gflops",
    "grad_check",
    "host_gemm",
    "init_model",
    "load_profile",
    "matmul_reference",
    "measure",
    "packaged_profile",
    "pad_to_multiple",
    "preset_models",
    "profile_training_step",
    "random_matrix",
    "relative_error",
    "simulate_gemm",
    "simulate_launch",
    "sweep",
    "train_step",
    "transfer_time",
    "validate_config",
    "__version__",
]
