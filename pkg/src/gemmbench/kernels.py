"""SGEMM kernel variants for the device simulator, plus native host twins.

Four variants, one optimization at a time:

* naive            one work item per output element, all traffic global
* vec4             width-4 vector transactions, each item computes a 1x4 strip
* tiledT           square T x T tiles staged in local memory, K/T phases
* tiledvecT        tiling and vector transactions fused

All variants pad operands to the 16-element alignment quantum, consume the
operands in ascending-k order, and crop the result back, so they agree with
matmul_reference to float32 rounding. Host twins mirror each variant's
traffic pattern as numpy passes: the number of sweeps over the output equals
the variant's global-transaction density per output element.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gemmbench.device import (
    ConfigError,
    DeviceProfile,
    KernelProgram,
    LaunchConfig,
    MemCounters,
    simulate_launch,
)
from gemmbench.tensor import Matrix, ShapeError, as_matrix, crop, pad_to_multiple, zeros

VALID_TILES = (8, 16)
VEC = 4  # vector width used by the vectorized variants

VARIANT_NAMES = ("naive", "vec4", "tiled8", "tiled16", "tiledvec8", "tiledvec16")


@dataclass(frozen=True)
class KernelVariant:
    """A kernel strategy plus its tile parameter (tiled kinds only)."""

    kind: str  # "naive" | "vec4" | "tiled" | "tiledvec"
    tile: int | None = None

    def __post_init__(self):
        if self.kind in ("naive", "vec4"):
            if self.tile is not None:
                raise ConfigError(f"{self.kind} takes no tile parameter")
        elif self.kind in ("tiled", "tiledvec"):
            if self.tile not in VALID_TILES:
                raise ConfigError(f"tile must be one of {VALID_TILES}, got {self.tile}")
        else:
            raise ConfigError(f"unknown kernel kind {self.kind!r}")

    @property
    def name(self) -> str:
        if self.tile is None:
            return self.kind
        return f"{self.kind}{self.tile}"

    @property
    def uses_vectors(self) -> bool:
        return self.kind in ("vec4", "tiledvec")

    @staticmethod
    def naive() -> "KernelVariant":
        return KernelVariant("naive")

    @staticmethod
    def vectorized4() -> "KernelVariant":
        return KernelVariant("vec4")

    @staticmethod
    def tiled(tile: int = 16) -> "KernelVariant":
        return KernelVariant("tiled", tile)

    @staticmethod
    def tiled_vectorized(tile: int = 16) -> "KernelVariant":
        return KernelVariant("tiledvec", tile)

    @staticmethod
    def from_name(name: str) -> "KernelVariant":
        if name == "naive":
            return KernelVariant.naive()
        if name == "vec4":
            return KernelVariant.vectorized4()
        for kind in ("tiledvec", "tiled"):
            if name.startswith(kind):
                try:
                    return KernelVariant(kind, int(name[len(kind) :]))
                except ValueError:
                    break
        raise ConfigError(f"unknown kernel variant {name!r}, expected one of {VARIANT_NAMES}")


def launch_geometry(variant: KernelVariant, m: int, n: int) -> LaunchConfig:
    """Grid for aligned output dims (m, n). One item per element, or per 1x4 strip."""
    if m % 16 or n % 16:
        raise ConfigError(f"launch dims must be multiples of 16, got ({m}, {n})")
    if variant.kind == "naive":
        return LaunchConfig((m, n), (16, 16))
    if variant.kind == "vec4":
        return LaunchConfig((m, n // VEC), (16, VEC))
    t = variant.tile
    if variant.kind == "tiled":
        return LaunchConfig((m, n), (t, t))
    return LaunchConfig((m, n // VEC), (t, t // VEC))


def build_program(variant: KernelVariant, k: int) -> KernelProgram:
    """Kernel program for aligned reduction depth k."""
    if k % 16:
        raise ConfigError(f"reduction depth must be a multiple of 16, got {k}")

    if variant.kind == "naive":

        def naive_body(ctx):
            i, j = ctx.gid
            acc = 0.0
            for kk in range(k):
                acc += ctx.load("a", i, kk) * ctx.load("b", kk, j)
            ctx.store("c", i, j, acc)
            return
            yield

        return KernelProgram("gemm_naive", naive_body)

    if variant.kind == "vec4":

        def vec_body(ctx):
            i, strip = ctx.gid
            j = strip * VEC
            acc = [0.0, 0.0, 0.0, 0.0]
            for k4 in range(0, k, VEC):
                a_vec = ctx.load_vec("a", i, k4, VEC)
                for u in range(VEC):
                    b_vec = ctx.load_vec("b", k4 + u, j, VEC)
                    for lane in range(VEC):
                        acc[lane] += a_vec[u] * b_vec[lane]
            ctx.store_vec("c", i, j, acc)
            return
            yield

        return KernelProgram("gemm_vec4", vec_body)

    t = variant.tile
    if variant.kind == "tiled":

        def tiled_body(ctx):
            i, j = ctx.gid
            li, lj = ctx.lid
            acc = 0.0
            for p in range(0, k, t):
                ctx.local_store("ta", li, lj, ctx.load("a", i, p + lj))
                ctx.local_store("tb", li, lj, ctx.load("b", p + li, j))
                yield  # tiles filled
                for u in range(t):
                    acc += ctx.local_load("ta", li, u) * ctx.local_load("tb", u, lj)
                yield  # tiles drained, safe to refill
            ctx.store("c", i, j, acc)

        return KernelProgram(f"gemm_tiled{t}", tiled_body, local_spec={"ta": (t, t), "tb": (t, t)})

    def tiledvec_body(ctx):
        i, strip = ctx.gid
        li, lj = ctx.lid
        j = strip * VEC  # first of this item's four output columns
        col0 = lj * VEC  # item's column slice inside the local tiles
        tile_col0 = (strip - lj) * VEC  # global column of the group's tile origin
        acc = [0.0, 0.0, 0.0, 0.0]
        for p in range(0, k, t):
            ctx.local_store_vec("ta", li, col0, ctx.load_vec("a", i, p + col0, VEC))
            ctx.local_store_vec("tb", li, col0, ctx.load_vec("b", p + li, tile_col0 + col0, VEC))
            yield
            for u in range(t):
                a_val = ctx.local_load("ta", li, u)
                b_vec = ctx.local_load_vec("tb", u, col0, VEC)
                for lane in range(VEC):
                    acc[lane] += a_val * b_vec[lane]
            yield
        ctx.store_vec("c", i, j, acc)

    return KernelProgram(
        f"gemm_tiledvec{t}", tiledvec_body, local_spec={"ta": (t, t), "tb": (t, t)}
    )


def expected_counters(variant: KernelVariant, m: int, n: int, k: int) -> MemCounters:
    """Closed-form transaction totals for a simulate_gemm call on (m, k) x (k, n).

    Dims are padded to the alignment quantum exactly like simulate_gemm, so
    this predicts the simulator's counters for any input shape. Validated
    against simulate_launch in the test suite.
    """
    if m <= 0 or n <= 0 or k <= 0:
        raise ShapeError(f"dims must be positive, got ({m}, {n}, {k})")
    m = -(-m // 16) * 16
    n = -(-n // 16) * 16
    k = -(-k // 16) * 16
    if variant.kind == "naive":
        return MemCounters(global_loads=2 * m * n * k, global_stores=m * n)
    if variant.kind == "vec4":
        items = m * (n // VEC)
        return MemCounters(global_loads=items * (k // VEC + k), global_stores=items)
    t = variant.tile
    phases = k // t
    if variant.kind == "tiled":
        items = m * n
        return MemCounters(
            global_loads=items * 2 * phases,
            global_stores=items,
            local_loads=items * 2 * k,
            local_stores=items * 2 * phases,
            barriers=items * 2 * phases,
        )
    items = m * (n // VEC)
    return MemCounters(
        global_loads=items * 2 * phases,
        global_stores=items,
        local_loads=items * 2 * k,
        local_stores=items * 2 * phases,
        barriers=items * 2 * phases,
    )


def simulate_gemm(
    a: Matrix, b: Matrix, variant: KernelVariant, profile: DeviceProfile
) -> tuple[Matrix, MemCounters]:
    """Run one GEMM on the simulator. Returns (result cropped to true dims, counters)."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"inner dims differ: {a.shape} @ {b.shape}")
    pa, (m0, _) = pad_to_multiple(a)
    pb, (_, n0) = pad_to_multiple(b)
    mm, kk = pa.shape
    nn = pb.shape[1]
    c = zeros(mm, nn)
    program = build_program(variant, kk)
    config = launch_geometry(variant, mm, nn)
    counters = simulate_launch(program, config, profile, {"a": pa, "b": pb, "c": c})
    return crop(c, (m0, n0)), counters


def gemm_naive(a: Matrix, b: Matrix, profile: DeviceProfile) -> tuple[Matrix, MemCounters]:
    return simulate_gemm(a, b, KernelVariant.naive(), profile)


def gemm_vectorized(a: Matrix, b: Matrix, profile: DeviceProfile) -> tuple[Matrix, MemCounters]:
    return simulate_gemm(a, b, KernelVariant.vectorized4(), profile)


def gemm_tiled(
    a: Matrix, b: Matrix, profile: DeviceProfile, tile: int = 16
) -> tuple[Matrix, MemCounters]:
    return simulate_gemm(a, b, KernelVariant.tiled(tile), profile)


def gemm_tiled_vectorized(
    a: Matrix, b: Matrix, profile: DeviceProfile, tile: int = 16
) -> tuple[Matrix, MemCounters]:
    return simulate_gemm(a, b, KernelVariant.tiled_vectorized(tile), profile)


def host_gemm(variant: KernelVariant, a: Matrix, b: Matrix) -> Matrix:
    """Native float32 twin of a simulated variant.

    The blocking maps each variant's per-element global-transaction density to
    the number of rank-chunk passes over the output: naive walks k one step at
    a time, vec4 in width-4 chunks, tiledT in T-panels, tiledvecT in 4T-panels.
    Accumulation stays ascending in k, so results track the simulator within
    float32 rounding.
    """
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"inner dims differ: {a.shape} @ {b.shape}")
    k = a.shape[1]
    if variant.kind == "naive":
        chunk = 1
    elif variant.kind == "vec4":
        chunk = VEC
    elif variant.kind == "tiled":
        chunk = variant.tile
    else:
        chunk = VEC * variant.tile
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.float32)
    for p in range(0, k, chunk):
        out += a[:, p : p + chunk] @ b[p : p + chunk, :]
    return out


def host_gemm_cpu(a: Matrix, b: Matrix) -> Matrix:
    """Plain single-call float32 product, the host baseline for sweeps."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"inner dims differ: {a.shape} @ {b.shape}")
    return a @ b
