"""End-to-end acceptance gate: one test per headline promise.

Run with `pytest tests/test_acceptance.py -v` to get one pass/fail line per
promise. Each test carries its tolerance and runtime budget inline.
"""

import random
import time

import pytest

from gemmbench.cli import main
from gemmbench.device import packaged_profile
from gemmbench.kernels import (
    KernelVariant,
    gemm_naive,
    gemm_tiled,
    gemm_vectorized,
    host_gemm,
    launch_geometry,
    simulate_gemm,
)
from gemmbench.profiler import gflops, profile_training_step, sweep
from gemmbench.tensor import matmul_reference, random_matrix, relative_error
from gemmbench.training import grad_check, preset_models

CALIBRATED = packaged_profile("calibrated")
FOUR_VARIANTS = [
    KernelVariant.naive(),
    KernelVariant.vectorized4(),
    KernelVariant.tiled(16),
    KernelVariant.tiled_vectorized(16),
]


def test_oracle_equivalence_200_random_shapes():
    # All four variants within 1e-4 relative of the reference contraction on
    # 200 random shapes with dims 16..256, in under a minute. The native
    # twins carry the bulk; the simulator, which matches the reference
    # bitwise by construction, is spot-checked on the small shapes.
    t0 = time.monotonic()
    rng = random.Random(0)
    sim_checked = 0
    for case in range(200):
        m = rng.randint(16, 256)
        k = rng.randint(16, 256)
        n = rng.randint(16, 256)
        a = random_matrix(m, k, 10_000 + case)
        b = random_matrix(k, n, 20_000 + case)
        ref = matmul_reference(a, b)
        for variant in FOUR_VARIANTS:
            assert relative_error(host_gemm(variant, a, b), ref) <= 1e-4, (variant.name, m, k, n)
        if max(m, k, n) <= 48 and sim_checked < 8:
            sim_checked += 1
            for variant in FOUR_VARIANTS:
                got, _ = simulate_gemm(a, b, variant, CALIBRATED)
                assert relative_error(got, ref) <= 1e-4, (variant.name, m, k, n)
    elapsed = time.monotonic() - t0
    assert sim_checked > 0
    assert elapsed < 60.0, f"oracle sweep took {elapsed:.1f}s"


def test_counter_laws_exact_at_32_cubed():
    # Zero tolerance, counted by the simulator itself at M=N=K=32, T=16.
    a = random_matrix(32, 32, 1)
    b = random_matrix(32, 32, 2)
    _, naive = gemm_naive(a, b, CALIBRATED)
    assert naive.global_loads == 65_536
    _, tiled = gemm_tiled(a, b, CALIBRATED, tile=16)
    assert tiled.global_loads == 4_096
    assert naive.global_loads == 16 * tiled.global_loads  # factor exactly the tile
    naive_grid = launch_geometry(KernelVariant.naive(), 32, 32).global_size
    assert naive_grid[0] * naive_grid[1] == 1_024  # one item per output element
    vec_grid = launch_geometry(KernelVariant.vectorized4(), 32, 32).global_size
    assert vec_grid[0] * vec_grid[1] == 256  # one item per 1x4 strip
    _, vec = gemm_vectorized(a, b, CALIBRATED)
    assert vec.global_stores == 256  # one store transaction per item


def test_flops_formula_and_sweep_protocol():
    assert gflops(32, 1e-6) == pytest.approx(65.536, rel=1e-12)
    records = sweep(["naive", "vec4", "tiled16", "tiledvec16"], backend="sim")
    per_variant = {}
    for rec in records:
        per_variant[rec.variant] = per_variant.get(rec.variant, 0) + 1
    assert per_variant == {"naive": 16, "vec4": 16, "tiled16": 16, "tiledvec16": 16}
    sizes = sorted({rec.n for rec in records})
    assert sizes == list(range(32, 513, 32))


def test_gradient_fidelity_all_presets():
    t0 = time.monotonic()
    for name, spec in preset_models().items():
        result = grad_check(spec, seed=0)
        assert result.max_rel_error < 1e-3, (name, result.max_rel_error)
    elapsed = time.monotonic() - t0
    assert elapsed < 30.0, f"gradient checks took {elapsed:.1f}s"


def test_copy_dominates_model4_under_calibrated_profile():
    t0 = time.monotonic()
    report = profile_training_step(preset_models()["model4"], CALIBRATED, batch_size=32)
    assert 0.06 <= report.compute_fraction <= 0.12, report.compute_fraction
    assert report.total_copy / report.total_time >= 0.85
    # The calibrated link moves at least ten copy-seconds per compute-second
    # on every single product.
    for op in report.ops:
        assert op.copy_time / op.compute_time >= 10.0, op.op
    elapsed = time.monotonic() - t0
    assert elapsed < 10.0, f"profile took {elapsed:.1f}s"


def test_depth_scales_total_time_linearly():
    reports = {
        name: profile_training_step(spec, CALIBRATED, batch_size=32)
        for name, spec in preset_models().items()
    }
    ratio = reports["model2"].total_time / reports["model1"].total_time
    assert 2.4 <= ratio <= 3.6, ratio
    assert reports["model4"].total_time > reports["model3"].total_time > reports["model1"].total_time


def test_host_throughput_ordering_from_128():
    # Property, not absolute numbers: the fused variant beats naive at every
    # sweep size from 128 up on this machine.
    t0 = time.monotonic()
    records = sweep(["naive", "tiledvec16"], backend="host", warmups=1, hot_runs=2, seed=3)
    table = {}
    for rec in records:
        table.setdefault(rec.n, {})[rec.variant] = rec.gflops
    for n, row in table.items():
        if n >= 128:
            assert row["tiledvec16"] > row["naive"], (n, row)
    elapsed = time.monotonic() - t0
    assert elapsed < 300.0, f"host sweep took {elapsed:.1f}s"


def test_fixed_seed_csv_outputs_byte_identical(tmp_path):
    pairs = [
        ("sweep_a.csv", "sweep_b.csv", ["gemm-sweep", "--seed", "7"]),
        ("counters_a.csv", "counters_b.csv", ["counters", "--seed", "7"]),
    ]
    for first, second, argv in pairs:
        pa, pb = tmp_path / first, tmp_path / second
        assert main(argv + ["--out", str(pa)]) == 0
        assert main(argv + ["--out", str(pb)]) == 0
        assert pa.read_bytes() == pb.read_bytes()
