import numpy as np
import pytest

from gemmbench.device import ConfigError, DeviceProfile, MemCounters, ResourceError
from gemmbench.kernels import (
    VARIANT_NAMES,
    KernelVariant,
    expected_counters,
    gemm_naive,
    gemm_tiled,
    gemm_tiled_vectorized,
    gemm_vectorized,
    host_gemm,
    host_gemm_cpu,
    launch_geometry,
    simulate_gemm,
)
from gemmbench.tensor import ShapeError, matmul_reference, random_matrix, relative_error

PROFILE = DeviceProfile(
    max_workgroup_size=256,
    local_mem_bytes=16384,
    copy_bandwidth=2.8e8,
    copy_latency=1e-6,
    vector_width=4,
)

ALL_VARIANTS = [KernelVariant.from_name(name) for name in VARIANT_NAMES]


def test_variant_names_round_trip():
    for name in VARIANT_NAMES:
        assert KernelVariant.from_name(name).name == name


def test_variant_rejects_unknown_and_bad_tiles():
    with pytest.raises(ConfigError):
        KernelVariant.from_name("blocked")
    with pytest.raises(ConfigError):
        KernelVariant.from_name("tiled12")
    with pytest.raises(ConfigError):
        KernelVariant("naive", tile=16)


def test_launch_geometry_per_variant():
    assert launch_geometry(KernelVariant.naive(), 32, 32).local_size == (16, 16)
    assert launch_geometry(KernelVariant.naive(), 32, 32).global_size == (32, 32)
    assert launch_geometry(KernelVariant.vectorized4(), 32, 32).global_size == (32, 8)
    assert launch_geometry(KernelVariant.vectorized4(), 32, 32).local_size == (16, 4)
    assert launch_geometry(KernelVariant.tiled(8), 32, 32).local_size == (8, 8)
    assert launch_geometry(KernelVariant.tiled_vectorized(16), 64, 64).global_size == (64, 16)
    assert launch_geometry(KernelVariant.tiled_vectorized(16), 64, 64).local_size == (16, 4)


def test_launch_geometry_requires_alignment():
    with pytest.raises(ConfigError):
        launch_geometry(KernelVariant.naive(), 20, 32)


@pytest.mark.parametrize("variant", ALL_VARIANTS, ids=lambda v: v.name)
@pytest.mark.parametrize("dims", [(16, 16, 16), (32, 32, 32), (32, 16, 48), (20, 33, 7)])
def test_simulated_gemm_matches_reference(variant, dims):
    m, n, k = dims
    a = random_matrix(m, k, 1000 + m)
    b = random_matrix(k, n, 2000 + n)
    got, _ = simulate_gemm(a, b, variant, PROFILE)
    ref = matmul_reference(a, b)
    assert got.shape == ref.shape
    assert relative_error(got, ref) <= 1e-4
    # Same double-precision ascending-k accumulation as the oracle, so the
    # match is in fact exact; the tolerance above is the public contract.
    assert np.array_equal(got, ref)


def test_identity_product_on_every_variant():
    eye = np.eye(16, dtype=np.float32)
    b = random_matrix(16, 16, 5)
    for variant in ALL_VARIANTS:
        got, _ = simulate_gemm(eye, b, variant, PROFILE)
        assert np.array_equal(got, b)


def test_gemm_shape_mismatch_rejected():
    a = random_matrix(16, 16, 1)
    b = random_matrix(32, 16, 2)
    with pytest.raises(ShapeError):
        simulate_gemm(a, b, KernelVariant.naive(), PROFILE)


def test_counters_frozen_at_32_cubed():
    a = random_matrix(32, 32, 10)
    b = random_matrix(32, 32, 11)
    _, naive = gemm_naive(a, b, PROFILE)
    assert naive == MemCounters(global_loads=65536, global_stores=1024)
    _, vec = gemm_vectorized(a, b, PROFILE)
    assert vec == MemCounters(global_loads=10240, global_stores=256)
    _, tiled = gemm_tiled(a, b, PROFILE, tile=16)
    assert tiled == MemCounters(
        global_loads=4096, global_stores=1024, local_loads=65536, local_stores=4096, barriers=4096
    )
    _, tv = gemm_tiled_vectorized(a, b, PROFILE, tile=16)
    assert tv == MemCounters(
        global_loads=1024, global_stores=256, local_loads=16384, local_stores=1024, barriers=1024
    )


def test_tiling_divides_global_loads_by_tile():
    naive = expected_counters(KernelVariant.naive(), 32, 32, 32)
    for t in (8, 16):
        tiled = expected_counters(KernelVariant.tiled(t), 32, 32, 32)
        assert tiled.global_loads * t == naive.global_loads


def test_vectorizing_tiled_divides_transactions_by_four():
    for t in (8, 16):
        tiled = expected_counters(KernelVariant.tiled(t), 64, 64, 64)
        tv = expected_counters(KernelVariant.tiled_vectorized(t), 64, 64, 64)
        assert tv.global_loads * 4 == tiled.global_loads
        assert tv.global_stores * 4 == tiled.global_stores
        naive = expected_counters(KernelVariant.naive(), 64, 64, 64)
        assert tv.global_loads < tiled.global_loads < naive.global_loads


def test_store_lanes_always_cover_output():
    # Scalar variants store one lane per transaction, vector variants four.
    for variant in ALL_VARIANTS:
        ctr = expected_counters(variant, 48, 32, 16)
        lanes = ctr.global_stores * (4 if variant.uses_vectors else 1)
        assert lanes == 48 * 32


@pytest.mark.parametrize("variant", ALL_VARIANTS, ids=lambda v: v.name)
@pytest.mark.parametrize("dims", [(16, 16, 16), (48, 32, 16), (32, 48, 64), (20, 33, 7)])
def test_closed_form_counters_match_simulation(variant, dims):
    m, n, k = dims
    a = random_matrix(m, k, 3000 + m)
    b = random_matrix(k, n, 4000 + n)
    _, counters = simulate_gemm(a, b, variant, PROFILE)
    assert counters == expected_counters(variant, m, n, k)


def test_vector_variants_need_vector_capable_device():
    scalar_device = DeviceProfile(
        max_workgroup_size=256,
        local_mem_bytes=16384,
        copy_bandwidth=2.8e8,
        copy_latency=1e-6,
        vector_width=1,
    )
    a = random_matrix(16, 16, 1)
    b = random_matrix(16, 16, 2)
    with pytest.raises(ResourceError):
        gemm_vectorized(a, b, scalar_device)
    got, _ = gemm_naive(a, b, scalar_device)
    assert np.array_equal(got, matmul_reference(a, b))


def test_small_workgroup_device_rejects_wide_geometry():
    tiny = DeviceProfile(
        max_workgroup_size=64,
        local_mem_bytes=16384,
        copy_bandwidth=2.8e8,
        copy_latency=1e-6,
        vector_width=4,
    )
    a = random_matrix(16, 16, 1)
    b = random_matrix(16, 16, 2)
    with pytest.raises(ConfigError):
        gemm_naive(a, b, tiny)
    # An 8x8 tile group fits in 64 items.
    got, _ = gemm_tiled(a, b, tiny, tile=8)
    assert np.array_equal(got, matmul_reference(a, b))


@pytest.mark.parametrize("variant", ALL_VARIANTS, ids=lambda v: v.name)
@pytest.mark.parametrize("dims", [(32, 32, 32), (50, 30, 70)])
def test_host_twin_matches_simulated_variant(variant, dims):
    m, n, k = dims
    a = random_matrix(m, k, 5000 + m)
    b = random_matrix(k, n, 6000 + n)
    sim, _ = simulate_gemm(a, b, variant, PROFILE)
    host = host_gemm(variant, a, b)
    assert host.dtype == np.float32
    assert relative_error(host, sim) <= 1e-4


def test_host_cpu_baseline_matches_reference():
    a = random_matrix(64, 48, 70)
    b = random_matrix(48, 32, 71)
    assert relative_error(host_gemm_cpu(a, b), matmul_reference(a, b)) <= 1e-4
