import numpy as np
import pytest

from gemmbench import tensor


def test_as_matrix_from_nested_lists():
    m = tensor.as_matrix([[1, 2], [3, 4]])
    assert m.dtype == np.float32
    assert m.shape == (2, 2)
    assert m.flags["C_CONTIGUOUS"]


def test_as_matrix_from_flat_with_dims():
    m = tensor.as_matrix([1, 2, 3, 4, 5, 6], rows=2, cols=3)
    assert m.shape == (2, 3)
    assert m[1, 0] == 4.0


def test_as_matrix_flat_without_dims_rejected():
    with pytest.raises(tensor.ShapeError):
        tensor.as_matrix([1, 2, 3, 4])


def test_as_matrix_wrong_element_count_rejected():
    with pytest.raises(tensor.ShapeError):
        tensor.as_matrix([1, 2, 3], rows=2, cols=2)


def test_as_matrix_rejects_non_finite():
    with pytest.raises(ValueError):
        tensor.as_matrix([[1.0, float("nan")], [0.0, 2.0]])
    with pytest.raises(ValueError):
        tensor.as_matrix([[float("inf"), 0.0], [0.0, 2.0]])


def test_matmul_reference_known_product():
    a = tensor.as_matrix([[1, 2], [3, 4]])
    b = tensor.as_matrix([[5, 6], [7, 8]])
    assert tensor.matmul_reference(a, b).tolist() == [[19.0, 22.0], [43.0, 50.0]]


def test_matmul_reference_identity_is_noop():
    a = tensor.random_matrix(8, 8, 3)
    out = tensor.matmul_reference(np.eye(8, dtype=np.float32), a)
    assert np.array_equal(out, a)


def test_matmul_reference_zeros():
    a = tensor.random_matrix(4, 6, 5)
    z = tensor.zeros(6, 3)
    assert np.all(tensor.matmul_reference(a, z) == 0.0)


def test_matmul_reference_shape_mismatch():
    with pytest.raises(tensor.ShapeError):
        tensor.matmul_reference(tensor.zeros(2, 3), tensor.zeros(4, 2))


def test_random_matrix_bitwise_repeatable():
    a = tensor.random_matrix(64, 64, 1)
    b = tensor.random_matrix(64, 64, 1)
    assert np.array_equal(a, b)


def test_random_matrix_mean_near_zero():
    m = tensor.random_matrix(64, 64, 1)
    assert -0.1 <= float(m.mean()) <= 0.1
    assert float(m.min()) >= -1.0
    assert float(m.max()) <= 1.0


def test_random_matrix_seeds_differ():
    a = tensor.random_matrix(16, 16, 7)
    b = tensor.random_matrix(16, 16, 8)
    assert not np.array_equal(a, b)


def test_random_matrix_frozen_stream():
    # First words of the seed-7 stream, frozen so any platform or numpy
    # version producing different values fails loudly.
    got = tensor.random_matrix(2, 2, 7).ravel()
    assert got[0] == np.float32(-0.22034050524234772)
    assert got[1] == np.float32(-0.9664233922958374)
    assert got[2] == np.float32(0.801521360874176)


def test_random_matrix_element_depends_on_counter_only():
    # The same flat index yields the same value regardless of matrix shape.
    wide = tensor.random_matrix(2, 8, 11).ravel()
    tall = tensor.random_matrix(8, 2, 11).ravel()
    assert np.array_equal(wide, tall)


def test_pad_to_multiple_shapes_and_content():
    m = tensor.random_matrix(20, 33, 2)
    padded, dims = tensor.pad_to_multiple(m)
    assert dims == (20, 33)
    assert padded.shape == (32, 48)
    assert np.array_equal(padded[:20, :33], m)
    assert np.all(padded[20:, :] == 0.0)
    assert np.all(padded[:, 33:] == 0.0)


def test_pad_to_multiple_aligned_input_unchanged():
    m = tensor.random_matrix(16, 32, 4)
    padded, dims = tensor.pad_to_multiple(m)
    assert padded.shape == (16, 32)
    assert dims == (16, 32)
    assert np.array_equal(padded, m)


def test_crop_inverts_pad():
    m = tensor.random_matrix(7, 19, 9)
    padded, dims = tensor.pad_to_multiple(m)
    assert np.array_equal(tensor.crop(padded, dims), m)


@pytest.mark.parametrize("m,k,n", [(1, 1, 1), (3, 5, 2), (17, 8, 40), (40, 39, 1), (16, 16, 16)])
def test_padded_product_cropped_matches_reference(m, k, n):
    a = tensor.random_matrix(m, k, 100 + m)
    b = tensor.random_matrix(k, n, 200 + n)
    pa, _ = tensor.pad_to_multiple(a)
    pb, _ = tensor.pad_to_multiple(b)
    full = tensor.matmul_reference(pa, pb)
    cropped = tensor.crop(full, (m, n))
    ref = tensor.matmul_reference(a, b)
    # Zero padding along k contributes nothing, so the crop is exact.
    assert np.array_equal(cropped, ref)


def test_relative_error_scales_by_reference():
    ref = tensor.as_matrix([[2.0, 0.0], [0.0, 0.0]])
    got = tensor.as_matrix([[2.0, 0.001], [0.0, 0.0]])
    assert tensor.relative_error(got, ref) == pytest.approx(0.0005)
    assert tensor.relative_error(ref, ref) == 0.0
