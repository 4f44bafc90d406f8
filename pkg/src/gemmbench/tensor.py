"""Dense float32 matrices plus the reference contraction all kernels are checked against.

Matrices are plain numpy arrays (2-D, float32, C order). Helpers here are the
ground truth for everything else in the package: a deterministic counter-based
generator for operands, a fixed-order reference matmul, and padding utilities
that let kernels assume aligned shapes.
"""

from __future__ import annotations

import numpy as np

# Type aliases used across the package. A Seed is any non-negative int; it is
# reduced mod 2**64 so the stream is well defined for arbitrary ints.
Matrix = np.ndarray
Seed = int

ALIGN_QUANTUM = 16

_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


class ShapeError(ValueError):
    """Raised when matrix dimensions do not line up for an operation."""


def as_matrix(data, rows: int | None = None, cols: int | None = None) -> Matrix:
    """Coerce nested lists or arrays to a float32 matrix.

    Flat input requires explicit rows/cols. Rejects non-2-D results and
    non-finite elements.
    """
    arr = np.asarray(data, dtype=np.float32)
    if arr.ndim == 1:
        if rows is None or cols is None:
            raise ShapeError("flat data needs explicit rows and cols")
        if arr.size != rows * cols:
            raise ShapeError(f"flat data has {arr.size} elements, expected {rows}x{cols}")
        arr = arr.reshape(rows, cols)
    elif arr.ndim == 2:
        if rows is not None and cols is not None and arr.shape != (rows, cols):
            raise ShapeError(f"data has shape {arr.shape}, expected ({rows}, {cols})")
    else:
        raise ShapeError(f"matrix must be 2-D, got ndim={arr.ndim}")
    if arr.shape[0] <= 0 or arr.shape[1] <= 0:
        raise ShapeError(f"matrix dims must be positive, got {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("matrix contains non-finite elements")
    return np.ascontiguousarray(arr)


def zeros(rows: int, cols: int) -> Matrix:
    return np.zeros((rows, cols), dtype=np.float32)


def identity(n: int) -> Matrix:
    return np.eye(n, dtype=np.float32)


def _splitmix64(indices: np.ndarray, seed: Seed) -> np.ndarray:
    """Output word i of the splitmix64 stream started at seed.

    Pure integer math on uint64, so the stream is identical on every platform
    and any element can be generated without the ones before it.
    """
    z = (np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + indices * _GOLDEN) & _MASK64
    z = ((z ^ (z >> np.uint64(30))) * _MIX1) & _MASK64
    z = ((z ^ (z >> np.uint64(27))) * _MIX2) & _MASK64
    return z ^ (z >> np.uint64(31))


def random_matrix(rows: int, cols: int, seed: Seed) -> Matrix:
    """Deterministic matrix with elements uniform in [-1, 1].

    Element (i, j) depends only on (seed, i*cols + j): the generator is
    counter-based, so repeated calls are bitwise identical and independent of
    numpy's global RNG state.
    """
    if rows <= 0 or cols <= 0:
        raise ShapeError(f"matrix dims must be positive, got ({rows}, {cols})")
    counters = np.arange(1, rows * cols + 1, dtype=np.uint64)
    words = _splitmix64(counters, seed)
    # Top 53 bits give an exact double in [0, 1); stretch to [-1, 1].
    unit = (words >> np.uint64(11)).astype(np.float64) * 2.0**-53
    return (2.0 * unit - 1.0).astype(np.float32).reshape(rows, cols)


def matmul_reference(a: Matrix, b: Matrix) -> Matrix:
    """Reference product: k-ascending accumulation in float64, cast to float32.

    The fixed summation order makes this the oracle every kernel variant is
    compared against.
    """
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"inner dims differ: {a.shape} @ {b.shape}")
    a64 = a.astype(np.float64)
    b64 = b.astype(np.float64)
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.float64)
    for k in range(a.shape[1]):
        out += np.outer(a64[:, k], b64[k, :])
    return out.astype(np.float32)


def pad_to_multiple(m: Matrix, quantum: int = ALIGN_QUANTUM) -> tuple[Matrix, tuple[int, int]]:
    """Zero-pad both dims up to the next multiple of quantum.

    Returns the padded matrix and the original dims so results can be cropped
    back. Already-aligned input is returned as a copy, unchanged.
    """
    if quantum <= 0:
        raise ValueError(f"quantum must be positive, got {quantum}")
    m = as_matrix(m)
    rows, cols = m.shape
    prows = -(-rows // quantum) * quantum
    pcols = -(-cols // quantum) * quantum
    padded = np.zeros((prows, pcols), dtype=np.float32)
    padded[:rows, :cols] = m
    return padded, (rows, cols)


def crop(m: Matrix, dims: tuple[int, int]) -> Matrix:
    """Undo pad_to_multiple: take the leading dims block."""
    rows, cols = dims
    if rows > m.shape[0] or cols > m.shape[1]:
        raise ShapeError(f"cannot crop {m.shape} to ({rows}, {cols})")
    return np.ascontiguousarray(m[:rows, :cols])


def relative_error(got: Matrix, ref: Matrix) -> float:
    """Max absolute difference normalized by the reference's largest magnitude."""
    got = np.asarray(got, dtype=np.float32)
    ref = np.asarray(ref, dtype=np.float32)
    if got.shape != ref.shape:
        raise ShapeError(f"shape mismatch: {got.shape} vs {ref.shape}")
    scale = max(float(np.max(np.abs(ref))), np.finfo(np.float32).tiny)
    return float(np.max(np.abs(got - ref))) / scale
