"""Reader for the big-endian IDX image/label container format.

Image files carry magic 2051 and dims [count, rows, cols]; label files carry
magic 2049 and [count]. Pixels are bytes scaled to [0, 1] float32 and images
are flattened row-major, so a 28x28 set feeds a 784-wide model directly.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from gemmbench.training import Batch

IMAGE_MAGIC = 2051
LABEL_MAGIC = 2049


class FormatError(ValueError):
    """The file does not follow the IDX layout."""


def _read_exact(fh, n: int, what: str) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise FormatError(f"truncated file: expected {n} bytes of {what}, got {len(data)}")
    return data


def load_idx_images(path) -> np.ndarray:
    """Images as [count, rows*cols] float32 in [0, 1]."""
    with open(path, "rb") as fh:
        magic, count, rows, cols = struct.unpack(">iiii", _read_exact(fh, 16, "image header"))
        if magic != IMAGE_MAGIC:
            raise FormatError(f"bad image magic {magic}, expected {IMAGE_MAGIC}")
        if count < 0 or rows <= 0 or cols <= 0:
            raise FormatError(f"bad image dims: count={count} rows={rows} cols={cols}")
        raw = _read_exact(fh, count * rows * cols, "pixels")
        if fh.read(1):
            raise FormatError("trailing bytes after pixel data")
    pixels = np.frombuffer(raw, dtype=np.uint8).astype(np.float32) / 255.0
    return pixels.reshape(count, rows * cols)


def load_idx_labels(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic, count = struct.unpack(">ii", _read_exact(fh, 8, "label header"))
        if magic != LABEL_MAGIC:
            raise FormatError(f"bad label magic {magic}, expected {LABEL_MAGIC}")
        if count < 0:
            raise FormatError(f"bad label count {count}")
        raw = _read_exact(fh, count, "labels")
        if fh.read(1):
            raise FormatError("trailing bytes after label data")
    return np.frombuffer(raw, dtype=np.uint8).astype(np.int64)


@dataclass(frozen=True)
class IdxDataset:
    """A matched image/label pair ready to slice into batches."""

    images: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        if self.images.shape[0] != self.labels.shape[0]:
            raise FormatError(
                f"image/label count mismatch: {self.images.shape[0]} vs {self.labels.shape[0]}"
            )

    def __len__(self) -> int:
        return self.images.shape[0]

    @property
    def width(self) -> int:
        return self.images.shape[1]

    def batch(self, size: int, offset: int = 0) -> Batch:
        if size <= 0:
            raise ValueError(f"batch size must be positive, got {size}")
        if offset < 0 or offset + size > len(self):
            raise ValueError(
                f"batch [{offset}, {offset + size}) outside dataset of {len(self)} rows"
            )
        return Batch(
            inputs=np.ascontiguousarray(self.images[offset : offset + size]),
            labels=self.labels[offset : offset + size].copy(),
        )


def load_idx(images_path, labels_path) -> IdxDataset:
    return IdxDataset(images=load_idx_images(images_path), labels=load_idx_labels(labels_path))
