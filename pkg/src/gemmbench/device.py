"""Data-parallel device model: launch geometry, memory counters, simulator.

The simulator executes kernel programs the way a GPU runtime schedules them:
work items are grouped by the launch config, each group runs in lock-step
phases separated by barriers, and every global/local memory access is counted
as a transaction (a width-w vector access is one transaction). Timing is not
simulated here; callers derive cost models from the counters.

Kernel bodies are generator functions taking a WorkItem context. A bare
``yield`` is a group barrier. Scalar arithmetic inside a body runs in Python
floats (double precision); stores into buffers round to float32.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Generator

import numpy as np

from gemmbench.tensor import Matrix

VALID_VECTOR_WIDTHS = (1, 2, 4, 8, 16)

_PROFILE_FIELDS = ("max_workgroup_size", "local_mem_bytes", "copy_bandwidth", "copy_latency", "vector_width")


class ConfigError(ValueError):
    """Launch geometry or profile value violates the device contract."""


class SimulationError(RuntimeError):
    """Kernel misbehaved while executing on the simulator."""


class BarrierDivergenceError(SimulationError):
    """Some work items in a group hit a barrier that others skipped."""


class MemoryFault(SimulationError):
    """A work item touched memory outside a bound buffer."""


class ResourceError(SimulationError):
    """A kernel exceeded a device capability (local memory, vector width)."""


@dataclass(frozen=True)
class DeviceProfile:
    """Static capabilities of the modeled device.

    copy_bandwidth is bytes/second (math.inf allowed), copy_latency is the
    fixed per-transfer cost in seconds.
    """

    max_workgroup_size: int
    local_mem_bytes: int
    copy_bandwidth: float
    copy_latency: float
    vector_width: int

    def __post_init__(self):
        if self.max_workgroup_size <= 0:
            raise ConfigError(f"max_workgroup_size must be positive, got {self.max_workgroup_size}")
        if self.local_mem_bytes <= 0:
            raise ConfigError(f"local_mem_bytes must be positive, got {self.local_mem_bytes}")
        if not self.copy_bandwidth > 0:
            raise ConfigError(f"copy_bandwidth must be positive, got {self.copy_bandwidth}")
        if self.copy_latency < 0 or math.isnan(self.copy_latency) or math.isinf(self.copy_latency):
            raise ConfigError(f"copy_latency must be finite and non-negative, got {self.copy_latency}")
        if self.vector_width not in VALID_VECTOR_WIDTHS:
            raise ConfigError(f"vector_width must be one of {VALID_VECTOR_WIDTHS}, got {self.vector_width}")

    @classmethod
    def from_json(cls, text: str) -> "DeviceProfile":
        """Parse a profile from JSON with exactly the five known fields."""
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"profile is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("profile JSON must be an object")
        unknown = sorted(set(raw) - set(_PROFILE_FIELDS))
        if unknown:
            raise ConfigError(f"unknown profile fields: {', '.join(unknown)}")
        missing = sorted(set(_PROFILE_FIELDS) - set(raw))
        if missing:
            raise ConfigError(f"missing profile fields: {', '.join(missing)}")
        for key in ("max_workgroup_size", "local_mem_bytes", "vector_width"):
            if not isinstance(raw[key], int) or isinstance(raw[key], bool):
                raise ConfigError(f"profile field {key} must be an integer")
        for key in ("copy_bandwidth", "copy_latency"):
            if isinstance(raw[key], bool) or not isinstance(raw[key], (int, float)):
                raise ConfigError(f"profile field {key} must be a number")
        return cls(
            max_workgroup_size=raw["max_workgroup_size"],
            local_mem_bytes=raw["local_mem_bytes"],
            copy_bandwidth=float(raw["copy_bandwidth"]),
            copy_latency=float(raw["copy_latency"]),
            vector_width=raw["vector_width"],
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "max_workgroup_size": self.max_workgroup_size,
                "local_mem_bytes": self.local_mem_bytes,
                "copy_bandwidth": self.copy_bandwidth,
                "copy_latency": self.copy_latency,
                "vector_width": self.vector_width,
            },
            indent=2,
        )


def load_profile(path) -> DeviceProfile:
    with open(path, "r", encoding="utf-8") as fh:
        return DeviceProfile.from_json(fh.read())


def packaged_profile(name: str) -> DeviceProfile:
    """One of the profiles shipped with the package: calibrated or zero_copy."""
    from importlib import resources

    ref = resources.files("gemmbench").joinpath(f"profiles/{name}.json")
    try:
        text = ref.read_text()
    except FileNotFoundError:
        raise ConfigError(f"no packaged profile named {name!r}") from None
    return DeviceProfile.from_json(text)


@dataclass(frozen=True)
class LaunchConfig:
    """Global and local (per-group) work sizes, row-major (dim0, dim1)."""

    global_size: tuple[int, int]
    local_size: tuple[int, int]


def validate_config(config: LaunchConfig, profile: DeviceProfile) -> None:
    gs, ls = config.global_size, config.local_size
    if len(gs) != 2 or len(ls) != 2:
        raise ConfigError("launch config must be two-dimensional")
    for dim in (0, 1):
        if gs[dim] <= 0 or ls[dim] <= 0:
            raise ConfigError(f"sizes must be positive, got global={gs} local={ls}")
        if gs[dim] % ls[dim] != 0:
            raise ConfigError(
                f"local size must divide global size in dim {dim}: {gs[dim]} % {ls[dim]} != 0"
            )
    group_items = ls[0] * ls[1]
    if group_items > profile.max_workgroup_size:
        raise ConfigError(
            f"work group has {group_items} items, device allows {profile.max_workgroup_size}"
        )


@dataclass
class MemCounters:
    """Transaction totals over a whole launch. One vector access = one transaction."""

    global_loads: int = 0
    global_stores: int = 0
    local_loads: int = 0
    local_stores: int = 0
    barriers: int = 0

    def __add__(self, other: "MemCounters") -> "MemCounters":
        return MemCounters(
            self.global_loads + other.global_loads,
            self.global_stores + other.global_stores,
            self.local_loads + other.local_loads,
            self.local_stores + other.local_stores,
            self.barriers + other.barriers,
        )

    def total_global(self) -> int:
        return self.global_loads + self.global_stores

    def total_local(self) -> int:
        return self.local_loads + self.local_stores


KernelBody = Callable[["WorkItem"], Generator]


@dataclass(frozen=True)
class KernelProgram:
    """A named kernel body plus the local allocations it needs per group.

    local_spec maps allocation name to (rows, cols); the simulator charges
    4 bytes per element against the profile's local memory before any item
    runs.
    """

    name: str
    body: KernelBody
    local_spec: dict[str, tuple[int, int]] = field(default_factory=dict)


class _Group:
    """Shared per-workgroup state: local memory arrays."""

    __slots__ = ("local_mem",)

    def __init__(self, program: KernelProgram, profile: DeviceProfile):
        needed = sum(r * c for r, c in program.local_spec.values()) * 4
        if needed > profile.local_mem_bytes:
            raise ResourceError(
                f"kernel {program.name} needs {needed} B of local memory, "
                f"device has {profile.local_mem_bytes} B"
            )
        self.local_mem = {
            name: np.zeros(shape, dtype=np.float32) for name, shape in program.local_spec.items()
        }


class WorkItem:
    """Execution context handed to a kernel body for one work item."""

    __slots__ = ("gid", "lid", "group_id", "_buffers", "_group", "_counters", "_max_vec")

    def __init__(self, gid, lid, group_id, buffers, group, counters, max_vec):
        self.gid = gid
        self.lid = lid
        self.group_id = group_id
        self._buffers = buffers
        self._group = group
        self._counters = counters
        self._max_vec = max_vec

    def _buffer(self, name: str) -> np.ndarray:
        try:
            return self._buffers[name]
        except KeyError:
            raise MemoryFault(f"work item {self.gid}: no buffer named {name!r}") from None

    def _check(self, buf: np.ndarray, name: str, i: int, j: int, width: int = 1) -> None:
        if i < 0 or j < 0 or i >= buf.shape[0] or j + width > buf.shape[1]:
            raise MemoryFault(
                f"work item {self.gid}: access {name}[{i}, {j}:{j + width}] "
                f"outside shape {buf.shape}"
            )

    def _check_width(self, width: int) -> None:
        if width not in VALID_VECTOR_WIDTHS:
            raise ResourceError(f"vector width must be one of {VALID_VECTOR_WIDTHS}, got {width}")
        if width > self._max_vec:
            raise ResourceError(
                f"kernel uses width-{width} vectors, device supports up to {self._max_vec}"
            )

    # Global memory. Scalar values travel as Python floats.

    def load(self, name: str, i: int, j: int) -> float:
        buf = self._buffer(name)
        self._check(buf, name, i, j)
        self._counters.global_loads += 1
        return float(buf[i, j])

    def store(self, name: str, i: int, j: int, value: float) -> None:
        buf = self._buffer(name)
        self._check(buf, name, i, j)
        self._counters.global_stores += 1
        buf[i, j] = np.float32(value)

    def load_vec(self, name: str, i: int, j: int, width: int) -> tuple:
        self._check_width(width)
        buf = self._buffer(name)
        self._check(buf, name, i, j, width)
        self._counters.global_loads += 1
        return tuple(float(v) for v in buf[i, j : j + width])

    def store_vec(self, name: str, i: int, j: int, values) -> None:
        width = len(values)
        self._check_width(width)
        buf = self._buffer(name)
        self._check(buf, name, i, j, width)
        self._counters.global_stores += 1
        buf[i, j : j + width] = np.asarray(values, dtype=np.float32)

    # Local memory, shared within the work group.

    def _local(self, name: str) -> np.ndarray:
        try:
            return self._group.local_mem[name]
        except KeyError:
            raise MemoryFault(f"work item {self.gid}: no local allocation named {name!r}") from None

    def local_load(self, name: str, i: int, j: int) -> float:
        buf = self._local(name)
        self._check(buf, name, i, j)
        self._counters.local_loads += 1
        return float(buf[i, j])

    def local_store(self, name: str, i: int, j: int, value: float) -> None:
        buf = self._local(name)
        self._check(buf, name, i, j)
        self._counters.local_stores += 1
        buf[i, j] = np.float32(value)

    def local_load_vec(self, name: str, i: int, j: int, width: int) -> tuple:
        self._check_width(width)
        buf = self._local(name)
        self._check(buf, name, i, j, width)
        self._counters.local_loads += 1
        return tuple(float(v) for v in buf[i, j : j + width])

    def local_store_vec(self, name: str, i: int, j: int, values) -> None:
        width = len(values)
        self._check_width(width)
        buf = self._local(name)
        self._check(buf, name, i, j, width)
        self._counters.local_stores += 1
        buf[i, j : j + width] = np.asarray(values, dtype=np.float32)


def simulate_launch(
    program: KernelProgram,
    config: LaunchConfig,
    profile: DeviceProfile,
    buffers: dict[str, Matrix],
) -> MemCounters:
    """Run a kernel over the whole launch grid; returns transaction counters.

    Stores mutate the bound buffers in place. Groups execute independently;
    items inside a group advance in lock-step between barriers, and a group
    where only some items reach a barrier raises BarrierDivergenceError.
    """
    validate_config(config, profile)
    for name, buf in buffers.items():
        if not isinstance(buf, np.ndarray) or buf.ndim != 2 or buf.dtype != np.float32:
            raise ConfigError(f"buffer {name!r} must be a 2-D float32 array")

    (g0, g1), (l0, l1) = config.global_size, config.local_size
    counters = MemCounters()
    for base0 in range(0, g0, l0):
        for base1 in range(0, g1, l1):
            group = _Group(program, profile)
            group_id = (base0 // l0, base1 // l1)
            items = []
            for i0 in range(l0):
                for i1 in range(l1):
                    ctx = WorkItem(
                        gid=(base0 + i0, base1 + i1),
                        lid=(i0, i1),
                        group_id=group_id,
                        buffers=buffers,
                        group=group,
                        counters=counters,
                        max_vec=profile.vector_width,
                    )
                    gen = program.body(ctx)
                    if not isinstance(gen, Generator):
                        raise SimulationError(f"kernel {program.name} body must be a generator")
                    items.append((ctx, gen))
            # Lock-step phases: advance every live item to its next barrier.
            live = list(items)
            while live:
                arrived, finished = [], []
                for ctx, gen in live:
                    try:
                        next(gen)
                    except StopIteration:
                        finished.append((ctx, gen))
                    else:
                        counters.barriers += 1
                        arrived.append((ctx, gen))
                if arrived and finished:
                    raise BarrierDivergenceError(
                        f"kernel {program.name}, group {group_id}: {len(arrived)} items "
                        f"at a barrier, {len(finished)} already finished"
                    )
                live = arrived
    return counters


def transfer_time(nbytes: int, profile: DeviceProfile) -> float:
    """Seconds to move nbytes one way between host and device."""
    if nbytes < 0:
        raise ValueError(f"nbytes must be non-negative, got {nbytes}")
    if math.isinf(profile.copy_bandwidth):
        return profile.copy_latency
    return profile.copy_latency + nbytes / profile.copy_bandwidth
