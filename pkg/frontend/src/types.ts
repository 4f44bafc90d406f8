/** Shared contracts for the GPU backend: kernel descriptors, the device
 *  runtime surface, profiling events, and the errors the bridge can raise. */

/** Monotonic nanosecond timestamps for one device-side phase (a kernel
 *  execution or one copy direction). */
export interface ProfilingEvent {
  readonly label: string;
  readonly startNs: bigint;
  readonly endNs: bigint;
}

/** Duration of an event in milliseconds. */
export function eventMillis(event: ProfilingEvent): number {
  return Number(event.endNs - event.startNs) / 1e6;
}

/** Launch shape: global work size and workgroup size as (dim0, dim1). */
export interface LaunchGeometry {
  readonly globalSize: readonly [number, number];
  readonly localSize: readonly [number, number];
}

/** Problem dims for C[m,n] = A[m,k] @ B[k,n]; every dim a multiple of 16. */
export interface GemmDims {
  readonly m: number;
  readonly n: number;
  readonly k: number;
}

/** One kernel ready to hand to a device layer: its entry point, the full
 *  OpenCL C source text, the compile options it requires, and the launch
 *  geometry rule it must be enqueued with. */
export interface KernelSource {
  /** Variant name, e.g. "tiledvec16". */
  readonly name: string;
  /** Name of the __kernel function inside `source`. */
  readonly entryPoint: string;
  /** OpenCL C source text, loaded from a standalone .cl file. */
  readonly source: string;
  /** Compiler options the source requires, e.g. ["-DTILE=16"]. */
  readonly buildOptions: readonly string[];
  /** Launch rule for output dims (m, n) at reduction depth k. */
  geometry(m: number, n: number, k: number): LaunchGeometry;
}

/** Opaque handle a runtime returns from compile() and accepts in run(). */
export interface CompiledKernel {
  readonly kernelName: string;
  readonly handle: unknown;
}

/** Everything one device run returns: the output matrix plus timestamps for
 *  the kernel and for both copy directions. */
export interface RunResult {
  /** Row-major m x n result. */
  readonly output: Float32Array;
  readonly kernelEvent: ProfilingEvent;
  /** Host-to-device transfer of both operands. */
  readonly copyInEvent: ProfilingEvent;
  /** Device-to-host transfer of the result. */
  readonly copyOutEvent: ProfilingEvent;
}

/** The thin surface a concrete device layer must provide. A real
 *  implementation wraps an OpenCL context and queue; StandInRuntime is a
 *  host-only stand-in for environments without a GPU. */
export interface DeviceRuntime {
  readonly deviceName: string;
  /** Compile one kernel. Must throw KernelBuildError carrying the full
   *  build log when compilation fails. */
  compile(kernel: KernelSource): CompiledKernel;
  /** Enqueue a compiled kernel with the given geometry, copy operands in and
   *  the result out, and report an event for each phase. */
  run(
    compiled: CompiledKernel,
    geometry: LaunchGeometry,
    dims: GemmDims,
    a: Float32Array,
    b: Float32Array,
  ): RunResult;
}

/** Raised when no compute device or runtime is available. */
export class CapabilityError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "CapabilityError";
  }
}

/** Raised when kernel compilation fails; `buildLog` carries the device
 *  compiler's log verbatim, and it is appended to the message. */
export class KernelBuildError extends Error {
  readonly buildLog: string;

  constructor(message: string, buildLog: string) {
    super(`${message}\n${buildLog}`);
    this.name = "KernelBuildError";
    this.buildLog = buildLog;
  }
}
