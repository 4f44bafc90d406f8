/** Host bridge: one entry point that runs a GEMM on a device runtime, with
 *  per-runtime compile caching and argument checking in front of it. */
import {
  CapabilityError,
  type CompiledKernel,
  type DeviceRuntime,
  type GemmDims,
  type KernelSource,
  type RunResult,
} from "./types.js";
import { kernelSource } from "./kernels.js";

const compileCaches = new WeakMap<DeviceRuntime, Map<string, CompiledKernel>>();

/** Compile `kernel` on `runtime` at most once; later calls reuse the handle.
 *  The cache is keyed per runtime, so distinct devices each compile their
 *  own binaries and a collected runtime releases its cache with it. */
export function compileOnce(
  runtime: DeviceRuntime,
  kernel: KernelSource,
): CompiledKernel {
  let cache = compileCaches.get(runtime);
  if (!cache) {
    cache = new Map();
    compileCaches.set(runtime, cache);
  }
  let compiled = cache.get(kernel.name);
  if (!compiled) {
    compiled = runtime.compile(kernel);
    cache.set(kernel.name, compiled);
  }
  return compiled;
}

/** Run one GEMM with the named variant on `runtime`.
 *
 *  Compiles the kernel once per runtime, binds the operands, enqueues with
 *  the variant's launch rule, and returns the result with one profiling
 *  event for the kernel and one per copy direction.
 *
 *  Throws CapabilityError when `runtime` is missing, GeometryError when the
 *  dims break the variant's launch rule, RangeError when operand lengths do
 *  not match the dims, and KernelBuildError (build log attached verbatim)
 *  when compilation fails.
 */
export function runOnDevice(
  runtime: DeviceRuntime | null | undefined,
  variantName: string,
  dims: GemmDims,
  a: Float32Array,
  b: Float32Array,
): RunResult {
  if (!runtime) {
    throw new CapabilityError(
      "no compute device available: pass a DeviceRuntime to run kernels on hardware",
    );
  }
  const kernel = kernelSource(variantName);
  const geometry = kernel.geometry(dims.m, dims.n, dims.k);
  if (a.length !== dims.m * dims.k) {
    throw new RangeError(
      `operand A has ${a.length} elements, expected ${dims.m * dims.k}`,
    );
  }
  if (b.length !== dims.k * dims.n) {
    throw new RangeError(
      `operand B has ${b.length} elements, expected ${dims.k * dims.n}`,
    );
  }
  const compiled = compileOnce(runtime, kernel);
  return runtime.run(compiled, geometry, dims, a, b);
}

/** Locate a real device runtime.
 *
 *  This build ships no OpenCL host binding, so discovery always reports that
 *  none is present; callers that reach runOnDevice(null, ...) get a
 *  CapabilityError. Embedders with hardware inject their own DeviceRuntime
 *  implementation instead.
 */
export function discoverRuntime(): DeviceRuntime | null {
  return null;
}
