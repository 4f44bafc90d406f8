/** A host-only stand-in for a device runtime.
 *
 *  It executes each kernel's strategy — work-item layout, strip and tile
 *  walk, float32 accumulation — in plain TypeScript, and stamps profiling
 *  events from the host monotonic clock in enqueue order. It is NOT a
 *  conformant device: nothing is compiled to OpenCL, and the timings carry
 *  no device semantics. It exists so the bridge, its compile cache, and the
 *  result contracts stay testable on machines without a GPU.
 */
import { hrtime } from "node:process";
import {
  KernelBuildError,
  type CompiledKernel,
  type DeviceRuntime,
  type GemmDims,
  type KernelSource,
  type LaunchGeometry,
  type ProfilingEvent,
  type RunResult,
} from "./types.js";
import { parseVariant, VEC, type Variant } from "./geometry.js";

const f = Math.fround;

function span(label: string, work: () => void): ProfilingEvent {
  const startNs = hrtime.bigint();
  work();
  const endNs = hrtime.bigint();
  return { label, startNs, endNs };
}

/** One work item per output element; float32 accumulator, k ascending. */
function runNaive(dims: GemmDims, a: Float32Array, b: Float32Array): Float32Array {
  const { m, n, k } = dims;
  const c = new Float32Array(m * n);
  for (let i = 0; i < m; i++) {
    for (let j = 0; j < n; j++) {
      let acc = 0;
      for (let p = 0; p < k; p++) {
        acc = f(acc + f(a[i * k + p] * b[p * n + j]));
      }
      c[i * n + j] = acc;
    }
  }
  return c;
}

/** One work item per 1x4 strip; width-4 chunks of A against four B rows. */
function runVec4(dims: GemmDims, a: Float32Array, b: Float32Array): Float32Array {
  const { m, n, k } = dims;
  const c = new Float32Array(m * n);
  const acc = new Float32Array(VEC);
  for (let i = 0; i < m; i++) {
    for (let jv = 0; jv < n / VEC; jv++) {
      acc.fill(0);
      for (let kv = 0; kv < k / VEC; kv++) {
        for (let u = 0; u < VEC; u++) {
          const av = a[i * k + kv * VEC + u];
          const row = (kv * VEC + u) * n + jv * VEC;
          for (let l = 0; l < VEC; l++) {
            acc[l] = f(acc[l] + f(av * b[row + l]));
          }
        }
      }
      c.set(acc, i * n + jv * VEC);
    }
  }
  return c;
}

/** Workgroup stages a t x t block of A and of B per K-phase, then every item
 *  accumulates its element from the staged blocks. */
function runTiled(dims: GemmDims, a: Float32Array, b: Float32Array, v: Variant): Float32Array {
  const { m, n, k } = dims;
  const t = v.tile;
  const c = new Float32Array(m * n);
  const ta = new Float32Array(t * t);
  const tb = new Float32Array(t * t);
  const acc = new Float32Array(t * t);
  for (let gi = 0; gi < m / t; gi++) {
    for (let gj = 0; gj < n / t; gj++) {
      acc.fill(0);
      for (let p = 0; p < k; p += t) {
        for (let li = 0; li < t; li++) {
          for (let lj = 0; lj < t; lj++) {
            ta[li * t + lj] = a[(gi * t + li) * k + p + lj];
            tb[li * t + lj] = b[(p + li) * n + gj * t + lj];
          }
        }
        for (let li = 0; li < t; li++) {
          for (let lj = 0; lj < t; lj++) {
            let s = acc[li * t + lj];
            for (let tt = 0; tt < t; tt++) {
              s = f(s + f(ta[li * t + tt] * tb[tt * t + lj]));
            }
            acc[li * t + lj] = s;
          }
        }
      }
      for (let li = 0; li < t; li++) {
        for (let lj = 0; lj < t; lj++) {
          c[(gi * t + li) * n + gj * t + lj] = acc[li * t + lj];
        }
      }
    }
  }
  return c;
}

/** Tiling fused with 1x4 strips: same staged blocks, four outputs per item. */
function runTiledVec(dims: GemmDims, a: Float32Array, b: Float32Array, v: Variant): Float32Array {
  const { m, n, k } = dims;
  const t = v.tile;
  const tv = t / VEC;
  const c = new Float32Array(m * n);
  const ta = new Float32Array(t * t);
  const tb = new Float32Array(t * t);
  const acc = new Float32Array(t * t);
  for (let gi = 0; gi < m / t; gi++) {
    for (let gj = 0; gj < n / t; gj++) {
      acc.fill(0);
      for (let p = 0; p < k; p += t) {
        for (let li = 0; li < t; li++) {
          for (let lj = 0; lj < tv; lj++) {
            for (let u = 0; u < VEC; u++) {
              ta[li * t + lj * VEC + u] = a[(gi * t + li) * k + p + lj * VEC + u];
              tb[li * t + lj * VEC + u] = b[(p + li) * n + gj * t + lj * VEC + u];
            }
          }
        }
        for (let li = 0; li < t; li++) {
          for (let lj = 0; lj < tv; lj++) {
            for (let tt = 0; tt < t; tt++) {
              const av = ta[li * t + tt];
              for (let u = 0; u < VEC; u++) {
                const idx = li * t + lj * VEC + u;
                acc[idx] = f(acc[idx] + f(av * tb[tt * t + lj * VEC + u]));
              }
            }
          }
        }
      }
      for (let li = 0; li < t; li++) {
        for (let lj = 0; lj < t; lj++) {
          c[(gi * t + li) * n + gj * t + lj] = acc[li * t + lj];
        }
      }
    }
  }
  return c;
}

export class StandInRuntime implements DeviceRuntime {
  readonly deviceName = "host-stand-in";

  /** compile() invocations so far; lets tests observe the bridge's cache. */
  compileCount = 0;

  compile(kernel: KernelSource): CompiledKernel {
    const diagnostics: string[] = [];
    if (!kernel.source.includes(`__kernel void ${kernel.entryPoint}`)) {
      diagnostics.push(
        `${kernel.name}: error: entry point '${kernel.entryPoint}' not found`,
      );
    }
    const opens = kernel.source.split("{").length - 1;
    const closes = kernel.source.split("}").length - 1;
    if (opens !== closes) {
      diagnostics.push(
        `${kernel.name}: error: unbalanced braces (${opens} '{' vs ${closes} '}')`,
      );
    }
    for (const opt of kernel.buildOptions) {
      if (!/^-D[A-Za-z_][A-Za-z0-9_]*(=[-\w]+)?$/.test(opt)) {
        diagnostics.push(`${kernel.name}: error: unsupported build option '${opt}'`);
      }
    }
    if (diagnostics.length > 0) {
      throw new KernelBuildError(
        `failed to build kernel '${kernel.name}'`,
        diagnostics.join("\n"),
      );
    }
    this.compileCount += 1;
    return { kernelName: kernel.entryPoint, handle: parseVariant(kernel.name) };
  }

  run(
    compiled: CompiledKernel,
    geometry: LaunchGeometry,
    dims: GemmDims,
    a: Float32Array,
    b: Float32Array,
  ): RunResult {
    // A real queue enforces this too: the workgroup must tile the grid.
    if (
      geometry.globalSize[0] % geometry.localSize[0] !== 0 ||
      geometry.globalSize[1] % geometry.localSize[1] !== 0
    ) {
      throw new RangeError(
        `local size (${geometry.localSize}) does not divide global size (${geometry.globalSize})`,
      );
    }
    const v = compiled.handle as Variant;
    let deviceA!: Float32Array;
    let deviceB!: Float32Array;
    const copyInEvent = span("copy-in", () => {
      deviceA = a.slice();
      deviceB = b.slice();
    });
    let deviceC!: Float32Array;
    const kernelEvent = span(compiled.kernelName, () => {
      switch (v.kind) {
        case "naive":
          deviceC = runNaive(dims, deviceA, deviceB);
          break;
        case "vec4":
          deviceC = runVec4(dims, deviceA, deviceB);
          break;
        case "tiled":
          deviceC = runTiled(dims, deviceA, deviceB, v);
          break;
        case "tiledvec":
          deviceC = runTiledVec(dims, deviceA, deviceB, v);
          break;
      }
    });
    let output!: Float32Array;
    const copyOutEvent = span("copy-out", () => {
      output = deviceC.slice();
    });
    return { output, kernelEvent, copyInEvent, copyOutEvent };
  }
}
