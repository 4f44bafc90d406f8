/** Registry of shippable kernels.
 *
 *  Each descriptor pairs a standalone OpenCL C file under kernels/ with its
 *  entry point, the build options it requires, and its launch-geometry rule.
 *  The two tile edges share one source each for the tiled strategies; the
 *  edge is selected at compile time with -DTILE.
 */
import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import type { KernelSource } from "./types.js";
import {
  launchGeometry,
  parseVariant,
  VARIANT_NAMES,
  type Variant,
  type VariantKind,
} from "./geometry.js";

const KERNEL_DIR = new URL("../kernels/", import.meta.url);

const FILE_BY_KIND: Record<VariantKind, string> = {
  naive: "gemm_naive.cl",
  vec4: "gemm_vec4.cl",
  tiled: "gemm_tiled.cl",
  tiledvec: "gemm_tiledvec.cl",
};

const sourceCache = new Map<string, string>();

/** Absolute path of the .cl file backing a variant. */
export function kernelFilePath(variant: string | Variant): string {
  const v = typeof variant === "string" ? parseVariant(variant) : variant;
  return fileURLToPath(new URL(FILE_BY_KIND[v.kind], KERNEL_DIR));
}

function readSource(v: Variant): string {
  const file = FILE_BY_KIND[v.kind];
  let text = sourceCache.get(file);
  if (text === undefined) {
    text = readFileSync(new URL(file, KERNEL_DIR), "utf8");
    sourceCache.set(file, text);
  }
  return text;
}

/** Full kernel descriptor for one variant name. */
export function kernelSource(name: string): KernelSource {
  const v = parseVariant(name);
  return {
    name: v.name,
    entryPoint: `gemm_${v.kind}`,
    source: readSource(v),
    buildOptions: v.tile ? [`-DTILE=${v.tile}`] : [],
    geometry: (m, n, k) => launchGeometry(v, m, n, k),
  };
}

/** Descriptors for every published variant, in reporting order. */
export function allKernelSources(): KernelSource[] {
  return VARIANT_NAMES.map((name) => kernelSource(name));
}
