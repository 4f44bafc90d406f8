/** Launch-geometry rules for every kernel variant.
 *
 *  These mirror, rule for rule, the geometries the benchmark library declares
 *  for its simulated kernels; the parity suite cross-checks them against that
 *  package's CLI output so the two can never drift apart silently.
 */
import type { LaunchGeometry } from "./types.js";

/** Vector width used by the vectorized variants. */
export const VEC = 4;

/** Tile edges the tiled sources accept via -DTILE. */
export const VALID_TILES: readonly number[] = [8, 16];

export type VariantKind = "naive" | "vec4" | "tiled" | "tiledvec";

export interface Variant {
  readonly name: string;
  readonly kind: VariantKind;
  /** Tile edge for tiled kinds; 0 for the untiled ones. */
  readonly tile: number;
}

/** Every published variant name, in reporting order. */
export const VARIANT_NAMES: readonly string[] = [
  "naive",
  "vec4",
  "tiled8",
  "tiled16",
  "tiledvec8",
  "tiledvec16",
];

/** Raised for unknown variant names or dims that break a launch rule. */
export class GeometryError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "GeometryError";
  }
}

/** Split a variant name like "tiledvec16" into its kind and tile edge. */
export function parseVariant(name: string): Variant {
  if (name === "naive" || name === "vec4") {
    return { name, kind: name, tile: 0 };
  }
  for (const kind of ["tiledvec", "tiled"] as const) {
    if (name.startsWith(kind)) {
      const tile = Number(name.slice(kind.length));
      if (VALID_TILES.includes(tile)) {
        return { name, kind, tile };
      }
    }
  }
  throw new GeometryError(`unknown kernel variant: ${name}`);
}

/** Launch grid for output dims (m, n) at reduction depth k.
 *
 *  Scalar kinds put one work item on each output element; vector kinds put
 *  one on each 1x4 strip. Every dim must be a positive multiple of 16.
 */
export function launchGeometry(
  variant: string | Variant,
  m: number,
  n: number,
  k: number,
): LaunchGeometry {
  const v = typeof variant === "string" ? parseVariant(variant) : variant;
  const dims: ReadonlyArray<readonly [string, number]> = [
    ["m", m],
    ["n", n],
    ["k", k],
  ];
  for (const [label, dim] of dims) {
    if (!Number.isInteger(dim) || dim <= 0 || dim % 16 !== 0) {
      throw new GeometryError(
        `${label} must be a positive multiple of 16, got ${dim}`,
      );
    }
  }
  switch (v.kind) {
    case "naive":
      return { globalSize: [m, n], localSize: [16, 16] };
    case "vec4":
      return { globalSize: [m, n / VEC], localSize: [16, VEC] };
    case "tiled":
      return { globalSize: [m, n], localSize: [v.tile, v.tile] };
    case "tiledvec":
      return { globalSize: [m, n / VEC], localSize: [v.tile, v.tile / VEC] };
  }
}

/** Total work items a geometry launches. */
export function workItems(geometry: LaunchGeometry): number {
  return geometry.globalSize[0] * geometry.globalSize[1];
}
