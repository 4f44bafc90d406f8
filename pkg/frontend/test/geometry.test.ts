import { describe, expect, it } from "vitest";
import {
  GeometryError,
  launchGeometry,
  parseVariant,
  VARIANT_NAMES,
  workItems,
} from "../src/index.js";

describe("variant names", () => {
  it("publishes the six known variants", () => {
    expect(VARIANT_NAMES).toEqual([
      "naive",
      "vec4",
      "tiled8",
      "tiled16",
      "tiledvec8",
      "tiledvec16",
    ]);
    for (const name of VARIANT_NAMES) {
      expect(parseVariant(name).name).toBe(name);
    }
  });

  it("splits tiled names into kind and tile edge", () => {
    expect(parseVariant("tiled8")).toEqual({ name: "tiled8", kind: "tiled", tile: 8 });
    expect(parseVariant("tiledvec16")).toEqual({
      name: "tiledvec16",
      kind: "tiledvec",
      tile: 16,
    });
    expect(parseVariant("naive").tile).toBe(0);
    expect(parseVariant("vec4").tile).toBe(0);
  });

  it("rejects unknown names and tile edges", () => {
    for (const bad of ["fast", "tiled", "tiled32", "tiledvec4", "vec8", ""]) {
      expect(() => parseVariant(bad)).toThrow(GeometryError);
    }
  });
});

describe("launch rules", () => {
  const cases: Array<
    [string, readonly [number, number], readonly [number, number]]
  > = [
    ["naive", [32, 64], [16, 16]],
    ["vec4", [32, 16], [16, 4]],
    ["tiled8", [32, 64], [8, 8]],
    ["tiled16", [32, 64], [16, 16]],
    ["tiledvec8", [32, 16], [8, 2]],
    ["tiledvec16", [32, 16], [16, 4]],
  ];

  it.each(cases)("%s launches (32, 64, 48) as expected", (name, globalSize, localSize) => {
    const g = launchGeometry(name, 32, 64, 48);
    expect(g.globalSize).toEqual(globalSize);
    expect(g.localSize).toEqual(localSize);
  });

  it("covers each output element once: one item each, or one 1x4 strip", () => {
    for (const name of VARIANT_NAMES) {
      const v = parseVariant(name);
      const g = launchGeometry(v, 64, 128, 32);
      const perItem = v.kind === "vec4" || v.kind === "tiledvec" ? 4 : 1;
      expect(workItems(g) * perItem).toBe(64 * 128);
      expect(g.globalSize[0] % g.localSize[0]).toBe(0);
      expect(g.globalSize[1] % g.localSize[1]).toBe(0);
    }
  });

  it("rejects dims off the 16 grid", () => {
    expect(() => launchGeometry("naive", 17, 32, 32)).toThrow(/m must be a positive multiple of 16/);
    expect(() => launchGeometry("naive", 32, 40, 32)).toThrow(GeometryError);
    expect(() => launchGeometry("tiled16", 32, 32, 20)).toThrow(/k must be/);
    expect(() => launchGeometry("vec4", 0, 32, 32)).toThrow(GeometryError);
    expect(() => launchGeometry("tiledvec8", 32, 32, -16)).toThrow(GeometryError);
    expect(() => launchGeometry("naive", 32.5, 32, 32)).toThrow(GeometryError);
  });

  it("accepts every multiple of 16 up to desk scale", () => {
    for (let dim = 16; dim <= 512; dim += 16) {
      const g = launchGeometry("tiledvec16", dim, dim, dim);
      expect(workItems(g)).toBe((dim * dim) / 4);
    }
  });
});
