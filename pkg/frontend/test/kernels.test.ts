import { existsSync, readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";
import {
  allKernelSources,
  kernelFilePath,
  kernelSource,
  VARIANT_NAMES,
} from "../src/index.js";

describe("kernel registry", () => {
  it("ships one standalone .cl file per strategy", () => {
    const files = new Set(VARIANT_NAMES.map((name) => kernelFilePath(name)));
    expect(files.size).toBe(4);
    for (const file of files) {
      expect(file.endsWith(".cl")).toBe(true);
      expect(existsSync(file)).toBe(true);
    }
  });

  it("loads source text that matches the file on disk", () => {
    for (const name of VARIANT_NAMES) {
      const kernel = kernelSource(name);
      expect(kernel.source).toBe(readFileSync(kernelFilePath(name), "utf8"));
      expect(kernel.source.length).toBeGreaterThan(0);
    }
  });

  it("declares the entry point inside the source", () => {
    for (const kernel of allKernelSources()) {
      expect(kernel.source).toContain(`__kernel void ${kernel.entryPoint}(`);
    }
  });

  it("requires -DTILE only for the tiled strategies", () => {
    expect(kernelSource("naive").buildOptions).toEqual([]);
    expect(kernelSource("vec4").buildOptions).toEqual([]);
    expect(kernelSource("tiled8").buildOptions).toEqual(["-DTILE=8"]);
    expect(kernelSource("tiled16").buildOptions).toEqual(["-DTILE=16"]);
    expect(kernelSource("tiledvec8").buildOptions).toEqual(["-DTILE=8"]);
    expect(kernelSource("tiledvec16").buildOptions).toEqual(["-DTILE=16"]);
  });

  it("defaults TILE in the source so the option only overrides it", () => {
    for (const name of ["tiled16", "tiledvec16"]) {
      const { source } = kernelSource(name);
      expect(source).toContain("#ifndef TILE");
      expect(source).toContain("#define TILE 16");
    }
  });

  it("synchronizes twice per tile phase in the tiled sources", () => {
    for (const name of ["tiled16", "tiledvec16"]) {
      const { source } = kernelSource(name);
      const barriers = source.match(/barrier\(CLK_LOCAL_MEM_FENCE\)/g) ?? [];
      expect(barriers).toHaveLength(2);
      expect(source).toContain("__local");
    }
  });

  it("keeps the untiled sources free of local memory and barriers", () => {
    for (const name of ["naive", "vec4"]) {
      const { source } = kernelSource(name);
      expect(source).not.toContain("__local");
      expect(source).not.toContain("barrier(");
    }
  });

  it("uses width-4 vectors exactly in the vectorized sources", () => {
    expect(kernelSource("vec4").source).toContain("float4");
    expect(kernelSource("tiledvec8").source).toContain("float4");
    expect(kernelSource("naive").source).not.toContain("float4");
    expect(kernelSource("tiled8").source).not.toContain("float4");
  });

  it("exposes the launch rule on the descriptor", () => {
    expect(kernelSource("tiledvec16").geometry(32, 32, 32)).toEqual({
      globalSize: [32, 8],
      localSize: [16, 4],
    });
    expect(kernelSource("naive").geometry(48, 96, 16)).toEqual({
      globalSize: [48, 96],
      localSize: [16, 16],
    });
  });
});
