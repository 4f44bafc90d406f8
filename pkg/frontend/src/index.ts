/** Public surface of the GPU backend package. */
export {
  CapabilityError,
  KernelBuildError,
  eventMillis,
  type CompiledKernel,
  type DeviceRuntime,
  type GemmDims,
  type KernelSource,
  type LaunchGeometry,
  type ProfilingEvent,
  type RunResult,
} from "./types.js";
export {
  GeometryError,
  VALID_TILES,
  VARIANT_NAMES,
  VEC,
  launchGeometry,
  parseVariant,
  workItems,
  type Variant,
  type VariantKind,
} from "./geometry.js";
export { allKernelSources, kernelFilePath, kernelSource } from "./kernels.js";
export { matmulReference, randomMatrix, relativeError } from "./reference.js";
export { compileOnce, discoverRuntime, runOnDevice } from "./bridge.js";
export { StandInRuntime } from "./stub.js";
