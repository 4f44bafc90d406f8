/** Host-side oracle and deterministic inputs shared by the tests.
 *
 *  Both functions reproduce the benchmark library's reference semantics bit
 *  for bit: the generator is the same counter-based splitmix64 stream, and
 *  the product accumulates in float64 with k ascending before the float32
 *  cast.
 */

const MASK64 = 0xffffffffffffffffn;
const GOLDEN = 0x9e3779b97f4a7c15n;
const MIX1 = 0xbf58476d1ce4e5b9n;
const MIX2 = 0x94d049bb133111ebn;

/** Output word `counter` of the splitmix64 stream started at `seed`. */
function splitmix64(counter: bigint, seed: bigint): bigint {
  let z = (seed + counter * GOLDEN) & MASK64;
  z = ((z ^ (z >> 30n)) * MIX1) & MASK64;
  z = ((z ^ (z >> 27n)) * MIX2) & MASK64;
  return z ^ (z >> 31n);
}

/** Deterministic rows x cols matrix with elements uniform in [-1, 1].
 *
 *  Element (i, j) depends only on (seed, i*cols + j), so any element can be
 *  produced without the ones before it and repeated calls are identical.
 */
export function randomMatrix(
  rows: number,
  cols: number,
  seed: number,
): Float32Array {
  if (!Number.isInteger(rows) || !Number.isInteger(cols) || rows <= 0 || cols <= 0) {
    throw new RangeError(`matrix dims must be positive integers, got (${rows}, ${cols})`);
  }
  const out = new Float32Array(rows * cols);
  const s = BigInt(seed) & MASK64;
  for (let i = 0; i < out.length; i++) {
    const word = splitmix64(BigInt(i + 1), s);
    // Top 53 bits give an exact double in [0, 1); stretch to [-1, 1].
    const unit = Number(word >> 11n) * 2 ** -53;
    out[i] = Math.fround(2 * unit - 1);
  }
  return out;
}

/** Reference product: k-ascending float64 accumulation cast to float32.
 *
 *  This is the oracle every kernel result is compared against, on device and
 *  in the stand-in alike.
 */
export function matmulReference(
  m: number,
  n: number,
  k: number,
  a: Float32Array,
  b: Float32Array,
): Float32Array {
  if (a.length !== m * k || b.length !== k * n) {
    throw new RangeError(
      `operand lengths (${a.length}, ${b.length}) do not match dims (${m}, ${n}, ${k})`,
    );
  }
  const out = new Float32Array(m * n);
  for (let i = 0; i < m; i++) {
    for (let j = 0; j < n; j++) {
      let acc = 0;
      for (let p = 0; p < k; p++) {
        acc += a[i * k + p] * b[p * n + j];
      }
      out[i * n + j] = Math.fround(acc);
    }
  }
  return out;
}

/** Max |got - ref| normalized by the reference's largest magnitude. */
export function relativeError(got: Float32Array, ref: Float32Array): number {
  if (got.length !== ref.length) {
    throw new RangeError(`length mismatch: ${got.length} vs ${ref.length}`);
  }
  // Floor the scale at the smallest normal float32 so an all-zero reference
  // cannot divide by zero.
  let scale = 1.1754943508222875e-38;
  for (let i = 0; i < ref.length; i++) {
    scale = Math.max(scale, Math.abs(ref[i]));
  }
  let worst = 0;
  for (let i = 0; i < got.length; i++) {
    worst = Math.max(worst, Math.abs(got[i] - ref[i]));
  }
  return worst / scale;
}
