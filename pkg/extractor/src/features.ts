/**
 * Deterministic embedding backend.
 *
 * Real pretrained networks plug in through the EmbeddingBackend signature;
 * this default computes a log-mel spectral summary of each analysis window
 * and expands it to the model's output width through a fixed, seeded linear
 * map (SplitMix64-derived weights keyed by model name). It is not a neural
 * embedding, but it is deterministic, finite on any input including
 * silence, and conforms to every interchange contract, which is what the
 * offline pipeline and its tests need.
 */

import type { ExtractorSpec } from "./models.js";

export type EmbeddingBackend = (window: Float32Array, spec: ExtractorSpec) => Float32Array;

const MEL_BANDS = 64;
const SUB_FRAME = 1024;
const SUB_HOP = 512;
const LOG_FLOOR = 1e-10;

// --- seeded weights ---------------------------------------------------------

const MASK64 = (1n << 64n) - 1n;
const GOLDEN = 0x9e3779b97f4a7c15n;

function mix64(z: bigint): bigint {
  z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & MASK64;
  z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & MASK64;
  return z ^ (z >> 31n);
}

function* splitmix(seed: bigint): Generator<number> {
  let k = 0n;
  for (;;) {
    k += 1n;
    const bits = mix64((seed + k * GOLDEN) & MASK64);
    // uniform in (-1, 1)
    yield (Number(bits >> 11n) / 2 ** 53) * 2 - 1;
  }
}

function seedFromName(name: string): bigint {
  let seed = 0x6a09e667f3bcc909n;
  for (const char of name) {
    seed = mix64((seed ^ BigInt(char.codePointAt(0) ?? 0)) & MASK64);
  }
  return seed;
}

const projectionCache = new Map<string, Float32Array>();

function projectionWeights(spec: ExtractorSpec): Float32Array {
  let weights = projectionCache.get(spec.modelName);
  if (!weights) {
    const stream = splitmix(seedFromName(spec.modelName));
    weights = new Float32Array((MEL_BANDS + 1) * spec.outputDim);
    const scale = 1 / Math.sqrt(MEL_BANDS);
    for (let i = 0; i < weights.length; i++) {
      weights[i] = stream.next().value * scale;
    }
    projectionCache.set(spec.modelName, weights);
  }
  return weights;
}

// --- spectral summary -------------------------------------------------------

function fftPower(frame: Float64Array): Float64Array {
  // iterative radix-2 FFT; frame length must be a power of two
  const n = frame.length;
  const real = Float64Array.from(frame);
  const imag = new Float64Array(n);
  for (let i = 1, j = 0; i < n; i++) {
    let bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) {
      [real[i], real[j]] = [real[j], real[i]];
    }
  }
  for (let length = 2; length <= n; length <<= 1) {
    const angle = (-2 * Math.PI) / length;
    const wReal = Math.cos(angle);
    const wImag = Math.sin(angle);
    for (let start = 0; start < n; start += length) {
      let curReal = 1;
      let curImag = 0;
      for (let k = 0; k < length / 2; k++) {
        const even = start + k;
        const odd = start + k + length / 2;
        const tReal = real[odd] * curReal - imag[odd] * curImag;
        const tImag = real[odd] * curImag + imag[odd] * curReal;
        real[odd] = real[even] - tReal;
        imag[odd] = imag[even] - tImag;
        real[even] += tReal;
        imag[even] += tImag;
        const nextReal = curReal * wReal - curImag * wImag;
        curImag = curReal * wImag + curImag * wReal;
        curReal = nextReal;
      }
    }
  }
  const power = new Float64Array(n / 2 + 1);
  for (let i = 0; i <= n / 2; i++) {
    power[i] = real[i] * real[i] + imag[i] * imag[i];
  }
  return power;
}

function hzToMel(hz: number): number {
  return 2595 * Math.log10(1 + hz / 700);
}

function melFilterCenters(sampleRateHz: number): Float64Array {
  const top = hzToMel(sampleRateHz / 2);
  const centers = new Float64Array(MEL_BANDS + 2);
  for (let i = 0; i < centers.length; i++) {
    const mel = (top * i) / (MEL_BANDS + 1);
    centers[i] = 700 * (10 ** (mel / 2595) - 1);
  }
  return centers;
}

function logMelSummary(window: Float32Array, sampleRateHz: number): Float64Array {
  // average sub-frame power spectra across the window, then mel-pool
  const spectrum = new Float64Array(SUB_FRAME / 2 + 1);
  let subFrames = 0;
  for (let start = 0; start + SUB_FRAME <= window.length || subFrames === 0; start += SUB_HOP) {
    const frame = new Float64Array(SUB_FRAME);
    for (let i = 0; i < SUB_FRAME; i++) {
      const sample = start + i < window.length ? window[start + i] : 0;
      frame[i] = sample * (0.5 - 0.5 * Math.cos((2 * Math.PI * i) / (SUB_FRAME - 1)));
    }
    const power = fftPower(frame);
    for (let i = 0; i < spectrum.length; i++) spectrum[i] += power[i];
    subFrames += 1;
    if (start + SUB_FRAME > window.length) break;
  }
  for (let i = 0; i < spectrum.length; i++) spectrum[i] /= subFrames;

  const centers = melFilterCenters(sampleRateHz);
  const hzPerBin = sampleRateHz / 2 / (spectrum.length - 1);
  const bands = new Float64Array(MEL_BANDS);
  for (let m = 0; m < MEL_BANDS; m++) {
    const [lo, mid, hi] = [centers[m], centers[m + 1], centers[m + 2]];
    let acc = 0;
    for (let bin = 0; bin < spectrum.length; bin++) {
      const hz = bin * hzPerBin;
      let weight = 0;
      if (hz >= lo && hz <= mid && mid > lo) weight = (hz - lo) / (mid - lo);
      else if (hz > mid && hz <= hi && hi > mid) weight = (hi - hz) / (hi - mid);
      acc += weight * spectrum[bin];
    }
    bands[m] = Math.log(acc + LOG_FLOOR);
  }
  return bands;
}

/** Default backend: log-mel summary expanded by a fixed seeded linear map. */
export const spectralBackend: EmbeddingBackend = (window, spec) => {
  const bands = logMelSummary(window, spec.targetSampleRateHz);
  const weights = projectionWeights(spec);
  const out = new Float32Array(spec.outputDim);
  for (let d = 0; d < spec.outputDim; d++) {
    let acc = weights[MEL_BANDS * spec.outputDim + d]; // bias row
    for (let m = 0; m < MEL_BANDS; m++) {
      acc += weights[m * spec.outputDim + d] * bands[m];
    }
    out[d] = acc;
  }
  return out;
};
