/** Windowed-sinc resampler (Hann window, 24 taps per side). Deterministic
 * and dependency-free; quality is ample for feature extraction. */

const HALF_TAPS = 24;

export function resample(samples: Float32Array, fromHz: number, toHz: number): Float32Array {
  if (fromHz <= 0 || toHz <= 0) throw new Error("sample rates must be positive");
  if (fromHz === toHz) return samples;
  const ratio = fromHz / toHz;
  const outLength = Math.max(1, Math.floor(samples.length / ratio));
  const out = new Float32Array(outLength);
  // when downsampling, widen the kernel and lower the cutoff to avoid aliasing
  const scale = Math.min(1, toHz / fromHz);
  const cutoff = 0.95 * scale;
  const halfWidth = Math.ceil(HALF_TAPS / scale);
  for (let i = 0; i < outLength; i++) {
    const center = i * ratio;
    const left = Math.max(0, Math.ceil(center - halfWidth));
    const right = Math.min(samples.length - 1, Math.floor(center + halfWidth));
    let acc = 0;
    let weightSum = 0;
    for (let j = left; j <= right; j++) {
      const x = j - center;
      const weight = sinc(cutoff * x) * cutoff * hann(x / halfWidth);
      acc += samples[j] * weight;
      weightSum += weight;
    }
    out[i] = weightSum > 1e-12 ? acc / weightSum : acc;
  }
  return out;
}

function sinc(x: number): number {
  if (Math.abs(x) < 1e-9) return 1;
  const pix = Math.PI * x;
  return Math.sin(pix) / pix;
}

function hann(x: number): number {
  if (Math.abs(x) >= 1) return 0;
  return 0.5 * (1 + Math.cos(Math.PI * x));
}
