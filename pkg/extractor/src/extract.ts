/**
 * Offline extraction: run an embedding backend over audio files and emit
 * `.emb` files plus a manifest the analysis toolkit can consume directly.
 *
 * Directory convention: <audioDir>/<system>/<category>/<clip>.wav. Files
 * that do not match the layout produce a warning and are excluded. Clips
 * shorter than the model window are zero-padded to one full window and
 * listed under notes.padded_clips; undecodable or empty files are skipped
 * with a logged reason.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { encodeEmb } from "./emb.js";
import { spectralBackend, type EmbeddingBackend } from "./features.js";
import type { ExtractorSpec } from "./models.js";
import { resample } from "./resample.js";
import { decodeWav } from "./wav.js";

export interface ExtractResult {
  frames: Float32Array; // frameCount * outputDim, row-major
  frameCount: number;
  padded: boolean;
}

export interface ManifestEntry {
  clip_id: string;
  path: string;
  category: string;
  system: string;
  model: string;
}

export interface ExtractionLog {
  warnings: string[];
  skipped: string[];
}

export function frameCountFor(sampleCount: number, spec: ExtractorSpec): number {
  const windowSamples = Math.round(spec.windowSeconds * spec.targetSampleRateHz);
  const hopSamples = Math.max(1, Math.round(spec.hopSeconds * spec.targetSampleRateHz));
  if (sampleCount < windowSamples) return 0;
  return Math.floor((sampleCount - windowSamples) / hopSamples) + 1;
}

export function extractClip(audioPath: string, spec: ExtractorSpec,
                            backend: EmbeddingBackend = spectralBackend): ExtractResult {
  const decoded = decodeWav(fs.readFileSync(audioPath));
  if (decoded.samples.length === 0) throw new Error("no audio samples");
  let samples = resample(decoded.samples, decoded.sampleRateHz, spec.targetSampleRateHz);

  const windowSamples = Math.round(spec.windowSeconds * spec.targetSampleRateHz);
  const hopSamples = Math.max(1, Math.round(spec.hopSeconds * spec.targetSampleRateHz));
  let padded = false;
  if (samples.length < windowSamples) {
    const wide = new Float32Array(windowSamples); // zero padding
    wide.set(samples);
    samples = wide;
    padded = true;
  }
  const frameCount = Math.floor((samples.length - windowSamples) / hopSamples) + 1;
  const frames = new Float32Array(frameCount * spec.outputDim);
  for (let f = 0; f < frameCount; f++) {
    const window = samples.subarray(f * hopSamples, f * hopSamples + windowSamples);
    const embedding = backend(window, spec);
    if (embedding.length !== spec.outputDim) {
      throw new Error(`backend produced ${embedding.length} dims, expected ${spec.outputDim}`);
    }
    frames.set(embedding, f * spec.outputDim);
  }
  return { frames, frameCount, padded };
}

export function extractManifest(audioDir: string, spec: ExtractorSpec, outDir: string,
                                backend: EmbeddingBackend = spectralBackend,
                                log: ExtractionLog = { warnings: [], skipped: [] }): string {
  const clips = findClips(audioDir, log);
  fs.mkdirSync(path.join(outDir, "emb"), { recursive: true });

  const entries: ManifestEntry[] = [];
  const categories = new Set<string>();
  const paddedClips: string[] = [];
  for (const clip of clips) {
    const clipId = `${clip.system}_${clip.category}_${clip.stem}`;
    let result: ExtractResult;
    try {
      result = extractClip(clip.absolute, spec, backend);
    } catch (error) {
      log.skipped.push(`${clip.relative}: ${(error as Error).message}`);
      continue;
    }
    const relativeOut = path.posix.join("emb", clip.system, clip.category, `${clip.stem}.emb`);
    const target = path.join(outDir, relativeOut);
    fs.mkdirSync(path.dirname(target), { recursive: true });
    fs.writeFileSync(target, encodeEmb(result.frames, spec.outputDim, spec.rateHz));
    entries.push({ clip_id: clipId, path: relativeOut, category: clip.category,
                   system: clip.system, model: spec.modelName });
    categories.add(clip.category);
    if (result.padded) paddedClips.push(clipId);
  }

  const manifest = {
    categories: [...categories].sort(),
    entries,
    models: { [spec.modelName]: { dim: spec.outputDim, rate_hz: spec.rateHz } },
    notes: {
      extractor: "fadkit-extractor 0.1.0",
      backend: "spectral-v1",
      framing: { window_seconds: spec.windowSeconds, hop_seconds: spec.hopSeconds,
                 target_sample_rate_hz: spec.targetSampleRateHz },
      padding_policy: "clips shorter than the window are zero-padded to one window",
      padded_clips: paddedClips,
    },
  };
  const manifestPath = path.join(outDir, "manifest.json");
  fs.writeFileSync(manifestPath, stableJson(manifest) + "\n");
  return manifestPath;
}

interface ClipLocation {
  absolute: string;
  relative: string;
  system: string;
  category: string;
  stem: string;
}

function findClips(audioDir: string, log: ExtractionLog): ClipLocation[] {
  const clips: ClipLocation[] = [];
  const walk = (dir: string) => {
    for (const name of fs.readdirSync(dir).sort()) {
      const absolute = path.join(dir, name);
      if (fs.statSync(absolute).isDirectory()) {
        walk(absolute);
        continue;
      }
      if (!/\.wav$/i.test(name)) continue;
      const relative = path.relative(audioDir, absolute);
      const parts = relative.split(path.sep);
      if (parts.length !== 3) {
        log.warnings.push(`${relative}: expected <system>/<category>/<clip>.wav layout`);
        continue;
      }
      clips.push({ absolute, relative, system: parts[0], category: parts[1],
                   stem: parts[2].replace(/\.wav$/i, "") });
    }
  };
  walk(audioDir);
  clips.sort((a, b) => (a.relative < b.relative ? -1 : a.relative > b.relative ? 1 : 0));
  return clips;
}

/** JSON with sorted keys at every level, so reruns are byte-identical. */
export function stableJson(value: unknown): string {
  return JSON.stringify(sortKeys(value), null, 2);
}

function sortKeys(value: unknown): unknown {
  if (Array.isArray(value)) return value.map(sortKeys);
  if (value && typeof value === "object") {
    return Object.fromEntries(
      Object.entries(value as Record<string, unknown>)
        .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
        .map(([key, inner]) => [key, sortKeys(inner)]),
    );
  }
  return value;
}
