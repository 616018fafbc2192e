/**
 * Writer (and reader, for round-trip tests) of the binary embedding
 * interchange format consumed by the analysis toolkit:
 *
 *   bytes 0-3   magic "FEMB"
 *   bytes 4-7   version u32 LE (1)
 *   bytes 8-11  dim u32 LE
 *   bytes 12-15 frame_count u32 LE
 *   bytes 16-23 frame_rate_hz f64 LE
 *   bytes 24-   frame_count * dim float32 LE, row-major
 */

export const EMB_MAGIC = "FEMB";
export const EMB_VERSION = 1;
const HEADER_BYTES = 24;

export interface EmbMatrix {
  dim: number;
  frameCount: number;
  frameRateHz: number;
  frames: Float32Array; // row-major, frameCount * dim
}

export function encodeEmb(frames: Float32Array, dim: number, frameRateHz: number): Buffer {
  if (dim < 1) throw new Error(`dim must be >= 1, got ${dim}`);
  if (frames.length === 0 || frames.length % dim !== 0) {
    throw new Error(`frame payload of ${frames.length} values is not a multiple of dim ${dim}`);
  }
  if (!(frameRateHz > 0)) throw new Error(`frame_rate_hz must be positive, got ${frameRateHz}`);
  const frameCount = frames.length / dim;
  for (let i = 0; i < frames.length; i++) {
    if (!Number.isFinite(frames[i])) {
      throw new Error(`non-finite value at flat index ${i}`);
    }
  }
  const buffer = Buffer.alloc(HEADER_BYTES + frames.length * 4);
  buffer.write(EMB_MAGIC, 0, "ascii");
  buffer.writeUInt32LE(EMB_VERSION, 4);
  buffer.writeUInt32LE(dim, 8);
  buffer.writeUInt32LE(frameCount, 12);
  buffer.writeDoubleLE(frameRateHz, 16);
  for (let i = 0; i < frames.length; i++) {
    buffer.writeFloatLE(frames[i], HEADER_BYTES + i * 4);
  }
  return buffer;
}

export function decodeEmb(buffer: Buffer): EmbMatrix {
  if (buffer.length < HEADER_BYTES) throw new Error("file too short for a header");
  if (buffer.toString("ascii", 0, 4) !== EMB_MAGIC) throw new Error("bad magic");
  const version = buffer.readUInt32LE(4);
  if (version !== EMB_VERSION) throw new Error(`unsupported version ${version}`);
  const dim = buffer.readUInt32LE(8);
  const frameCount = buffer.readUInt32LE(12);
  const frameRateHz = buffer.readDoubleLE(16);
  const expected = HEADER_BYTES + dim * frameCount * 4;
  if (buffer.length !== expected) {
    throw new Error(`payload is ${buffer.length - HEADER_BYTES} bytes, expected ${expected - HEADER_BYTES}`);
  }
  const frames = new Float32Array(dim * frameCount);
  for (let i = 0; i < frames.length; i++) {
    frames[i] = buffer.readFloatLE(HEADER_BYTES + i * 4);
  }
  return { dim, frameCount, frameRateHz, frames };
}
