/** Minimal RIFF/WAVE decoder: PCM 8/16/24/32-bit and float32, any channel
 * count (averaged to mono). Enough for offline extraction of evaluation
 * datasets; exotic containers belong to a real decoding library. */

export interface DecodedAudio {
  sampleRateHz: number;
  samples: Float32Array; // mono
}

export function decodeWav(buffer: Buffer): DecodedAudio {
  const view = new DataView(buffer.buffer, buffer.byteOffset, buffer.byteLength);
  if (buffer.length < 12 || readTag(view, 0) !== "RIFF" || readTag(view, 8) !== "WAVE") {
    throw new Error("not a RIFF/WAVE file");
  }
  let offset = 12;
  let format: { codec: number; channels: number; sampleRate: number; bits: number } | null = null;
  let data: { start: number; length: number } | null = null;
  while (offset + 8 <= buffer.length) {
    const tag = readTag(view, offset);
    const size = view.getUint32(offset + 4, true);
    const body = offset + 8;
    if (tag === "fmt ") {
      let codec = view.getUint16(body, true);
      const channels = view.getUint16(body + 2, true);
      const sampleRate = view.getUint32(body + 4, true);
      const bits = view.getUint16(body + 14, true);
      if (codec === 0xfffe && size >= 40) {
        codec = view.getUint16(body + 24, true); // extensible: first GUID word
      }
      format = { codec, channels, sampleRate, bits };
    } else if (tag === "data") {
      data = { start: body, length: Math.min(size, buffer.length - body) };
    }
    offset = body + size + (size % 2); // chunks are word-aligned
  }
  if (!format) throw new Error("missing fmt chunk");
  if (!data) throw new Error("missing data chunk");
  const { codec, channels, sampleRate, bits } = format;
  if (channels < 1) throw new Error("zero channels");

  const bytesPerSample = bits / 8;
  const frameCount = Math.floor(data.length / (bytesPerSample * channels));
  const mono = new Float32Array(frameCount);
  for (let i = 0; i < frameCount; i++) {
    let sum = 0;
    for (let c = 0; c < channels; c++) {
      const at = data.start + (i * channels + c) * bytesPerSample;
      sum += readSample(view, at, codec, bits);
    }
    mono[i] = sum / channels;
  }
  return { sampleRateHz: sampleRate, samples: mono };
}

function readTag(view: DataView, at: number): string {
  return String.fromCharCode(view.getUint8(at), view.getUint8(at + 1),
    view.getUint8(at + 2), view.getUint8(at + 3));
}

function readSample(view: DataView, at: number, codec: number, bits: number): number {
  if (codec === 3) {
    if (bits === 32) return view.getFloat32(at, true);
    if (bits === 64) return view.getFloat64(at, true);
    throw new Error(`unsupported float width ${bits}`);
  }
  if (codec !== 1) throw new Error(`unsupported codec ${codec}`);
  switch (bits) {
    case 8:
      return (view.getUint8(at) - 128) / 128;
    case 16:
      return view.getInt16(at, true) / 32768;
    case 24: {
      const raw = view.getUint8(at) | (view.getUint8(at + 1) << 8) | (view.getUint8(at + 2) << 16);
      const signed = raw >= 0x800000 ? raw - 0x1000000 : raw;
      return signed / 8388608;
    }
    case 32:
      return view.getInt32(at, true) / 2147483648;
    default:
      throw new Error(`unsupported PCM width ${bits}`);
  }
}

/** Test helper: encode mono float samples as PCM16 WAV. */
export function encodeWavPcm16(samples: Float32Array, sampleRateHz: number): Buffer {
  const data = Buffer.alloc(samples.length * 2);
  for (let i = 0; i < samples.length; i++) {
    const clipped = Math.max(-1, Math.min(1, samples[i]));
    data.writeInt16LE(Math.round(clipped * 32767), i * 2);
  }
  const header = Buffer.alloc(44);
  header.write("RIFF", 0, "ascii");
  header.writeUInt32LE(36 + data.length, 4);
  header.write("WAVE", 8, "ascii");
  header.write("fmt ", 12, "ascii");
  header.writeUInt32LE(16, 16);
  header.writeUInt16LE(1, 20); // PCM
  header.writeUInt16LE(1, 22); // mono
  header.writeUInt32LE(sampleRateHz, 24);
  header.writeUInt32LE(sampleRateHz * 2, 28);
  header.writeUInt16LE(2, 32);
  header.writeUInt16LE(16, 34);
  header.write("data", 36, "ascii");
  header.writeUInt32LE(data.length, 40);
  return Buffer.concat([header, data]);
}
