/**
 * Registry of supported embedding models: target sample rate, framing, and
 * output width.
 *
 * Framing convention: the analysis window equals the model's receptive
 * field and windows do not overlap, except VGGish, which uses 1-second
 * windows with 50% overlap. `rateHz` is the model's nominal embedding rate
 * recorded in file headers and manifests; frame counts follow the framing,
 * not the nominal rate.
 */

export interface ExtractorSpec {
  modelName: string;
  targetSampleRateHz: number;
  windowSeconds: number;
  hopSeconds: number;
  outputDim: number;
  rateHz: number;
}

const table: ExtractorSpec[] = [
  { modelName: "vggish", targetSampleRateHz: 16000, windowSeconds: 1, hopSeconds: 0.5, outputDim: 128, rateHz: 1 },
  { modelName: "mert-95m", targetSampleRateHz: 24000, windowSeconds: 5, hopSeconds: 5, outputDim: 768, rateHz: 76 },
  { modelName: "ms-clap", targetSampleRateHz: 44000, windowSeconds: 7, hopSeconds: 7, outputDim: 1024, rateHz: 1 },
  { modelName: "l-clap-audio", targetSampleRateHz: 48000, windowSeconds: 10, hopSeconds: 10, outputDim: 512, rateHz: 1 },
  { modelName: "l-clap-music", targetSampleRateHz: 48000, windowSeconds: 10, hopSeconds: 10, outputDim: 512, rateHz: 1 },
  { modelName: "panns-cnn14-16k", targetSampleRateHz: 16000, windowSeconds: 10, hopSeconds: 10, outputDim: 2048, rateHz: 0.1 },
  { modelName: "panns-cnn14-32k", targetSampleRateHz: 32000, windowSeconds: 10, hopSeconds: 10, outputDim: 2048, rateHz: 0.1 },
  { modelName: "panns-wgm-logmel", targetSampleRateHz: 32000, windowSeconds: 10, hopSeconds: 10, outputDim: 2048, rateHz: 0.1 },
];

export const MODEL_SPECS: ReadonlyMap<string, ExtractorSpec> = new Map(
  table.map((spec) => [spec.modelName, spec]),
);

export function getSpec(modelName: string): ExtractorSpec {
  const spec = MODEL_SPECS.get(modelName);
  if (!spec) {
    const known = [...MODEL_SPECS.keys()].join(", ");
    throw new Error(`unknown model '${modelName}' (known: ${known})`);
  }
  return spec;
}
