#!/usr/bin/env node
/** `fadkit-extract extract --model <name> --audio-dir <dir> --out <dir>` */

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { extractManifest, type ExtractionLog } from "./extract.js";
import { getSpec, MODEL_SPECS } from "./models.js";

export async function main(argv: string[]): Promise<number> {
  let exitCode = 0;
  await yargs(argv)
    .scriptName("fadkit-extract")
    .command(
      "extract",
      "run an embedding model over an audio tree and emit .emb files + manifest",
      (cmd) =>
        cmd
          .option("model", { type: "string", demandOption: true,
                             choices: [...MODEL_SPECS.keys()] })
          .option("audio-dir", { type: "string", demandOption: true,
                                 describe: "root with <system>/<category>/<clip>.wav" })
          .option("out", { type: "string", demandOption: true }),
      (args) => {
        const log: ExtractionLog = { warnings: [], skipped: [] };
        try {
          const manifestPath = extractManifest(
            args["audio-dir"] as string, getSpec(args.model as string),
            args.out as string, undefined, log);
          for (const warning of log.warnings) console.warn(`warning: ${warning}`);
          for (const skipped of log.skipped) console.warn(`skipped: ${skipped}`);
          console.log(`wrote ${manifestPath}`);
        } catch (error) {
          console.error(`fadkit-extract: ${(error as Error).message}`);
          exitCode = 1;
        }
      },
    )
    .demandCommand(1)
    .strict()
    .fail((message, error) => {
      console.error(`fadkit-extract: ${message ?? error?.message}`);
      exitCode = 2;
    })
    .parseAsync();
  return exitCode;
}

const invokedDirectly = process.argv[1]?.endsWith("cli.js");
if (invokedDirectly) {
  main(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}
