#!/usr/bin/env node
import * as fs from 'node:fs';
import { parseArgs } from 'node:util';
import { pathToFileURL } from 'node:url';

import { DEFAULT_ENCODER_ID, knownEncoders } from './encoders.js';
import { DEFAULT_FRAMES_PER_CLIP, runExtract } from './extract.js';

const USAGE = `usage: weave-extract --input DIR --output FILE
                     [--frames-per-clip N] [--encoder ID]

Embeds every clip under DIR (one subdirectory of PNG frames per clip)
and writes a single binary embedding file.

  --input            directory of clip frame folders
  --frames-per-clip  uniformly spaced frames per clip (default ${DEFAULT_FRAMES_PER_CLIP})
  --encoder          encoder id (default ${DEFAULT_ENCODER_ID})
  --output           embedding file to write`;

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      options: {
        input: { type: 'string' },
        'frames-per-clip': { type: 'string', default: String(DEFAULT_FRAMES_PER_CLIP) },
        encoder: { type: 'string', default: DEFAULT_ENCODER_ID },
        output: { type: 'string' },
        help: { type: 'boolean', default: false },
      },
      allowPositionals: false,
    });
  } catch (err) {
    console.error(err instanceof Error ? err.message : String(err));
    console.error(USAGE);
    return 2;
  }
  const values = parsed.values;
  if (values.help) {
    console.log(USAGE);
    return 0;
  }
  if (!values.input || !values.output) {
    console.error('--input and --output are required');
    console.error(USAGE);
    return 2;
  }
  const framesPerClip = Number(values['frames-per-clip']);
  if (!Number.isInteger(framesPerClip) || framesPerClip < 1) {
    console.error(`--frames-per-clip must be a positive integer, got ${values['frames-per-clip']}`);
    return 2;
  }
  if (!knownEncoders().includes(values.encoder!)) {
    console.error(`unknown encoder ${values.encoder}; known: ${knownEncoders().join(', ')}`);
    return 2;
  }

  try {
    const report = runExtract({
      input: values.input,
      framesPerClip,
      encoderId: values.encoder!,
      output: values.output,
    });
    console.error(
      `wrote ${report.written} clips (dim ${report.dim}) to ${report.output}; ` +
        `skipped ${report.skipped.length}`,
    );
    return 0;
  } catch (err) {
    console.error(err instanceof Error ? err.message : String(err));
    return 2;
  }
}

// run only as an entry point, not on import (bin shims are symlinks)
const invoked = process.argv[1] && pathToFileURL(fs.realpathSync(process.argv[1])).href;
if (invoked === import.meta.url) {
  process.exit(main(process.argv.slice(2)));
}
