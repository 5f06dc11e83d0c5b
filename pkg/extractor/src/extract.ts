/**
 * Extraction job: frame folders in, one VWEB embedding file out.
 *
 * Undecodable clips are skipped and logged; the report always accounts
 * for every clip folder seen, so nothing drops silently.
 */

import * as fs from 'node:fs';

import { createEncoder, DEFAULT_ENCODER_ID } from './encoders.js';
import { decodeFrame, listClipFolders, selectFrameIndices } from './frames.js';
import { writeEmbeddings, type ClipRecord } from './vweb.js';

export const DEFAULT_FRAMES_PER_CLIP = 16;

export interface ExtractJob {
  input: string;
  framesPerClip: number;
  encoderId: string;
  output: string;
}

export interface SkippedClip {
  clipId: string;
  reason: string;
}

export interface ExtractReport {
  written: number;
  skipped: SkippedClip[];
  dim: number;
  output: string;
}

export function runExtract(
  job: ExtractJob,
  log: (line: string) => void = (line) => console.error(line),
): ExtractReport {
  const encoder = createEncoder(job.encoderId);
  const folders = listClipFolders(job.input);
  if (folders.length === 0) {
    throw new Error(`no clip directories under ${job.input}`);
  }

  const records: ClipRecord[] = [];
  const skipped: SkippedClip[] = [];
  for (const folder of folders) {
    try {
      if (folder.files.length === 0) {
        throw new Error('no png frames');
      }
      const indices = selectFrameIndices(folder.files.length, job.framesPerClip);
      // short clips repeat indices; decode each file once
      const decoded = new Map<number, Float32Array>();
      const rows: Float32Array[] = [];
      for (const index of indices) {
        let row = decoded.get(index);
        if (row === undefined) {
          row = encoder.encode(decodeFrame(folder.files[index]));
          decoded.set(index, row);
        }
        rows.push(row);
      }
      records.push({ videoId: folder.clipId, rows });
    } catch (err) {
      const reason = err instanceof Error ? err.message : String(err);
      skipped.push({ clipId: folder.clipId, reason });
      log(`skipping ${folder.clipId}: ${reason}`);
    }
  }

  fs.writeFileSync(job.output, writeEmbeddings(records, encoder.dim));
  return {
    written: records.length,
    skipped,
    dim: encoder.dim,
    output: job.output,
  };
}

export { DEFAULT_ENCODER_ID };
