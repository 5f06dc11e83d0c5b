/**
 * Frame-folder discovery and deterministic frame selection.
 *
 * A clip is a directory of PNG frames; lexicographic filename order is
 * the frame order. Selection is uniformly spaced rather than random so
 * repeated extraction of the same input is byte-identical.
 */

import * as fs from 'node:fs';
import * as path from 'node:path';

import { PNG } from 'pngjs';

export interface FrameFolder {
  clipId: string;
  /** absolute frame paths in frame order */
  files: string[];
}

export interface FramePixels {
  width: number;
  height: number;
  /** RGBA, 4 bytes per pixel, row-major */
  rgba: Uint8Array;
}

/** Indices floor(i * frameCount / m) for i in 0..m-1; repeats when short. */
export function selectFrameIndices(frameCount: number, m: number): number[] {
  if (!Number.isInteger(m) || m < 1) {
    throw new Error(`frames per clip must be a positive integer, got ${m}`);
  }
  if (!Number.isInteger(frameCount) || frameCount < 1) {
    throw new Error(`clip must have at least one frame, got ${frameCount}`);
  }
  const indices: number[] = [];
  for (let i = 0; i < m; i++) {
    indices.push(Math.floor((i * frameCount) / m));
  }
  return indices;
}

export function listClipFolders(inputDir: string): FrameFolder[] {
  let entries: fs.Dirent[];
  try {
    entries = fs.readdirSync(inputDir, { withFileTypes: true });
  } catch (err) {
    throw new Error(`cannot read input directory ${inputDir}: ${String(err)}`);
  }
  const folders: FrameFolder[] = [];
  for (const entry of entries) {
    if (!entry.isDirectory()) continue;
    const dir = path.join(inputDir, entry.name);
    const files = fs
      .readdirSync(dir)
      .filter((name) => name.toLowerCase().endsWith('.png'))
      .sort()
      .map((name) => path.join(dir, name));
    folders.push({ clipId: entry.name, files });
  }
  folders.sort((a, b) => (a.clipId < b.clipId ? -1 : a.clipId > b.clipId ? 1 : 0));
  return folders;
}

export function decodeFrame(filePath: string): FramePixels {
  const png = PNG.sync.read(fs.readFileSync(filePath));
  return { width: png.width, height: png.height, rgba: png.data };
}
