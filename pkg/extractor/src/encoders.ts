/**
 * Pluggable frame encoders.
 *
 * The default encoder is an offline stand-in for a pretrained vision
 * model: it downsamples the frame to a fixed grid and applies an affine
 * projection whose weights derive deterministically from the encoder
 * id. Same pixels in, same bytes out, on any machine. Real checkpoints
 * register under their own ids without touching the extraction loop.
 */

import { createHash } from 'node:crypto';

import type { FramePixels } from './frames.js';

export interface Encoder {
  readonly id: string;
  readonly dim: number;
  encode(frame: FramePixels): Float32Array;
}

export const DEFAULT_ENCODER_ID = 'seeded-projection-768';

const registry = new Map<string, () => Encoder>();

export function registerEncoder(id: string, factory: () => Encoder): void {
  if (registry.has(id)) {
    throw new Error(`encoder already registered: ${id}`);
  }
  registry.set(id, factory);
}

export function createEncoder(id: string): Encoder {
  const factory = registry.get(id);
  if (!factory) {
    const known = [...registry.keys()].sort().join(', ');
    throw new Error(`unknown encoder: ${id} (known: ${known})`);
  }
  return factory();
}

export function knownEncoders(): string[] {
  return [...registry.keys()].sort();
}

// mulberry32: tiny deterministic PRNG, wholly in exact uint32 ops
function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

class SeededProjectionEncoder implements Encoder {
  readonly id: string;
  readonly dim: number;
  private readonly grid = 16;
  // grid*grid RGB values plus a constant 1, so flat frames still map
  // to a nonzero vector
  private readonly inputDim = this.grid * this.grid * 3 + 1;
  private readonly weights: Float64Array;

  constructor(id: string, dim: number) {
    this.id = id;
    this.dim = dim;
    const seed = createHash('sha256').update(id, 'utf-8').digest().readUInt32LE(0);
    const next = mulberry32(seed);
    const scale = 1 / Math.sqrt(this.inputDim);
    this.weights = new Float64Array(dim * this.inputDim);
    for (let i = 0; i < this.weights.length; i++) {
      this.weights[i] = (next() * 2 - 1) * scale;
    }
  }

  encode(frame: FramePixels): Float32Array {
    const x = this.features(frame);
    const out = new Float32Array(this.dim);
    for (let d = 0; d < this.dim; d++) {
      let acc = 0;
      const base = d * this.inputDim;
      for (let k = 0; k < this.inputDim; k++) {
        acc += this.weights[base + k] * x[k];
      }
      out[d] = acc;
    }
    return out;
  }

  /** Box-average the frame onto the grid, centered RGB plus a constant. */
  private features(frame: FramePixels): Float64Array {
    const { width, height, rgba } = frame;
    if (width < 1 || height < 1 || rgba.length < width * height * 4) {
      throw new Error(`malformed frame buffer (${width}x${height})`);
    }
    const g = this.grid;
    const x = new Float64Array(this.inputDim);
    let k = 0;
    for (let gy = 0; gy < g; gy++) {
      const y0 = Math.floor((gy * height) / g);
      const y1 = Math.max(y0 + 1, Math.floor(((gy + 1) * height) / g));
      for (let gx = 0; gx < g; gx++) {
        const x0 = Math.floor((gx * width) / g);
        const x1 = Math.max(x0 + 1, Math.floor(((gx + 1) * width) / g));
        let r = 0;
        let gSum = 0;
        let b = 0;
        for (let py = y0; py < y1; py++) {
          for (let px = x0; px < x1; px++) {
            const o = (py * width + px) * 4;
            r += rgba[o];
            gSum += rgba[o + 1];
            b += rgba[o + 2];
          }
        }
        const n = (y1 - y0) * (x1 - x0) * 255;
        x[k++] = r / n - 0.5;
        x[k++] = gSum / n - 0.5;
        x[k++] = b / n - 0.5;
      }
    }
    x[k] = 1;
    return x;
  }
}

registerEncoder(DEFAULT_ENCODER_ID, () => new SeededProjectionEncoder(DEFAULT_ENCODER_ID, 768));
