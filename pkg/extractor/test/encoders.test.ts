import { describe, expect, it } from 'vitest';

import {
  createEncoder,
  DEFAULT_ENCODER_ID,
  knownEncoders,
  registerEncoder,
  type Encoder,
} from '../src/encoders.js';
import type { FramePixels } from '../src/frames.js';

function flatFrame(r: number, g: number, b: number, width = 20, height = 16): FramePixels {
  const rgba = new Uint8Array(width * height * 4);
  for (let i = 0; i < width * height; i++) {
    rgba[i * 4] = r;
    rgba[i * 4 + 1] = g;
    rgba[i * 4 + 2] = b;
    rgba[i * 4 + 3] = 255;
  }
  return { width, height, rgba };
}

describe('encoder registry', () => {
  it('ships the seeded projection by default', () => {
    expect(knownEncoders()).toContain(DEFAULT_ENCODER_ID);
    expect(createEncoder(DEFAULT_ENCODER_ID).dim).toBe(768);
  });

  it('rejects unknown ids, naming the known ones', () => {
    expect(() => createEncoder('vit-nonexistent')).toThrow(/unknown encoder.*seeded-projection-768/);
  });

  it('accepts new encoders and rejects re-registration', () => {
    const toy: Encoder = { id: 'toy-3', dim: 3, encode: () => Float32Array.of(1, 2, 3) };
    registerEncoder('toy-3', () => toy);
    expect(createEncoder('toy-3')).toBe(toy);
    expect(() => registerEncoder('toy-3', () => toy)).toThrow(/already registered/);
  });
});

describe('seeded projection encoder', () => {
  const encoder = createEncoder(DEFAULT_ENCODER_ID);

  it('is deterministic across calls and instances', () => {
    const frame = flatFrame(120, 30, 200);
    const a = encoder.encode(frame);
    const b = encoder.encode(frame);
    const c = createEncoder(DEFAULT_ENCODER_ID).encode(frame);
    expect(a).toEqual(b);
    expect(a).toEqual(c);
  });

  it('embeds a flat black frame away from zero', () => {
    const v = encoder.encode(flatFrame(0, 0, 0));
    const norm = Math.hypot(...v);
    expect(norm).toBeGreaterThan(1e-3);
  });

  it('separates visually different frames', () => {
    const a = encoder.encode(flatFrame(255, 0, 0));
    const b = encoder.encode(flatFrame(0, 0, 255));
    let dist = 0;
    for (let i = 0; i < a.length; i++) dist += (a[i] - b[i]) ** 2;
    expect(Math.sqrt(dist)).toBeGreaterThan(0.1);
  });

  it('handles frames smaller than its pooling grid', () => {
    const v = encoder.encode(flatFrame(5, 250, 128, 3, 2));
    expect(v).toHaveLength(768);
    expect([...v].every(Number.isFinite)).toBe(true);
  });

  it('rejects malformed buffers', () => {
    expect(() =>
      encoder.encode({ width: 8, height: 8, rgba: new Uint8Array(4) }),
    ).toThrow(/malformed frame buffer/);
  });
});
