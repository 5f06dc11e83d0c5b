import { describe, expect, it } from 'vitest';

import { readEmbeddings, writeEmbeddings, type ClipRecord } from '../src/vweb.js';

function sample(): ClipRecord[] {
  return [
    { videoId: 'clip-a', rows: [Float32Array.of(1, 2, 3), Float32Array.of(4, 5, 6)] },
    { videoId: 'clip-b', rows: [Float32Array.of(-1, 0.5, 1e-3)] },
  ];
}

describe('writeEmbeddings', () => {
  it('lays out the header exactly', () => {
    const buf = writeEmbeddings(sample(), 3);
    expect(buf.subarray(0, 4).toString('ascii')).toBe('VWEB');
    expect(buf.readUInt32LE(4)).toBe(1);
    expect(buf.readUInt32LE(8)).toBe(3);
    expect(buf.readUInt32LE(12)).toBe(2);
  });

  it('lays out records exactly', () => {
    const buf = writeEmbeddings(sample(), 3);
    let o = 16;
    expect(buf.readUInt16LE(o)).toBe(6);
    expect(buf.subarray(o + 2, o + 8).toString('utf-8')).toBe('clip-a');
    expect(buf.readUInt16LE(o + 8)).toBe(2);
    expect(buf.readFloatLE(o + 10)).toBe(1);
    expect(buf.readFloatLE(o + 10 + 5 * 4)).toBe(6);
    o += 10 + 6 * 4;
    expect(buf.readUInt16LE(o)).toBe(6);
    expect(buf.subarray(o + 2, o + 8).toString('utf-8')).toBe('clip-b');
  });

  it('is read back verbatim', () => {
    const { dim, records } = readEmbeddings(writeEmbeddings(sample(), 3));
    expect(dim).toBe(3);
    expect(records.map((r) => r.videoId)).toEqual(['clip-a', 'clip-b']);
    expect([...records[0].rows[1]]).toEqual([4, 5, 6]);
    expect(records[1].rows[0][2]).toBeCloseTo(1e-3, 9);
  });

  it('rejects duplicate ids', () => {
    const records = [sample()[0], sample()[0]];
    expect(() => writeEmbeddings(records, 3)).toThrow(/duplicate video_id/);
  });

  it('rejects empty ids, empty records, bad rows, and bad dims', () => {
    expect(() => writeEmbeddings([{ videoId: '', rows: [Float32Array.of(1)] }], 1)).toThrow(
      /video_id/,
    );
    expect(() => writeEmbeddings([{ videoId: 'x', rows: [] }], 1)).toThrow(/rows/);
    expect(() =>
      writeEmbeddings([{ videoId: 'x', rows: [Float32Array.of(1, 2)] }], 3),
    ).toThrow(/length 2, expected 3/);
    expect(() =>
      writeEmbeddings([{ videoId: 'x', rows: [Float32Array.of(NaN) ]}], 1),
    ).toThrow(/non-finite/);
    expect(() => writeEmbeddings([], 0)).toThrow(/invalid dimension/);
  });
});

describe('readEmbeddings', () => {
  it('names the byte offset of a truncation', () => {
    const buf = writeEmbeddings(sample(), 3);
    for (const cut of [2, 10, 17, 30, buf.length - 1]) {
      expect(() => readEmbeddings(buf.subarray(0, cut))).toThrow(/truncated .* at byte/);
    }
  });

  it('rejects bad magic, bad version, and trailing bytes', () => {
    const buf = writeEmbeddings(sample(), 3);
    const magic = Buffer.from(buf);
    magic.write('XWEB', 0, 'ascii');
    expect(() => readEmbeddings(magic)).toThrow(/bad magic/);

    const version = Buffer.from(buf);
    version.writeUInt32LE(9, 4);
    expect(() => readEmbeddings(version)).toThrow(/unsupported format version/);

    expect(() => readEmbeddings(Buffer.concat([buf, Buffer.of(0)]))).toThrow(
      /trailing bytes/,
    );
  });
});
