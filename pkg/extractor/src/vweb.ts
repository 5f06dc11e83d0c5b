/**
 * Binary embedding file IO ("VWEB").
 *
 * Layout (little-endian, bit-exact):
 *
 *   magic   4 bytes  "VWEB"
 *   version u32      currently 1
 *   dim     u32      embedding dimension D
 *   count   u32      number of records
 *   record  ... repeated `count` times:
 *     id_len    u16
 *     id        id_len bytes, UTF-8
 *     row_count u16
 *     rows      row_count * dim float32
 */

export const MAGIC = 'VWEB';
export const FORMAT_VERSION = 1;

export interface ClipRecord {
  videoId: string;
  /** one Float32Array of length dim per frame */
  rows: Float32Array[];
}

export class VwebFormatError extends Error {}

const U16_MAX = 0xffff;

export function writeEmbeddings(records: ClipRecord[], dim: number): Buffer {
  if (!Number.isInteger(dim) || dim < 1) {
    throw new VwebFormatError(`invalid dimension: ${dim}`);
  }
  const chunks: Buffer[] = [];
  const header = Buffer.alloc(16);
  header.write(MAGIC, 0, 'ascii');
  header.writeUInt32LE(FORMAT_VERSION, 4);
  header.writeUInt32LE(dim, 8);
  header.writeUInt32LE(records.length, 12);
  chunks.push(header);

  const seen = new Set<string>();
  for (const record of records) {
    const id = Buffer.from(record.videoId, 'utf-8');
    if (id.length < 1 || id.length > U16_MAX) {
      throw new VwebFormatError(`bad video_id length: ${record.videoId}`);
    }
    if (seen.has(record.videoId)) {
      throw new VwebFormatError(`duplicate video_id: ${record.videoId}`);
    }
    seen.add(record.videoId);
    if (record.rows.length < 1 || record.rows.length > U16_MAX) {
      throw new VwebFormatError(
        `record for ${record.videoId} must hold 1..${U16_MAX} rows, ` +
          `got ${record.rows.length}`,
      );
    }
    const prefix = Buffer.alloc(2 + id.length + 2);
    prefix.writeUInt16LE(id.length, 0);
    id.copy(prefix, 2);
    prefix.writeUInt16LE(record.rows.length, 2 + id.length);
    chunks.push(prefix);

    const body = Buffer.alloc(record.rows.length * dim * 4);
    let offset = 0;
    for (const row of record.rows) {
      if (row.length !== dim) {
        throw new VwebFormatError(
          `row for ${record.videoId} has length ${row.length}, expected ${dim}`,
        );
      }
      for (let i = 0; i < dim; i++) {
        const v = row[i];
        if (!Number.isFinite(v)) {
          throw new VwebFormatError(
            `non-finite value in record for ${record.videoId}`,
          );
        }
        body.writeFloatLE(v, offset);
        offset += 4;
      }
    }
    chunks.push(body);
  }
  return Buffer.concat(chunks);
}

/** Parse a VWEB buffer back into records. Used by tests and sanity checks. */
export function readEmbeddings(data: Buffer): { dim: number; records: ClipRecord[] } {
  let offset = 0;
  const take = (n: number, what: string): Buffer => {
    if (offset + n > data.length) {
      throw new VwebFormatError(`truncated ${what} at byte ${offset}`);
    }
    const slice = data.subarray(offset, offset + n);
    offset += n;
    return slice;
  };
  const magic = take(4, 'magic').toString('ascii');
  if (magic !== MAGIC) {
    throw new VwebFormatError(`bad magic: ${magic}`);
  }
  const version = take(4, 'version').readUInt32LE(0);
  if (version !== FORMAT_VERSION) {
    throw new VwebFormatError(`unsupported format version: ${version}`);
  }
  const dim = take(4, 'dimension').readUInt32LE(0);
  const count = take(4, 'count').readUInt32LE(0);
  const records: ClipRecord[] = [];
  for (let r = 0; r < count; r++) {
    const idLen = take(2, 'id length').readUInt16LE(0);
    const videoId = take(idLen, 'video_id').toString('utf-8');
    const rowCount = take(2, 'row count').readUInt16LE(0);
    const rows: Float32Array[] = [];
    for (let i = 0; i < rowCount; i++) {
      const raw = take(dim * 4, `row ${i} of ${videoId}`);
      const row = new Float32Array(dim);
      for (let j = 0; j < dim; j++) {
        row[j] = raw.readFloatLE(j * 4);
      }
      rows.push(row);
    }
    records.push({ videoId, rows });
  }
  if (offset !== data.length) {
    throw new VwebFormatError(`trailing bytes after record ${count}`);
  }
  return { dim, records };
}
