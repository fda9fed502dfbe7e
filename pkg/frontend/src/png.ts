// Minimal deterministic PNG writer: 8-bit grayscale, zlib "stored" blocks.
// No compression keeps the encoder tiny and byte-reproducible everywhere.

const SIGNATURE = new Uint8Array([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);

let CRC_TABLE: Uint32Array | null = null;

function crcTable(): Uint32Array {
  if (CRC_TABLE) return CRC_TABLE;
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  CRC_TABLE = table;
  return table;
}

export function crc32(data: Uint8Array): number {
  const table = crcTable();
  let c = 0xffffffff;
  for (let i = 0; i < data.length; i++) {
    c = table[(c ^ data[i]) & 0xff] ^ (c >>> 8);
  }
  return (c ^ 0xffffffff) >>> 0;
}

export function adler32(data: Uint8Array): number {
  let a = 1;
  let b = 0;
  for (let i = 0; i < data.length; i++) {
    a = (a + data[i]) % 65521;
    b = (b + a) % 65521;
  }
  return ((b << 16) | a) >>> 0;
}

function u32(value: number): Uint8Array {
  return new Uint8Array([(value >>> 24) & 0xff, (value >>> 16) & 0xff, (value >>> 8) & 0xff, value & 0xff]);
}

function chunk(type: string, payload: Uint8Array): Uint8Array {
  const head = new Uint8Array(4 + payload.length);
  for (let i = 0; i < 4; i++) head[i] = type.charCodeAt(i);
  head.set(payload, 4);
  const out = new Uint8Array(4 + head.length + 4);
  out.set(u32(payload.length), 0);
  out.set(head, 4);
  out.set(u32(crc32(head)), 4 + head.length);
  return out;
}

function zlibStored(raw: Uint8Array): Uint8Array {
  const blocks: Uint8Array[] = [new Uint8Array([0x78, 0x01])];
  const max = 65535;
  for (let off = 0; off < raw.length || off === 0; off += max) {
    const part = raw.subarray(off, Math.min(off + max, raw.length));
    const last = off + max >= raw.length ? 1 : 0;
    const header = new Uint8Array([
      last,
      part.length & 0xff,
      (part.length >>> 8) & 0xff,
      ~part.length & 0xff,
      (~part.length >>> 8) & 0xff,
    ]);
    blocks.push(header, part);
    if (last) break;
  }
  blocks.push(u32(adler32(raw)));
  return concat(blocks);
}

function concat(parts: Uint8Array[]): Uint8Array {
  const total = parts.reduce((n, p) => n + p.length, 0);
  const out = new Uint8Array(total);
  let off = 0;
  for (const p of parts) {
    out.set(p, off);
    off += p.length;
  }
  return out;
}

/** Encode a binary/grayscale image (values 0..255, or 0/1 with scale255) */
export function encodeGrayPng(pixels: Uint8Array, width: number, height: number, scale255 = true): Uint8Array {
  if (pixels.length !== width * height) {
    throw new Error(`pixel buffer ${pixels.length} != ${width}x${height}`);
  }
  const ihdr = new Uint8Array(13);
  ihdr.set(u32(width), 0);
  ihdr.set(u32(height), 4);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 0; // grayscale
  // raw scanlines with filter byte 0
  const raw = new Uint8Array(height * (width + 1));
  for (let y = 0; y < height; y++) {
    const row = y * (width + 1);
    raw[row] = 0;
    for (let x = 0; x < width; x++) {
      const v = pixels[y * width + x];
      raw[row + 1 + x] = scale255 ? (v ? 255 : 0) : v;
    }
  }
  return concat([
    SIGNATURE,
    chunk('IHDR', ihdr),
    chunk('IDAT', zlibStored(raw)),
    chunk('IEND', new Uint8Array(0)),
  ]);
}

export function toBase64(data: Uint8Array): string {
  if (typeof btoa === 'function') {
    let s = '';
    for (let i = 0; i < data.length; i++) s += String.fromCharCode(data[i]);
    return btoa(s);
  }
  return Buffer.from(data).toString('base64');
}

// Structural reader used by tests and by the display path to size images.
export interface PngInfo {
  width: number;
  height: number;
  bitDepth: number;
  colorType: number;
  chunks: { type: string; crcOk: boolean; data: Uint8Array }[];
}

export function readPng(data: Uint8Array): PngInfo {
  for (let i = 0; i < 8; i++) {
    if (data[i] !== SIGNATURE[i]) throw new Error('bad PNG signature');
  }
  const chunks: PngInfo['chunks'] = [];
  let off = 8;
  let width = 0;
  let height = 0;
  let bitDepth = 0;
  let colorType = 0;
  while (off < data.length) {
    const len = (data[off] << 24) | (data[off + 1] << 16) | (data[off + 2] << 8) | data[off + 3];
    const typeAndData = data.subarray(off + 4, off + 8 + len);
    const type = String.fromCharCode(...typeAndData.subarray(0, 4));
    const crc =
      ((data[off + 8 + len] << 24) |
        (data[off + 9 + len] << 16) |
        (data[off + 10 + len] << 8) |
        data[off + 11 + len]) >>>
      0;
    chunks.push({ type, crcOk: crc32(typeAndData) === crc, data: typeAndData.subarray(4) });
    if (type === 'IHDR') {
      const d = typeAndData.subarray(4);
      width = (d[0] << 24) | (d[1] << 16) | (d[2] << 8) | d[3];
      height = (d[4] << 24) | (d[5] << 16) | (d[6] << 8) | d[7];
      bitDepth = d[8];
      colorType = d[9];
    }
    off += 12 + len;
    if (type === 'IEND') break;
  }
  return { width, height, bitDepth, colorType, chunks };
}

/** Inflate for stored-only zlib streams (what encodeGrayPng emits). */
export function inflateStored(z: Uint8Array): Uint8Array {
  const parts: Uint8Array[] = [];
  let off = 2; // skip zlib header
  for (;;) {
    const last = z[off] & 1;
    if ((z[off] >>> 1) !== 0) throw new Error('not a stored block');
    const len = z[off + 1] | (z[off + 2] << 8);
    parts.push(z.subarray(off + 5, off + 5 + len));
    off += 5 + len;
    if (last) break;
  }
  return parts.reduce((acc, p) => {
    const merged = new Uint8Array(acc.length + p.length);
    merged.set(acc, 0);
    merged.set(p, acc.length);
    return merged;
  }, new Uint8Array(0));
}
