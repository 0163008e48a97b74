/** Minimal dependency-free PNG writer.
 *
 * Emits 8-bit truecolor PNGs with filter type 0 on every row and the pixel
 * stream wrapped in a zlib container made of *stored* (uncompressed) deflate
 * blocks. Stored blocks are valid deflate, need no compressor, and make the
 * output a deterministic function of the pixels — the same bytes in the
 * browser and in tests. At the 128×128 canvas size the file is ~50 KB, which
 * is fine for localhost JSON uploads.
 */

const PNG_SIGNATURE = Uint8Array.of(137, 80, 78, 71, 13, 10, 26, 10);

const CRC_TABLE: Uint32Array = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

export function crc32(bytes: Uint8Array): number {
  let crc = 0xffffffff;
  for (const byte of bytes) {
    crc = CRC_TABLE[(crc ^ byte) & 0xff] ^ (crc >>> 8);
  }
  return (crc ^ 0xffffffff) >>> 0;
}

export function adler32(bytes: Uint8Array): number {
  const MOD = 65521;
  let a = 1;
  let b = 0;
  for (const byte of bytes) {
    a = (a + byte) % MOD;
    b = (b + a) % MOD;
  }
  return ((b << 16) | a) >>> 0;
}

function u32be(value: number): Uint8Array {
  return Uint8Array.of(
    (value >>> 24) & 0xff,
    (value >>> 16) & 0xff,
    (value >>> 8) & 0xff,
    value & 0xff,
  );
}

function concat(parts: Uint8Array[]): Uint8Array {
  const total = parts.reduce((n, p) => n + p.length, 0);
  const out = new Uint8Array(total);
  let offset = 0;
  for (const part of parts) {
    out.set(part, offset);
    offset += part.length;
  }
  return out;
}

/** zlib stream: 2-byte header, stored deflate blocks, big-endian adler32. */
export function zlibStored(data: Uint8Array): Uint8Array {
  const parts: Uint8Array[] = [Uint8Array.of(0x78, 0x01)];
  const MAX = 65535;
  for (let offset = 0; offset < data.length || data.length === 0; offset += MAX) {
    const chunk = data.subarray(offset, Math.min(offset + MAX, data.length));
    const final = offset + MAX >= data.length;
    const len = chunk.length;
    parts.push(
      Uint8Array.of(final ? 1 : 0, len & 0xff, len >> 8, ~len & 0xff, (~len >> 8) & 0xff),
      chunk,
    );
    if (data.length === 0) break;
  }
  parts.push(u32be(adler32(data)));
  return concat(parts);
}

function chunk(type: string, payload: Uint8Array): Uint8Array {
  const typeBytes = Uint8Array.from(type, (ch) => ch.charCodeAt(0));
  const body = concat([typeBytes, payload]);
  return concat([u32be(payload.length), body, u32be(crc32(body))]);
}

/** Encode `width`×`height` RGB pixels (row-major, 3 bytes per pixel). */
export function encodePngRgb(
  width: number,
  height: number,
  rgb: Uint8Array,
): Uint8Array {
  if (rgb.length !== width * height * 3) {
    throw new Error(
      `pixel buffer is ${rgb.length} bytes, expected ${width * height * 3}`,
    );
  }
  const header = concat([
    u32be(width),
    u32be(height),
    Uint8Array.of(8, 2, 0, 0, 0),
  ]);
  const stride = width * 3;
  const raw = new Uint8Array(height * (stride + 1));
  for (let y = 0; y < height; y++) {
    raw[y * (stride + 1)] = 0; // filter type: None
    raw.set(rgb.subarray(y * stride, (y + 1) * stride), y * (stride + 1) + 1);
  }
  return concat([
    PNG_SIGNATURE,
    chunk("IHDR", header),
    chunk("IDAT", zlibStored(raw)),
    chunk("IEND", new Uint8Array(0)),
  ]);
}

/** Read the dimensions out of a PNG's IHDR (sanity checks only). */
export function pngDimensions(bytes: Uint8Array): { width: number; height: number } {
  for (let i = 0; i < PNG_SIGNATURE.length; i++) {
    if (bytes[i] !== PNG_SIGNATURE[i]) {
      throw new Error("not a PNG: bad signature");
    }
  }
  const at = (i: number) => bytes[8 + 8 + i];
  const read = (i: number) =>
    ((at(i) << 24) | (at(i + 1) << 16) | (at(i + 2) << 8) | at(i + 3)) >>> 0;
  return { width: read(0), height: read(4) };
}
