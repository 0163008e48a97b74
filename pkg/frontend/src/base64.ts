/** Environment-independent base64, so exports encode identically in the
 * browser and in the node test runner (no reliance on btoa/Buffer). */

const ALPHABET =
  "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

const REVERSE = new Map<string, number>(
  [...ALPHABET].map((ch, i) => [ch, i] as const),
);

export function encodeBase64(bytes: Uint8Array): string {
  const out: string[] = [];
  for (let i = 0; i < bytes.length; i += 3) {
    const b0 = bytes[i];
    const b1 = i + 1 < bytes.length ? bytes[i + 1] : 0;
    const b2 = i + 2 < bytes.length ? bytes[i + 2] : 0;
    out.push(ALPHABET[b0 >> 2]);
    out.push(ALPHABET[((b0 & 0x03) << 4) | (b1 >> 4)]);
    out.push(i + 1 < bytes.length ? ALPHABET[((b1 & 0x0f) << 2) | (b2 >> 6)] : "=");
    out.push(i + 2 < bytes.length ? ALPHABET[b2 & 0x3f] : "=");
  }
  return out.join("");
}

export function decodeBase64(text: string): Uint8Array {
  const clean = text.replace(/=+$/, "");
  const bytes: number[] = [];
  let buffer = 0;
  let bits = 0;
  for (const ch of clean) {
    const value = REVERSE.get(ch);
    if (value === undefined) {
      throw new Error(`invalid base64 character ${JSON.stringify(ch)}`);
    }
    buffer = (buffer << 6) | value;
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      bytes.push((buffer >> bits) & 0xff);
    }
  }
  return Uint8Array.from(bytes);
}
