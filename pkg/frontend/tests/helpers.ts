/** Shared test fakes and a decoder for the studio's own PNG output. */

import type {
  ReferenceEntry,
  SynthesisResult,
} from "../src/api.js";
import { encodeBase64 } from "../src/base64.js";
import { adler32, crc32 } from "../src/png.js";
import type { Scheduler } from "../src/debounce.js";
import type { NoticeSink } from "../src/studio.js";

// ---------------------------------------------------------------- PNG decode

function u32be(bytes: Uint8Array, at: number): number {
  return (
    ((bytes[at] << 24) | (bytes[at + 1] << 16) | (bytes[at + 2] << 8) | bytes[at + 3]) >>> 0
  );
}

function inflateStored(zlibBytes: Uint8Array): Uint8Array {
  if ((zlibBytes[0] & 0x0f) !== 8) throw new Error("not a deflate zlib stream");
  const out: number[] = [];
  let at = 2;
  for (;;) {
    const header = zlibBytes[at++];
    if ((header >> 1) !== 0) throw new Error("not a stored deflate block");
    const len = zlibBytes[at] | (zlibBytes[at + 1] << 8);
    const nlen = zlibBytes[at + 2] | (zlibBytes[at + 3] << 8);
    if ((len ^ nlen) !== 0xffff) throw new Error("corrupt stored block length");
    at += 4;
    for (let i = 0; i < len; i++) out.push(zlibBytes[at + i]);
    at += len;
    if (header & 1) break;
  }
  const data = Uint8Array.from(out);
  const expected = u32be(zlibBytes, at);
  if (adler32(data) !== expected) throw new Error("adler32 mismatch");
  return data;
}

export interface DecodedPng {
  width: number;
  height: number;
  /** RGB, 3 bytes per pixel, row-major. */
  pixels: Uint8Array;
}

export function decodePng(bytes: Uint8Array): DecodedPng {
  const signature = [137, 80, 78, 71, 13, 10, 26, 10];
  signature.forEach((v, i) => {
    if (bytes[i] !== v) throw new Error("bad PNG signature");
  });
  let at = 8;
  let width = 0;
  let height = 0;
  const idat: number[] = [];
  while (at < bytes.length) {
    const length = u32be(bytes, at);
    const type = String.fromCharCode(...bytes.subarray(at + 4, at + 8));
    const payload = bytes.subarray(at + 8, at + 8 + length);
    const stored = u32be(bytes, at + 8 + length);
    const actual = crc32(bytes.subarray(at + 4, at + 8 + length));
    if (stored !== actual) throw new Error(`bad CRC on ${type}`);
    if (type === "IHDR") {
      width = u32be(payload, 0);
      height = u32be(payload, 4);
      if (payload[8] !== 8 || payload[9] !== 2) {
        throw new Error("expected 8-bit truecolor");
      }
    } else if (type === "IDAT") {
      idat.push(...payload);
    } else if (type === "IEND") {
      break;
    }
    at += 12 + length;
  }
  const raw = inflateStored(Uint8Array.from(idat));
  const stride = width * 3;
  const pixels = new Uint8Array(width * height * 3);
  for (let y = 0; y < height; y++) {
    if (raw[y * (stride + 1)] !== 0) throw new Error("expected filter type 0");
    pixels.set(
      raw.subarray(y * (stride + 1) + 1, (y + 1) * (stride + 1)),
      y * stride,
    );
  }
  return { width, height, pixels };
}

export function pixelAt(png: DecodedPng, x: number, y: number): [number, number, number] {
  const i = (y * png.width + x) * 3;
  return [png.pixels[i], png.pixels[i + 1], png.pixels[i + 2]];
}

// ------------------------------------------------------------------- fakes

export class FakeScheduler implements Scheduler {
  now = 0;
  private nextId = 1;
  private tasks: { id: number; at: number; fn: () => void }[] = [];

  schedule(fn: () => void, ms: number): unknown {
    const task = { id: this.nextId++, at: this.now + ms, fn };
    this.tasks.push(task);
    return task.id;
  }

  cancel(handle: unknown): void {
    this.tasks = this.tasks.filter((t) => t.id !== handle);
  }

  advance(ms: number): void {
    this.now += ms;
    const due = this.tasks
      .filter((t) => t.at <= this.now)
      .sort((a, b) => a.at - b.at);
    this.tasks = this.tasks.filter((t) => t.at > this.now);
    for (const task of due) task.fn();
  }

  get pendingCount(): number {
    return this.tasks.length;
  }
}

export class RecordingNotices implements NoticeSink {
  messages: string[] = [];
  notify(message: string): void {
    this.messages.push(message);
  }
}

export interface RecordedCall {
  sketch: string;
  referenceId: string | null;
}

function textBytes(text: string): Uint8Array {
  return Uint8Array.from(text, (ch) => ch.charCodeAt(0));
}

function tinyHash(text: string): string {
  let h = 2166136261;
  for (let i = 0; i < text.length; i++) {
    h = (h ^ text.charCodeAt(i)) >>> 0;
    h = (h * 16777619) >>> 0;
  }
  return h.toString(16);
}

/** Fake synthesis service. Grayscale depends only on the sketch bytes (the
 * real service guarantees this); color depends on sketch + reference. */
export class FakeApi {
  calls: RecordedCall[] = [];
  referencesCalls = 0;
  referencesResult: ReferenceEntry[] | Error = [];
  manual = false;
  private pending: {
    call: RecordedCall;
    resolve: (r: SynthesisResult) => void;
    reject: (e: unknown) => void;
  }[] = [];
  failNextWith: Error | null = null;

  resultFor(call: RecordedCall): SynthesisResult {
    return {
      grayscale: encodeBase64(textBytes(`gray:${tinyHash(call.sketch)}`)),
      color: encodeBase64(
        textBytes(`color:${tinyHash(call.sketch)}:${call.referenceId ?? "none"}`),
      ),
      mode: "sketch2photo",
      modelVersion: "fake-model",
      latencyMs: 1,
      preprocess: "none",
    };
  }

  references(): Promise<ReferenceEntry[]> {
    this.referencesCalls++;
    if (this.referencesResult instanceof Error) {
      return Promise.reject(this.referencesResult);
    }
    return Promise.resolve(this.referencesResult);
  }

  synthesize(sketch: string, referenceId: string | null): Promise<SynthesisResult> {
    const call: RecordedCall = { sketch, referenceId };
    this.calls.push(call);
    if (this.failNextWith) {
      const err = this.failNextWith;
      this.failNextWith = null;
      return Promise.reject(err);
    }
    if (!this.manual) {
      return Promise.resolve(this.resultFor(call));
    }
    return new Promise((resolve, reject) => {
      this.pending.push({ call, resolve, reject });
    });
  }

  get pendingCount(): number {
    return this.pending.length;
  }

  resolveOldest(): void {
    const entry = this.pending.shift();
    if (!entry) throw new Error("no pending synthesize call");
    entry.resolve(this.resultFor(entry.call));
  }

  rejectOldest(err: Error): void {
    const entry = this.pending.shift();
    if (!entry) throw new Error("no pending synthesize call");
    entry.reject(err);
  }
}

/** Let resolved promise chains run to completion. */
export async function flushAsync(): Promise<void> {
  for (let i = 0; i < 5; i++) {
    await Promise.resolve();
  }
}
