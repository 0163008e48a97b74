/** Studio state machine: stroke stack, reference selection, debounced
 * synthesis with a single in-flight request and latest-wins display.
 *
 * All side effects go through injected ports (API, notices, timers, file
 * saving), which is what lets the whole behavior run under plain node.
 */

import type { ReferenceEntry, SynthesisResult } from "./api.js";
import { ApiError } from "./api.js";
import { decodeBase64, encodeBase64 } from "./base64.js";
import { Debouncer, defaultScheduler, type Scheduler } from "./debounce.js";
import {
  CANVAS_SIZE,
  cloneGrid,
  gridToPngBytes,
  isBlank,
  rasterizeStrokes,
  stampStroke,
  type PixelGrid,
} from "./raster.js";
import {
  beginStroke,
  extendStroke,
  finalizeStroke,
  type CanvasStroke,
} from "./strokes.js";

export interface NoticeSink {
  notify(message: string): void;
}

export interface SynthesisPort {
  references(): Promise<ReferenceEntry[]>;
  synthesize(
    sketchBase64: string,
    referenceId: string | null,
  ): Promise<SynthesisResult>;
}

export interface StudioPorts {
  api: SynthesisPort;
  notices: NoticeSink;
  scheduler?: Scheduler;
  debounceMs?: number;
  canvasSize?: number;
  penWidth?: number;
  now?: () => number;
  saveFile?: (name: string, bytes: Uint8Array) => void;
  onChange?: () => void;
}

export interface GalleryTile {
  id: string | null; // null is the first-class "no reference" tile
  thumbnail: string | null;
  selected: boolean;
}

export const DEFAULT_DEBOUNCE_MS = 600;
export const DEFAULT_PEN_WIDTH = 3;

export class StudioController {
  readonly canvasSize: number;
  readonly penWidth: number;

  strokes: CanvasStroke[] = [];
  grid: PixelGrid;
  liveStroke: CanvasStroke | null = null;

  gallery: ReferenceEntry[] = [];
  galleryAvailable = true;
  selectedReference: string | null = null;

  lastResult: SynthesisResult | null = null;

  private readonly api: SynthesisPort;
  private readonly notices: NoticeSink;
  private readonly debouncer: Debouncer;
  private readonly now: () => number;
  private readonly saveFile: (name: string, bytes: Uint8Array) => void;
  private readonly onChange: () => void;

  private dirty = false;
  private inFlight = false;

  constructor(ports: StudioPorts) {
    this.api = ports.api;
    this.notices = ports.notices;
    this.canvasSize = ports.canvasSize ?? CANVAS_SIZE;
    this.penWidth = ports.penWidth ?? DEFAULT_PEN_WIDTH;
    this.debouncer = new Debouncer(
      ports.debounceMs ?? DEFAULT_DEBOUNCE_MS,
      ports.scheduler ?? defaultScheduler,
    );
    this.now = ports.now ?? (() => Date.now());
    this.saveFile = ports.saveFile ?? (() => undefined);
    this.onChange = ports.onChange ?? (() => undefined);
    this.grid = rasterizeStrokes([], this.canvasSize);
  }

  get requestInFlight(): boolean {
    return this.inFlight;
  }

  // ------------------------------------------------------------- drawing

  pointerDown(x: number, y: number): void {
    if (this.liveStroke) {
      this.pointerUp();
    }
    this.liveStroke = beginStroke(x, y, this.penWidth, this.now(), this.canvasSize);
    this.onChange();
  }

  pointerMove(x: number, y: number): void {
    if (!this.liveStroke) return;
    this.liveStroke = extendStroke(this.liveStroke, x, y, this.canvasSize);
    this.onChange();
  }

  /** Completes the stroke: commit to the stack, ink the grid, and start the
   * debounce countdown toward one synthesis request. */
  pointerUp(): void {
    if (!this.liveStroke) return;
    const stroke = finalizeStroke(this.liveStroke);
    this.liveStroke = null;
    this.strokes.push(stroke);
    stampStroke(this.grid, stroke);
    this.debouncer.trigger(() => this.markDirty());
    this.onChange();
  }

  /** Pop exactly one stroke and rebuild the raster from the survivors. */
  undo(): void {
    if (this.liveStroke) {
      this.liveStroke = null;
      this.onChange();
      return;
    }
    if (this.strokes.length === 0) return;
    this.strokes.pop();
    this.grid = rasterizeStrokes(this.strokes, this.canvasSize);
    if (isBlank(this.grid)) {
      this.debouncer.cancel();
      this.dirty = false;
    } else {
      this.debouncer.trigger(() => this.markDirty());
    }
    this.onChange();
  }

  clear(): void {
    this.liveStroke = null;
    this.strokes = [];
    this.grid = rasterizeStrokes([], this.canvasSize);
    this.debouncer.cancel();
    this.dirty = false;
    this.onChange();
  }

  /** The grid including the stroke being drawn right now (view only). */
  displayGrid(): PixelGrid {
    if (!this.liveStroke) return this.grid;
    const view = cloneGrid(this.grid);
    stampStroke(view, this.liveStroke);
    return view;
  }

  /** Export the committed drawing as PNG bytes (always a fresh buffer). */
  exportPng(): Uint8Array {
    return gridToPngBytes(this.grid);
  }

  // ------------------------------------------------------------- gallery

  async loadGallery(): Promise<void> {
    try {
      this.gallery = await this.api.references();
      this.galleryAvailable = true;
    } catch (err) {
      this.gallery = [];
      this.galleryAvailable = false;
      this.selectedReference = null;
      this.notices.notify(`reference gallery unavailable: ${describe(err)}`);
    }
    this.onChange();
  }

  /** Selecting the current reference again toggles back to no-reference. */
  selectReference(id: string | null): void {
    if (!this.galleryAvailable && id !== null) return;
    const next = id !== null && this.selectedReference === id ? null : id;
    if (next === this.selectedReference) return;
    this.selectedReference = next;
    this.onChange();
    // A changed style should reflect promptly; no stroke pause to wait for.
    this.markDirty();
  }

  galleryTiles(): GalleryTile[] {
    const tiles: GalleryTile[] = [
      { id: null, thumbnail: null, selected: this.selectedReference === null },
    ];
    for (const entry of this.gallery) {
      tiles.push({
        id: entry.id,
        thumbnail: entry.thumbnail,
        selected: this.selectedReference === entry.id,
      });
    }
    return tiles;
  }

  // ------------------------------------------------------------- network

  private markDirty(): void {
    this.dirty = true;
    void this.maybeSend();
  }

  /** Keeps at most one request outstanding. A response that returns while
   * newer input exists (dirty flag) is discarded, and the newest state is
   * sent right after — so the displayed result always matches the latest
   * completed request. */
  private async maybeSend(): Promise<void> {
    if (this.inFlight || !this.dirty) return;
    if (isBlank(this.grid)) {
      this.dirty = false;
      return;
    }
    this.dirty = false;
    this.inFlight = true;
    const sketch = encodeBase64(this.exportPng());
    const reference = this.selectedReference;
    try {
      const result = await this.api.synthesize(sketch, reference);
      if (!this.dirty) {
        this.lastResult = result;
      }
    } catch (err) {
      this.notices.notify(describe(err));
    } finally {
      this.inFlight = false;
      this.onChange();
      if (this.dirty) {
        void this.maybeSend();
      }
    }
  }

  // ------------------------------------------------------------ download

  /** Save the current sketch plus the displayed outputs for curation. */
  downloadPair(): void {
    this.saveFile("sketch.png", this.exportPng());
    if (!this.lastResult) {
      this.notices.notify("no synthesis result yet: saved the sketch only");
      return;
    }
    try {
      this.saveFile("grayscale.png", decodeBase64(this.lastResult.grayscale));
      this.saveFile("color.png", decodeBase64(this.lastResult.color));
    } catch (err) {
      this.notices.notify(`could not decode result images: ${describe(err)}`);
    }
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return err.message;
  if (err instanceof Error) return err.message;
  return String(err);
}
