/** The authoritative drawing surface: a binary pixel grid.
 *
 * The on-screen canvas is only a scaled view of this grid. Keeping the real
 * raster in plain bytes makes the export a pure function of the stroke list —
 * no anti-aliasing, no device-pixel scaling — so "background pure white,
 * strokes pure black" holds exactly, and the same code runs in tests.
 */

import type { CanvasStroke } from "./strokes.js";
import { encodePngRgb } from "./png.js";

export const CANVAS_SIZE = 128;

const WHITE = 255;
const BLACK = 0;

export interface PixelGrid {
  readonly size: number;
  readonly data: Uint8Array; // one byte per pixel, row-major
}

export function createGrid(size: number = CANVAS_SIZE): PixelGrid {
  return { size, data: new Uint8Array(size * size).fill(WHITE) };
}

export function cloneGrid(grid: PixelGrid): PixelGrid {
  return { size: grid.size, data: grid.data.slice() };
}

export function gridsEqual(a: PixelGrid, b: PixelGrid): boolean {
  if (a.size !== b.size) return false;
  for (let i = 0; i < a.data.length; i++) {
    if (a.data[i] !== b.data[i]) return false;
  }
  return true;
}

export function isBlank(grid: PixelGrid): boolean {
  return grid.data.every((v) => v === WHITE);
}

/** Ink a disc. Pixels outside the grid are simply skipped (clipping). */
export function stampDot(
  grid: PixelGrid,
  cx: number,
  cy: number,
  radius: number,
): void {
  const r2 = radius * radius;
  const x0 = Math.max(0, Math.floor(cx - radius));
  const x1 = Math.min(grid.size - 1, Math.ceil(cx + radius));
  const y0 = Math.max(0, Math.floor(cy - radius));
  const y1 = Math.min(grid.size - 1, Math.ceil(cy + radius));
  for (let y = y0; y <= y1; y++) {
    for (let x = x0; x <= x1; x++) {
      const dx = x + 0.5 - cx;
      const dy = y + 0.5 - cy;
      if (dx * dx + dy * dy <= r2) {
        grid.data[y * grid.size + x] = BLACK;
      }
    }
  }
}

export function stampSegment(
  grid: PixelGrid,
  x0: number,
  y0: number,
  x1: number,
  y1: number,
  radius: number,
): void {
  const distance = Math.hypot(x1 - x0, y1 - y0);
  const steps = Math.max(1, Math.ceil(distance / 0.5));
  for (let i = 0; i <= steps; i++) {
    const t = i / steps;
    stampDot(grid, x0 + (x1 - x0) * t, y0 + (y1 - y0) * t, radius);
  }
}

export function stampStroke(grid: PixelGrid, stroke: CanvasStroke): void {
  const radius = Math.max(0.5, stroke.width / 2);
  const pts = stroke.points;
  if (pts.length === 0) return;
  if (pts.length === 1) {
    stampDot(grid, pts[0].x, pts[0].y, radius);
    return;
  }
  for (let i = 1; i < pts.length; i++) {
    stampSegment(grid, pts[i - 1].x, pts[i - 1].y, pts[i].x, pts[i].y, radius);
  }
}

/** Rebuild the whole grid from a stroke list. Stamping only ever turns
 * pixels black, so replaying any suffix-removed list (undo) reproduces the
 * exact raster that existed before those strokes. */
export function rasterizeStrokes(
  strokes: readonly CanvasStroke[],
  size: number = CANVAS_SIZE,
): PixelGrid {
  const grid = createGrid(size);
  for (const stroke of strokes) {
    stampStroke(grid, stroke);
  }
  return grid;
}

/** Export as PNG bytes. Always a fresh buffer: later drawing or undo can
 * never mutate a PNG that was already handed out. */
export function gridToPngBytes(grid: PixelGrid): Uint8Array {
  const rgb = new Uint8Array(grid.size * grid.size * 3);
  for (let i = 0; i < grid.data.length; i++) {
    const v = grid.data[i];
    rgb[i * 3] = v;
    rgb[i * 3 + 1] = v;
    rgb[i * 3 + 2] = v;
  }
  return encodePngRgb(grid.size, grid.size, rgb);
}
