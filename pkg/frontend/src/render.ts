/** View helpers: paint the pixel grid onto a scaled 2D context and map
 * pointer positions back into grid coordinates. The context is typed as the
 * small subset of CanvasRenderingContext2D actually used. */

import type { PixelGrid } from "./raster.js";

export interface Paintable {
  fillStyle: string | CanvasGradient | CanvasPattern;
  fillRect(x: number, y: number, w: number, h: number): void;
}

export function paintGrid(ctx: Paintable, grid: PixelGrid, scale: number): void {
  ctx.fillStyle = "#ffffff";
  ctx.fillRect(0, 0, grid.size * scale, grid.size * scale);
  ctx.fillStyle = "#000000";
  for (let y = 0; y < grid.size; y++) {
    const row = y * grid.size;
    let x = 0;
    while (x < grid.size) {
      if (grid.data[row + x] !== 0) {
        x++;
        continue;
      }
      let runEnd = x + 1;
      while (runEnd < grid.size && grid.data[row + runEnd] === 0) runEnd++;
      ctx.fillRect(x * scale, y * scale, (runEnd - x) * scale, scale);
      x = runEnd;
    }
  }
}

/** Map a client-space pointer position to grid coordinates, given the
 * element's bounding box. Pure, so the math is testable without a DOM. */
export function canvasCoords(
  clientX: number,
  clientY: number,
  rect: { left: number; top: number; width: number; height: number },
  gridSize: number,
): { x: number; y: number } {
  const x = ((clientX - rect.left) / rect.width) * gridSize;
  const y = ((clientY - rect.top) / rect.height) * gridSize;
  return { x, y };
}
