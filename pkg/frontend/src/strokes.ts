/** Stroke capture: ordered points with a brush width and a start time. */

export interface StrokePoint {
  readonly x: number;
  readonly y: number;
}

export interface CanvasStroke {
  readonly points: readonly StrokePoint[];
  readonly width: number;
  readonly startedAt: number;
}

/** Clamp a pointer position into the canvas bounds [0, size]. */
export function clampPoint(x: number, y: number, size: number): StrokePoint {
  const clamp = (v: number) => Math.min(Math.max(v, 0), size);
  return { x: clamp(x), y: clamp(y) };
}

export function beginStroke(
  x: number,
  y: number,
  width: number,
  startedAt: number,
  size: number,
): CanvasStroke {
  return { points: [clampPoint(x, y, size)], width, startedAt };
}

export function extendStroke(
  stroke: CanvasStroke,
  x: number,
  y: number,
  size: number,
): CanvasStroke {
  return { ...stroke, points: [...stroke.points, clampPoint(x, y, size)] };
}

/** A finished stroke always has at least two points; a single-point tap is a
 * dot, represented by duplicating the point (a zero-length segment). */
export function finalizeStroke(stroke: CanvasStroke): CanvasStroke {
  if (stroke.points.length >= 2) {
    return stroke;
  }
  return { ...stroke, points: [stroke.points[0], stroke.points[0]] };
}
