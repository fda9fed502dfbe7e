// Deterministic binary rasterization of strokes. The exported image sent to
// the service is computed here with integer arithmetic only, so it never
// depends on browser canvas anti-aliasing.

import type { Stroke } from './state.js';

export function blankRaster(size: number): Uint8Array {
  return new Uint8Array(size * size);
}

function stampDisc(img: Uint8Array, size: number, cx: number, cy: number, radius: number): void {
  const r2 = radius * radius;
  for (let dy = -radius; dy <= radius; dy++) {
    for (let dx = -radius; dx <= radius; dx++) {
      if (dx * dx + dy * dy > r2) continue;
      const x = cx + dx;
      const y = cy + dy;
      if (x >= 0 && x < size && y >= 0 && y < size) {
        img[y * size + x] = 1;
      }
    }
  }
}

function drawSegment(
  img: Uint8Array,
  size: number,
  x0: number,
  y0: number,
  x1: number,
  y1: number,
  radius: number,
): void {
  // Bresenham walk, stamping a disc at every covered cell.
  let x = x0;
  let y = y0;
  const dx = Math.abs(x1 - x0);
  const dy = -Math.abs(y1 - y0);
  const sx = x0 < x1 ? 1 : -1;
  const sy = y0 < y1 ? 1 : -1;
  let err = dx + dy;
  for (;;) {
    stampDisc(img, size, x, y, radius);
    if (x === x1 && y === y1) break;
    const e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y += sy;
    }
  }
}

export function rasterizeStrokes(strokes: readonly Stroke[], size: number): Uint8Array {
  const img = blankRaster(size);
  for (const stroke of strokes) {
    // width 1-2 -> single pixel trail; wider brushes stamp a disc
    const r = Math.max(0, Math.round(stroke.width / 2) - 1);
    const pts = stroke.points.map(
      ([x, y]) => [clampInt(x, size), clampInt(y, size)] as [number, number],
    );
    if (pts.length === 1) {
      stampDisc(img, size, pts[0][0], pts[0][1], r);
      continue;
    }
    for (let i = 1; i < pts.length; i++) {
      drawSegment(img, size, pts[i - 1][0], pts[i - 1][1], pts[i][0], pts[i][1], r);
    }
  }
  return img;
}

function clampInt(v: number, size: number): number {
  return Math.min(size - 1, Math.max(0, Math.round(v)));
}

export function rasterEquals(a: Uint8Array, b: Uint8Array): boolean {
  if (a.length !== b.length) return false;
  for (let i = 0; i < a.length; i++) {
    if (a[i] !== b[i]) return false;
  }
  return true;
}
