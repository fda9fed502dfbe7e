// Jet-style stress colormap, identical to the renderer's display transfer
// function: blue (low) -> green -> red (high).

export function jet(v: number): [number, number, number] {
  const y = Math.min(1, Math.max(0, v));
  const r = Math.min(1, Math.max(0, 1.5 - Math.abs(4 * y - 3)));
  const g = Math.min(1, Math.max(0, 1.5 - Math.abs(4 * y - 2)));
  const b = Math.min(1, Math.max(0, 1.5 - Math.abs(4 * y - 1)));
  return [r, g, b];
}

/** Map grayscale [0,255] pixels to RGBA with the jet colormap. */
export function colorizeGray(gray: Uint8ClampedArray | Uint8Array, rgba: Uint8ClampedArray): void {
  for (let i = 0; i < gray.length; i++) {
    const [r, g, b] = jet(gray[i] / 255);
    rgba[4 * i] = Math.round(r * 255);
    rgba[4 * i + 1] = Math.round(g * 255);
    rgba[4 * i + 2] = Math.round(b * 255);
    rgba[4 * i + 3] = 255;
  }
}
