/** White-to-red ramp and probability formatting for the heat maps. */

export function matrixMax(rows: ReadonlyArray<ReadonlyArray<number>>): number {
  let max = 0;
  for (const row of rows) {
    for (const v of row) {
      if (v > max) max = v;
    }
  }
  return max;
}

/** Linear white (0) to pure red (max). Values are clamped. */
export function rampWhiteRed(value: number, max: number): string {
  const t = max > 0 ? Math.min(Math.max(value / max, 0), 1) : 0;
  const gb = Math.round(255 * (1 - t));
  return `rgb(255, ${gb}, ${gb})`;
}

/** Six-decimal display form for compact labels. */
export function formatProb(value: number): string {
  return value.toFixed(6);
}

/** Full-precision form for hover readouts; Number() round-trips it. */
export function exactProb(value: number): string {
  return String(value);
}
