/** Small 2D helpers shared by selection and rendering. */

export type Vec2 = readonly [number, number];

/** Signed area of a closed polygon via the shoelace sum. */
export function signedArea(poly: readonly Vec2[]): number {
  let twice = 0;
  for (let i = 0, j = poly.length - 1; i < poly.length; j = i++) {
    twice += poly[j][0] * poly[i][1] - poly[i][0] * poly[j][1];
  }
  return twice / 2;
}

/**
 * A lasso polygon is usable when it has at least three vertices and
 * encloses nonzero area.  Degenerate lassos are treated as a no-op by
 * the selection reducer rather than clearing the selection.
 */
export function isValidLasso(poly: readonly Vec2[]): boolean {
  return poly.length >= 3 && signedArea(poly) !== 0;
}

/** Even-odd ray casting point-in-polygon test. */
export function pointInPolygon(x: number, y: number, poly: readonly Vec2[]): boolean {
  let inside = false;
  for (let i = 0, j = poly.length - 1; i < poly.length; j = i++) {
    const [xi, yi] = poly[i];
    const [xj, yj] = poly[j];
    if (yi > y !== yj > y && x < ((xj - xi) * (y - yi)) / (yj - yi) + xi) {
      inside = !inside;
    }
  }
  return inside;
}

/** Axis-aligned bounds of a point list; returns null for an empty list. */
export function bounds(
  pts: ReadonlyArray<readonly number[]>
): { xMin: number; xMax: number; yMin: number; yMax: number } | null {
  if (pts.length === 0) {
    return null;
  }
  let xMin = Infinity;
  let xMax = -Infinity;
  let yMin = Infinity;
  let yMax = -Infinity;
  for (const p of pts) {
    if (p[0] < xMin) xMin = p[0];
    if (p[0] > xMax) xMax = p[0];
    if (p[1] < yMin) yMin = p[1];
    if (p[1] > yMax) yMax = p[1];
  }
  return { xMin, xMax, yMin, yMax };
}
