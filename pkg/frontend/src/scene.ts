/**
 * Scene document loading and validation.  The viewer only ever receives
 * documents through this function, so everything downstream can assume
 * the invariants checked here: aligned id rows, finite coordinates and
 * per-point metric arrays of matching length.
 */

import type { SceneDocument, SceneGlyph, SceneMetrics, ScenePoint, SceneVectors } from "./types.js";

export type LoadResult =
  | { ok: true; doc: SceneDocument }
  | { ok: false; error: string };

const SUPPORTED_MAJOR = 1;

const PER_POINT_METRICS = ["per_point_stress", "per_point_trust", "linearity"] as const;

/** Parse and validate scene JSON text; never throws. */
export function loadSceneText(text: string): LoadResult {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (err) {
    return { ok: false, error: `scene is not valid JSON: ${(err as Error).message}` };
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    return { ok: false, error: "scene root must be a JSON object" };
  }
  const doc = raw as Partial<SceneDocument>;
  if (typeof doc.schema_version !== "string") {
    return { ok: false, error: "scene is missing schema_version" };
  }
  const major = Number(doc.schema_version.split(".")[0]);
  if (major !== SUPPORTED_MAJOR) {
    return { ok: false, error: `unsupported schema_version ${doc.schema_version}` };
  }
  if (!Array.isArray(doc.points) || !Array.isArray(doc.glyphs) || !Array.isArray(doc.vectors)) {
    return { ok: false, error: "scene needs points, glyphs and vectors arrays" };
  }
  const points = doc.points as ScenePoint[];
  const glyphs = doc.glyphs as SceneGlyph[];
  const vectors = doc.vectors as SceneVectors[];
  if (glyphs.length !== points.length || vectors.length !== points.length) {
    return { ok: false, error: "points, glyphs and vectors must have equal length" };
  }
  for (let i = 0; i < points.length; i++) {
    const p = points[i];
    if (
      !p ||
      typeof p.id !== "number" ||
      !Array.isArray(p.xy) ||
      p.xy.length !== 2 ||
      !Number.isFinite(p.xy[0]) ||
      !Number.isFinite(p.xy[1])
    ) {
      return { ok: false, error: `point row ${i} is malformed` };
    }
    // the three per-point sections are parallel arrays keyed by id
    if (!glyphs[i] || glyphs[i].id !== p.id || !vectors[i] || vectors[i].id !== p.id) {
      return { ok: false, error: `row ${i} has misaligned ids across sections` };
    }
    if (!Array.isArray(glyphs[i].outline) || glyphs[i].outline.length < 3) {
      return { ok: false, error: `glyph row ${i} has no drawable outline` };
    }
  }
  if (doc.metrics !== null) {
    const m = doc.metrics as Partial<SceneMetrics> | undefined;
    if (typeof m !== "object" || m === null) {
      return { ok: false, error: "scene metrics must be an object or null" };
    }
    for (const key of PER_POINT_METRICS) {
      const arr = m[key];
      if (!Array.isArray(arr) || arr.length !== points.length) {
        return { ok: false, error: `metrics.${key} must list one value per point` };
      }
    }
  }
  if (typeof doc.embedding !== "object" || doc.embedding === null) {
    return { ok: false, error: "scene is missing the embedding section" };
  }
  return { ok: true, doc: doc as SceneDocument };
}
