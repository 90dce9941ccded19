/**
 * Typed mirror of the scene document JSON emitted by the projection
 * pipeline.  Field names match the payload byte for byte so a parsed
 * document can be used without any reshaping.
 */

export interface ScenePoint {
  id: number;
  xy: [number, number];
  label: number | null;
  image_path: string | null;
}

export interface SceneGlyph {
  id: number;
  /** Convex hull of the scaled direction fan, relative to the point's xy. */
  hull: number[][];
  /** Closed outline sampled around the hull, same anchor-relative frame. */
  outline: number[][];
  area: number;
  aspect: number;
  /** Paint order index; rank 0 is the largest glyph and is drawn first. */
  draw_rank: number;
  fallback: string | null;
  degenerate: boolean;
  reason: string | null;
}

export interface SceneVectors {
  id: number;
  /** Projected basis directions, scaled to overlay the glyph outline. */
  vectors: number[][];
  weights: number[];
}

export interface SceneMetrics {
  per_point_stress: number[];
  trustworthiness: number;
  per_point_trust: number[];
  linearity: number[];
  k_used: number;
}

export interface SceneEmbedding {
  method: string;
  stress_total: number;
  iterations: number;
  converged: boolean;
  gradient_norm: number | null;
  seed: number | null;
  jittered: number[];
}

export interface SceneDocument {
  schema_version: string;
  points: ScenePoint[];
  glyphs: SceneGlyph[];
  vectors: SceneVectors[];
  /** Null when the pipeline ran with metrics disabled. */
  metrics: SceneMetrics | null;
  embedding: SceneEmbedding;
  provenance: Record<string, unknown>;
  class_names: string[] | null;
}
