/**
 * View state and the pure functions that evolve it.  Rendering is a
 * function of (document, state) only: reducers return fresh state
 * objects and never touch the document, so replaying an interaction
 * sequence always lands on the same picture.
 */

import { isValidLasso, pointInPolygon, type Vec2 } from "./geometry.js";
import { basisColor, classColor, sequentialColor, MISSING_COLOR } from "./color.js";
import type { SceneDocument } from "./types.js";

export type ColorBy = "class" | "stress" | "trustworthiness" | "linearity";

export type MetricName = Exclude<ColorBy, "class">;

export interface MetricFilter {
  metric: MetricName;
  lo: number;
  hi: number;
}

/** World-space camera shared by all linked views. */
export interface Camera {
  x: number;
  y: number;
  zoom: number;
}

export interface ViewState {
  /** Glyph fill opacity in [0, 1]. */
  opacity: number;
  /** Extra magnification applied to glyph outlines around their anchors. */
  scale: number;
  colorBy: ColorBy;
  filter: MetricFilter | null;
  selection: ReadonlySet<number>;
  camera: Camera;
  hover: number | null;
}

export function initialViewState(): ViewState {
  return {
    opacity: 0.6,
    scale: 1.0,
    colorBy: "class",
    filter: null,
    selection: new Set(),
    camera: { x: 0, y: 0, zoom: 1 },
    hover: null,
  };
}

export function setColorBy(state: ViewState, colorBy: ColorBy): ViewState {
  return { ...state, colorBy };
}

export function setOpacity(state: ViewState, opacity: number): ViewState {
  return { ...state, opacity: Math.min(1, Math.max(0, opacity)) };
}

export function setScale(state: ViewState, scale: number): ViewState {
  return { ...state, scale: Math.max(1e-3, scale) };
}

export function setCamera(state: ViewState, camera: Camera): ViewState {
  return { ...state, camera: { ...camera } };
}

export function setHover(state: ViewState, hover: number | null): ViewState {
  return { ...state, hover };
}

/**
 * Replace the selection with the ids of all points whose embedding
 * coordinates fall inside the lasso polygon.  A degenerate lasso
 * (fewer than three vertices, or zero area) leaves the state unchanged.
 */
export function lassoSelect(doc: SceneDocument, state: ViewState, polygon: readonly Vec2[]): ViewState {
  if (!isValidLasso(polygon)) {
    return state;
  }
  const selection = new Set<number>();
  for (const p of doc.points) {
    if (pointInPolygon(p.xy[0], p.xy[1], polygon)) {
      selection.add(p.id);
    }
  }
  return { ...state, selection };
}

export function clearSelection(state: ViewState): ViewState {
  return { ...state, selection: new Set() };
}

export function setFilter(state: ViewState, filter: MetricFilter | null): ViewState {
  return { ...state, filter: filter === null ? null : { ...filter } };
}

export function clearFilter(state: ViewState): ViewState {
  return { ...state, filter: null };
}

/** Per-point values for a metric, or null when the scene has none. */
export function metricValues(doc: SceneDocument, metric: MetricName): number[] | null {
  if (doc.metrics === null) {
    return null;
  }
  switch (metric) {
    case "stress":
      return doc.metrics.per_point_stress;
    case "trustworthiness":
      return doc.metrics.per_point_trust;
    case "linearity":
      return doc.metrics.linearity;
  }
}

/**
 * Ids that survive the metric range filter.  Without a filter every id
 * is visible; with one, a point stays visible when its metric value v
 * satisfies lo <= v <= hi.  Points with no metric value are hidden.
 */
export function visibleIds(doc: SceneDocument, state: ViewState): Set<number> {
  const visible = new Set<number>();
  if (state.filter === null) {
    for (const p of doc.points) {
      visible.add(p.id);
    }
    return visible;
  }
  const values = metricValues(doc, state.filter.metric);
  if (values === null) {
    return visible;
  }
  const { lo, hi } = state.filter;
  for (let i = 0; i < doc.points.length; i++) {
    const v = values[i];
    if (Number.isFinite(v) && v >= lo && v <= hi) {
      visible.add(doc.points[i].id);
    }
  }
  return visible;
}

/** One glyph ready to paint; coordinates stay in world space. */
export interface RenderItem {
  id: number;
  xy: readonly [number, number];
  outline: ReadonlyArray<readonly number[]>;
  area: number;
  color: string;
  alpha: number;
  selected: boolean;
  degenerate: boolean;
}

function makeColorScale(doc: SceneDocument, colorBy: ColorBy): (row: number) => string {
  if (colorBy === "class") {
    return (row) => classColor(doc.points[row].label);
  }
  const values = metricValues(doc, colorBy);
  if (values === null || values.length === 0) {
    return () => MISSING_COLOR;
  }
  // linearity spans orders of magnitude, so color it on a log axis;
  // the range filter still compares raw values
  const toScale = colorBy === "linearity" ? (v: number) => Math.log10(Math.max(v, 1e-300)) : (v: number) => v;
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (Number.isFinite(v)) {
      const s = toScale(v);
      if (s < lo) lo = s;
      if (s > hi) hi = s;
    }
  }
  if (!(hi > lo)) {
    return (row) => (Number.isFinite(values[row]) ? sequentialColor(0.5) : MISSING_COLOR);
  }
  return (row) => {
    const v = values[row];
    if (!Number.isFinite(v)) {
      return MISSING_COLOR;
    }
    return sequentialColor((toScale(v) - lo) / (hi - lo));
  };
}

/**
 * The glyph paint list: filtered-in glyphs only, ordered by draw_rank so
 * larger-area glyphs come first and end up beneath smaller ones.
 */
export function renderList(doc: SceneDocument, state: ViewState): RenderItem[] {
  const visible = visibleIds(doc, state);
  const color = makeColorScale(doc, state.colorBy);
  const rows: number[] = [];
  for (let i = 0; i < doc.glyphs.length; i++) {
    if (visible.has(doc.glyphs[i].id)) {
      rows.push(i);
    }
  }
  rows.sort((a, b) => doc.glyphs[a].draw_rank - doc.glyphs[b].draw_rank);
  return rows.map((row) => {
    const g = doc.glyphs[row];
    const p = doc.points[row];
    return {
      id: g.id,
      xy: p.xy,
      outline: g.outline,
      area: g.area,
      color: color(row),
      alpha: state.opacity,
      selected: state.selection.has(g.id),
      degenerate: g.degenerate,
    };
  });
}

/** One basis direction of a hovered point, colored for the inset. */
export interface HoverVector {
  x: number;
  y: number;
  weight: number;
  color: string;
}

export interface HoverDetail {
  id: number;
  xy: readonly [number, number];
  outline: ReadonlyArray<readonly number[]>;
  vectors: HoverVector[];
  degenerate: boolean;
  fallback: string | null;
  reason: string | null;
  imagePath: string | null;
  label: number | null;
}

/** Inset payload for the hovered point, or null when nothing is hovered. */
export function hoverDetail(doc: SceneDocument, state: ViewState): HoverDetail | null {
  if (state.hover === null) {
    return null;
  }
  const row = doc.points.findIndex((p) => p.id === state.hover);
  if (row < 0) {
    return null;
  }
  const g = doc.glyphs[row];
  const vecs = doc.vectors[row];
  return {
    id: g.id,
    xy: doc.points[row].xy,
    outline: g.outline,
    vectors: vecs.vectors.map((v, i) => ({
      x: v[0],
      y: v[1],
      weight: vecs.weights[i] ?? 0,
      color: basisColor(i),
    })),
    degenerate: g.degenerate,
    fallback: g.fallback,
    reason: g.reason,
    imagePath: doc.points[row].image_path,
    label: doc.points[row].label,
  };
}
