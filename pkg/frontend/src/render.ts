/**
 * Canvas 2D painting.  Both linked panels draw from the same document,
 * view state and camera; everything here is stateless so a repaint is
 * always reproducible from its inputs.
 */

import { bounds, type Vec2 } from "./geometry.js";
import { renderList, hoverDetail, visibleIds, type ViewState } from "./state.js";
import type { SceneDocument } from "./types.js";

export interface ViewTransform {
  scale: number;
  cx: number;
  cy: number;
  width: number;
  height: number;
}

/** Fit the point cloud into the panel, then apply camera pan and zoom. */
export function computeViewTransform(
  doc: SceneDocument,
  state: ViewState,
  width: number,
  height: number
): ViewTransform {
  const box = bounds(doc.points.map((p) => p.xy));
  let cx = 0;
  let cy = 0;
  let base = 1;
  if (box !== null) {
    cx = (box.xMin + box.xMax) / 2;
    cy = (box.yMin + box.yMax) / 2;
    const extent = Math.max(box.xMax - box.xMin, box.yMax - box.yMin, 1e-12);
    base = (0.9 * Math.min(width, height)) / extent;
  }
  return {
    scale: base * state.camera.zoom,
    cx: cx + state.camera.x,
    cy: cy + state.camera.y,
    width,
    height,
  };
}

export function toScreen(t: ViewTransform, wx: number, wy: number): [number, number] {
  return [t.width / 2 + (wx - t.cx) * t.scale, t.height / 2 - (wy - t.cy) * t.scale];
}

export function toWorld(t: ViewTransform, sx: number, sy: number): [number, number] {
  return [t.cx + (sx - t.width / 2) / t.scale, t.cy - (sy - t.height / 2) / t.scale];
}

/** Faint dots for filtered-out points so the context stays readable. */
function renderDimmed(
  ctx: CanvasRenderingContext2D,
  doc: SceneDocument,
  state: ViewState,
  t: ViewTransform
): void {
  if (state.filter === null) {
    return;
  }
  const visible = visibleIds(doc, state);
  ctx.fillStyle = "rgba(120,120,120,0.25)";
  for (const p of doc.points) {
    if (visible.has(p.id)) {
      continue;
    }
    const [sx, sy] = toScreen(t, p.xy[0], p.xy[1]);
    ctx.beginPath();
    ctx.arc(sx, sy, 1.5, 0, 2 * Math.PI);
    ctx.fill();
  }
}

function tracePath(
  ctx: CanvasRenderingContext2D,
  t: ViewTransform,
  xy: readonly [number, number],
  outline: ReadonlyArray<readonly number[]>,
  magnify: number
): void {
  ctx.beginPath();
  for (let i = 0; i < outline.length; i++) {
    const [sx, sy] = toScreen(t, xy[0] + magnify * outline[i][0], xy[1] + magnify * outline[i][1]);
    if (i === 0) {
      ctx.moveTo(sx, sy);
    } else {
      ctx.lineTo(sx, sy);
    }
  }
  ctx.closePath();
}

/** Left panel: glyph outlines plus anchor dots, largest glyphs beneath. */
export function renderGlyphView(
  ctx: CanvasRenderingContext2D,
  doc: SceneDocument,
  state: ViewState,
  width: number,
  height: number
): void {
  const t = computeViewTransform(doc, state, width, height);
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#ffffff";
  ctx.fillRect(0, 0, width, height);
  renderDimmed(ctx, doc, state, t);
  const items = renderList(doc, state);
  for (const item of items) {
    tracePath(ctx, t, item.xy, item.outline, state.scale);
    ctx.globalAlpha = item.alpha;
    ctx.fillStyle = item.color;
    ctx.fill();
    ctx.globalAlpha = Math.min(1, item.alpha + 0.2);
    ctx.lineWidth = item.selected ? 2 : 0.75;
    ctx.strokeStyle = item.selected ? "#000000" : item.color;
    ctx.stroke();
    ctx.globalAlpha = 1;
  }
  for (const item of items) {
    const [sx, sy] = toScreen(t, item.xy[0], item.xy[1]);
    ctx.beginPath();
    ctx.arc(sx, sy, item.selected ? 3 : 1.8, 0, 2 * Math.PI);
    ctx.fillStyle = item.selected ? "#000000" : "#333333";
    ctx.fill();
  }
  if (state.hover !== null) {
    const detail = hoverDetail(doc, state);
    if (detail !== null) {
      tracePath(ctx, t, detail.xy, detail.outline, state.scale);
      ctx.lineWidth = 2;
      ctx.strokeStyle = "#ff00aa";
      ctx.stroke();
    }
  }
}

/** Right panel: plain dots sharing camera, colors and selection. */
export function renderPointView(
  ctx: CanvasRenderingContext2D,
  doc: SceneDocument,
  state: ViewState,
  width: number,
  height: number
): void {
  const t = computeViewTransform(doc, state, width, height);
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#ffffff";
  ctx.fillRect(0, 0, width, height);
  renderDimmed(ctx, doc, state, t);
  for (const item of renderList(doc, state)) {
    const [sx, sy] = toScreen(t, item.xy[0], item.xy[1]);
    ctx.beginPath();
    ctx.arc(sx, sy, item.selected ? 4.5 : 3, 0, 2 * Math.PI);
    ctx.fillStyle = item.color;
    ctx.fill();
    if (item.selected) {
      ctx.lineWidth = 1.5;
      ctx.strokeStyle = "#000000";
      ctx.stroke();
    }
    if (item.id === state.hover) {
      ctx.lineWidth = 2;
      ctx.strokeStyle = "#ff00aa";
      ctx.stroke();
    }
  }
}

/** Dashed lasso overlay drawn while the user drags. */
export function renderLasso(
  ctx: CanvasRenderingContext2D,
  doc: SceneDocument,
  state: ViewState,
  polygon: readonly Vec2[],
  width: number,
  height: number
): void {
  if (polygon.length < 2) {
    return;
  }
  const t = computeViewTransform(doc, state, width, height);
  ctx.beginPath();
  for (let i = 0; i < polygon.length; i++) {
    const [sx, sy] = toScreen(t, polygon[i][0], polygon[i][1]);
    if (i === 0) {
      ctx.moveTo(sx, sy);
    } else {
      ctx.lineTo(sx, sy);
    }
  }
  ctx.setLineDash([5, 4]);
  ctx.lineWidth = 1.5;
  ctx.strokeStyle = "#555555";
  ctx.stroke();
  ctx.setLineDash([]);
}

const INSET_SIZE = 170;

/**
 * Hover inset: the glyph outline magnified into a corner box with its
 * basis directions overlaid, or the fallback reason for degenerate
 * neighborhoods.  The optional image is shown when the hovered point
 * carries an image_path that already finished loading.
 */
export function renderInset(
  ctx: CanvasRenderingContext2D,
  doc: SceneDocument,
  state: ViewState,
  width: number,
  image: CanvasImageSource | null
): void {
  const detail = hoverDetail(doc, state);
  if (detail === null) {
    return;
  }
  const x0 = width - INSET_SIZE - 10;
  const y0 = 10;
  ctx.fillStyle = "rgba(255,255,255,0.95)";
  ctx.strokeStyle = "#888888";
  ctx.lineWidth = 1;
  ctx.fillRect(x0, y0, INSET_SIZE, INSET_SIZE);
  ctx.strokeRect(x0, y0, INSET_SIZE, INSET_SIZE);

  let radius = 1e-12;
  for (const v of detail.outline) {
    radius = Math.max(radius, Math.hypot(v[0], v[1]));
  }
  for (const v of detail.vectors) {
    radius = Math.max(radius, Math.hypot(v.x, v.y));
  }
  const mid = [x0 + INSET_SIZE / 2, y0 + INSET_SIZE / 2 - 8];
  const mag = (0.38 * INSET_SIZE) / radius;

  ctx.beginPath();
  for (let i = 0; i < detail.outline.length; i++) {
    const sx = mid[0] + mag * detail.outline[i][0];
    const sy = mid[1] - mag * detail.outline[i][1];
    if (i === 0) {
      ctx.moveTo(sx, sy);
    } else {
      ctx.lineTo(sx, sy);
    }
  }
  ctx.closePath();
  ctx.fillStyle = "rgba(150,150,150,0.25)";
  ctx.fill();
  ctx.strokeStyle = "#444444";
  ctx.stroke();

  for (const v of detail.vectors) {
    ctx.beginPath();
    ctx.moveTo(mid[0] - mag * v.x, mid[1] + mag * v.y);
    ctx.lineTo(mid[0] + mag * v.x, mid[1] - mag * v.y);
    ctx.lineWidth = 2;
    ctx.strokeStyle = v.color;
    ctx.stroke();
  }

  ctx.fillStyle = "#222222";
  ctx.font = "11px sans-serif";
  const caption = detail.degenerate
    ? `id ${detail.id}: ${detail.fallback ?? "fallback"} (${detail.reason ?? "degenerate"})`
    : `id ${detail.id}`;
  ctx.fillText(caption, x0 + 6, y0 + INSET_SIZE - 8);

  if (image !== null) {
    ctx.drawImage(image, x0 + 6, y0 + 6, 42, 42);
    ctx.strokeStyle = "#888888";
    ctx.strokeRect(x0 + 6, y0 + 6, 42, 42);
  }
}
