/**
 * Browser entry point.  Wires the document loader, the view state
 * reducers and the canvas renderers to DOM controls.  Scenes arrive
 * either through the file picker or a ?scene= URL parameter; when the
 * page is served next to a scene.json (the bundled server does this)
 * that file is loaded automatically.
 */

import { loadSceneText } from "./scene.js";
import {
  clearFilter,
  clearSelection,
  hoverDetail,
  initialViewState,
  lassoSelect,
  setCamera,
  setColorBy,
  setFilter,
  setHover,
  setOpacity,
  setScale,
  visibleIds,
  type ColorBy,
  type MetricName,
  type ViewState,
} from "./state.js";
import {
  computeViewTransform,
  renderGlyphView,
  renderInset,
  renderLasso,
  renderPointView,
  toScreen,
  toWorld,
} from "./render.js";
import type { SceneDocument } from "./types.js";
import type { Vec2 } from "./geometry.js";

const HOVER_RADIUS_PX = 10;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

const glyphCanvas = el<HTMLCanvasElement>("glyph-canvas");
const pointCanvas = el<HTMLCanvasElement>("point-canvas");
const banner = el<HTMLDivElement>("banner");
const stats = el<HTMLDivElement>("stats");
const fileInput = el<HTMLInputElement>("file-input");
const colorBySelect = el<HTMLSelectElement>("color-by");
const opacitySlider = el<HTMLInputElement>("opacity");
const scaleSlider = el<HTMLInputElement>("scale");
const filterMetric = el<HTMLSelectElement>("filter-metric");
const filterLo = el<HTMLInputElement>("filter-lo");
const filterHi = el<HTMLInputElement>("filter-hi");

let doc: SceneDocument | null = null;
let state: ViewState = initialViewState();
let sceneBase = "";
let lassoWorld: Vec2[] = [];
let lassoActive: HTMLCanvasElement | null = null;
let panning: { startX: number; startY: number; camX: number; camY: number } | null = null;
const imageCache = new Map<string, HTMLImageElement | null>();

function showBanner(message: string, isError: boolean): void {
  banner.textContent = message;
  banner.className = isError ? "error" : "info";
  banner.style.display = message === "" ? "none" : "block";
}

function adoptScene(text: string, origin: string): void {
  const result = loadSceneText(text);
  if (!result.ok) {
    showBanner(`could not load ${origin}: ${result.error}`, true);
    return;
  }
  doc = result.doc;
  state = initialViewState();
  showBanner("", false);
  redraw();
}

function hoveredImage(): HTMLImageElement | null {
  if (doc === null) {
    return null;
  }
  const detail = hoverDetail(doc, state);
  if (detail === null || detail.imagePath === null) {
    return null;
  }
  const url = sceneBase + detail.imagePath;
  if (!imageCache.has(url)) {
    imageCache.set(url, null);
    const img = new Image();
    img.onload = () => {
      imageCache.set(url, img);
      redraw();
    };
    img.src = url;
  }
  return imageCache.get(url) ?? null;
}

function redraw(): void {
  const gctx = glyphCanvas.getContext("2d");
  const pctx = pointCanvas.getContext("2d");
  if (gctx === null || pctx === null) {
    return;
  }
  if (doc === null) {
    gctx.clearRect(0, 0, glyphCanvas.width, glyphCanvas.height);
    pctx.clearRect(0, 0, pointCanvas.width, pointCanvas.height);
    return;
  }
  renderGlyphView(gctx, doc, state, glyphCanvas.width, glyphCanvas.height);
  renderPointView(pctx, doc, state, pointCanvas.width, pointCanvas.height);
  if (lassoActive !== null && lassoWorld.length >= 2) {
    const ctx = lassoActive === glyphCanvas ? gctx : pctx;
    renderLasso(ctx, doc, state, lassoWorld, lassoActive.width, lassoActive.height);
  }
  renderInset(gctx, doc, state, glyphCanvas.width, hoveredImage());

  const visible = visibleIds(doc, state);
  const parts = [
    `${doc.points.length} points`,
    `${visible.size} visible`,
    `${state.selection.size} selected`,
  ];
  if (doc.metrics !== null) {
    parts.push(`trustworthiness ${doc.metrics.trustworthiness.toFixed(4)} (k=${doc.metrics.k_used})`);
  }
  parts.push(`stress ${doc.embedding.stress_total.toExponential(3)}`);
  stats.textContent = parts.join("  |  ");
}

function canvasPos(canvas: HTMLCanvasElement, ev: MouseEvent): [number, number] {
  const rect = canvas.getBoundingClientRect();
  return [
    ((ev.clientX - rect.left) / rect.width) * canvas.width,
    ((ev.clientY - rect.top) / rect.height) * canvas.height,
  ];
}

function nearestPointId(canvas: HTMLCanvasElement, sx: number, sy: number): number | null {
  if (doc === null) {
    return null;
  }
  const t = computeViewTransform(doc, state, canvas.width, canvas.height);
  const visible = visibleIds(doc, state);
  let best: number | null = null;
  let bestDist = HOVER_RADIUS_PX;
  for (const p of doc.points) {
    if (!visible.has(p.id)) {
      continue;
    }
    const [px, py] = toScreen(t, p.xy[0], p.xy[1]);
    const dist = Math.hypot(px - sx, py - sy);
    if (dist < bestDist) {
      bestDist = dist;
      best = p.id;
    }
  }
  return best;
}

function wireCanvas(canvas: HTMLCanvasElement): void {
  canvas.addEventListener("mousedown", (ev) => {
    if (doc === null) {
      return;
    }
    const [sx, sy] = canvasPos(canvas, ev);
    if (ev.shiftKey || ev.button === 1) {
      panning = { startX: sx, startY: sy, camX: state.camera.x, camY: state.camera.y };
      ev.preventDefault();
      return;
    }
    if (ev.button === 0) {
      const t = computeViewTransform(doc, state, canvas.width, canvas.height);
      lassoWorld = [toWorld(t, sx, sy)];
      lassoActive = canvas;
    }
  });

  canvas.addEventListener("mousemove", (ev) => {
    if (doc === null) {
      return;
    }
    const [sx, sy] = canvasPos(canvas, ev);
    const t = computeViewTransform(doc, state, canvas.width, canvas.height);
    if (panning !== null) {
      state = setCamera(state, {
        x: panning.camX - (sx - panning.startX) / t.scale,
        y: panning.camY + (sy - panning.startY) / t.scale,
        zoom: state.camera.zoom,
      });
      redraw();
      return;
    }
    if (lassoActive === canvas) {
      lassoWorld.push(toWorld(t, sx, sy));
      redraw();
      return;
    }
    const id = nearestPointId(canvas, sx, sy);
    if (id !== state.hover) {
      state = setHover(state, id);
      redraw();
    }
  });

  canvas.addEventListener("mouseup", () => {
    if (panning !== null) {
      panning = null;
      return;
    }
    if (lassoActive === canvas && doc !== null) {
      // short drags fall through isValidLasso and leave the selection alone
      state = lassoSelect(doc, state, lassoWorld);
      lassoWorld = [];
      lassoActive = null;
      redraw();
    }
  });

  canvas.addEventListener("mouseleave", () => {
    if (state.hover !== null) {
      state = setHover(state, null);
      redraw();
    }
  });

  canvas.addEventListener("wheel", (ev) => {
    if (doc === null) {
      return;
    }
    ev.preventDefault();
    const [sx, sy] = canvasPos(canvas, ev);
    const before = computeViewTransform(doc, state, canvas.width, canvas.height);
    const [wx, wy] = toWorld(before, sx, sy);
    const zoom = Math.min(200, Math.max(0.05, state.camera.zoom * Math.exp(-ev.deltaY * 0.0015)));
    const mid = setCamera(state, { ...state.camera, zoom });
    const after = computeViewTransform(doc, mid, canvas.width, canvas.height);
    const [wx2, wy2] = toWorld(after, sx, sy);
    // keep the world point under the cursor fixed while zooming
    state = setCamera(mid, {
      x: mid.camera.x + (wx - wx2),
      y: mid.camera.y + (wy - wy2),
      zoom,
    });
    redraw();
  });

  canvas.addEventListener("dblclick", () => {
    state = clearSelection(state);
    redraw();
  });
}

wireCanvas(glyphCanvas);
wireCanvas(pointCanvas);

fileInput.addEventListener("change", () => {
  const file = fileInput.files?.[0];
  if (file === undefined) {
    return;
  }
  sceneBase = "";
  file.text().then(
    (text) => adoptScene(text, file.name),
    (err) => showBanner(`could not read ${file.name}: ${err}`, true)
  );
});

colorBySelect.addEventListener("change", () => {
  state = setColorBy(state, colorBySelect.value as ColorBy);
  redraw();
});

opacitySlider.addEventListener("input", () => {
  state = setOpacity(state, Number(opacitySlider.value));
  redraw();
});

scaleSlider.addEventListener("input", () => {
  state = setScale(state, Number(scaleSlider.value));
  redraw();
});

el<HTMLButtonElement>("apply-filter").addEventListener("click", () => {
  const lo = Number(filterLo.value);
  const hi = Number(filterHi.value);
  if (!Number.isFinite(lo) || !Number.isFinite(hi)) {
    showBanner("filter bounds must be numbers", true);
    return;
  }
  showBanner("", false);
  state = setFilter(state, { metric: filterMetric.value as MetricName, lo, hi });
  redraw();
});

el<HTMLButtonElement>("clear-filter").addEventListener("click", () => {
  state = clearFilter(state);
  redraw();
});

el<HTMLButtonElement>("clear-selection").addEventListener("click", () => {
  state = clearSelection(state);
  redraw();
});

el<HTMLButtonElement>("reset-camera").addEventListener("click", () => {
  state = setCamera(state, { x: 0, y: 0, zoom: 1 });
  redraw();
});

function fetchScene(url: string, quiet: boolean): void {
  fetch(url)
    .then((resp) => {
      if (!resp.ok) {
        throw new Error(`HTTP ${resp.status}`);
      }
      return resp.text();
    })
    .then((text) => {
      sceneBase = url.slice(0, url.lastIndexOf("/") + 1);
      adoptScene(text, url);
    })
    .catch((err) => {
      if (!quiet) {
        showBanner(`could not fetch ${url}: ${err}`, true);
      } else {
        showBanner("no scene loaded yet: pick a scene JSON file above", false);
      }
    });
}

const param = new URL(window.location.href).searchParams.get("scene");
if (param !== null) {
  fetchScene(param, false);
} else {
  fetchScene("scene.json", true);
}
