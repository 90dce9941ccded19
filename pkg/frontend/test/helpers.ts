/** Shared test utilities: deep freezing and a small synthetic scene. */

import type { SceneDocument } from "../src/types.js";

/** Recursively freeze so any mutation throws under strict mode. */
export function deepFreeze<T>(obj: T): T {
  if (obj !== null && typeof obj === "object" && !Object.isFrozen(obj)) {
    Object.freeze(obj);
    for (const value of Object.values(obj)) {
      deepFreeze(value);
    }
  }
  return obj;
}

function square(half: number): number[][] {
  return [
    [-half, -half],
    [half, -half],
    [half, half],
    [-half, half],
  ];
}

/**
 * Six points on a 3 x 2 grid with noncontiguous ids (10..15), square
 * glyphs of strictly decreasing area and simple metric ramps.  Point 15
 * is a degenerate fallback and carries five basis vectors so inset
 * color overflow is exercised.
 */
export function makeDoc(): SceneDocument {
  const ids = [10, 11, 12, 13, 14, 15];
  const coords: [number, number][] = [
    [0, 0],
    [1, 0],
    [2, 0],
    [0, 1],
    [1, 1],
    [2, 1],
  ];
  const halves = [0.6, 0.5, 0.4, 0.3, 0.2, 0.1];
  return {
    schema_version: "1.0",
    points: ids.map((id, i) => ({
      id,
      xy: coords[i],
      label: i === 4 ? null : i % 2,
      image_path: null,
    })),
    glyphs: ids.map((id, i) => ({
      id,
      hull: square(halves[i]),
      outline: square(halves[i]),
      area: 4 * halves[i] * halves[i],
      aspect: 1,
      draw_rank: i,
      fallback: i === 5 ? "circle" : null,
      degenerate: i === 5,
      reason: i === 5 ? "all directions below magnitude floor" : null,
    })),
    vectors: ids.map((id, i) => ({
      id,
      vectors:
        i === 5
          ? [
              [0.1, 0],
              [0, 0.1],
              [0.05, 0.05],
              [-0.05, 0.05],
              [0.02, -0.02],
            ]
          : [
              [halves[i], 0],
              [0, halves[i]],
            ],
      weights: i === 5 ? [1, 1, 1, 1, 1] : [1, 0.5],
    })),
    metrics: {
      per_point_stress: [0, 1, 2, 3, 4, 5],
      trustworthiness: 0.9,
      per_point_trust: [1, 0.9, 0.8, 0.7, 0.6, 0.5],
      linearity: [1, 2, 4, 8, 16, 32],
      k_used: 2,
    },
    embedding: {
      method: "mds",
      stress_total: 1.5,
      iterations: 10,
      converged: true,
      gradient_norm: 1e-9,
      seed: 0,
      jittered: [],
    },
    provenance: { source: "synthetic" },
    class_names: ["a", "b"],
  };
}
