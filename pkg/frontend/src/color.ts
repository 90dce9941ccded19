/** Color scales for class labels, metric values and basis directions. */

/** Categorical palette; repeats for datasets with more than ten classes. */
export const CLASS_PALETTE: readonly string[] = [
  "#1f77b4",
  "#ff7f0e",
  "#2ca02c",
  "#d62728",
  "#9467bd",
  "#8c564b",
  "#e377c2",
  "#7f7f7f",
  "#bcbd22",
  "#17becf",
];

/** Used for unlabeled points and missing metric values. */
export const MISSING_COLOR = "#bbbbbb";

// first four basis directions get fixed hues, the rest collapse to gray
const BASIS_COLORS: readonly string[] = ["#d62728", "#2ca02c", "#1f77b4", "#17becf"];
const BASIS_OVERFLOW = "#888888";

/** Color for the i-th basis direction in a hover inset (0-based). */
export function basisColor(index: number): string {
  return index < BASIS_COLORS.length ? BASIS_COLORS[index] : BASIS_OVERFLOW;
}

export function classColor(label: number | null): string {
  if (label === null || label < 0) {
    return MISSING_COLOR;
  }
  return CLASS_PALETTE[label % CLASS_PALETTE.length];
}

// dark-to-bright sequential ramp sampled at five stops
const SEQ_STOPS: ReadonlyArray<readonly [number, number, number]> = [
  [68, 1, 84],
  [59, 82, 139],
  [33, 145, 140],
  [94, 201, 98],
  [253, 231, 37],
];

/** Map t in [0, 1] onto the sequential ramp; out-of-range t is clamped. */
export function sequentialColor(t: number): string {
  if (!Number.isFinite(t)) {
    return MISSING_COLOR;
  }
  const u = Math.min(1, Math.max(0, t)) * (SEQ_STOPS.length - 1);
  const lo = Math.min(SEQ_STOPS.length - 2, Math.floor(u));
  const frac = u - lo;
  const a = SEQ_STOPS[lo];
  const b = SEQ_STOPS[lo + 1];
  const r = Math.round(a[0] + frac * (b[0] - a[0]));
  const g = Math.round(a[1] + frac * (b[1] - a[1]));
  const bl = Math.round(a[2] + frac * (b[2] - a[2]));
  return `rgb(${r},${g},${bl})`;
}
