"""Glyph geometry: from transformed basis vectors to a drawable outline.

Each embedded point's weighted, plane-transformed basis vectors are
mirrored through the origin (sign symmetry kills eigenvector sign
noise), hulled, and smoothed with a closed cubic B-spline whose control
polygon is the hull. The spline never leaves the hull, so the glyph is a
faithful footprint of the vector fan. Degenerate fans fall back to a
capsule (collinear) or a circle (vanishing), flagged with a reason so
anomalies stay visible instead of crashing the pipeline.

Draw order is big-to-small: larger glyphs get lower draw_rank and are
painted first so small glyphs stay readable on top.
"""

import dataclasses
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

SAMPLES_PER_SEGMENT = 16
CAP_ARC_SAMPLES = 24
CIRCLE_SAMPLES = 64
MEDIAN_RADIUS_FRACTION = 0.01
R_MIN_FRACTION = 0.005
MAG_EPS_FRACTION = 1e-9

# periodic cubic B-spline basis: rows multiply [1, t, t^2, t^3]
_BSPLINE_BASIS = (
    np.array(
        [
            [1.0, 4.0, 1.0, 0.0],
            [-3.0, 0.0, 3.0, 0.0],
            [3.0, -6.0, 3.0, 0.0],
            [-1.0, 3.0, -3.0, 1.0],
        ]
    )
    / 6.0
)


@dataclass(frozen=True)
class Glyph:
    """One point's glyph, geometry relative to its embedded center."""

    anchor: int
    center: np.ndarray
    hull: np.ndarray
    outline: np.ndarray
    area: float
    aspect: float
    draw_rank: int = -1
    fallback: str | None = None
    reason: str | None = None


def convex_hull(points: np.ndarray) -> np.ndarray:
    """2D convex hull, CCW, collinear vertices dropped, canonical start.

    Monotone chain; output begins at the lexicographically smallest
    vertex. Degenerate inputs return 1 or 2 points.
    """
    pts = np.unique(np.asarray(points, dtype=np.float64), axis=0)
    if len(pts) <= 2:
        return pts
    # np.unique sorts rows lexicographically already

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[np.ndarray] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0.0:
            lower.pop()
        lower.append(p)
    upper: list[np.ndarray] = []
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0.0:
            upper.pop()
        upper.append(p)
    hull = np.array(lower[:-1] + upper[:-1])
    if len(hull) <= 2:
        return hull
    start = np.lexsort((hull[:, 1], hull[:, 0]))[0]
    return np.roll(hull, -start, axis=0)


def bspline_outline(
    control: np.ndarray, samples_per_segment: int = SAMPLES_PER_SEGMENT
) -> np.ndarray:
    """Closed uniform cubic B-spline through a periodic control polygon.

    One segment per control point, sampled at samples_per_segment
    parameters each; the first sample is repeated at the end so the
    polyline closes exactly.
    """
    control = np.asarray(control, dtype=np.float64)
    m = len(control)
    if m < 3:
        raise ValidationError(f"spline needs >= 3 control points, got {m}")
    if samples_per_segment < 1:
        raise ValidationError("samples_per_segment must be >= 1")
    t = np.arange(samples_per_segment) / float(samples_per_segment)
    T = np.stack([np.ones_like(t), t, t * t, t * t * t], axis=1)
    coeff = T @ _BSPLINE_BASIS
    segments = []
    for i in range(m):
        geom = control[[i % m, (i + 1) % m, (i + 2) % m, (i + 3) % m]]
        segments.append(coeff @ geom)
    pts = np.concatenate(segments, axis=0)
    return np.concatenate([pts, pts[:1]], axis=0)


def shoelace_area(closed: np.ndarray) -> float:
    """Polygon area of a closed polyline (first point == last point)."""
    x, y = closed[:-1, 0], closed[:-1, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    return 0.5 * abs(float(np.sum(x * yn - xn * y)))


def _aspect_of(closed: np.ndarray) -> float:
    """Major/minor extent ratio along the outline's principal axes."""
    pts = closed[:-1]
    centered = pts - pts.mean(axis=0)
    moments = centered.T @ centered / float(len(pts))
    _, axes = np.linalg.eigh(moments)
    widths = np.sort(np.ptp(centered @ axes, axis=0))
    lo, hi = float(widths[0]), float(widths[1])
    if lo <= 0.0:
        return np.inf if hi > 0.0 else 1.0
    return hi / lo


def _circle_outline(radius: float, samples: int = CIRCLE_SAMPLES) -> np.ndarray:
    ang = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    pts = radius * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    return np.concatenate([pts, pts[:1]], axis=0)


def _capsule_outline(
    axis: np.ndarray, radius: float, samples: int = CAP_ARC_SAMPLES
) -> np.ndarray:
    """Stadium shape around the segment [-axis, +axis] with given radius."""
    theta = float(np.arctan2(axis[1], axis[0]))
    arc1 = np.linspace(theta - np.pi / 2.0, theta + np.pi / 2.0, samples)
    arc2 = arc1 + np.pi
    cap1 = axis + radius * np.stack([np.cos(arc1), np.sin(arc1)], axis=1)
    cap2 = -axis + radius * np.stack([np.cos(arc2), np.sin(arc2)], axis=1)
    pts = np.concatenate([cap1, cap2], axis=0)
    return np.concatenate([pts, pts[:1]], axis=0)


def build_hull(
    vectors: np.ndarray, one_sided: bool = False, mag_eps: float = 0.0
) -> np.ndarray:
    """Convex hull of the glyph point set for one fan of 2D vectors.

    Default is the symmetric set {+v, -v}; one_sided hulls the vector
    tips together with the origin. Vectors at or below mag_eps are
    dropped before hulling.
    """
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.ndim != 2 or vectors.shape[1] != 2:
        raise ValidationError("expected an (L, 2) array of plane vectors")
    norms = np.linalg.norm(vectors, axis=1)
    live = vectors[norms > mag_eps]
    if len(live) == 0:
        return np.zeros((0, 2))
    if one_sided:
        pts = np.concatenate([live, np.zeros((1, 2))], axis=0)
    else:
        pts = np.concatenate([live, -live], axis=0)
    return convex_hull(pts)


def build_glyph(
    anchor: int,
    center: np.ndarray,
    vectors: np.ndarray,
    r_min: float,
    samples_per_segment: int = SAMPLES_PER_SEGMENT,
    one_sided: bool = False,
    mag_eps: float = 0.0,
) -> Glyph:
    """Full glyph for one point, with capsule/circle fallbacks."""
    center = np.asarray(center, dtype=np.float64)
    hull = build_hull(vectors, one_sided=one_sided, mag_eps=mag_eps)
    if len(hull) >= 3:
        outline = bspline_outline(hull, samples_per_segment)
        return Glyph(
            anchor=anchor,
            center=center,
            hull=hull,
            outline=outline,
            area=shoelace_area(outline),
            aspect=_aspect_of(outline),
        )
    if len(hull) == 0:
        outline = _circle_outline(r_min)
        return Glyph(
            anchor=anchor,
            center=center,
            hull=outline[:-1].copy(),
            outline=outline,
            area=shoelace_area(outline),
            aspect=1.0,
            fallback="circle",
            reason="all transformed vectors have negligible magnitude",
        )
    # 1-2 distinct hull points: all live vectors collinear
    norms = np.linalg.norm(np.asarray(vectors, dtype=np.float64), axis=1)
    axis = np.asarray(vectors, dtype=np.float64)[int(np.argmax(norms))]
    if axis[1] < 0.0 or (axis[1] == 0.0 and axis[0] < 0.0):
        # canonical half-plane: the capsule ignores vector sign
        axis = -axis
    if float(np.linalg.norm(axis)) <= r_min * 1e-9:
        outline = _circle_outline(r_min)
        return Glyph(
            anchor=anchor,
            center=center,
            hull=outline[:-1].copy(),
            outline=outline,
            area=shoelace_area(outline),
            aspect=1.0,
            fallback="circle",
            reason="all transformed vectors have negligible magnitude",
        )
    outline = _capsule_outline(axis, r_min)
    return Glyph(
        anchor=anchor,
        center=center,
        # hull of the stadium itself keeps the outline-in-hull invariant
        hull=convex_hull(outline[:-1]),
        outline=outline,
        area=shoelace_area(outline),
        aspect=_aspect_of(outline),
        fallback="capsule",
        reason="transformed vectors are collinear; capsule of minimum width",
    )


def rank_glyphs(glyphs: list[Glyph]) -> list[Glyph]:
    """Assign draw_rank: larger area first (drawn below), ties by anchor."""
    order = sorted(range(len(glyphs)), key=lambda i: (-glyphs[i].area, glyphs[i].anchor))
    ranked = list(glyphs)
    for rank, idx in enumerate(order):
        ranked[idx] = dataclasses.replace(glyphs[idx], draw_rank=rank)
    return ranked


def embedding_diameter(coords: np.ndarray) -> float:
    """Largest pairwise distance among embedded points."""
    coords = np.asarray(coords, dtype=np.float64)
    sq = np.sum(coords * coords, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * coords @ coords.T
    return float(np.sqrt(max(float(d2.max()), 0.0)))


def build_glyphs(
    anchors: list[int],
    centers: np.ndarray,
    vector_sets: list[np.ndarray],
    scale: float = 1.0,
    samples_per_segment: int = SAMPLES_PER_SEGMENT,
    one_sided: bool = False,
) -> tuple[list[Glyph], float]:
    """Build and rank all glyphs; returns (glyphs, applied vector scale).

    Vectors are rescaled so the median per-point fan radius equals 1% of
    the embedding diameter at scale=1; the applied factor is returned so
    the scene can record it.
    """
    if scale <= 0.0:
        raise ValidationError(f"glyph scale must be positive, got {scale}")
    centers = np.asarray(centers, dtype=np.float64)
    diam = embedding_diameter(centers)
    if diam <= 0.0:
        raise ValidationError("embedded points all coincide; no glyph scale exists")
    radii = np.array(
        [
            float(np.linalg.norm(v, axis=1).max()) if len(v) else 0.0
            for v in vector_sets
        ]
    )
    positive = radii[radii > 0.0]
    median_radius = float(np.median(positive)) if len(positive) else 0.0
    if median_radius > 0.0:
        factor = MEDIAN_RADIUS_FRACTION * diam * scale / median_radius
    else:
        factor = 1.0
    r_min = R_MIN_FRACTION * diam
    mag_eps = MAG_EPS_FRACTION * diam
    glyphs = [
        build_glyph(
            anchor,
            centers[i],
            factor * np.asarray(vector_sets[i], dtype=np.float64),
            r_min,
            samples_per_segment=samples_per_segment,
            one_sided=one_sided,
            mag_eps=mag_eps,
        )
        for i, anchor in enumerate(anchors)
    ]
    return rank_glyphs(glyphs), factor
