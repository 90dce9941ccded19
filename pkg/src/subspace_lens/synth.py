"""Synthetic verification datasets with known planar structure.

Two generators: a regular grid on a single tilted plane in 3D (ground
truth for checking that transported basis vectors stay orthogonal and
equal-length), and a pair of perpendicular planes whose relative extents
force any 2D projection to foreshorten one of them (ground truth for the
round-versus-elongated glyph contrast).
"""

import numpy as np

from .errors import ValidationError
from .ingest import DataMatrix


def _rotation_matrix(axis: np.ndarray, angle: float) -> np.ndarray:
    """Rodrigues rotation about a (not necessarily unit) axis."""
    axis = np.asarray(axis, dtype=np.float64)
    axis = axis / np.linalg.norm(axis)
    K = np.array(
        [
            [0.0, -axis[2], axis[1]],
            [axis[2], 0.0, -axis[0]],
            [-axis[1], axis[0], 0.0],
        ]
    )
    return np.eye(3) + np.sin(angle) * K + (1.0 - np.cos(angle)) * (K @ K)

# fixed generic tilt so the plane is not axis-aligned in data space
_GRID_AXIS = np.array([1.0, 2.0, 3.0])
_GRID_ANGLE = 0.4


def planar_grid(
    nx: int = 15, ny: int = 15, spacing: float = 0.1
) -> DataMatrix:
    """nx-by-ny regular grid on a tilted plane through the 3D origin."""
    if nx < 3 or ny < 3:
        raise ValidationError("planar grid needs nx >= 3 and ny >= 3")
    if spacing <= 0.0:
        raise ValidationError(f"spacing must be positive, got {spacing}")
    ix, iy = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    flat = np.stack(
        [
            (ix.ravel() - (nx - 1) / 2.0) * spacing,
            (iy.ravel() - (ny - 1) / 2.0) * spacing,
            np.zeros(nx * ny),
        ],
        axis=1,
    )
    R = _rotation_matrix(_GRID_AXIS, _GRID_ANGLE)
    values = flat @ R.T
    n = nx * ny
    return DataMatrix(
        values=values,
        labels=np.zeros(n, dtype=np.int64),
        image_paths=None,
        row_ids=np.arange(n, dtype=np.int64),
        class_names=["grid"],
        provenance={
            "generator": "planar_grid",
            "nx": nx,
            "ny": ny,
            "spacing": spacing,
            "rotation_axis": _GRID_AXIS.tolist(),
            "rotation_angle": _GRID_ANGLE,
        },
    )


def planar_grid_interior_ids(nx: int, ny: int) -> np.ndarray:
    """row_ids of grid points whose full 8-neighborhood exists."""
    ix, iy = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    interior = (
        (ix.ravel() > 0)
        & (ix.ravel() < nx - 1)
        & (iy.ravel() > 0)
        & (iy.ravel() < ny - 1)
    )
    return np.nonzero(interior)[0].astype(np.int64)


def _in_plane_grid(n_side: int, extent_u: float, extent_v: float, tilt: float):
    """n_side^2 grid filling a rectangle, rotated by tilt inside its plane."""
    u = np.linspace(-extent_u, extent_u, n_side)
    v = np.linspace(-extent_v, extent_v, n_side)
    gu, gv = np.meshgrid(u, v, indexing="ij")
    pts = np.stack([gu.ravel(), gv.ravel()], axis=1)
    c, s = np.cos(tilt), np.sin(tilt)
    rot = np.array([[c, -s], [s, c]])
    return pts @ rot.T


def two_planes(
    n_side: int = 14,
    major_extent: float = 1.6,
    minor_extent: float = 1.4,
    small_extent: float = 0.9,
    small_minor_extent: float = 0.55,
    tilt_a: float = 0.45,
    tilt_b: float = 0.35,
) -> DataMatrix:
    """Two perpendicular planes in 3D with deliberately unequal extents.

    Plane A (label 0) lies in the xy-plane, plane B (label 1) in the
    yz-plane; the in-plane grids are tilted so the data covariance has
    cross terms and no eigenvector is normal to either plane. Plane A's
    larger extents make the least-variance direction mostly plane B's
    z-span, so projections keep A round and squash B.
    """
    if n_side < 3:
        raise ValidationError("two_planes needs n_side >= 3")
    for name, val in (
        ("major_extent", major_extent),
        ("minor_extent", minor_extent),
        ("small_extent", small_extent),
        ("small_minor_extent", small_minor_extent),
    ):
        if val <= 0.0:
            raise ValidationError(f"{name} must be positive, got {val}")
    a2 = _in_plane_grid(n_side, major_extent, minor_extent, tilt_a)
    b2 = _in_plane_grid(n_side, small_extent, small_minor_extent, tilt_b)
    plane_a = np.stack(
        [a2[:, 0], a2[:, 1], np.zeros(len(a2))], axis=1
    )
    # offset keeps plane B's lattice off plane A's points near the shared line
    plane_b = np.stack(
        [np.zeros(len(b2)), b2[:, 0] + 0.137, b2[:, 1] + 0.071], axis=1
    )
    values = np.concatenate([plane_a, plane_b], axis=0)
    n = len(values)
    labels = np.concatenate(
        [np.zeros(len(plane_a), dtype=np.int64), np.ones(len(plane_b), dtype=np.int64)]
    )
    return DataMatrix(
        values=values,
        labels=labels,
        image_paths=None,
        row_ids=np.arange(n, dtype=np.int64),
        class_names=["plane_a", "plane_b"],
        provenance={
            "generator": "two_planes",
            "n_side": n_side,
            "major_extent": major_extent,
            "minor_extent": minor_extent,
            "small_extent": small_extent,
            "small_minor_extent": small_minor_extent,
            "tilt_a": tilt_a,
            "tilt_b": tilt_b,
        },
    )
