"""Jacobians of the embedding map by implicit differentiation.

A converged stress minimum satisfies dF/dy_i = 0 for every embedded point.
Differentiating that optimality condition with respect to the original
coordinates x_i and applying the chain rule yields

    dy_i/dx_i = -(d2F/dy_i^2)^{-1} (d2F/dy_i dx_i)

so the Jacobian that transports local basis vectors into the plot needs
only second derivatives of the stress at the data points themselves --
no extra projections of off-dataset points.

Two solve modes exist. The default ``pointwise`` mode uses the per-anchor
diagonal blocks above. The ``coupled`` mode assembles the full (N*d)^2
Hessian over all embedded coordinates, which is singular under rigid
motions of the embedding (two translations plus one rotation for d=2),
and takes the least-norm solve instead; the pointwise result is the
(i, i) sub-block story told per point, the coupled result respects the
cross-point terms.

The finite-difference path re-optimizes single points on perturbed data
and is the validation oracle for the analytic route, not a production
transform.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConvergenceError, NumericalError, ValidationError
from .ingest import DataMatrix
from .mds import Embedding, minimize_single_point
from .subspace import LocalSubspace

DEFAULT_COND_CAP = 1e12
DEFAULT_FD_STEP = 1e-4


@dataclass(frozen=True)
class JacobianBlock:
    """Per-anchor d x D Jacobian with the Hessian block that produced it."""

    anchor: int
    matrix: np.ndarray
    hessian_block: np.ndarray
    hessian_cond: float
    degenerate: bool = False
    mode: str = "pointwise"


@dataclass(frozen=True)
class TransformedSubspace:
    """Basis vectors pushed into the embedding plane, weighted and raw."""

    anchor: int
    vectors: np.ndarray
    raw_vectors: np.ndarray
    method_tag: str


def _pair_geometry(data: DataMatrix, embedding: Embedding, i: int, j: int):
    pi, pj = data.position_of(i), data.position_of(j)
    dx = data.values[pi] - data.values[pj]
    dy = embedding.coords[pi] - embedding.coords[pj]
    dist_x = float(np.linalg.norm(dx))
    dist_y = float(np.linalg.norm(dy))
    if dist_y == 0.0:
        raise ValidationError(f"embedded points {i} and {j} coincide")
    if dist_x == 0.0:
        raise ValidationError(f"original points {i} and {j} coincide (dedup missed)")
    return dx, dy, dist_x, dist_y


def mds_hessian_yy(
    data: DataMatrix, embedding: Embedding, i: int, j: int
) -> np.ndarray:
    """Second derivative block d2F/dy_i dy_j of the stress (d x d)."""
    d = embedding.d
    eye = np.eye(d)
    if i == j:
        pi = data.position_of(i)
        H = np.zeros((d, d))
        for k_id in data.row_ids:
            k = int(k_id)
            if k == i:
                continue
            _, dy, dist_x, dist_y = _pair_geometry(data, embedding, i, k)
            ratio = dist_x / dist_y
            H += 2.0 * ((1.0 - ratio) * eye + (ratio / dist_y**2) * np.outer(dy, dy))
        return H
    _, dy, dist_x, dist_y = _pair_geometry(data, embedding, i, j)
    ratio = dist_x / dist_y
    return 2.0 * (ratio - 1.0) * eye - 2.0 * (ratio / dist_y**2) * np.outer(dy, dy)


def mds_hessian_yx(
    data: DataMatrix, embedding: Embedding, i: int, j: int
) -> np.ndarray:
    """Mixed second derivative block d2F/dy_i dx_j of the stress (d x D)."""
    if i == j:
        B = np.zeros((embedding.d, data.dim))
        for k_id in data.row_ids:
            k = int(k_id)
            if k == i:
                continue
            dx, dy, dist_x, dist_y = _pair_geometry(data, embedding, i, k)
            B += -2.0 * np.outer(dy / dist_y, dx / dist_x)
        return B
    dx, dy, dist_x, dist_y = _pair_geometry(data, embedding, i, j)
    return 2.0 * np.outer(dy / dist_y, dx / dist_x)


def _solve_block(H: np.ndarray, B: np.ndarray, cond_cap: float):
    """J = -H^{-1} B with a pseudoinverse fallback past the condition cap."""
    evals = np.linalg.eigvalsh(H)
    amax, amin = float(np.max(np.abs(evals))), float(np.min(np.abs(evals)))
    cond = np.inf if amin == 0.0 else amax / amin
    if not np.isfinite(cond) or cond > cond_cap:
        return -np.linalg.pinv(H) @ B, cond, True
    return -np.linalg.solve(H, B), cond, False


def _require_converged(embedding: Embedding, force: bool, what: str):
    if embedding.method == "mds" and not embedding.converged and not force:
        raise ConvergenceError(
            f"{what} requires a converged embedding "
            f"(gradient norm {embedding.gradient_norm}); pass force to override"
        )


def rigid_motion_basis(coords: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the stress-neutral directions (columns).

    Two translations plus the in-plane rotation generator for d=2.
    """
    n, d = coords.shape
    cols = []
    for a in range(d):
        t = np.zeros((n, d))
        t[:, a] = 1.0
        cols.append(t.ravel())
    if d == 2:
        centered = coords - coords.mean(axis=0)
        rot = np.column_stack([-centered[:, 1], centered[:, 0]]).ravel()
        cols.append(rot)
    K = np.column_stack(cols)
    q, _ = np.linalg.qr(K)
    return q


def implicit_jacobian(
    data: DataMatrix,
    embedding: Embedding,
    anchor: int,
    mode: str = "pointwise",
    cond_cap: float = DEFAULT_COND_CAP,
    force: bool = False,
) -> JacobianBlock:
    """Jacobian dy_anchor/dx_anchor at a converged stress minimum."""
    if embedding.method == "pca":
        raise ValidationError(
            "implicit transform of a PCA embedding is the linear path; "
            "use transform_vectors_linear"
        )
    _require_converged(embedding, force, "implicit Jacobian")
    H_ii = mds_hessian_yy(data, embedding, anchor, anchor)
    if mode == "pointwise":
        B_ii = mds_hessian_yx(data, embedding, anchor, anchor)
        J, cond, degenerate = _solve_block(H_ii, B_ii, cond_cap)
        if degenerate:
            warnings.warn(
                f"Hessian block at anchor {anchor} has condition {cond:.3e}; "
                "using pseudoinverse",
                stacklevel=2,
            )
        return JacobianBlock(
            anchor=anchor,
            matrix=J,
            hessian_block=H_ii,
            hessian_cond=cond,
            degenerate=degenerate,
            mode=mode,
        )
    if mode != "coupled":
        raise ValidationError(f"unknown jacobian mode {mode!r}")

    n, d = embedding.n, embedding.d
    pos = data.position_of(anchor)
    H = np.zeros((n * d, n * d))
    ids = [int(r) for r in data.row_ids]
    for a, ida in enumerate(ids):
        for b, idb in enumerate(ids):
            if a == b:
                H[a * d:(a + 1) * d, a * d:(a + 1) * d] = mds_hessian_yy(
                    data, embedding, ida, ida
                )
            else:
                H[a * d:(a + 1) * d, b * d:(b + 1) * d] = mds_hessian_yy(
                    data, embedding, ida, idb
                )
    B_col = np.zeros((n * d, data.dim))
    for a, ida in enumerate(ids):
        B_col[a * d:(a + 1) * d] = mds_hessian_yx(data, embedding, ida, anchor)
    # Deflate the rigid-motion nullspace, then take the least-norm solve.
    K = rigid_motion_basis(embedding.coords)
    H_defl = H + K @ K.T * float(np.max(np.abs(H)))
    try:
        J_full = np.linalg.solve(H_defl, -B_col)
        J_full -= K @ (K.T @ J_full)
    except np.linalg.LinAlgError:
        J_full, *_ = np.linalg.lstsq(H, -B_col, rcond=1e-12)
    evals = np.linalg.eigvalsh(H_ii)
    amax, amin = float(np.max(np.abs(evals))), float(np.min(np.abs(evals)))
    cond = np.inf if amin == 0.0 else amax / amin
    return JacobianBlock(
        anchor=anchor,
        matrix=J_full[pos * d:(pos + 1) * d],
        hessian_block=H_ii,
        hessian_cond=cond,
        degenerate=False,
        mode=mode,
    )


def all_pointwise_jacobians(
    data: DataMatrix,
    embedding: Embedding,
    cond_cap: float = DEFAULT_COND_CAP,
    force: bool = False,
) -> list[JacobianBlock]:
    """Batched pointwise Jacobians for every anchor (hot path)."""
    _require_converged(embedding, force, "implicit Jacobian")
    X = np.asarray(data.values)
    Y = np.asarray(embedding.coords)
    DX = kernels.dist_matrix(X)
    DY = kernels.dist_matrix(Y)
    n = data.n
    masked = DY + np.diag(np.full(n, np.inf))
    if float(masked.min()) <= 0.0:
        i, j = np.unravel_index(np.argmin(masked), masked.shape)
        raise ValidationError(f"embedded points {i} and {j} coincide")
    H, B = kernels.pointwise_blocks(X, Y, DX, DY)
    out = []
    for pos, rid in enumerate(data.row_ids):
        J, cond, degenerate = _solve_block(H[pos], B[pos], cond_cap)
        if degenerate:
            warnings.warn(
                f"Hessian block at anchor {int(rid)} has condition {cond:.3e}; "
                "using pseudoinverse",
                stacklevel=2,
            )
        out.append(
            JacobianBlock(
                anchor=int(rid),
                matrix=J,
                hessian_block=H[pos],
                hessian_cond=cond,
                degenerate=degenerate,
                mode="pointwise",
            )
        )
    return out


def all_coupled_jacobians(
    data: DataMatrix,
    embedding: Embedding,
    cond_cap: float = DEFAULT_COND_CAP,
    force: bool = False,
) -> list[JacobianBlock]:
    """Coupled-mode Jacobians for every anchor with one factorization.

    The full Hessian and all right-hand sides are assembled once; the
    deflated solve then yields every anchor's block in a single call.
    """
    _require_converged(embedding, force, "implicit Jacobian")
    n, d, D = embedding.n, embedding.d, data.dim
    ids = [int(r) for r in data.row_ids]
    H = np.zeros((n * d, n * d))
    for a, ida in enumerate(ids):
        for b, idb in enumerate(ids):
            H[a * d:(a + 1) * d, b * d:(b + 1) * d] = mds_hessian_yy(
                data, embedding, ida, ida if a == b else idb
            )
    B_all = np.zeros((n * d, n * D))
    for a, ida in enumerate(ids):
        for b, idb in enumerate(ids):
            B_all[a * d:(a + 1) * d, b * D:(b + 1) * D] = mds_hessian_yx(
                data, embedding, ida, ida if a == b else idb
            )
    K = rigid_motion_basis(embedding.coords)
    H_defl = H + K @ K.T * float(np.max(np.abs(H)))
    try:
        J_all = np.linalg.solve(H_defl, -B_all)
        J_all -= K @ (K.T @ J_all)
    except np.linalg.LinAlgError:
        J_all, *_ = np.linalg.lstsq(H, -B_all, rcond=1e-12)
    out = []
    for pos, rid in enumerate(ids):
        H_ii = H[pos * d:(pos + 1) * d, pos * d:(pos + 1) * d]
        evals = np.linalg.eigvalsh(H_ii)
        amax, amin = float(np.max(np.abs(evals))), float(np.min(np.abs(evals)))
        cond = np.inf if amin == 0.0 else amax / amin
        out.append(
            JacobianBlock(
                anchor=rid,
                matrix=J_all[pos * d:(pos + 1) * d, pos * D:(pos + 1) * D],
                hessian_block=H_ii,
                hessian_cond=cond,
                degenerate=False,
                mode="coupled",
            )
        )
    return out


def finite_difference_jacobian(
    data: DataMatrix,
    embedding: Embedding,
    anchor: int,
    h: float = DEFAULT_FD_STEP,
    force: bool = False,
) -> JacobianBlock:
    """Central-difference Jacobian via warm-started single-point re-optimization.

    For each original dimension the anchor's coordinates are nudged by
    +-h * (column std), the anchor's embedded position is re-polished with
    every other point frozen, and the displacement is differenced. This is
    the oracle the analytic Jacobian is validated against.
    """
    if embedding.method != "mds":
        raise ValidationError("finite-difference transform is defined for MDS runs")
    _require_converged(embedding, force, "finite-difference Jacobian")
    pos = data.position_of(anchor)
    X = np.asarray(data.values)
    Y = np.asarray(embedding.coords)
    n, D = X.shape
    stds = X.std(axis=0)
    fallback = float(stds[stds > 0].mean()) if np.any(stds > 0) else 1.0
    J = np.empty((embedding.d, D))
    for j in range(D):
        hj = h * (float(stds[j]) if stds[j] > 0 else fallback)
        endpoints = []
        for sign in (+1.0, -1.0):
            xp = X[pos].copy()
            xp[j] += sign * hj
            diff = xp[None, :] - X
            dx_row = np.sqrt(np.sum(diff * diff, axis=1))
            dx_row[pos] = 0.0
            g0 = float(np.linalg.norm(kernels.point_gradient(dx_row, Y, pos, Y[pos])))
            tol = max(1e-13, 1e-7 * g0)
            y_star, achieved = minimize_single_point(dx_row, Y, pos, Y[pos], tol)
            # a small residual only shifts y* by ~residual/curvature, far
            # below the h-scale displacement being differenced; fail only
            # on a genuine stall. The line search cannot resolve stress
            # decreases below float resolution, which leaves a gradient
            # floor near sqrt(eps) * n * distance scale.
            scale = float(dx_row[dx_row > 0].mean()) if np.any(dx_row > 0) else 1.0
            floor = np.sqrt(np.finfo(np.float64).eps) * n * scale
            if achieved > max(1e-4 * g0, floor):
                raise NumericalError(
                    f"single-point re-optimization for anchor {anchor}, "
                    f"dimension {j} stalled at gradient {achieved:.3e}"
                )
            endpoints.append(y_star)
        J[:, j] = (endpoints[0] - endpoints[1]) / (2.0 * hj)
    H_ii = mds_hessian_yy(data, embedding, anchor, anchor)
    evals = np.linalg.eigvalsh(H_ii)
    amax, amin = float(np.max(np.abs(evals))), float(np.min(np.abs(evals)))
    cond = np.inf if amin == 0.0 else amax / amin
    return JacobianBlock(
        anchor=anchor,
        matrix=J,
        hessian_block=H_ii,
        hessian_cond=cond,
        degenerate=False,
        mode="finite_difference",
    )


def transform_subspace(
    jacobian: JacobianBlock, subspace: LocalSubspace, method_tag: str = "implicit"
) -> TransformedSubspace:
    """Push the basis through the Jacobian and apply the eigenvalue weights."""
    if jacobian.matrix.shape[1] != subspace.basis.shape[1]:
        raise ValidationError(
            f"jacobian expects D={jacobian.matrix.shape[1]}, "
            f"basis has D={subspace.basis.shape[1]}"
        )
    raw = subspace.basis @ jacobian.matrix.T
    weighted = subspace.weights[:, None] * raw
    return TransformedSubspace(
        anchor=subspace.anchor,
        vectors=weighted,
        raw_vectors=raw,
        method_tag=method_tag,
    )


def pca_quadratic_jacobian(lmap, cond_cap: float = DEFAULT_COND_CAP) -> np.ndarray:
    """Implicit machinery applied to the quadratic objective |p - M(P-mean)|^2.

    Its stationarity condition gives H = 2I and B = -2M, so the solve must
    reproduce the linear map exactly; used to cross-check the solver path.
    """
    d = lmap.matrix.shape[0]
    H = 2.0 * np.eye(d)
    B = -2.0 * lmap.matrix
    J, _, _ = _solve_block(H, B, cond_cap)
    return J
