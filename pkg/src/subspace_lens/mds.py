"""Metric MDS by SMACOF stress majorization, with a first-order polish.

The stress of a configuration y for data x is

    F = 1/2 * sum_i sum_j (||x_i - x_j|| - ||y_i - y_j||)^2

summed over all ordered pairs. Majorization (the Guttman transform) drives
the stress down monotonically but its natural stopping rule leaves a
gradient residue; the implicit vector transform downstream solves a linear
system built from second derivatives at the minimum, so the residue is
polished away with monotone gradient descent (Barzilai-Borwein step with
backtracking) until the largest per-point gradient norm falls under
``grad_tol``.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ConvergenceError, ValidationError
from .ingest import DataMatrix

ARMIJO_C = 1e-4
MIN_STEP = 1e-18


@dataclass(frozen=True)
class Embedding:
    """Projected coordinates plus optimizer diagnostics."""

    coords: np.ndarray
    method: str = "mds"
    stress_total: float = np.nan
    stress_history: np.ndarray = field(default_factory=lambda: np.empty(0))
    iterations: int = 0
    converged: bool = False
    seed: int | None = None
    gradient_norm: float | None = None
    y_eps: float = 0.0
    jittered: tuple[int, ...] = ()

    def __post_init__(self):
        # copy before freezing so the caller's array stays writable
        coords = np.array(self.coords, dtype=np.float64, order="C")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def d(self) -> int:
        return self.coords.shape[1]


@dataclass(frozen=True)
class MdsConfig:
    max_iters: int = 3000
    rel_tol: float = 1e-9
    grad_tol: float | None = None  # None -> 1e-8 * N
    seed: int = 0
    init: str = "random"  # random | pca
    d: int = 2
    polish_max_iters: int = 50000

    def resolved_grad_tol(self, n: int) -> float:
        return 1e-8 * n if self.grad_tol is None else self.grad_tol


def stress(data: DataMatrix, coords: np.ndarray) -> float:
    """Total stress of a configuration (all ordered pairs, halved)."""
    coords = np.asarray(coords, dtype=np.float64)
    if coords.shape[0] != data.n:
        raise ValidationError(
            f"coords have {coords.shape[0]} rows, data has {data.n}"
        )
    DX = kernels.dist_matrix(data.values)
    DY = kernels.dist_matrix(coords)
    return kernels.stress_total(DX, DY)


def coincident_pairs(coords: np.ndarray, eps: float) -> list[tuple[int, int]]:
    DY = kernels.dist_matrix(np.asarray(coords, dtype=np.float64))
    n = DY.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    hit = DY[iu, ju] <= eps
    return list(zip(iu[hit].tolist(), ju[hit].tolist()))


def stress_gradient(data: DataMatrix, coords: np.ndarray) -> np.ndarray:
    """Row i holds 2 * sum_{j != i} (1 - dx_ij/dy_ij)(y_i - y_j).

    Raises if any embedded pair coincides: the ratio is undefined there.
    """
    coords = np.asarray(coords, dtype=np.float64)
    if coords.shape[0] != data.n:
        raise ValidationError(
            f"coords have {coords.shape[0]} rows, data has {data.n}"
        )
    DX = kernels.dist_matrix(data.values)
    DY = kernels.dist_matrix(coords)
    _check_coincident(DY)
    return kernels.stress_gradient(DX, coords, DY)


def _check_coincident(DY: np.ndarray, eps: float = 0.0) -> None:
    n = DY.shape[0]
    masked = DY + np.diag(np.full(n, np.inf))
    idx = np.unravel_index(np.argmin(masked), masked.shape)
    if masked[idx] <= eps:
        raise ValidationError(
            f"embedded points {idx[0]} and {idx[1]} coincide; "
            "distance ratios are undefined"
        )


def _max_row_norm(g: np.ndarray) -> float:
    return float(np.sqrt(np.max(np.sum(g * g, axis=1))))


def _jitter_coincident(Y, DY, rng, y_eps):
    """Separate near-coincident embedded points by a y_eps-sized nudge."""
    jittered = []
    n = Y.shape[0]
    masked = DY + np.diag(np.full(n, np.inf))
    while True:
        i, j = np.unravel_index(np.argmin(masked), masked.shape)
        if masked[i, j] > y_eps:
            break
        Y[j] += rng.standard_normal(Y.shape[1]) * y_eps
        jittered.append(int(j))
        DY = kernels.dist_matrix(Y)
        masked = DY + np.diag(np.full(n, np.inf))
    return Y, DY, jittered


def run_smacof(
    data: DataMatrix,
    config: MdsConfig = MdsConfig(),
    y0: np.ndarray | None = None,
) -> Embedding:
    """Majorize, then polish to a stationary point of the stress.

    y0 warm-starts the optimizer and overrides config.init. Returns
    converged=False (with a warning) when the gradient tolerance is not
    met; downstream implicit transforms refuse such embeddings unless
    forced.
    """
    if data.n < 3:
        raise ValidationError(f"MDS needs at least 3 points, got {data.n}")
    X = data.values
    n, d = data.n, config.d
    DX = kernels.dist_matrix(X)
    grad_tol = config.resolved_grad_tol(n)
    rng = np.random.default_rng(config.seed)

    if y0 is not None:
        Y = np.asarray(y0, dtype=np.float64).copy()
        if Y.shape != (n, d):
            raise ValidationError(
                f"warm start shape {Y.shape} does not match ({n}, {d})"
            )
    elif config.init == "random":
        Y = rng.standard_normal((n, d))
    elif config.init == "pca":
        from .pca import fit_pca, project_points

        Y = project_points(fit_pca(data, d=d), data).coords.copy()
    else:
        raise ValidationError(f"unknown init {config.init!r}")

    def min_offdiag(D):
        return float((D + np.diag(np.full(n, np.inf))).min())

    def ensure_separated(Yc, DYc):
        diam = float(DYc.max())
        eps = 1e-9 * diam if diam > 0 else 1e-12
        if min_offdiag(DYc) <= eps:
            warnings.warn(
                "coincident embedded points during optimization; applying jitter",
                stacklevel=3,
            )
            Yc, DYc, moved = _jitter_coincident(Yc, DYc, rng, eps)
            jittered_ids.extend(moved)
        return Yc, DYc

    jittered_ids: list[int] = []
    DY = kernels.dist_matrix(Y)
    Y, DY = ensure_separated(Y, DY)
    history = []
    cur = kernels.stress_total(DX, DY)
    history.append(cur)

    # Phase 1: Guttman-transform majorization.
    iters = 0
    for _ in range(config.max_iters):
        Y_new = kernels.guttman_step(DX, Y, DY)
        DY_new = kernels.dist_matrix(Y_new)
        Y_new, DY_new = ensure_separated(Y_new, DY_new)
        new = kernels.stress_total(DX, DY_new)
        if new > cur:  # float-level plateau: majorization is done
            break
        Y, DY = Y_new, DY_new
        iters += 1
        history.append(new)
        if cur > 0 and (cur - new) <= config.rel_tol * cur:
            cur = new
            break
        cur = new

    # Phase 2: monotone BB gradient descent to the gradient tolerance.
    g = kernels.stress_gradient(DX, Y, DY)
    gnorm = _max_row_norm(g)
    alpha = 1.0 / max(n, 1)
    prev_Y = None
    prev_g = None
    for _ in range(config.polish_max_iters):
        if gnorm <= grad_tol:
            break
        if prev_Y is not None:
            dy = Y - prev_Y
            dg = g - prev_g
            denom = float(np.sum(dy * dg))
            if denom > 0:
                alpha = float(np.sum(dy * dy)) / denom
            # else keep the previous accepted step size
        gsq = float(np.sum(g * g))
        step = alpha
        accepted = False
        while step >= MIN_STEP:
            Y_try = Y - step * g
            DY_try = kernels.dist_matrix(Y_try)
            masked_min = float(
                (DY_try + np.diag(np.full(n, np.inf))).min()
            )
            if masked_min > 0.0:
                new = kernels.stress_total(DX, DY_try)
                if new <= cur - ARMIJO_C * step * gsq:
                    accepted = True
                    break
            step *= 0.5
        if not accepted:
            break
        prev_Y, prev_g = Y, g
        Y, DY, cur = Y_try, DY_try, new
        alpha = step
        iters += 1
        history.append(cur)
        g = kernels.stress_gradient(DX, Y, DY)
        gnorm = _max_row_norm(g)

    diam = float(DY.max())
    y_eps = 1e-9 * diam if diam > 0 else 0.0
    converged = gnorm <= grad_tol
    if not converged:
        warnings.warn(
            f"SMACOF polish stopped at gradient norm {gnorm:.3e} "
            f"(tolerance {grad_tol:.3e})",
            stacklevel=2,
        )
    return Embedding(
        coords=Y,
        method="mds",
        stress_total=cur,
        stress_history=np.array(history),
        iterations=iters,
        converged=converged,
        seed=config.seed,
        gradient_norm=gnorm,
        y_eps=y_eps,
        jittered=tuple(jittered_ids),
    )


def minimize_single_point(
    dx_row: np.ndarray,
    Y: np.ndarray,
    i: int,
    y0: np.ndarray,
    grad_tol: float,
    max_iters: int = 2000,
):
    """Polish one embedded point with every other point frozen.

    Same monotone BB descent as the global polish, restricted to the terms
    of the stress that involve point i. Used by the finite-difference
    oracle, which must not touch the Hessian machinery it validates.

    Returns (y_star, achieved_gradient_norm).
    """
    yi = np.asarray(y0, dtype=np.float64).copy()
    cur = kernels.point_stress(dx_row, Y, i, yi)
    g = kernels.point_gradient(dx_row, Y, i, yi)
    gnorm = float(np.linalg.norm(g))
    alpha = 1.0 / max(Y.shape[0], 1)
    prev_y = None
    prev_g = None
    for _ in range(max_iters):
        if gnorm <= grad_tol:
            break
        if prev_y is not None:
            dy = yi - prev_y
            dg = g - prev_g
            denom = float(np.dot(dy, dg))
            if denom > 0:
                alpha = float(np.dot(dy, dy)) / denom
        gsq = float(np.dot(g, g))
        step = alpha
        accepted = False
        while step >= MIN_STEP:
            y_try = yi - step * g
            new = kernels.point_stress(dx_row, Y, i, y_try)
            if new <= cur - ARMIJO_C * step * gsq:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        prev_y, prev_g = yi, g
        yi, cur = y_try, new
        alpha = step
        g = kernels.point_gradient(dx_row, Y, i, yi)
        gnorm = float(np.linalg.norm(g))
    return yi, gnorm
