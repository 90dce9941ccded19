"""Pure-numpy implementations of the hot numeric kernels.

Reference backend: every function here has a numba twin in ``numba_impl``
with the same signature and (up to summation order) the same result.
All distance-matrix arguments are dense N x N float64 arrays with zero
diagonals; callers are responsible for guarding coincident points.
"""

import numpy as np


def dist_matrix(X):
    """Euclidean distance matrix of the rows of X, shape (N, N)."""
    sq = np.sum(X * X, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return np.sqrt(d2)


def stress_total(DX, DY):
    """Half the sum over all ordered pairs of squared distance residuals."""
    diff = DX - DY
    return 0.5 * float(np.sum(diff * diff))


def stress_gradient(DX, Y, DY):
    """Per-point gradient of the stress, shape (N, d).

    Row i is 2 * sum_{j != i} (1 - DX_ij / DY_ij) (y_i - y_j).
    """
    n = Y.shape[0]
    safe = DY + np.eye(n)
    coeff = 1.0 - DX / safe
    np.fill_diagonal(coeff, 0.0)
    row = coeff.sum(axis=1)
    return 2.0 * (row[:, None] * Y - coeff @ Y)


def guttman_step(DX, Y, DY):
    """One SMACOF majorization update of the configuration Y."""
    n = Y.shape[0]
    with np.errstate(divide="ignore", invalid="ignore"):
        B = np.where(DY > 0.0, -DX / np.where(DY > 0.0, DY, 1.0), 0.0)
    np.fill_diagonal(B, 0.0)
    np.fill_diagonal(B, -B.sum(axis=1))
    return (B @ Y) / n


def pointwise_blocks(X, Y, DX, DY):
    """Diagonal second-derivative blocks for every anchor.

    Returns (H, B) with H[i] the d x d block of d2F/dy_i^2 and B[i] the
    d x D block of d2F/dy_i dx_i.
    """
    n, d = Y.shape
    D = X.shape[1]
    H = np.empty((n, d, d))
    B = np.empty((n, d, D))
    eye = np.eye(d)
    for i in range(n):
        dy = Y[i] - Y  # (n, d)
        dx = X[i] - X  # (n, D)
        dist_x = DX[i]
        dist_y = DY[i]
        mask = np.arange(n) != i
        dy = dy[mask]
        dx = dx[mask]
        dist_x = dist_x[mask]
        dist_y = dist_y[mask]
        ratio = dist_x / dist_y
        H[i] = 2.0 * (
            np.sum(1.0 - ratio) * eye
            + np.einsum("k,ka,kb->ab", ratio / dist_y**2, dy, dy)
        )
        B[i] = -2.0 * np.einsum("ka,kb->ab", dy / dist_y[:, None], dx / dist_x[:, None])
    return H, B


def point_stress(dx_row, Y, i, yi):
    """Stress terms that involve point i only, as a function of its position yi."""
    diff = yi[None, :] - Y
    dist = np.sqrt(np.sum(diff * diff, axis=1))
    res = dx_row - dist
    res[i] = 0.0
    return float(np.sum(res * res))


def point_gradient(dx_row, Y, i, yi):
    """Gradient of the stress with respect to yi, all other points frozen."""
    n = Y.shape[0]
    diff = yi[None, :] - Y
    dist = np.sqrt(np.sum(diff * diff, axis=1))
    dist[i] = 1.0
    coeff = 1.0 - dx_row / dist
    coeff[i] = 0.0
    return 2.0 * (coeff[:, None] * diff).sum(axis=0)
