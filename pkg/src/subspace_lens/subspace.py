"""Per-point local linear structure: kNN neighborhoods and local PCA.

Each data point gets a small orthonormal basis spanning the directions
its neighborhood actually varies in, plus eigenvalue-derived weights
(importance of each direction) and a linearity score (how line-like the
neighborhood is). These are the high-dimensional ingredients the
Jacobian transport and the glyph geometry consume.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NumericalError, ValidationError
from .ingest import DataMatrix
from .pca import fix_eigenvector_signs

DEFAULT_K = 8
DEFAULT_FIXED_L = 5
DEFAULT_VARIANCE_THRESHOLD = 0.95
LINEARITY_CAP = 1e6


@dataclass(frozen=True)
class LocalSubspace:
    """Local PCA result at one anchor point.

    basis rows are unit-length eigenvectors of the neighborhood
    covariance, eigenvalues are their (nonincreasing, nonnegative)
    variances, weights are eigenvalue fractions over the retained set.
    """

    anchor: int
    neighbor_ids: np.ndarray
    basis: np.ndarray
    eigenvalues: np.ndarray
    weights: np.ndarray
    linearity: float
    linearity_clamped: bool = False

    @property
    def n_components(self) -> int:
        return self.basis.shape[0]


def knn(data: DataMatrix, anchor: int, k: int) -> np.ndarray:
    """k nearest row_ids to the anchor, ties broken by ascending row_id."""
    if not 2 <= k <= data.n - 1:
        raise ValidationError(f"k={k} outside valid range [2, {data.n - 1}]")
    pos = data.position_of(anchor)
    diff = data.values - data.values[pos]
    dists = np.sqrt(np.sum(diff * diff, axis=1))
    dists[pos] = np.inf
    # row_ids ascend with position, so a stable sort realizes the tie-break
    order = np.argsort(dists, kind="stable")[:k]
    return data.row_ids[order].copy()


def knn_all(data: DataMatrix, k: int) -> np.ndarray:
    """Neighbor table for every anchor at once; rows follow data order."""
    if not 2 <= k <= data.n - 1:
        raise ValidationError(f"k={k} outside valid range [2, {data.n - 1}]")
    D = kernels.dist_matrix(np.asarray(data.values))
    np.fill_diagonal(D, np.inf)
    order = np.argsort(D, axis=1, kind="stable")[:, :k]
    return data.row_ids[order].copy()


def local_pca(
    data: DataMatrix,
    anchor: int,
    neighbor_ids: np.ndarray,
    n_components: int | None = None,
    variance_threshold: float | None = None,
) -> LocalSubspace:
    """Eigendecompose the anchor+neighbors covariance and retain L directions.

    Exactly one of n_components (fixed L, capped at min(k, D)) or
    variance_threshold (smallest L whose cumulative eigenvalue share
    meets the threshold) selects the basis size.
    """
    if (n_components is None) == (variance_threshold is None):
        raise ValidationError(
            "specify exactly one of n_components or variance_threshold"
        )
    neighbor_ids = np.asarray(neighbor_ids, dtype=np.int64)
    k = len(neighbor_ids)
    positions = [data.position_of(anchor)]
    positions += [data.position_of(int(r)) for r in neighbor_ids]
    pts = data.values[positions]
    centered = pts - pts.mean(axis=0)
    # population normalization over the k+1 neighborhood points
    cov = centered.T @ centered / float(k + 1)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals, kind="stable")[::-1]
    evals = np.maximum(evals[order], 0.0)
    basis_full = fix_eigenvector_signs(evecs[:, order].T)
    total = float(evals.sum())
    if total <= 0.0:
        raise NumericalError(
            f"neighborhood of anchor {anchor} has zero variance "
            "(all points identical)"
        )

    cap = min(k, data.dim)
    if n_components is not None:
        if n_components < 1:
            raise ValidationError(f"n_components={n_components} must be >= 1")
        L = min(n_components, cap)
    else:
        if not 0.0 < variance_threshold <= 1.0:
            raise ValidationError(
                f"variance_threshold={variance_threshold} must lie in (0, 1]"
            )
        cum = np.cumsum(evals) / total
        L = int(np.searchsorted(cum, variance_threshold - 1e-15) + 1)
        L = min(L, cap)

    lam2 = float(evals[1]) if len(evals) > 1 else 0.0
    if lam2 > 0.0 and float(evals[0]) / lam2 <= LINEARITY_CAP:
        linearity = float(evals[0]) / lam2
        clamped = False
    else:
        linearity = LINEARITY_CAP
        clamped = True

    retained = evals[:L]
    weights = retained / float(retained.sum())
    return LocalSubspace(
        anchor=int(anchor),
        neighbor_ids=neighbor_ids.copy(),
        basis=basis_full[:L].copy(),
        eigenvalues=retained.copy(),
        weights=weights,
        linearity=linearity,
        linearity_clamped=clamped,
    )


def extract_all(
    data: DataMatrix,
    k: int = DEFAULT_K,
    n_components: int | None = None,
    variance_threshold: float | None = None,
) -> list[LocalSubspace]:
    """Local subspaces for every point, in data order."""
    if n_components is None and variance_threshold is None:
        n_components = DEFAULT_FIXED_L
    table = knn_all(data, k)
    return [
        local_pca(
            data,
            int(rid),
            table[pos],
            n_components=n_components,
            variance_threshold=variance_threshold,
        )
        for pos, rid in enumerate(data.row_ids)
    ]
