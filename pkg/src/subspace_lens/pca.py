"""Linear PCA projection of points and exact linear transformation of vectors."""

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ValidationError
from .ingest import DataMatrix

EIGENVALUE_RANK_RTOL = 1e-12


def fix_eigenvector_signs(vectors: np.ndarray) -> np.ndarray:
    """Make each row's largest-magnitude entry positive (rows = eigenvectors)."""
    out = vectors.copy()
    for r in range(out.shape[0]):
        k = int(np.argmax(np.abs(out[r])))
        if out[r, k] < 0:
            out[r] = -out[r]
    return out


@dataclass(frozen=True)
class LinearMap:
    """d x D projection matrix with the centering mean and top-d spectrum."""

    matrix: np.ndarray
    mean: np.ndarray
    eigenvalues: np.ndarray

    @property
    def d(self) -> int:
        return self.matrix.shape[0]

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]


def fit_pca(data: DataMatrix, d: int = 2) -> LinearMap:
    """Top-d eigenvectors of the mean-centered covariance, as row vectors.

    Uses the D x D covariance when D <= N, otherwise the N x N Gram matrix.
    Sign convention: each eigenvector's largest-magnitude entry is positive.
    """
    X = data.values
    n, dim = X.shape
    if n <= d:
        raise ValidationError(f"PCA needs more than d={d} points, got {n}")
    if dim < d:
        raise ValidationError(f"PCA needs at least {d} feature columns, got {dim}")
    mean = X.mean(axis=0)
    Xc = X - mean

    if dim <= n:
        cov = (Xc.T @ Xc) / n
        evals, evecs = np.linalg.eigh(cov)
        order = np.argsort(evals)[::-1]
        evals = evals[order]
        evecs = evecs[:, order]
        top_vals = evals[:d]
        top_vecs = evecs[:, :d].T
    else:
        gram = (Xc @ Xc.T) / n
        evals, evecs = np.linalg.eigh(gram)
        order = np.argsort(evals)[::-1]
        evals = evals[order]
        evecs = evecs[:, order]
        top_vals = evals[:d]
        top_vecs = np.empty((d, dim))
        for r in range(d):
            if evals[r] <= 0:
                top_vecs[r] = 0.0
                continue
            v = Xc.T @ evecs[:, r]
            top_vecs[r] = v / np.linalg.norm(v)

    positive = np.sum(evals > EIGENVALUE_RANK_RTOL * max(evals[0], 0.0))
    if positive < d:
        raise NumericalError(
            f"covariance has effective rank {positive}, need {d} for projection"
        )
    top_vals = np.maximum(top_vals, 0.0)
    return LinearMap(
        matrix=fix_eigenvector_signs(top_vecs), mean=mean.copy(), eigenvalues=top_vals
    )


def project_points(lmap: LinearMap, data: DataMatrix):
    """Embed the whole matrix: p_i = M (P_i - mean)."""
    from . import kernels
    from .mds import Embedding  # local import to avoid a cycle

    if data.dim != lmap.dim:
        raise ValidationError(
            f"map fitted on D={lmap.dim}, data has D={data.dim}"
        )
    coords = (data.values - lmap.mean) @ lmap.matrix.T
    DX = kernels.dist_matrix(data.values)
    DY = kernels.dist_matrix(coords)
    return Embedding(
        coords=coords,
        method="pca",
        stress_total=kernels.stress_total(DX, DY),
        stress_history=np.empty(0),
        iterations=0,
        converged=True,
        seed=None,
        gradient_norm=None,
    )


def transform_vectors_linear(lmap: LinearMap, vectors: np.ndarray) -> np.ndarray:
    """Push vectors through the constant Jacobian of the linear map: v = M V."""
    vectors = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
    if vectors.shape[1] != lmap.dim:
        raise ValidationError(
            f"vectors have dimension {vectors.shape[1]}, map expects {lmap.dim}"
        )
    return vectors @ lmap.matrix.T
