"""Per-point projection quality: stress shares and trustworthiness.

Stress shares attribute the embedding's total squared-distance error to
individual points (half of each pair's error to each endpoint), giving
the color map that flags badly placed points. Trustworthiness is the
standard rank-based score penalizing embedded neighbors that were not
neighbors in the original space; both the global value and per-point
values (each normalized by its own worst-case penalty) are produced.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ValidationError
from .ingest import DataMatrix
from .mds import Embedding


@dataclass(frozen=True)
class QualityReport:
    per_point_stress: np.ndarray
    trustworthiness: float
    per_point_trust: np.ndarray
    linearity: np.ndarray
    k_used: int


def per_point_stress(data: DataMatrix, embedding: Embedding) -> np.ndarray:
    """Point i's share of the stress: half its row of squared errors.

    Summing over all points recovers the total stress exactly (each
    unordered pair contributes half to each endpoint).
    """
    DX = kernels.dist_matrix(np.asarray(data.values))
    DY = kernels.dist_matrix(np.asarray(embedding.coords))
    diff = DX - DY
    return 0.5 * np.sum(diff * diff, axis=1)


def _neighbor_ranks(D: np.ndarray):
    """Stable neighbor orderings and ranks for a distance matrix.

    Returns (order, ranks): order[i] lists the other points nearest
    first; ranks[i, j] is j's 1-based rank from i. Ties fall back to
    ascending position, which is ascending row_id.
    """
    n = len(D)
    masked = D.copy()
    np.fill_diagonal(masked, np.inf)
    order = np.argsort(masked, axis=1, kind="stable")[:, : n - 1]
    ranks = np.zeros((n, n), dtype=np.int64)
    rows = np.repeat(np.arange(n), n - 1)
    ranks[rows, order.ravel()] = np.tile(np.arange(1, n), n)
    return order, ranks


def trustworthiness(
    data: DataMatrix, embedding: Embedding, k: int
) -> tuple[float, np.ndarray]:
    """Rank-based neighborhood preservation score in [0, 1].

    Every point in the embedded k-neighborhood that is not in the
    original k-neighborhood is charged its original rank beyond k; the
    per-point score normalizes that charge by the point's worst case,
    and the global score is the mean.
    """
    n = data.n
    if not 1 <= k < n / 2.0:
        raise ValidationError(f"trustworthiness requires 1 <= k < N/2, got k={k}, N={n}")
    DX = kernels.dist_matrix(np.asarray(data.values))
    DY = kernels.dist_matrix(np.asarray(embedding.coords))
    x_order, x_ranks = _neighbor_ranks(DX)
    y_order, _ = _neighbor_ranks(DY)
    worst = k * (2.0 * n - 3.0 * k - 1.0) / 2.0
    per_point = np.empty(n)
    for i in range(n):
        orig = set(int(j) for j in x_order[i, :k])
        penalty = 0
        for j in y_order[i, :k]:
            if int(j) not in orig:
                penalty += int(x_ranks[i, j]) - k
        per_point[i] = 1.0 - penalty / worst
    return float(per_point.mean()), per_point


def compute_quality(
    data: DataMatrix,
    embedding: Embedding,
    linearity: np.ndarray,
    k: int,
) -> QualityReport:
    """Bundle the per-point metrics used by the viewer's color maps."""
    global_t, per_point_t = trustworthiness(data, embedding, k)
    return QualityReport(
        per_point_stress=per_point_stress(data, embedding),
        trustworthiness=global_t,
        per_point_trust=per_point_t,
        linearity=np.asarray(linearity, dtype=np.float64).copy(),
        k_used=int(k),
    )
