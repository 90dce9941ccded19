"""Shared builders for the test suite."""

import numpy as np

from subspace_lens.ingest import DataMatrix
from subspace_lens.mds import Embedding


def random_data(seed, n, dim, scale=1.0, labels=None):
    rng = np.random.default_rng(seed)
    return DataMatrix(values=scale * rng.standard_normal((n, dim)), labels=labels)


def rank2_data(seed, n, dim, scale=1.0):
    """Points on a random 2D plane through the origin of R^dim.

    Their pairwise distances are exactly realizable in the plane, so a
    2D embedding can drive the stress to zero.
    """
    rng = np.random.default_rng(seed)
    basis, _ = np.linalg.qr(rng.standard_normal((dim, 2)))
    coeffs = scale * rng.standard_normal((n, 2))
    return DataMatrix(values=coeffs @ basis.T)


def fake_embedding(coords, method="mds", **kwargs):
    """Embedding wrapper for hand-built coordinates.

    Defaults to converged so the implicit machinery accepts it; tests
    that exercise the refusal path override converged explicitly.
    """
    coords = np.asarray(coords, dtype=np.float64)
    defaults = dict(
        method=method,
        stress_total=0.0,
        stress_history=np.zeros(1),
        iterations=0,
        converged=True,
        seed=0,
        gradient_norm=0.0,
    )
    defaults.update(kwargs)
    return Embedding(coords=coords, **defaults)


def brute_stress(X, Y):
    """Independent double-loop stress: half the sum over ordered pairs."""
    n = len(X)
    total = 0.0
    for i in range(n):
        for j in range(n):
            dx = np.sqrt(np.sum((X[i] - X[j]) ** 2))
            dy = np.sqrt(np.sum((Y[i] - Y[j]) ** 2))
            total += (dx - dy) ** 2
    return 0.5 * total
