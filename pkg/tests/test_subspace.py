"""Neighborhoods and local PCA subspaces."""

import numpy as np
import pytest

from subspace_lens.errors import NumericalError, ValidationError
from subspace_lens.ingest import DataMatrix
from subspace_lens.subspace import (
    LINEARITY_CAP,
    extract_all,
    knn,
    knn_all,
    local_pca,
)

from conftest import random_data


def brute_knn(values, anchor_pos, k):
    """Sort-by-(distance, index) oracle."""
    dists = np.sqrt(np.sum((values - values[anchor_pos]) ** 2, axis=1))
    keyed = sorted(
        (d, i) for i, d in enumerate(dists) if i != anchor_pos
    )
    return [i for _, i in keyed[:k]]


def test_knn_on_a_line():
    values = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [5.0, 0.0]])
    data = DataMatrix(values=values)
    np.testing.assert_array_equal(knn(data, 1, 2), [0, 2])
    np.testing.assert_array_equal(knn(data, 3, 3), [2, 1, 0])


def test_knn_tie_breaks_by_row_id():
    # anchors 1, 2, 3 all at distance 1 from anchor 0
    values = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]])
    data = DataMatrix(values=values)
    np.testing.assert_array_equal(knn(data, 0, 2), [1, 2])
    np.testing.assert_array_equal(knn(data, 0, 3), [1, 2, 3])


def test_knn_matches_brute_oracle():
    data = random_data(0, 30, 4)
    for anchor in (0, 7, 29):
        for k in (2, 5, 29):
            got = knn(data, anchor, k)
            np.testing.assert_array_equal(got, brute_knn(data.values, anchor, k))


def test_knn_all_matches_single_calls():
    data = random_data(1, 25, 3)
    table = knn_all(data, 6)
    for pos in range(25):
        np.testing.assert_array_equal(table[pos], knn(data, pos, 6))


def test_knn_k_bounds():
    data = random_data(2, 10, 3)
    with pytest.raises(ValidationError, match="outside valid range"):
        knn(data, 0, 1)
    with pytest.raises(ValidationError, match="outside valid range"):
        knn(data, 0, 10)


def test_local_pca_matches_svd_oracle():
    data = random_data(3, 40, 6)
    k = 10
    for anchor in (0, 13, 39):
        ids = knn(data, anchor, k)
        sub = local_pca(data, anchor, ids, n_components=3)
        pts = data.values[[anchor] + [int(r) for r in ids]]
        centered = pts - pts.mean(axis=0)
        _, s, vt = np.linalg.svd(centered, full_matrices=False)
        np.testing.assert_allclose(
            sub.basis.T @ sub.basis, vt[:3].T @ vt[:3], atol=1e-9
        )
        np.testing.assert_allclose(
            sub.eigenvalues, s[:3] ** 2 / (k + 1), rtol=1e-9
        )


def test_local_pca_planar_neighborhood():
    rng = np.random.default_rng(4)
    basis = np.linalg.qr(rng.standard_normal((5, 2)))[0]
    data = DataMatrix(values=rng.standard_normal((30, 2)) @ basis.T)
    ids = knn(data, 0, 8)
    sub = local_pca(data, 0, ids, variance_threshold=0.95)
    assert sub.n_components == 2
    # third direction carries no variance on exactly planar data
    full_pts = data.values[[0] + [int(r) for r in ids]]
    centered = full_pts - full_pts.mean(axis=0)
    s = np.linalg.svd(centered, compute_uv=False)
    assert s[2] <= 1e-10 * s[0]


def test_local_pca_collinear_clamps_linearity():
    values = np.zeros((10, 3))
    values[:, 0] = np.arange(10.0)
    data = DataMatrix(values=values)
    sub = local_pca(data, 4, knn(data, 4, 5), n_components=1)
    assert sub.linearity == LINEARITY_CAP
    assert sub.linearity_clamped
    np.testing.assert_allclose(np.abs(sub.basis[0]), [1.0, 0.0, 0.0], atol=1e-12)


def test_local_pca_linearity_ratio():
    rng = np.random.default_rng(5)
    values = rng.standard_normal((60, 3)) * np.array([4.0, 1.0, 0.2])
    data = DataMatrix(values=values)
    sub = local_pca(data, 0, knn(data, 0, 59), n_components=2)
    assert sub.linearity == pytest.approx(
        sub.eigenvalues[0] / sub.eigenvalues[1], rel=1e-12
    )
    assert not sub.linearity_clamped
    assert sub.linearity >= 1.0


def test_local_pca_fixed_size_capped():
    data = random_data(6, 20, 3)
    sub = local_pca(data, 0, knn(data, 0, 8), n_components=5)
    assert sub.n_components == 3  # capped at min(k, D) = D
    sub2 = local_pca(data, 0, knn(data, 0, 2), n_components=5)
    assert sub2.n_components == 2  # capped at k


def test_local_pca_weights_normalized_nonincreasing():
    data = random_data(7, 30, 5)
    sub = local_pca(data, 3, knn(data, 3, 10), n_components=4)
    assert sub.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(sub.weights) <= 1e-15)
    np.testing.assert_allclose(
        sub.weights, sub.eigenvalues / sub.eigenvalues.sum(), atol=1e-15
    )


def test_local_pca_basis_orthonormal():
    data = random_data(8, 25, 6)
    sub = local_pca(data, 0, knn(data, 0, 12), n_components=4)
    np.testing.assert_allclose(
        sub.basis @ sub.basis.T, np.eye(4), atol=1e-10
    )


def test_local_pca_threshold_selects_minimal_l():
    rng = np.random.default_rng(9)
    values = rng.standard_normal((40, 4)) * np.array([10.0, 5.0, 0.1, 0.01])
    data = DataMatrix(values=values)
    ids = knn(data, 0, 20)
    sub = local_pca(data, 0, ids, variance_threshold=0.95)
    cum = np.cumsum(sub.eigenvalues) / sub.eigenvalues.sum()
    # chosen L meets the threshold and L-1 would not
    pts = data.values[[0] + [int(r) for r in ids]]
    centered = pts - pts.mean(axis=0)
    lam = np.sort(np.linalg.eigvalsh(centered.T @ centered / 21.0))[::-1]
    share = np.cumsum(lam) / lam.sum()
    L = sub.n_components
    assert share[L - 1] >= 0.95 - 1e-12
    if L > 1:
        assert share[L - 2] < 0.95


def test_local_pca_selector_contract():
    data = random_data(10, 12, 3)
    ids = knn(data, 0, 5)
    with pytest.raises(ValidationError, match="exactly one"):
        local_pca(data, 0, ids)
    with pytest.raises(ValidationError, match="exactly one"):
        local_pca(data, 0, ids, n_components=2, variance_threshold=0.9)
    with pytest.raises(ValidationError, match="must lie in"):
        local_pca(data, 0, ids, variance_threshold=1.5)
    with pytest.raises(ValidationError, match="must be >= 1"):
        local_pca(data, 0, ids, n_components=0)


def test_local_pca_zero_variance_neighborhood():
    values = np.zeros((5, 3))
    values[4] = [10.0, 0.0, 0.0]  # far away, not in the neighborhood
    data = DataMatrix(values=values)
    with pytest.raises(NumericalError, match="zero variance"):
        local_pca(data, 0, np.array([1, 2, 3]), n_components=1)


def test_extract_all_order_and_default():
    data = random_data(11, 15, 6)
    subs = extract_all(data, k=6)
    assert len(subs) == 15
    assert [s.anchor for s in subs] == list(range(15))
    # default selector is a fixed subspace size of 5
    assert all(s.n_components == 5 for s in subs)
    subs2 = extract_all(data, k=6, variance_threshold=0.99)
    assert all(1 <= s.n_components <= 6 for s in subs2)
