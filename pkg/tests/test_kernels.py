"""Numerical kernels against brute-force oracles, and backend agreement."""

import numpy as np
import pytest

from subspace_lens import kernels
from subspace_lens.kernels import numba_impl, numpy_impl

from conftest import brute_stress


def random_config(seed, n=9, dim=4, d=2):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, dim))
    Y = rng.standard_normal((n, d))
    return X, Y


def test_dist_matrix_brute():
    X, _ = random_config(0)
    D = kernels.dist_matrix(X)
    n = len(X)
    for i in range(n):
        for j in range(n):
            assert D[i, j] == pytest.approx(np.linalg.norm(X[i] - X[j]), abs=1e-12)
    assert np.all(np.diag(D) == 0.0)
    np.testing.assert_allclose(D, D.T, atol=0)


def test_stress_total_brute():
    for seed in range(5):
        X, Y = random_config(seed)
        DX = kernels.dist_matrix(X)
        DY = kernels.dist_matrix(Y)
        assert kernels.stress_total(DX, DY) == pytest.approx(
            brute_stress(X, Y), rel=1e-12
        )


def test_stress_gradient_matches_central_differences():
    X, Y = random_config(1)
    DX = kernels.dist_matrix(X)
    G = kernels.stress_gradient(DX, Y, kernels.dist_matrix(Y))
    h = 1e-6
    for i in range(len(Y)):
        for c in range(Y.shape[1]):
            Yp = Y.copy()
            Yp[i, c] += h
            Ym = Y.copy()
            Ym[i, c] -= h
            fd = (brute_stress(X, Yp) - brute_stress(X, Ym)) / (2 * h)
            assert G[i, c] == pytest.approx(fd, rel=1e-6, abs=1e-8)


def test_guttman_step_decreases_stress():
    for seed in range(5):
        X, Y = random_config(seed, n=15)
        DX = kernels.dist_matrix(X)
        before = kernels.stress_total(DX, kernels.dist_matrix(Y))
        Y2 = kernels.guttman_step(DX, Y, kernels.dist_matrix(Y))
        after = kernels.stress_total(DX, kernels.dist_matrix(Y2))
        assert after <= before + 1e-12


def test_point_stress_collects_anchor_terms():
    X, Y = random_config(2)
    DX = kernels.dist_matrix(X)
    i = 3
    expect = sum(
        (DX[i, j] - np.linalg.norm(Y[i] - Y[j])) ** 2
        for j in range(len(Y))
        if j != i
    )
    got = kernels.point_stress(DX[i], Y, i, Y[i])
    assert got == pytest.approx(expect, rel=1e-12)


def test_point_gradient_is_full_gradient_row():
    X, Y = random_config(4)
    DX = kernels.dist_matrix(X)
    G = kernels.stress_gradient(DX, Y, kernels.dist_matrix(Y))
    for i in (0, 5, 8):
        row = kernels.point_gradient(DX[i], Y, i, Y[i])
        np.testing.assert_allclose(row, G[i], rtol=1e-12, atol=1e-14)


def test_pointwise_blocks_shapes_and_symmetry():
    X, Y = random_config(5, n=12)
    DX = kernels.dist_matrix(X)
    DY = kernels.dist_matrix(Y)
    H, B = kernels.pointwise_blocks(X, Y, DX, DY)
    assert H.shape == (12, 2, 2)
    assert B.shape == (12, 2, 4)
    for i in range(12):
        np.testing.assert_allclose(H[i], H[i].T, atol=1e-12)


@pytest.mark.skipif(numba_impl is None, reason="numba backend unavailable")
def test_backends_agree():
    X, Y = random_config(7, n=20, dim=5)
    DX_np = numpy_impl.dist_matrix(X)
    DY_np = numpy_impl.dist_matrix(Y)
    np.testing.assert_allclose(numba_impl.dist_matrix(X), DX_np, rtol=1e-12)
    assert numba_impl.stress_total(DX_np, DY_np) == pytest.approx(
        numpy_impl.stress_total(DX_np, DY_np), rel=1e-12
    )
    np.testing.assert_allclose(
        numba_impl.stress_gradient(DX_np, Y, DY_np),
        numpy_impl.stress_gradient(DX_np, Y, DY_np),
        rtol=1e-10,
        atol=1e-12,
    )
    np.testing.assert_allclose(
        numba_impl.guttman_step(DX_np, Y, DY_np),
        numpy_impl.guttman_step(DX_np, Y, DY_np),
        rtol=1e-10,
        atol=1e-12,
    )
    Ha, Ba = numba_impl.pointwise_blocks(X, Y, DX_np, DY_np)
    Hb, Bb = numpy_impl.pointwise_blocks(X, Y, DX_np, DY_np)
    np.testing.assert_allclose(Ha, Hb, rtol=1e-10, atol=1e-12)
    np.testing.assert_allclose(Ba, Bb, rtol=1e-10, atol=1e-12)
    i = 4
    assert numba_impl.point_stress(DX_np[i], Y, i, Y[i]) == pytest.approx(
        numpy_impl.point_stress(DX_np[i], Y, i, Y[i]), rel=1e-12
    )
    np.testing.assert_allclose(
        numba_impl.point_gradient(DX_np[i], Y, i, Y[i]),
        numpy_impl.point_gradient(DX_np[i], Y, i, Y[i]),
        rtol=1e-10,
        atol=1e-12,
    )


def test_backend_name_recorded():
    assert kernels.BACKEND in ("numba", "numpy")
    if numba_impl is not None:
        assert kernels.BACKEND == "numba"
