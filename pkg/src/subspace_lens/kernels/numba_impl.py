"""Numba-compiled kernels, signature-compatible with ``numpy_impl``.

Serial loops only: parallel reductions would make summation order, and
therefore scene bytes, run-dependent. fastmath stays off for the same
reason.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def dist_matrix(X):
    n = X.shape[0]
    D = X.shape[1]
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            s = 0.0
            for a in range(D):
                t = X[i, a] - X[j, a]
                s += t * t
            d = np.sqrt(s)
            out[i, j] = d
            out[j, i] = d
    return out


@njit(cache=True)
def stress_total(DX, DY):
    n = DX.shape[0]
    s = 0.0
    for i in range(n):
        for j in range(n):
            t = DX[i, j] - DY[i, j]
            s += t * t
    return 0.5 * s


@njit(cache=True)
def stress_gradient(DX, Y, DY):
    n, d = Y.shape
    g = np.zeros((n, d))
    for i in range(n):
        for j in range(n):
            if j == i:
                continue
            c = 2.0 * (1.0 - DX[i, j] / DY[i, j])
            for a in range(d):
                g[i, a] += c * (Y[i, a] - Y[j, a])
    return g


@njit(cache=True)
def guttman_step(DX, Y, DY):
    n, d = Y.shape
    out = np.zeros((n, d))
    for i in range(n):
        diag = 0.0
        for j in range(n):
            if j == i:
                continue
            b = 0.0
            if DY[i, j] > 0.0:
                b = -DX[i, j] / DY[i, j]
            diag -= b
            for a in range(d):
                out[i, a] += b * Y[j, a]
        for a in range(d):
            out[i, a] += diag * Y[i, a]
    return out / n


@njit(cache=True)
def pointwise_blocks(X, Y, DX, DY):
    n, d = Y.shape
    D = X.shape[1]
    H = np.zeros((n, d, d))
    B = np.zeros((n, d, D))
    for i in range(n):
        for k in range(n):
            if k == i:
                continue
            dx = DX[i, k]
            dy = DY[i, k]
            ratio = dx / dy
            c3 = ratio / (dy * dy)
            for a in range(d):
                H[i, a, a] += 2.0 * (1.0 - ratio)
                for b in range(d):
                    H[i, a, b] += 2.0 * c3 * (Y[i, a] - Y[k, a]) * (Y[i, b] - Y[k, b])
            cxy = -2.0 / (dy * dx)
            for a in range(d):
                for b in range(D):
                    B[i, a, b] += cxy * (Y[i, a] - Y[k, a]) * (X[i, b] - X[k, b])
    return H, B


@njit(cache=True)
def point_stress(dx_row, Y, i, yi):
    n, d = Y.shape
    s = 0.0
    for j in range(n):
        if j == i:
            continue
        t = 0.0
        for a in range(d):
            u = yi[a] - Y[j, a]
            t += u * u
        r = dx_row[j] - np.sqrt(t)
        s += r * r
    return s


@njit(cache=True)
def point_gradient(dx_row, Y, i, yi):
    n, d = Y.shape
    g = np.zeros(d)
    for j in range(n):
        if j == i:
            continue
        t = 0.0
        for a in range(d):
            u = yi[a] - Y[j, a]
            t += u * u
        dist = np.sqrt(t)
        c = 2.0 * (1.0 - dx_row[j] / dist)
        for a in range(d):
            g[a] += c * (yi[a] - Y[j, a])
    return g
