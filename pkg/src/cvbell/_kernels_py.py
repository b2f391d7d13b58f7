"""NumPy implementation of the photon-number-sector kernels.

Both kernels act on a tensor ``x`` of shape ``(A, B, R)`` whose first two axes
are the photon numbers of a mode pair and whose last axis is everything else.
A pair state ``|k, N-k>`` belongs to sector ``N``; sectors run over
``0 .. A + B - 2``.
"""
import numpy as np


def _sector(n, a, b):
    return np.arange(max(0, n - b + 1), min(n, a - 1) + 1)


def pair_project(x, phi):
    """``out[N, r] = sum_k phi[N, k] * x[k, N - k, r]``."""
    a, b, r = x.shape
    out = np.zeros((a + b - 1, r), dtype=np.complex128)
    for n in range(a + b - 1):
        k = _sector(n, a, b)
        out[n] = phi[n, k] @ x[k, n - k]
    return out


def pair_transform(x, blocks):
    """``out[k, N - k, r] = sum_j blocks[N, k, j] * x[j, N - j, r]`` inside the box."""
    a, b, r = x.shape
    out = np.zeros_like(x, dtype=np.complex128)
    for n in range(a + b - 1):
        k = _sector(n, a, b)
        out[k, n - k] = blocks[n][np.ix_(k, k)] @ x[k, n - k]
    return out
