# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled photon-number-sector kernels; see ``_kernels_py`` for the contract.

Inside a C-contiguous ``(A, B, R)`` box the rows ``x[k, N - k, :]`` of one
sector sit at a constant stride of ``(B - 1) * R`` elements, so every sector
is a strided matrix that BLAS can consume in place.  The NumPy version has to
gather and scatter each sector through fancy indexing instead.
"""
import numpy as np

from scipy.linalg.cython_blas cimport dgemv, zgemm


def pair_project(const double complex[:, :, ::1] x, const double[:, ::1] phi):
    cdef int a = x.shape[0], b = x.shape[1], r = x.shape[2]
    cdef int nsec = a + b - 1
    out_arr = np.zeros((nsec, r), dtype=np.complex128)
    if r == 0:
        return out_arr
    cdef double[:, ::1] outr = out_arr.view(np.float64)
    cdef const double* xp = <const double*> &x[0, 0, 0]
    cdef int n, klo, khi, count
    cdef int m = 2 * r
    cdef int lda = (b - 1) * m if b > 1 else m
    cdef int inc = 1
    cdef double one = 1.0, zero = 0.0
    cdef char trans = b'N'
    with nogil:
        for n in range(nsec):
            klo = n - b + 1 if n - b + 1 > 0 else 0
            khi = n if n < a - 1 else a - 1
            count = khi - klo + 1
            # column-major view: (2R x count) matrix whose columns are sector rows
            dgemv(&trans, &m, &count, &one,
                  <double*> (xp + (<Py_ssize_t> klo * b + (n - klo)) * m), &lda,
                  <double*> &phi[n, klo], &inc, &zero, &outr[n, 0], &inc)
    return out_arr


def pair_transform(const double complex[:, :, ::1] x, const double complex[:, :, ::1] blocks):
    cdef int a = x.shape[0], b = x.shape[1], r = x.shape[2]
    cdef int nsec = a + b - 1
    out_arr = np.zeros((a, b, r), dtype=np.complex128)
    if r == 0:
        return out_arr
    cdef double complex[:, :, ::1] out = out_arr
    cdef const double complex* xp = &x[0, 0, 0]
    cdef double complex* op = &out[0, 0, 0]
    cdef int n, klo, khi, count
    cdef int ld = (b - 1) * r if b > 1 else r
    cdef int ldb = nsec
    cdef double complex one = 1.0, zero = 0.0
    cdef char trans = b'N'
    cdef Py_ssize_t start
    with nogil:
        for n in range(nsec):
            klo = n - b + 1 if n - b + 1 > 0 else 0
            khi = n if n < a - 1 else a - 1
            count = khi - klo + 1
            start = (<Py_ssize_t> klo * b + (n - klo)) * r
            # out_sec^T (R x K) = x_sec^T (R x K) . blocks_sec^T (K x K), all column-major
            zgemm(&trans, &trans, &r, &count, &count, &one,
                  <double complex*> (xp + start), &ld,
                  <double complex*> &blocks[n, klo, klo], &ldb,
                  &zero, op + start, &ld)
    return out_arr
