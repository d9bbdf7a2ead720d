# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Cython kernel for the d^j(pi/2) edge-seeded recursion.

Same algorithm as _dkernel_py (see that module for the derivation); here each
row runs as a scalar C loop with inline overflow rescaling, which avoids the
per-step numpy temporaries of the fallback.
"""

from libc.math cimport fabs, sqrt

import numpy as np

cimport numpy as cnp

cnp.import_array()

DEF CEIL = 1e120
DEF SHRINK = 1e-140


def dmatrix_pi_half(int two_j):
    """Full (two_j+1) x (two_j+1) matrix of d^j_{m m'}(pi/2), m and m' descending."""
    cdef int n = two_j + 1
    cdef int ncols = (n + 1) // 2
    cdef cnp.ndarray[cnp.double_t, ndim=2] out = np.empty((n, n), dtype=np.float64)
    cdef double[:, :] o = out
    cdef double j = two_j / 2.0
    cdef int i, ip, k, tgt
    cdef double m, mp, cplus, cminus, prev, curr, nxt, norm2, inv, sign
    if n == 1:
        out[0, 0] = 1.0
        return out
    for i in range(n):
        m = j - i
        prev = 0.0
        curr = 1.0
        o[i, 0] = curr
        for ip in range(1, ncols):
            mp = j - (ip - 1)
            cplus = sqrt((j - mp) * (j + mp + 1.0))
            cminus = sqrt((j + mp) * (j - mp + 1.0))
            nxt = (-2.0 * m * curr - cplus * prev) / cminus
            o[i, ip] = nxt
            prev = curr
            curr = nxt
            if fabs(curr) > CEIL:
                for k in range(ip + 1):
                    o[i, k] *= SHRINK
                prev *= SHRINK
                curr *= SHRINK
        norm2 = 0.0
        if two_j % 2 == 0:
            for k in range(ncols - 1):
                norm2 += 2.0 * o[i, k] * o[i, k]
            norm2 += o[i, ncols - 1] * o[i, ncols - 1]
        else:
            for k in range(ncols):
                norm2 += 2.0 * o[i, k] * o[i, k]
        inv = 1.0 / sqrt(norm2)
        for k in range(ncols):
            o[i, k] *= inv
        sign = 1.0 if (two_j - i) % 2 == 0 else -1.0
        for ip in range(ncols):
            tgt = n - 1 - ip
            if tgt != ip:
                o[i, tgt] = sign * o[i, ip]
    return out
