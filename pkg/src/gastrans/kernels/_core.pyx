# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the nonlinear-recursion momentum assembly.

Mirrors the contracts of the pure backend (see _pure.py for the conventions:
coefficient layout, unknown order, matched-row order).  Same inputs, same
outputs, straight loops instead of index-table scatters.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def monomials(int M):
    """Cell-local unknown monomials (n, j), n + j <= M, excluding (0, 0)."""
    return [(n, j) for n in range(M + 1) for j in range(M + 1 - n)
            if (n, j) != (0, 0)]


def sas1_momentum_block(p0, q0, double c2, int M):
    """Momentum-row coefficients over one cell's level-r unknowns.

    Shape (M(M+1)/2, M(M+3)); see the pure backend for the layout.
    """
    cdef int W = M + 1
    cdef cnp.ndarray[double, ndim=2] P = \
        np.ascontiguousarray(np.asarray(p0, dtype=np.float64).reshape(W, W))
    cdef cnp.ndarray[double, ndim=2] Q = \
        np.ascontiguousarray(np.asarray(q0, dtype=np.float64).reshape(W, W))
    cdef int half = ((M + 1) * (M + 2)) // 2 - 1
    cdef int nm = M * (M + 1) // 2
    cdef int nc = 2 * half
    cdef cnp.ndarray[double, ndim=2] out = np.zeros((nm, nc))
    cdef cnp.ndarray[double, ndim=2] D0 = np.zeros((M, M))
    cdef int m, n, row, a, b, u, w, k, i, g
    for i in range(M):
        for g in range(M - i):
            D0[i, g] = (g + 1) * Q[i, g + 1] + c2 * (i + 1) * P[i + 1, g]
    for m in range(1, M + 1):
        for n in range(m):
            row = m * (m - 1) // 2 + n
            a = n
            b = m - n - 1
            k = 0
            for u in range(W):
                for w in range(W - u):
                    if u == 0 and w == 0:
                        continue
                    if w >= 1:
                        i = a - u
                        g = b - w + 1
                        if i >= 0 and g >= 0:
                            out[row, half + k] += w * P[i, g]
                    if u >= 1:
                        i = a - u + 1
                        g = b - w
                        if i >= 0 and g >= 0:
                            out[row, k] += c2 * u * P[i, g]
                    i = a - u
                    g = b - w
                    if i >= 0 and g >= 0:
                        out[row, k] += D0[i, g]
                    k += 1
    return out


def sas1_momentum_rhs(p_layers, q_layers, int r, double c2, double c3, int M):
    """Momentum-row RHS at recursion level r (levels 0..r-1 already solved)."""
    cdef int W = M + 1
    cdef cnp.ndarray[double, ndim=3] P = \
        np.ascontiguousarray(np.asarray(p_layers, dtype=np.float64)[:r])
    cdef cnp.ndarray[double, ndim=3] Q = \
        np.ascontiguousarray(np.asarray(q_layers, dtype=np.float64)[:r])
    cdef int nm = M * (M + 1) // 2
    cdef cnp.ndarray[double, ndim=1] acc = np.zeros(nm)
    cdef int a, b, row, i, g, j
    cdef double s, y
    for a in range(M):
        for b in range(M - a):
            row = (a + b) * (a + b + 1) // 2 + a
            s = 0.0
            for j in range(1, r):
                for i in range(a + 1):
                    for g in range(b + 1):
                        # d_dt(Q_{r-j}) + c2 d_dx(P_{r-j}) at (a-i, b-g)
                        y = 0.0
                        if b - g + 1 <= W - 1:
                            y += (b - g + 1) * Q[r - j, a - i, b - g + 1]
                        if a - i + 1 <= W - 1:
                            y += c2 * (a - i + 1) * P[r - j, a - i + 1, b - g]
                        s += P[j, i, g] * y
            for j in range(r):
                for i in range(a + 1):
                    for g in range(b + 1):
                        s += c3 * Q[j, i, g] * Q[r - 1 - j, a - i, b - g]
            acc[row] = -s
    return acc
