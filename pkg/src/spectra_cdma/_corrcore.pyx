# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel for crosscorrelation-matrix assembly.

Accumulates, for one ordered user pair, the per-symbol-block correlations of
two chip trains over a window of integer lags with per-lag weights.  This
inner loop dominates Monte Carlo runtime; a numpy fallback with identical
semantics lives in ``_kernels_py``.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def corr_blocks(
    double[::1] sk,
    double[::1] sl,
    double[::1] g,
    long d_lo,
    long n_chips,
    long nblocks,
    double[:, ::1] out,
):
    """out[m, n] += sum_d g[d - d_lo] * sum_p sk[p] sl[p - d] over chips p in
    symbol block m with p - d in symbol block n."""
    cdef long P = n_chips * nblocks
    cdef long nlags = g.shape[0]
    cdef long di, d, m, a, b, qa, n1, split, p
    cdef double gd, s1, s2
    for di in range(nlags):
        gd = g[di]
        if gd == 0.0:
            continue
        d = d_lo + di
        for m in range(nblocks):
            a = m * n_chips
            b = a + n_chips
            if d > 0 and a < d:
                a = d
            if d < 0 and b > P + d:
                b = P + d
            if a >= b:
                continue
            qa = a - d
            n1 = qa / n_chips
            split = (n1 + 1) * n_chips + d
            if split > b:
                split = b
            s1 = 0.0
            for p in range(a, split):
                s1 += sk[p] * sl[p - d]
            out[m, n1] += gd * s1
            if split < b:
                s2 = 0.0
                for p in range(split, b):
                    s2 += sk[p] * sl[p - d]
                out[m, n1 + 1] += gd * s2
    return None
