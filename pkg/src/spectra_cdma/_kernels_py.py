"""Pure-numpy fallback for the correlation-assembly kernel.

Same contract as the compiled ``_corrcore.corr_blocks``: per lag, the chip
product vector is segment-reduced at every symbol-block boundary of either
index and scattered into the block-correlation matrix.
"""

import numpy as np


def corr_blocks(sk, sl, g, d_lo, n_chips, nblocks, out):
    """out[m, n] += sum_d g[d - d_lo] * sum_p sk[p] sl[p - d] over chips p in
    symbol block m with p - d in symbol block n."""
    P = n_chips * nblocks
    for di in range(len(g)):
        gd = g[di]
        if gd == 0.0:
            continue
        d = d_lo + di
        a = max(0, d)
        b = min(P, P + d)
        if a >= b:
            continue
        v = sk[a:b] * sl[a - d : b - d]
        # segment boundaries: block of p changes at multiples of n_chips,
        # block of p-d changes where p == d (mod n_chips)
        first_m = a if a % n_chips == 0 else (a // n_chips + 1) * n_chips
        cuts_m = np.arange(first_m, b, n_chips, dtype=np.int64)
        off = a + (d - a) % n_chips
        cuts_n = np.arange(off, b, n_chips, dtype=np.int64)
        bounds = np.unique(np.concatenate(([a], cuts_m, cuts_n)))
        bounds = bounds[bounds < b]
        sums = np.add.reduceat(v, bounds - a)
        m_idx = bounds // n_chips
        n_idx = (bounds - d) // n_chips
        out[m_idx, n_idx] += gd * sums
    return None
