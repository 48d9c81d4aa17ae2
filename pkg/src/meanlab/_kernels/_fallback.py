"""Pure numpy implementations of the window-maximum kernels."""

import numpy as np


def maximal_scan(prefix):
    """Max window average containing each point, with witnesses.

    ``prefix`` holds ``P[0] = 0, P[i+1] = P[i] + |f_i|``.  For every point l
    returns the largest ``(P[b+1] - P[a]) / (b - a + 1)`` over ``a <= l <= b``
    and the window attaining it (smallest a first, then smallest b).
    """
    P = np.ascontiguousarray(prefix, dtype=np.float64)
    n = len(P) - 1
    vals = np.full(n, -1.0)
    wa = np.zeros(n, dtype=np.int64)
    wb = np.zeros(n, dtype=np.int64)
    for a in range(n):
        length = n - a
        avg = (P[a + 1:] - P[a]) / np.arange(1, length + 1)
        rev = avg[::-1]
        acc = np.maximum.accumulate(rev)
        pos = np.maximum.accumulate(np.where(rev == acc, np.arange(length), -1))
        sm = acc[::-1]
        arg = (n - 1) - pos[::-1]
        better = sm > vals[a:]
        idx = np.nonzero(better)[0] + a
        vals[idx] = sm[better]
        wa[idx] = a
        wb[idx] = arg[better]
    return vals, wa, wb


def centered_window_max(rows, kmax):
    """For each row of length 2c+1 (center c), the largest average over the
    windows ``[c-k, c+l]`` with ``0 <= k, l <= kmax``."""
    V = np.ascontiguousarray(rows, dtype=np.float64)
    npts, width = V.shape
    c = (width - 1) // 2
    C = np.zeros((npts, width + 1))
    np.cumsum(V, axis=1, out=C[:, 1:])
    out = np.zeros(npts)
    ls = np.arange(kmax + 1)
    right = C[:, c + 1: c + kmax + 2]
    for k in range(kmax + 1):
        avg = (right - C[:, c - k][:, None]) / (k + 1 + ls)
        np.maximum(out, avg.max(axis=1), out=out)
    return out
