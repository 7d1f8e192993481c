"""Numpy fallback for the slot-simulation kernel.

Same contract as the compiled agenet._agekernel.sim_block and bit-identical
output: all accumulators are int64 and every update below is exact integer
arithmetic, so chunking and backend choice never change a result.

The per-link statistics for one block are derived from the success slot
indices instead of a slot loop. With successes at local slots j_1 < .. < j_k
and carry-in age a0 (a virtual previous success at local index -a0):

  * the i-th pre-reset age is the gap to the previous success, so the block
    adds (a0 + j_1) + sum of diffs = a0 + j_k to the peak accumulator;
  * the post-step age at slot j is j - last(j) + 1 where last(j) is the most
    recent success index <= j (or -a0), so the block's age-sum contribution
    is L(L+1)/2 - sum_j last(j), a piecewise-constant integer sum.
"""

from __future__ import annotations

import numpy as np

_SENTINEL = np.int64(-(1 << 62))


def sim_block(u, s, indptr, indices, age, success_count, peak_sum, gap_sq_sum, age_sum,
              trace_age=None, trace_success=None):
    """Advance every link through one block of slots.

    u, s: uint8 arrays of shape (L, n), attempt and channel indicators.
    indptr, indices: int64 CSR of the interferer sets.
    age, success_count, peak_sum, gap_sq_sum, age_sum: int64 (n,) accumulators,
    updated in place; ``age`` carries the pre-step age across blocks.
    trace_age / trace_success: optional (L, n) outputs receiving the pre-step
    age and the success indicator per slot.
    """
    L, n = u.shape
    ub = u.astype(bool)
    success = ub & s.astype(bool)
    for e in range(n):
        nbr = indices[indptr[e]:indptr[e + 1]]
        if nbr.size:
            success[:, e] &= ~ub[:, nbr].any(axis=1)
    if trace_success is not None:
        trace_success[...] = success

    arange = np.arange(L, dtype=np.int64)
    tri = L * (L + 1) // 2
    for e in range(n):
        a0 = int(age[e])
        col = success[:, e]
        if trace_age is not None:
            last = np.where(col, arange, _SENTINEL)
            np.maximum.accumulate(last, out=last)
            np.maximum(last, np.int64(-a0), out=last)
            post = arange - last + 1
            trace_age[0, e] = a0
            trace_age[1:, e] = post[:-1]
        idx = np.flatnonzero(col)
        k = idx.size
        if k:
            gaps = np.diff(idx)
            first = a0 + int(idx[0])
            success_count[e] += k
            peak_sum[e] += first + int(gaps.sum())
            gap_sq_sum[e] += first * first + int(np.dot(gaps, gaps))
            last_sum = (
                -a0 * int(idx[0])
                + int(np.dot(idx[:-1], gaps))
                + int(idx[-1]) * (L - int(idx[-1]))
            )
            age_sum[e] += tri - last_sum
            age[e] = L - int(idx[-1])
        else:
            age_sum[e] += L * a0 + tri
            age[e] = a0 + L
