# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled slot-simulation kernel: straight per-slot loop over a block.

Contract and output are identical to agenet._agekernel_py.sim_block; all
accumulators are int64 so results are exact and backend-independent.
"""


def sim_block(const unsigned char[:, ::1] u, const unsigned char[:, ::1] s,
              const long long[::1] indptr, const long long[::1] indices,
              long long[::1] age, long long[::1] success_count,
              long long[::1] peak_sum, long long[::1] gap_sq_sum,
              long long[::1] age_sum,
              long long[:, ::1] trace_age=None,
              unsigned char[:, ::1] trace_success=None):
    cdef Py_ssize_t L = u.shape[0]
    cdef Py_ssize_t n = u.shape[1]
    cdef Py_ssize_t j, e
    cdef long long k
    cdef long long a
    cdef bint ok
    cdef bint do_trace = trace_age is not None
    for j in range(L):
        for e in range(n):
            a = age[e]
            ok = u[j, e] != 0 and s[j, e] != 0
            if ok:
                for k in range(indptr[e], indptr[e + 1]):
                    if u[j, indices[k]] != 0:
                        ok = False
                        break
            if do_trace:
                trace_age[j, e] = a
                trace_success[j, e] = 1 if ok else 0
            if ok:
                success_count[e] += 1
                peak_sum[e] += a
                gap_sq_sum[e] += a * a
                age[e] = 1
            else:
                age[e] = a + 1
            age_sum[e] += age[e]
