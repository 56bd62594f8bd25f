# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loop for the bit-flipping decoder family.

Mirrors gdbfm.decoder.run_python operation-for-operation (same floating
point evaluation order, same RNG draw schedule), so outputs are
bit-for-bit identical to the pure-numpy path.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

# variant codes shared with gdbfm.kernels
DEF V_BF = 0
DEF V_GDBF = 1
DEF V_PGDBF = 2
DEF V_NGDBF = 3


def run(const cnp.int32_t[::1] chk_ptr, const cnp.int32_t[::1] chk_adj,
        const cnp.int32_t[::1] var_ptr, const cnp.int32_t[::1] var_adj,
        const cnp.float64_t[::1] y, int variant, double alpha, double delta,
        double p, const cnp.float64_t[::1] rho_lookup, int big_l,
        double ngdbf_sigma, int max_iter, object gen):
    """Run one decode; returns (x, success, iterations_used, total_flips)."""
    cdef int N = var_ptr.shape[0] - 1
    cdef int M = chk_ptr.shape[0] - 1
    cdef cnp.ndarray[cnp.int8_t, ndim=1] x_arr = np.empty(N, dtype=np.int8)
    cdef cnp.int8_t[::1] x = x_arr
    cdef cnp.ndarray[cnp.int8_t, ndim=1] c_arr = np.empty(M, dtype=np.int8)
    cdef cnp.int8_t[::1] c = c_arr
    cdef cnp.ndarray[cnp.float64_t, ndim=1] e_arr = np.empty(N, dtype=np.float64)
    cdef cnp.float64_t[::1] E = e_arr
    cdef cnp.ndarray[cnp.int32_t, ndim=1] l_arr = np.empty(N, dtype=np.int32)
    cdef cnp.int32_t[::1] l = l_arr
    cdef cnp.ndarray[cnp.int64_t, ndim=1] cand_arr = np.empty(N, dtype=np.int64)
    cdef cnp.int64_t[::1] cand = cand_arr
    cdef cnp.float64_t[::1] noise
    cdef cnp.float64_t[::1] draws
    cdef int n, m, i, it, k, nc, prod, unsat, deg
    cdef int satisfied, phases = 0
    cdef long total_flips = 0
    cdef double e, emin, th
    cdef bint need_draws = p < 1.0
    cdef bint need_noise = variant == V_NGDBF and ngdbf_sigma > 0.0

    for n in range(N):
        x[n] = 1 if y[n] >= 0.0 else -1
        l[n] = big_l + 1

    for it in range(max_iter):
        satisfied = 1
        for m in range(M):
            prod = 1
            for i in range(chk_ptr[m], chk_ptr[m + 1]):
                prod *= x[chk_adj[i]]
            c[m] = <cnp.int8_t> prod
            if prod != 1:
                satisfied = 0
        if satisfied:
            return x_arr, True, max(1, phases), total_flips

        if variant == V_BF:
            nc = 0
            for n in range(N):
                unsat = 0
                deg = var_ptr[n + 1] - var_ptr[n]
                for i in range(var_ptr[n], var_ptr[n + 1]):
                    if c[var_adj[i]] == -1:
                        unsat += 1
                if 2 * unsat > deg:
                    cand[nc] = n
                    nc += 1
            for k in range(nc):
                n = <int> cand[k]
                x[n] = -x[n]
            phases += 1
            total_flips += nc
            continue

        emin = 0.0
        for n in range(N):
            if l[n] > big_l:
                l[n] = big_l + 1
            else:
                l[n] = l[n] + 1
            e = alpha * (x[n] * y[n])
            for i in range(var_ptr[n], var_ptr[n + 1]):
                e = e + c[var_adj[i]]
            e = e + rho_lookup[l[n]]
            E[n] = e
        if need_noise:
            noise = gen.standard_normal(N)
            for n in range(N):
                E[n] = E[n] + ngdbf_sigma * noise[n]
        emin = E[0]
        for n in range(1, N):
            if E[n] < emin:
                emin = E[n]
        th = emin + delta

        nc = 0
        for n in range(N):
            if E[n] <= th:
                cand[nc] = n
                nc += 1
        if need_draws:
            draws = gen.random(nc)
            k = 0
            for i in range(nc):
                if draws[i] < p:
                    cand[k] = cand[i]
                    k += 1
            nc = k
        for k in range(nc):
            n = <int> cand[k]
            x[n] = -x[n]
            l[n] = 0
        phases += 1
        total_flips += nc

    satisfied = 1
    for m in range(M):
        prod = 1
        for i in range(chk_ptr[m], chk_ptr[m + 1]):
            prod *= x[chk_adj[i]]
        if prod != 1:
            satisfied = 0
            break
    if satisfied:
        return x_arr, True, max(1, phases), total_flips
    return x_arr, False, max_iter, total_flips
