# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: Held-Karp, Stoer-Wagner and neighbour-list 2-opt.

Mirrors ``_fallback.py`` step for step, including tie-breaking.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()

cdef double IMPROVE_EPS = 1e-10


def held_karp(D_in):
    cdef const double[:, ::1] D = np.ascontiguousarray(D_in, dtype=np.float64)
    cdef Py_ssize_t n = D.shape[0]
    if n <= 3:
        return np.arange(n, dtype=np.intp)
    cdef Py_ssize_t k = n - 1
    cdef Py_ssize_t full = (<Py_ssize_t>1) << k
    dp_arr = np.full((full, k), np.inf)
    parent_arr = np.full((full, k), -1, dtype=np.int8)
    cdef double[:, ::1] dp = dp_arr
    cdef signed char[:, ::1] parent = parent_arr
    cdef Py_ssize_t mask, j, t, nm
    cdef double base, cand
    for j in range(k):
        dp[(<Py_ssize_t>1) << j, j] = D[0, j + 1]
    for mask in range(1, full):
        for j in range(k):
            if not (mask >> j) & 1:
                continue
            base = dp[mask, j]
            if base == INFINITY:
                continue
            for t in range(k):
                if (mask >> t) & 1:
                    continue
                nm = mask | ((<Py_ssize_t>1) << t)
                cand = base + D[j + 1, t + 1]
                if cand < dp[nm, t]:
                    dp[nm, t] = cand
                    parent[nm, t] = <signed char>j
    cdef double best = INFINITY
    cdef Py_ssize_t bj = 0
    for j in range(k):
        cand = dp[full - 1, j] + D[j + 1, 0]
        if cand < best:
            best = cand
            bj = j
    path = []
    mask = full - 1
    cdef Py_ssize_t jj = bj, pj
    while jj >= 0:
        path.append(jj + 1)
        pj = parent[mask, jj]
        mask ^= (<Py_ssize_t>1) << jj
        jj = pj
    return np.array([0] + path[::-1], dtype=np.intp)


def stoer_wagner(W_in):
    W_arr = np.array(W_in, dtype=np.float64, copy=True)
    cdef double[:, ::1] W = W_arr
    cdef Py_ssize_t n = W.shape[0]
    if n < 2:
        raise ValueError("a cut needs at least two vertices")
    owner_arr = np.arange(n, dtype=np.intp)
    cdef Py_ssize_t[::1] owner = owner_arr
    active_arr = np.ones(n, dtype=np.uint8)
    added_arr = np.zeros(n, dtype=np.uint8)
    w_arr = np.zeros(n)
    cdef unsigned char[::1] active = active_arr
    cdef unsigned char[::1] added = added_arr
    cdef double[::1] w = w_arr
    cdef double best = INFINITY, cut = 0.0, top
    cdef Py_ssize_t phase, step, u, v, s, t, n_active, best_t_round = -1
    best_side = np.zeros(n, dtype=bool)
    n_active = n
    for phase in range(n - 1):
        for u in range(n):
            added[u] = 0 if active[u] else 1
            w[u] = 0.0
        s = -1
        t = -1
        for step in range(n_active):
            v = -1
            top = -INFINITY
            for u in range(n):
                if not added[u] and w[u] > top:
                    top = w[u]
                    v = u
            added[v] = 1
            if step == n_active - 1:
                cut = w[v]
                t = v
            else:
                for u in range(n):
                    w[u] += W[v, u]
                s = v
        if cut < best:
            best = cut
            best_side = owner_arr == t
        for u in range(n):
            W[s, u] += W[t, u]
        for u in range(n):
            W[u, s] += W[u, t]
        W[s, s] = 0.0
        for u in range(n):
            W[t, u] = 0.0
            W[u, t] = 0.0
        active[t] = 0
        n_active -= 1
        for u in range(n):
            if owner[u] == t:
                owner[u] = s
        if best <= 0.0:
            break
    return float(best), best_side


cdef inline void _reverse(Py_ssize_t[::1] order, Py_ssize_t[::1] pos,
                          Py_ssize_t start, Py_ssize_t end, Py_ssize_t n) noexcept:
    cdef Py_ssize_t length = ((end - start) % n + n) % n + 1
    cdef Py_ssize_t k, p, q, tmp
    if 2 * length > n:
        tmp = (end + 1) % n
        end = (start - 1 + n) % n
        start = tmp
        length = n - length
    for k in range(length // 2):
        p = (start + k) % n
        q = ((end - k) % n + n) % n
        tmp = order[p]
        order[p] = order[q]
        order[q] = tmp
        pos[order[p]] = p
        pos[order[q]] = q


def two_opt(order_in, D_in, nbrs_in):
    order_arr = np.array(order_in, dtype=np.intp, copy=True)
    cdef Py_ssize_t n = order_arr.shape[0]
    if n < 4:
        return order_arr
    cdef const double[:, ::1] D = np.ascontiguousarray(D_in, dtype=np.float64)
    cdef const Py_ssize_t[:, ::1] nb = np.ascontiguousarray(nbrs_in, dtype=np.intp)
    cdef Py_ssize_t K = nb.shape[1]
    cdef Py_ssize_t[::1] order = order_arr
    pos_arr = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t[::1] pos = pos_arr
    cdef Py_ssize_t i, j, a, b, c, d, r
    cdef double dab, dac
    cdef bint improved = True, moved
    for i in range(n):
        pos[order[i]] = i
    while improved:
        improved = False
        for a in range(n):
            while True:
                moved = False
                i = pos[a]
                b = order[(i + 1) % n]
                dab = D[a, b]
                for r in range(K):
                    c = nb[a, r]
                    dac = D[a, c]
                    if dac >= dab:
                        break
                    j = pos[c]
                    d = order[(j + 1) % n]
                    if c == b or d == a:
                        continue
                    if dac + D[b, d] - dab - D[c, d] < -IMPROVE_EPS:
                        _reverse(order, pos, (i + 1) % n, j, n)
                        moved = True
                        break
                if not moved:
                    b = order[(i - 1 + n) % n]
                    dab = D[a, b]
                    for r in range(K):
                        c = nb[a, r]
                        dac = D[a, c]
                        if dac >= dab:
                            break
                        j = pos[c]
                        d = order[(j - 1 + n) % n]
                        if c == b or d == a:
                            continue
                        if dac + D[b, d] - dab - D[c, d] < -IMPROVE_EPS:
                            _reverse(order, pos, i, (j - 1 + n) % n, n)
                            moved = True
                            break
                if not moved:
                    break
                improved = True
    return order_arr
