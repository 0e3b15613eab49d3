"""Pure-Python/numpy versions of the compiled kernels in ``_kernels.pyx``.

Both implementations follow the same visiting order and tie-breaking, so for
identical input they return identical output.
"""
from __future__ import annotations

import numpy as np

IMPROVE_EPS = 1e-10


def held_karp(D: np.ndarray) -> np.ndarray:
    """Optimal tour order (starting at vertex 0) by the subset dynamic program."""
    D = np.ascontiguousarray(D, dtype=np.float64)
    n = D.shape[0]
    if n <= 3:
        return np.arange(n, dtype=np.intp)
    k = n - 1
    full = 1 << k
    Dk = D[1:, 1:]
    dp = np.full((full, k), np.inf)
    parent = np.full((full, k), -1, dtype=np.int8)
    for j in range(k):
        dp[1 << j, j] = D[0, j + 1]
    masks = np.arange(full, dtype=np.int64)
    popcount = np.zeros(full, dtype=np.int64)
    for j in range(k):
        popcount += (masks >> j) & 1
    for size in range(1, k):
        layer = masks[popcount == size]
        rows = dp[layer]
        for t in range(k):
            free = ((layer >> t) & 1) == 0
            sub = layer[free]
            vals = rows[free] + Dk[:, t]
            arg = np.argmin(vals, axis=1)
            target = sub | (1 << t)
            dp[target, t] = vals[np.arange(len(sub)), arg]
            parent[target, t] = arg
    closing = dp[full - 1] + D[1:, 0]
    j = int(np.argmin(closing))
    mask = full - 1
    path = []
    while j >= 0:
        path.append(j + 1)
        pj = int(parent[mask, j])
        mask ^= 1 << j
        j = pj
    return np.array([0] + path[::-1], dtype=np.intp)


def stoer_wagner(W: np.ndarray) -> tuple[float, np.ndarray]:
    """Global minimum cut of a dense symmetric nonnegative weight matrix.

    Returns the cut weight and a boolean mask of one shore.
    """
    W = np.array(W, dtype=np.float64, copy=True)
    n = W.shape[0]
    if n < 2:
        raise ValueError("a cut needs at least two vertices")
    owner = np.arange(n)
    active = np.ones(n, dtype=bool)
    best = np.inf
    best_side = np.zeros(n, dtype=bool)
    for _ in range(n - 1):
        n_active = int(active.sum())
        added = ~active
        w = np.zeros(n)
        s = t = -1
        cut = 0.0
        for step in range(n_active):
            v = int(np.argmax(np.where(added, -np.inf, w)))
            added[v] = True
            if step == n_active - 1:
                cut = w[v]
                t = v
            else:
                w += W[v]
                s = v
        if cut < best:
            best = float(cut)
            best_side = owner == t
        W[s, :] += W[t, :]
        W[:, s] += W[:, t]
        W[s, s] = 0.0
        W[t, :] = 0.0
        W[:, t] = 0.0
        active[t] = False
        owner[owner == t] = s
        if best <= 0.0:
            break
    return best, best_side


def _reverse(order, pos, start, end, n):
    length = (end - start) % n + 1
    if 2 * length > n:
        start, end = (end + 1) % n, (start - 1) % n
        length = n - length
    for k in range(length // 2):
        p = (start + k) % n
        q = (end - k) % n
        order[p], order[q] = order[q], order[p]
        pos[order[p]] = p
        pos[order[q]] = q


def two_opt(order: np.ndarray, D: np.ndarray, nbrs: np.ndarray) -> np.ndarray:
    """First-improvement 2-opt over candidate neighbour lists.

    ``nbrs[a]`` lists candidate partners of ``a`` by ascending distance.
    """
    order = [int(v) for v in order]
    n = len(order)
    if n < 4:
        return np.array(order, dtype=np.intp)
    D = np.asarray(D, dtype=np.float64).tolist()
    nb = np.asarray(nbrs).tolist()
    pos = [0] * n
    for i, v in enumerate(order):
        pos[v] = i
    improved = True
    while improved:
        improved = False
        for a in range(n):
            while True:
                moved = False
                i = pos[a]
                b = order[(i + 1) % n]
                dab = D[a][b]
                for c in nb[a]:
                    dac = D[a][c]
                    if dac >= dab:
                        break
                    j = pos[c]
                    d = order[(j + 1) % n]
                    if c == b or d == a:
                        continue
                    if dac + D[b][d] - dab - D[c][d] < -IMPROVE_EPS:
                        _reverse(order, pos, (i + 1) % n, j, n)
                        moved = True
                        break
                if not moved:
                    b = order[(i - 1) % n]
                    dab = D[a][b]
                    for c in nb[a]:
                        dac = D[a][c]
                        if dac >= dab:
                            break
                        j = pos[c]
                        d = order[(j - 1) % n]
                        if c == b or d == a:
                            continue
                        if dac + D[b][d] - dab - D[c][d] < -IMPROVE_EPS:
                            _reverse(order, pos, i, (j - 1) % n, n)
                            moved = True
                            break
                if not moved:
                    break
                improved = True
    return np.array(order, dtype=np.intp)
