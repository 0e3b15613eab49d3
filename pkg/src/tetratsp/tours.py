"""Tours, geometric validity checks, trip decomposition and the canonical
optimum tour of T'(n,m) with its closed-form length.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import PreconditionError
from .instances import (
    Family,
    Instance,
    Kind,
    VertexLabel,
    build_modified,
    satisfies_size_assumption,
)
from .tsplib import Metric, distance_matrix

ORIENT_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class Tour:
    instance: Instance
    order: tuple[int, ...]

    def __post_init__(self) -> None:
        order = tuple(int(v) for v in self.order)
        object.__setattr__(self, "order", order)
        if sorted(order) != list(range(self.instance.n_vertices)):
            raise ValueError("a tour must visit every vertex exactly once")

    def __len__(self) -> int:
        return len(self.order)

    def edges(self) -> list[tuple[int, int]]:
        k = len(self.order)
        return [(self.order[i], self.order[(i + 1) % k]) for i in range(k)]

    def canonical(self) -> Tour:
        """Rotate to start at vertex 0, oriented so order[1] < order[-1]."""
        order = list(self.order)
        r = order.index(0)
        order = order[r:] + order[:r]
        if len(order) > 2 and order[1] > order[-1]:
            order = [order[0]] + order[1:][::-1]
        return Tour(self.instance, tuple(order))

    def labels(self) -> list[str]:
        return [str(self.instance.labels[v]) for v in self.order]

    def length(self, metric: Metric | str = Metric.EXACT) -> float:
        return tour_length(self, metric)


def tour_from_labels(inst: Instance, labels: Iterable[VertexLabel | str]) -> Tour:
    return Tour(inst, tuple(inst.index(lab) for lab in labels))


def tour_length(tour: Tour, metric: Metric | str = Metric.EXACT) -> float:
    D = distance_matrix(tour.instance, metric)
    order = np.asarray(tour.order, dtype=np.intp)
    if len(order) < 2:
        return 0.0
    return float(sum(D[order, np.roll(order, -1)].tolist()))


def format_tour(tour: Tour) -> str:
    """One line of 1-based vertex ids."""
    return " ".join(str(v + 1) for v in tour.order) + "\n"


def parse_tour(text: str, inst: Instance) -> Tour:
    ids = [int(tok) for tok in text.split()]
    return Tour(inst, tuple(v - 1 for v in ids))


# -- geometry ---------------------------------------------------------------

def _orient(ax, ay, bx, by, cx, cy):
    """Sign of the turn a -> b -> c, zero when within a relative tolerance."""
    ux, uy = bx - ax, by - ay
    vx, vy = cx - ax, cy - ay
    cross = ux * vy - uy * vx
    scale = np.hypot(ux, uy) * np.hypot(vx, vy)
    return np.where(np.abs(cross) <= ORIENT_EPS * scale, 0, np.sign(cross)).astype(np.int8)


def is_simple_polygon(tour: Tour) -> bool:
    """True iff no two edges meet except consecutive edges at their shared
    vertex. Collinear overlap counts as an intersection."""
    k = len(tour.order)
    if k < 3:
        return False
    P = tour.instance.coords[list(tour.order)]
    Q = np.roll(P, -1, axis=0)

    # consecutive edges (i, i+1) share Q[i] == P[i+1]; they must not fold back
    v = Q
    prev_pt = P
    next_pt = np.roll(Q, -1, axis=0)
    o = _orient(prev_pt[:, 0], prev_pt[:, 1], v[:, 0], v[:, 1], next_pt[:, 0], next_pt[:, 1])
    dot = (prev_pt[:, 0] - v[:, 0]) * (next_pt[:, 0] - v[:, 0]) + (prev_pt[:, 1] - v[:, 1]) * (next_pt[:, 1] - v[:, 1])
    if np.any((o == 0) & (dot > 0)):
        return False
    if k == 3:
        return True

    i, j = np.triu_indices(k, 2)
    keep = ~((i == 0) & (j == k - 1))
    i, j = i[keep], j[keep]
    pi, qi, pj, qj = P[i], Q[i], P[j], Q[j]
    o1 = _orient(pi[:, 0], pi[:, 1], qi[:, 0], qi[:, 1], pj[:, 0], pj[:, 1])
    o2 = _orient(pi[:, 0], pi[:, 1], qi[:, 0], qi[:, 1], qj[:, 0], qj[:, 1])
    o3 = _orient(pj[:, 0], pj[:, 1], qj[:, 0], qj[:, 1], pi[:, 0], pi[:, 1])
    o4 = _orient(pj[:, 0], pj[:, 1], qj[:, 0], qj[:, 1], qi[:, 0], qi[:, 1])
    collinear = ((o1 == 0) & (o2 == 0)) | ((o3 == 0) & (o4 == 0))
    crossing = ~collinear & (o1 * o2 <= 0) & (o3 * o4 <= 0)
    if np.any(crossing):
        return False
    if np.any(collinear):
        d = qi - pi
        t1 = np.einsum("ij,ij->i", pj - pi, d)
        t2 = np.einsum("ij,ij->i", qj - pi, d)
        dd = np.einsum("ij,ij->i", d, d)
        lo = np.minimum(t1, t2)
        hi = np.maximum(t1, t2)
        slack = ORIENT_EPS * dd
        overlap = collinear & (hi >= -slack) & (lo <= dd + slack)
        if np.any(overlap):
            return False
    return True


def _hull_boundary(coords: np.ndarray) -> list[int]:
    """Vertices on the convex-hull boundary (corners and points on edges),
    counterclockwise. Returns [] for collinear point sets."""
    n = len(coords)
    idx = sorted(range(n), key=lambda i: (coords[i, 0], coords[i, 1]))

    def cross(o, a, b):
        return ((coords[a, 0] - coords[o, 0]) * (coords[b, 1] - coords[o, 1])
                - (coords[a, 1] - coords[o, 1]) * (coords[b, 0] - coords[o, 0]))

    def chain(points):
        out: list[int] = []
        for p in points:
            while len(out) >= 2:
                c = cross(out[-2], out[-1], p)
                scale = (np.hypot(*(coords[out[-1]] - coords[out[-2]]))
                         * np.hypot(*(coords[p] - coords[out[-2]])))
                if c <= ORIENT_EPS * scale:
                    out.pop()
                else:
                    break
            out.append(p)
        return out

    lower = chain(idx)
    upper = chain(idx[::-1])
    corners = lower[:-1] + upper[:-1]
    if len(corners) < 3:
        return []
    boundary: list[int] = []
    pts = coords
    for a, b in zip(corners, corners[1:] + corners[:1]):
        d = pts[b] - pts[a]
        dd = float(d @ d)
        rel = pts - pts[a]
        cr = d[0] * rel[:, 1] - d[1] * rel[:, 0]
        t = rel @ d
        on = (np.abs(cr) <= ORIENT_EPS * np.sqrt(dd) * np.hypot(rel[:, 0], rel[:, 1]) + 1e-300) \
            & (t >= 0) & (t < dd)
        members = np.flatnonzero(on)
        boundary.extend(members[np.argsort(t[members], kind="stable")].tolist())
    return boundary


def hull_sequence(inst: Instance) -> list[int]:
    if inst.is_tetra:
        return inst.base_indices.tolist()
    return _hull_boundary(inst.coords)


def hull_order_ok(tour: Tour) -> bool:
    """True iff the tour visits the convex-hull boundary vertices in their
    cyclic order (either direction)."""
    hull = hull_sequence(tour.instance)
    if len(hull) <= 3:
        return True
    members = set(hull)
    seq = [v for v in tour.order if v in members]
    return _is_rotation(seq, hull) or _is_rotation(seq, hull[::-1])


def _is_rotation(seq: Sequence[int], ref: Sequence[int]) -> bool:
    if len(seq) != len(ref):
        return False
    r = ref.index(seq[0])
    return list(seq) == list(ref[r:]) + list(ref[:r])


# -- trips -------------------------------------------------------------------

@dataclass(frozen=True)
class Trip:
    subpath: tuple[int, ...]
    main_side: Kind
    connection_vertices: tuple[int, int]


def _ccw_oriented(tour: Tour) -> list[int]:
    inst = tour.instance
    base = inst.base_indices.tolist()
    order = list(tour.order)
    seq = [v for v in order if v in set(base)]
    if not _is_rotation(seq, base):
        order = order[::-1]
    r = order.index(base[0])
    return order[r:] + order[:r]


def decompose_trips(tour: Tour) -> tuple[list[Trip], list[tuple[int, int]]]:
    """Split a hull-ordered tour of a tetrahedron instance into trips and
    direct edges between consecutive base vertices."""
    inst = tour.instance
    if not inst.is_tetra:
        raise ValueError("trips are defined for tetrahedron instances only")
    if not hull_order_ok(tour):
        raise ValueError("tour does not visit the base vertices in hull order")
    order = _ccw_oriented(tour)
    is_base = ~inst.internal_mask
    base_pos = [p for p, v in enumerate(order) if is_base[v]] + [len(order)]
    order = order + [order[0]]
    trips: list[Trip] = []
    base_edges: list[tuple[int, int]] = []
    for p, q in zip(base_pos, base_pos[1:]):
        segment = tuple(order[p:q + 1])
        if len(segment) == 2:
            base_edges.append((segment[0], segment[1]))
            continue
        side = inst.labels[segment[0]].kind
        trips.append(Trip(segment, side, (segment[1], segment[-2])))
    return trips, base_edges


def is_pseudo_tour(edges: Iterable[tuple[int, int]], inst: Instance) -> bool:
    """True iff ``edges`` is made of direct edges between consecutive base
    vertices plus trips covering every internal vertex, a consecutive base
    pair is spanned by a trip exactly when it has no direct edge, and the
    structure is not a single tour."""
    if not inst.is_tetra:
        raise ValueError("pseudo-tours are defined for tetrahedron instances only")
    edges = [(int(u), int(v)) for u, v in edges]
    base = inst.base_indices.tolist()
    nb = len(base)
    rank = {v: r for r, v in enumerate(base)}
    internal = inst.internal_mask

    def consecutive(u: int, v: int) -> bool:
        return u in rank and v in rank and (rank[u] - rank[v]) % nb in (1, nb - 1)

    direct = Counter()
    adj: dict[int, list[tuple[int, int]]] = {}
    for k, (u, v) in enumerate(edges):
        if u == v:
            return False
        if not internal[u] and not internal[v]:
            if not consecutive(u, v):
                return False
            direct[frozenset((u, v))] += 1
            continue
        adj.setdefault(u, []).append((v, k))
        adj.setdefault(v, []).append((u, k))
    if any(c > 1 for c in direct.values()):
        return False
    for v in np.flatnonzero(internal):
        if len(adj.get(int(v), ())) != 2:
            return False

    spanned = set()
    covered = set()
    used_edges = set()
    for b in base:
        for x, k in adj.get(b, ()):
            if k in used_edges:
                continue
            used_edges.add(k)
            prev, cur = b, x
            while internal[cur]:
                covered.add(cur)
                (y1, k1), (y2, k2) = adj[cur]
                nxt, kk = (y2, k2) if k1 in used_edges else (y1, k1)
                if kk in used_edges:
                    return False
                used_edges.add(kk)
                prev, cur = cur, nxt
            if cur == b or not consecutive(b, cur):
                return False
            spanned.add(frozenset((b, cur)))
    if len(covered) != int(internal.sum()):
        return False
    for r in range(nb):
        pair = frozenset((base[r], base[(r + 1) % nb]))
        if (pair in spanned) == (pair in direct):
            return False
    return not _is_hamiltonian_cycle(edges, inst.n_vertices)


def _is_hamiltonian_cycle(edges: list[tuple[int, int]], n: int) -> bool:
    if len(edges) != n:
        return False
    deg = Counter()
    nbrs: dict[int, list[int]] = {}
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
        nbrs.setdefault(u, []).append(v)
        nbrs.setdefault(v, []).append(u)
    if len(deg) != n or any(d != 2 for d in deg.values()):
        return False
    seen = {edges[0][0]}
    stack = [edges[0][0]]
    while stack:
        for w in nbrs[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == n


# -- the canonical optimum T* ------------------------------------------------

def _check_modified(inst: Instance) -> None:
    if inst.family is not Family.TETRA_MODIFIED:
        raise PreconditionError("T* is defined on modified tetrahedron instances")
    if not inst.forced and not satisfies_size_assumption(inst.n, inst.m):
        raise PreconditionError("T* needs n >= 40 and m >= 22")
    if inst.i0 is None or inst.i0 > inst.m - 1:
        raise PreconditionError("T* needs at least one retained internal vertex below M on each segment")


def tstar_labels(n: int, m: int, i0: int) -> list[VertexLabel]:
    s = (n - 1) // 2
    C, A, B = Kind.BASE_C, Kind.BASE_A, Kind.BASE_B
    E, F, G = Kind.INTERNAL_E, Kind.INTERNAL_F, Kind.INTERNAL_G
    seq = [VertexLabel(C, i) for i in range(s + 1)]
    seq += [VertexLabel(E, j) for j in range(i0, m)]
    seq += [VertexLabel(G, j) for j in range(m, i0 - 1, -1)]
    seq += [VertexLabel(F, j) for j in range(m - 1, i0 - 1, -1)]
    seq += [VertexLabel(C, i) for i in range(s + 1, n)]
    seq += [VertexLabel(A, i) for i in range(n)]
    seq += [VertexLabel(B, i) for i in range(n)]
    return seq


def build_tstar(inst: Instance) -> Tour:
    """The single-trip optimum tour of T'(n,m).

    The trip leaves c_s (s = floor((n-1)/2)), climbs e from e_{i0} to M,
    descends g to g_{i0}, jumps to f_{m-1}, descends f to f_{i0} and returns
    to c_{s+1}. For even n the mirror choice s = ceil((n-1)/2) is equally
    optimal; this one is the canonical representative.
    """
    _check_modified(inst)
    return tour_from_labels(inst, tstar_labels(inst.n, inst.m, inst.i0))


def closed_form_length(inst: Instance) -> float:
    """Optimum tour length of a modified instance, evaluated term by term."""
    _check_modified(inst)
    n, m, i0, gam = inst.n, inst.m, inst.i0, inst.gamma
    s = (n - 1) // 2
    d = inst.dist
    return (3 * n - 1 + 3 * d(f"g{m}", f"e{i0}") - gam + d(f"g{i0}", f"f{m - 1}")
            + d(f"c{s}", f"e{i0}") + d(f"c{s + 1}", f"f{i0}"))


def closed_form_opt_length(n: int, m: int) -> float:
    return closed_form_length(build_modified(n, m))


def k_constant(n: int, m: int) -> float:
    """Total of the unit and gamma-length edges a tour of T'(n,m) can hold."""
    inst = build_modified(n, m)
    return 3 * n - 1 + (3 * (m - inst.i0) - 1) * inst.gamma


def opt_tour_bounds(n: int) -> tuple[float, float]:
    """Interval containing the optimum tour length of T'(n,m) when n <= 1.5 m."""
    core = 4 * n + 4 * n / math.sqrt(3)
    return core - 69, core - 17
