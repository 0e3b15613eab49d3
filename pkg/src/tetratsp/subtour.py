"""The subtour relaxation: cutting-plane solve with minimum-cut separation,
a brute-force enumeration oracle, and the explicit half-integral solution
of the modified tetrahedron instances.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from . import kernels
from .errors import PreconditionError, SizeGuardError
from .instances import Family, Instance, Kind, VertexLabel, satisfies_size_assumption
from .lp import LpProblem, LpStatus, SimplexSolver
from .tsplib import Metric, distance_matrix

CUT_THRESHOLD = 2.0 - 1e-6
DEGREE_TOL = 1e-9
BOUND_TOL = 1e-9
ZERO_TOL = 1e-12
MAX_ENUMERATION_VERTICES = 16


def edge_index(i, j, n: int):
    """Position of edge {i, j} (i < j) in row-major upper-triangle order."""
    return i * n - i * (i + 1) // 2 + (j - i - 1)


@dataclass(frozen=True, eq=False)
class FractionalSolution:
    """Edge values of a point of the subtour polytope (or a candidate).

    Only edges with nonzero value are stored; ``u < v`` on every row.
    """

    n_vertices: int
    u: np.ndarray
    v: np.ndarray
    x: np.ndarray
    instance: Instance | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        u = np.asarray(self.u, dtype=np.intp)
        v = np.asarray(self.v, dtype=np.intp)
        x = np.asarray(self.x, dtype=float)
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        order = np.lexsort((hi, lo))
        for name, arr in (("u", lo[order]), ("v", hi[order]), ("x", x[order])):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_edge_vector(cls, values, n: int, instance: Instance | None = None) -> FractionalSolution:
        values = np.asarray(values, dtype=float)
        iu, ju = np.triu_indices(n, 1)
        keep = np.abs(values) > ZERO_TOL
        return cls(n, iu[keep], ju[keep], values[keep], instance)

    @classmethod
    def from_edges(cls, edges, n: int, instance: Instance | None = None) -> FractionalSolution:
        """Build from ``(u, v, value)`` triples; repeated pairs add up."""
        acc: dict[tuple[int, int], float] = {}
        for u, v, val in edges:
            key = (min(u, v), max(u, v))
            acc[key] = acc.get(key, 0.0) + float(val)
        keys = sorted(acc)
        return cls(n, [k[0] for k in keys], [k[1] for k in keys], [acc[k] for k in keys], instance)

    @classmethod
    def from_tour(cls, tour) -> FractionalSolution:
        return cls.from_edges([(a, b, 1.0) for a, b in tour.edges()], tour.instance.n_vertices, tour.instance)

    def matrix(self) -> np.ndarray:
        W = np.zeros((self.n_vertices, self.n_vertices))
        W[self.u, self.v] = self.x
        W[self.v, self.u] = self.x
        return W

    def degrees(self) -> np.ndarray:
        return (np.bincount(self.u, self.x, self.n_vertices)
                + np.bincount(self.v, self.x, self.n_vertices))

    def cost(self, D: np.ndarray) -> float:
        return float(np.dot(D[self.u, self.v], self.x))

    def length(self, metric: Metric | str = Metric.EXACT) -> float:
        if self.instance is None:
            raise ValueError("no instance attached")
        return self.cost(distance_matrix(self.instance, metric))

    def value(self, i: int, j: int) -> float:
        a, b = min(i, j), max(i, j)
        hit = np.flatnonzero((self.u == a) & (self.v == b))
        return float(self.x[hit[0]]) if len(hit) else 0.0

    def to_text(self) -> str:
        return "".join(f"{a + 1} {b + 1} {val:.12g}\n" for a, b, val in zip(self.u, self.v, self.x))

    @classmethod
    def from_text(cls, text: str, n: int, instance: Instance | None = None) -> FractionalSolution:
        rows = []
        for line in text.splitlines():
            if not line.strip():
                continue
            a, b, val = line.split()
            rows.append((int(a) - 1, int(b) - 1, float(val)))
        return cls.from_edges(rows, n, instance)


@dataclass(frozen=True)
class CutCertificate:
    """A vertex subset X with the weight x(delta(X)) of its boundary."""

    subset: tuple[int, ...]
    cut_weight: float

    @property
    def rhs(self) -> int:
        return len(self.subset) - 1


def _smaller_side(mask: np.ndarray) -> np.ndarray:
    n = len(mask)
    k = int(mask.sum())
    if 2 * k > n or (2 * k == n and mask[0]):
        mask = ~mask
    return np.flatnonzero(mask)


def global_min_cut(sol: FractionalSolution) -> CutCertificate:
    """Minimum-weight cut of the support graph, reported by its smaller shore.

    A disconnected support yields its smallest component at weight 0.
    """
    n = sol.n_vertices
    if n < 2:
        raise ValueError("a cut needs at least two vertices")
    pos = sol.x > ZERO_TOL
    graph = sp.coo_matrix((np.ones(int(pos.sum())), (sol.u[pos], sol.v[pos])), shape=(n, n))
    k, comp = connected_components(graph, directed=False)
    if k > 1:
        sizes = np.bincount(comp)
        best = int(np.argmin(sizes))  # first smallest = lowest lead vertex
        members = np.flatnonzero(comp == best)
        mask = np.zeros(n, dtype=bool)
        mask[members] = True
        return CutCertificate(tuple(int(v) for v in _smaller_side(mask)), 0.0)
    weight, shore = kernels.stoer_wagner(sol.matrix())
    return CutCertificate(tuple(int(v) for v in _smaller_side(np.asarray(shore, dtype=bool))), float(weight))


def min_cut_separate(sol: FractionalSolution) -> CutCertificate | None:
    """The global minimum cut if it violates x(delta(X)) >= 2, else None."""
    cut = global_min_cut(sol)
    return cut if cut.cut_weight < CUT_THRESHOLD else None


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    reason: str
    witness: object
    max_bound_violation: float
    max_degree_error: float
    min_cut: CutCertificate

    def __bool__(self) -> bool:
        return self.feasible


def check_feasibility(sol: FractionalSolution) -> FeasibilityReport:
    """Checks bounds, degree equalities and subtour constraints; the report
    names the first violated condition and a witness for it."""
    bound_err = np.maximum(-sol.x, sol.x - 1.0)
    worst_bound = float(bound_err.max(initial=0.0))
    deg_err = np.abs(sol.degrees() - 2.0)
    worst_deg = float(deg_err.max(initial=0.0))
    cut = global_min_cut(sol)
    if worst_bound > BOUND_TOL:
        k = int(np.argmax(bound_err))
        return FeasibilityReport(False, "bounds", (int(sol.u[k]), int(sol.v[k])), worst_bound, worst_deg, cut)
    if worst_deg > DEGREE_TOL:
        return FeasibilityReport(False, "degree", int(np.argmax(deg_err)), worst_bound, worst_deg, cut)
    if cut.cut_weight < CUT_THRESHOLD:
        return FeasibilityReport(False, "subtour", cut, worst_bound, worst_deg, cut)
    return FeasibilityReport(True, "", None, worst_bound, worst_deg, cut)


@dataclass
class SubtourLpResult:
    solution: FractionalSolution
    objective: float
    cuts: list[CutCertificate]
    history: list[float]
    pivots: int

    @property
    def rounds(self) -> int:
        return len(self.cuts)

    def __iter__(self):
        yield self.solution
        yield self.objective


def _degree_matrix(n: int) -> sp.csc_matrix:
    iu, ju = np.triu_indices(n, 1)
    E = len(iu)
    cols = np.concatenate([np.arange(E), np.arange(E)])
    rows = np.concatenate([iu, ju])
    return sp.csc_matrix((np.ones(2 * E), (rows, cols)), shape=(n, E))


def _subset_edges(subset, n: int) -> np.ndarray:
    s = np.asarray(sorted(subset), dtype=np.int64)
    a, b = np.triu_indices(len(s), 1)
    return edge_index(s[a], s[b], n)


def solve_subtour_lp_matrix(D: np.ndarray, instance: Instance | None = None,
                            max_rounds: int = 100_000, log=None) -> SubtourLpResult:
    """Cutting-plane solve of the subtour LP for a symmetric cost matrix."""
    D = np.asarray(D, dtype=float)
    n = D.shape[0]
    if n < 3:
        raise PreconditionError("the subtour LP needs at least 3 vertices")
    iu, ju = np.triu_indices(n, 1)
    E = len(iu)
    problem = LpProblem(D[iu, ju], _degree_matrix(n), ["="] * n, np.full(n, 2.0), np.zeros(E), np.ones(E))
    solver = SimplexSolver(problem)
    lp = solver.solve()
    if lp.status is not LpStatus.OPTIMAL:
        raise AssertionError(f"degree LP with {n} >= 3 vertices returned {lp.status.value}")
    cuts: list[CutCertificate] = []
    seen: set[tuple[int, ...]] = set()
    history = [lp.objective]
    while True:
        frac = FractionalSolution.from_edge_vector(lp.x, n, instance)
        cut = min_cut_separate(frac)
        if cut is None:
            break
        if cut.subset in seen:
            raise RuntimeError(f"separation returned an already added cut of size {len(cut.subset)}")
        if len(cuts) >= max_rounds:
            raise RuntimeError(f"no convergence within {max_rounds} cutting-plane rounds")
        seen.add(cut.subset)
        cuts.append(cut)
        idx = _subset_edges(cut.subset, n)
        lp = solver.add_row_and_resolve((idx, np.ones(len(idx))), "<=", cut.rhs)
        if lp.status is not LpStatus.OPTIMAL:
            raise AssertionError(f"subtour LP returned {lp.status.value} after a cut")
        history.append(lp.objective)
        if log is not None:
            log(len(cuts), len(cut.subset), cut.cut_weight, lp.objective, solver.pivots)
    return SubtourLpResult(frac, lp.objective, cuts, history, solver.pivots)


def solve_subtour_lp(inst: Instance, metric: Metric | str = Metric.EXACT, **kw) -> SubtourLpResult:
    return solve_subtour_lp_matrix(distance_matrix(inst, metric), inst, **kw)


def enumerate_subtour_lp(inst_or_matrix, metric: Metric | str = Metric.EXACT) -> float:
    """Subtour LP optimum with every subset constraint written out.

    Solved through its dual, which has one row per edge and one column per
    subset, so that 16 vertices still fit comfortably in memory.
    """
    if isinstance(inst_or_matrix, Instance):
        D = distance_matrix(inst_or_matrix, metric)
    else:
        D = np.asarray(inst_or_matrix, dtype=float)
    n = D.shape[0]
    if n < 3:
        raise PreconditionError("the subtour LP needs at least 3 vertices")
    if n > MAX_ENUMERATION_VERTICES:
        raise SizeGuardError(f"enumeration is limited to {MAX_ENUMERATION_VERTICES} vertices, got {n}")
    iu, ju = np.triu_indices(n, 1)
    E = len(iu)
    # subsets avoid vertex 0 (complements give the same constraint)
    rows, cols, rhs = [], [], []
    col = 0
    for size in range(2, n - 1):
        for subset in itertools.combinations(range(1, n), size):
            idx = _subset_edges(subset, n)
            rows.append(idx)
            cols.append(np.full(len(idx), col))
            rhs.append(size - 1)
            col += 1
    n_sub = col
    # dual columns: y_v (free), z_X <= 0, w_e <= 0; one row per edge
    deg = _degree_matrix(n).T.tocoo()
    parts_r = [deg.row]
    parts_c = [deg.col]
    if n_sub:
        parts_r.append(np.concatenate(rows))
        parts_c.append(n + np.concatenate(cols))
    parts_r.append(np.arange(E))
    parts_c.append(n + n_sub + np.arange(E))
    r = np.concatenate(parts_r)
    c = np.concatenate(parts_c)
    A = sp.csc_matrix((np.ones(len(r)), (r, c)), shape=(E, n + n_sub + E))
    obj = np.concatenate([np.full(n, 2.0), np.asarray(rhs, dtype=float), np.ones(E)])
    lb = np.concatenate([np.full(n, -np.inf), np.full(n_sub + E, -np.inf)])
    ub = np.concatenate([np.full(n, np.inf), np.zeros(n_sub + E)])
    problem = LpProblem(obj, A, ["<="] * E, D[iu, ju], lb, ub, maximize=True)
    sol = SimplexSolver(problem).solve()
    if sol.status is not LpStatus.OPTIMAL:
        raise AssertionError(f"enumeration dual returned {sol.status.value}")
    return sol.objective


def _labels_path(kind: Kind, start: int, stop: int):
    return [VertexLabel(kind, i) for i in range(start, stop + 1)]


def build_explicit_fractional(inst: Instance) -> FractionalSolution:
    """Half-integral subtour-feasible point of T'(n,m).

    Value 1 on the base paths c_1..c_n, a_1..a_n, b_1..b_n and on the
    internal paths e_{i0}..e_{m-1}, f_{i0}..f_{m-1}, g_{i0}..M; value 1/2 on
    the triangles (c_0, e_{i0}, c_1), (a_0, f_{i0}, a_1), (b_0, g_{i0}, b_1)
    and (e_{m-1}, M, f_{m-1}).
    """
    if inst.family is not Family.TETRA_MODIFIED:
        raise PreconditionError("the explicit solution is defined on modified tetrahedron instances")
    n, m, i0 = inst.n, inst.m, inst.i0
    if not inst.forced and not satisfies_size_assumption(n, m):
        raise PreconditionError("the explicit solution needs n >= 40 and m >= 22")
    if i0 is None or i0 > m - 2:
        raise PreconditionError("the explicit solution needs at least two retained vertices per internal segment")
    C, A, B = Kind.BASE_C, Kind.BASE_A, Kind.BASE_B
    E, F, G = Kind.INTERNAL_E, Kind.INTERNAL_F, Kind.INTERNAL_G
    paths = [
        _labels_path(C, 1, n), _labels_path(A, 1, n), _labels_path(B, 1, n),
        _labels_path(E, i0, m - 1), _labels_path(F, i0, m - 1), _labels_path(G, i0, m),
    ]
    edges = []
    for path in paths:
        for p, q in zip(path, path[1:]):
            edges.append((inst.index(p), inst.index(q), 1.0))
    triangles = [
        (VertexLabel(C, 0), VertexLabel(E, i0), VertexLabel(C, 1)),
        (VertexLabel(A, 0), VertexLabel(F, i0), VertexLabel(A, 1)),
        (VertexLabel(B, 0), VertexLabel(G, i0), VertexLabel(B, 1)),
        (VertexLabel(E, m - 1), VertexLabel(G, m), VertexLabel(F, m - 1)),
    ]
    for tri in triangles:
        idx = [inst.index(t) for t in tri]
        for p, q in ((0, 1), (1, 2), (0, 2)):
            edges.append((idx[p], idx[q], 0.5))
    return FractionalSolution.from_edges(edges, inst.n_vertices, inst)


def lp_bounds(n: int) -> tuple[float, float]:
    """Interval containing the subtour LP optimum of T'(n,m) when n <= 1.5 m."""
    core = 3 * n + 3 * n / math.sqrt(3)
    return core - 33, core
