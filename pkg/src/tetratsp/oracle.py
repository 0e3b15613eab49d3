"""Exact optimum tours for small instances and a 2-opt upper bound for
larger ones."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import kernels
from .errors import SizeGuardError
from .instances import Instance
from .tours import Tour, tour_length
from .tsplib import Metric, distance_matrix

MAX_HELD_KARP = 20
MAX_PERMUTATION = 10
NEIGHBORS = 16


class OracleMethod(str, Enum):
    HELD_KARP = "HeldKarpDP"
    PERMUTATION = "Permutation"
    TWO_OPT = "TwoOpt"


@dataclass(frozen=True)
class OracleResult:
    tour: Tour
    length: float
    method: OracleMethod


def _finish(inst: Instance, order, metric, method: OracleMethod) -> OracleResult:
    # lengths are summed along the canonical rotation so that equal cycles
    # give bit-identical lengths regardless of which method found them
    tour = Tour(inst, tuple(int(v) for v in order)).canonical()
    return OracleResult(tour, tour_length(tour, metric), method)


def held_karp_opt(inst: Instance, metric: Metric | str = Metric.EXACT) -> OracleResult:
    n = inst.n_vertices
    if n > MAX_HELD_KARP:
        raise SizeGuardError(f"Held-Karp is limited to {MAX_HELD_KARP} vertices, got {n}")
    if n == 0:
        raise ValueError("empty instance")
    order = kernels.held_karp(distance_matrix(inst, metric))
    return _finish(inst, order, metric, OracleMethod.HELD_KARP)


def permutation_opt(inst: Instance, metric: Metric | str = Metric.EXACT) -> OracleResult:
    """Exhaustive search over cyclic orders with vertex 0 fixed first and
    each reversal pair counted once."""
    n = inst.n_vertices
    if n > MAX_PERMUTATION:
        raise SizeGuardError(f"permutation search is limited to {MAX_PERMUTATION} vertices, got {n}")
    if n == 0:
        raise ValueError("empty instance")
    if n <= 3:
        return _finish(inst, range(n), metric, OracleMethod.PERMUTATION)
    D = distance_matrix(inst, metric)
    perms = np.array(list(itertools.permutations(range(1, n))), dtype=np.intp)
    perms = perms[perms[:, 0] < perms[:, -1]]
    lengths = D[0, perms[:, 0]] + D[perms[:, -1], 0]
    for k in range(n - 2):
        lengths = lengths + D[perms[:, k], perms[:, k + 1]]
    best = perms[int(np.argmin(lengths))]
    return _finish(inst, [0, *best.tolist()], metric, OracleMethod.PERMUTATION)


def neighbor_lists(D: np.ndarray, k: int = NEIGHBORS) -> np.ndarray:
    D = np.array(D, dtype=float, copy=True)
    np.fill_diagonal(D, np.inf)
    k = min(k, D.shape[0] - 1)
    return np.argsort(D, axis=1, kind="stable")[:, :k]


def two_opt_improve(tour: Tour, metric: Metric | str = Metric.EXACT) -> Tour:
    """First-improvement 2-opt to a local optimum over the 16 nearest
    neighbours of each vertex."""
    D = np.ascontiguousarray(distance_matrix(tour.instance, metric))
    order = kernels.two_opt(np.asarray(tour.order, dtype=np.intp), D, neighbor_lists(D))
    return Tour(tour.instance, tuple(int(v) for v in order))


def two_opt_result(tour: Tour, metric: Metric | str = Metric.EXACT) -> OracleResult:
    improved = two_opt_improve(tour, metric)
    return OracleResult(improved, tour_length(improved, metric), OracleMethod.TWO_OPT)


def random_tour(inst: Instance, rng: np.random.Generator) -> Tour:
    return Tour(inst, tuple(int(v) for v in rng.permutation(inst.n_vertices)))
