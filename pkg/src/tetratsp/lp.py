"""Bounded-variable revised simplex with warm-started row addition.

Every constraint row gets a logical variable, ``A x + s = b``, whose bounds
encode the sense: ``<=`` gives s in [0, inf), ``=`` gives s = 0 and ``>=``
gives s in (-inf, 0]. The basis inverse is kept explicitly as a dense matrix,
updated by rank-one eta steps and refactorised from scratch every
``REFACTOR_EVERY`` pivots. The constraint matrix stays sparse (CSC).

A cold solve uses the dual simplex when the all-logical starting basis is
dual feasible, and a composite primal method otherwise (phase 1 minimises
the current sum of infeasibilities, phase 2 the true objective). After
``add_row`` the previous optimal basis extended by the new logical remains
dual feasible, so reoptimisation is a dual simplex run.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
import scipy.sparse as sp

FEAS_TOL = 1e-7
OPT_TOL = 1e-9
PIVOT_TOL = 1e-9
POLISH_TOL = 1e-9
REFACTOR_EVERY = 100
DEGENERATE_SWITCH = 50
INF = np.inf


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class IterationLimitError(RuntimeError):
    pass


SENSES = ("<=", "=", ">=")


@dataclass
class LpProblem:
    """minimise (or maximise) c.x  s.t.  A x (sense) b,  lb <= x <= ub."""

    c: np.ndarray
    A: object
    senses: Sequence[str]
    b: np.ndarray
    lb: np.ndarray | None = None
    ub: np.ndarray | None = None
    maximize: bool = False

    def __post_init__(self) -> None:
        self.c = np.asarray(self.c, dtype=float).ravel()
        self.A = sp.csc_matrix(self.A, dtype=float)
        self.b = np.asarray(self.b, dtype=float).ravel()
        self.senses = list(self.senses)
        n = len(self.c)
        self.lb = np.zeros(n) if self.lb is None else np.asarray(self.lb, dtype=float).ravel()
        self.ub = np.full(n, INF) if self.ub is None else np.asarray(self.ub, dtype=float).ravel()
        m = len(self.b)
        if self.A.shape != (m, n):
            raise ValueError(f"A has shape {self.A.shape}, expected {(m, n)}")
        if len(self.senses) != m:
            raise ValueError("one sense per row is required")
        bad = [s for s in self.senses if s not in SENSES]
        if bad:
            raise ValueError(f"unknown row senses {bad}")
        if len(self.lb) != n or len(self.ub) != n:
            raise ValueError("bounds must have one entry per variable")
        if np.any(self.lb > self.ub) or np.any(self.lb == INF) or np.any(self.ub == -INF):
            raise ValueError("inconsistent variable bounds")


@dataclass
class LpSolution:
    status: LpStatus
    objective: float
    x: np.ndarray
    duals: np.ndarray = field(repr=False)
    reduced_costs: np.ndarray = field(repr=False)
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


def _logical_bounds(sense: str) -> tuple[float, float]:
    if sense == "<=":
        return 0.0, INF
    if sense == ">=":
        return -INF, 0.0
    return 0.0, 0.0


class SimplexSolver:
    def __init__(self, problem: LpProblem, max_iter: int = 200_000):
        self.problem = problem
        self.max_iter = max_iter
        self.sign = -1.0 if problem.maximize else 1.0
        self.n = len(problem.c)
        self.A = problem.A.tocsc()
        self.b = problem.b.copy()
        self.c_struct = self.sign * problem.c
        lo_s, hi_s = zip(*(_logical_bounds(s) for s in problem.senses)) if problem.senses else ((), ())
        self.lo = np.concatenate([problem.lb, np.array(lo_s, dtype=float)])
        self.hi = np.concatenate([problem.ub, np.array(hi_s, dtype=float)])
        self.pivots = 0
        self.status: LpStatus | None = None
        self._since_refactor = 0

    @property
    def m(self) -> int:
        return len(self.b)

    @property
    def cost(self) -> np.ndarray:
        return np.concatenate([self.c_struct, np.zeros(self.m)])

    # -- linear algebra ---------------------------------------------------

    def _col(self, j: int):
        if j >= self.n:
            return np.array([j - self.n]), np.array([1.0])
        s, e = self.A.indptr[j], self.A.indptr[j + 1]
        return self.A.indices[s:e], self.A.data[s:e]

    def _ftran(self, j: int) -> np.ndarray:
        idx, vals = self._col(j)
        return self.Binv[:, idx] @ vals

    def _row_alpha(self, rho: np.ndarray) -> np.ndarray:
        return np.concatenate([self.A.T @ rho, rho])

    def _reduced_costs(self, cost: np.ndarray) -> np.ndarray:
        y = cost[self.basis] @ self.Binv
        d = cost - np.concatenate([self.A.T @ y, y])
        d[self.basis] = 0.0
        return d

    def _refactor(self) -> None:
        m = self.m
        B = np.zeros((m, m))
        for k, j in enumerate(self.basis):
            idx, vals = self._col(int(j))
            B[idx, k] = vals
        self.Binv = np.linalg.inv(B)
        self._since_refactor = 0
        self._recompute_basics()

    def _recompute_basics(self) -> None:
        x = self.x.copy()
        x[self.basis] = 0.0
        r = self.b - (self.A @ x[: self.n] + x[self.n:])
        self.x[self.basis] = self.Binv @ r

    def _pivot(self, r: int, q: int, alpha_col: np.ndarray) -> None:
        p = alpha_col[r]
        row = self.Binv[r] / p
        self.Binv -= np.outer(alpha_col, row)
        self.Binv[r] = row
        leaving = int(self.basis[r])
        self.basis[r] = q
        self.in_basis[leaving] = -1
        self.in_basis[q] = r
        self.pivots += 1
        self._since_refactor += 1
        if self._since_refactor >= REFACTOR_EVERY:
            self._refactor()
        if self.pivots > self.max_iter:
            raise IterationLimitError(f"simplex exceeded {self.max_iter} pivots")

    # -- starting basis -----------------------------------------------------

    def _initial_basis(self) -> bool:
        """All-logical basis. Returns True when it is dual feasible."""
        n, m = self.n, self.m
        self.basis = np.arange(n, n + m)
        self.in_basis = np.full(n + m, -1, dtype=np.intp)
        self.in_basis[self.basis] = np.arange(m)
        self.Binv = np.eye(m)
        self.x = np.zeros(n + m)
        lo, hi, c = self.lo[:n], self.hi[:n], self.c_struct
        dual_ok = True
        for j in range(n):
            want_low = c[j] >= 0
            if want_low and np.isfinite(lo[j]):
                self.x[j] = lo[j]
            elif not want_low and np.isfinite(hi[j]):
                self.x[j] = hi[j]
            else:
                dual_ok = dual_ok and c[j] == 0
                self.x[j] = lo[j] if np.isfinite(lo[j]) else (hi[j] if np.isfinite(hi[j]) else 0.0)
        self._since_refactor = 0
        self._recompute_basics()
        return dual_ok

    # -- dual simplex ---------------------------------------------------------

    def _dual_simplex(self) -> LpStatus:
        cost = self.cost
        lo, hi = self.lo, self.hi
        degenerate = 0
        while True:
            xb = self.x[self.basis]
            lb, ub = lo[self.basis], hi[self.basis]
            below = lb - xb
            above = xb - ub
            infeas = np.maximum(below, above)
            if not len(infeas):
                return LpStatus.OPTIMAL
            if degenerate >= DEGENERATE_SWITCH:
                cand = np.flatnonzero(infeas > FEAS_TOL)
                if len(cand) == 0:
                    return LpStatus.OPTIMAL
                r = int(cand[np.argmin(self.basis[cand])])
            else:
                r = int(np.argmax(infeas))
                if infeas[r] <= FEAS_TOL:
                    return LpStatus.OPTIMAL
            to_upper = above[r] > 0
            d = self._reduced_costs(cost)
            rho = self.Binv[r]
            alpha = self._row_alpha(rho)
            sgn = 1.0 if to_upper else -1.0
            ap = sgn * alpha
            nonbasic = self.in_basis < 0
            movable = nonbasic & (lo < hi)
            at_lo = movable & (self.x <= lo)
            at_hi = movable & (self.x >= hi) & ~at_lo
            free = movable & ~at_lo & ~at_hi
            elig = (at_lo & (ap > PIVOT_TOL)) | (at_hi & (ap < -PIVOT_TOL)) | (free & (np.abs(ap) > PIVOT_TOL))
            cand = np.flatnonzero(elig)
            if len(cand) == 0:
                return LpStatus.INFEASIBLE
            dj = np.abs(d[cand])
            # wrong-signed reduced costs within tolerance count as zero
            dj = np.where(np.sign(d[cand]) * np.sign(ap[cand]) < 0, 0.0, dj)
            dj = np.where(free[cand], np.abs(d[cand]), dj)
            aj = np.abs(ap[cand])
            ratios = dj / aj
            if degenerate >= DEGENERATE_SWITCH:
                tmin = ratios.min()
                ties = cand[ratios <= tmin + 1e-15]
                q = int(ties.min())
            else:
                tmax = np.min((dj + OPT_TOL) / aj)
                ok = ratios <= tmax
                q = int(cand[ok][np.argmax(aj[ok])])
            t = abs(d[q] / alpha[q])
            degenerate = degenerate + 1 if t <= 1e-12 else 0
            alpha_col = self._ftran(q)
            bound = ub[r] if to_upper else lb[r]
            delta = (xb[r] - bound) / alpha_col[r]
            self.x[self.basis] -= delta * alpha_col
            self.x[q] += delta
            leaving = int(self.basis[r])
            self._pivot(r, q, alpha_col)
            self.x[leaving] = bound

    # -- primal simplex ----------------------------------------------------

    def _primal_simplex(self, phase1: bool) -> LpStatus:
        lo, hi = self.lo, self.hi
        degenerate = 0
        while True:
            xb = self.x[self.basis]
            lb, ub = lo[self.basis], hi[self.basis]
            if phase1:
                below = xb < lb - FEAS_TOL
                above = xb > ub + FEAS_TOL
                if not below.any() and not above.any():
                    return LpStatus.OPTIMAL
                cost = np.zeros(self.n + self.m)
                cost[self.basis[below]] = -1.0
                cost[self.basis[above]] = 1.0
                # infeasible basics may run past their violated bound only
                lb = np.where(below, -INF, lb)
                ub = np.where(below, lo[self.basis], ub)
                ub = np.where(above, INF, ub)
                lb = np.where(above, hi[self.basis], lb)
            else:
                cost = self.cost
            d = self._reduced_costs(cost)
            nonbasic = self.in_basis < 0
            movable = nonbasic & (lo < hi)
            at_lo = movable & (self.x <= lo)
            at_hi = movable & (self.x >= hi) & ~at_lo
            free = movable & ~at_lo & ~at_hi
            score = np.where(at_lo, -d, 0.0)
            score = np.where(at_hi, d, score)
            score = np.where(free, np.abs(d), score)
            cand = np.flatnonzero(score > OPT_TOL)
            if len(cand) == 0:
                return LpStatus.INFEASIBLE if phase1 else LpStatus.OPTIMAL
            if degenerate >= DEGENERATE_SWITCH:
                q = int(cand.min())
            else:
                q = int(cand[np.argmax(score[cand])])
            direction = -1.0 if d[q] > 0 else 1.0
            alpha_col = self._ftran(q)
            ap = direction * alpha_col  # x_B moves by -ap * t
            dec = ap > PIVOT_TOL
            inc = ap < -PIVOT_TOL
            ratio = np.full(self.m, INF)
            ratio[dec] = (xb[dec] - lb[dec]) / ap[dec]
            ratio[inc] = (ub[inc] - xb[inc]) / (-ap[inc])
            ratio = np.maximum(ratio, 0.0)
            flip = hi[q] - lo[q]
            limited = np.isfinite(ratio)
            r = -1
            t = INF
            if limited.any():
                if degenerate >= DEGENERATE_SWITCH:
                    tmin = ratio[limited].min()
                    ties = np.flatnonzero(limited & (ratio <= tmin + 1e-15))
                    r = int(ties[np.argmin(self.basis[ties])])
                else:
                    relaxed = np.full(self.m, INF)
                    relaxed[dec] = (xb[dec] - lb[dec] + FEAS_TOL) / ap[dec]
                    relaxed[inc] = (ub[inc] - xb[inc] + FEAS_TOL) / (-ap[inc])
                    tmax = relaxed.min()
                    ok = np.flatnonzero(limited & (ratio <= tmax))
                    r = int(ok[np.argmax(np.abs(ap[ok]))])
                t = ratio[r]
            if flip <= t:
                if not np.isfinite(flip):
                    if phase1:
                        raise RuntimeError("phase 1 objective is bounded below; unbounded ray is impossible")
                    return LpStatus.UNBOUNDED
                self.x[q] = hi[q] if direction > 0 else lo[q]
                self.x[self.basis] -= ap * flip
                degenerate = 0
                continue
            degenerate = degenerate + 1 if t <= 1e-12 else 0
            self.x[self.basis] -= ap * t
            self.x[q] += direction * t
            leaving = int(self.basis[r])
            hit_lower = ap[r] > 0
            self._pivot(r, q, alpha_col)
            if phase1:
                # land on the bound the variable was heading for
                self.x[leaving] = lb[r] if hit_lower else ub[r]
                if not (lo[leaving] - FEAS_TOL <= self.x[leaving] <= hi[leaving] + FEAS_TOL):
                    self.x[leaving] = lo[leaving] if hit_lower else hi[leaving]
            else:
                self.x[leaving] = lo[leaving] if hit_lower else hi[leaving]

    # -- drivers ------------------------------------------------------------

    def _optimise(self, start_dual: bool) -> LpStatus:
        if start_dual:
            status = self._dual_simplex()
            if status is not LpStatus.OPTIMAL:
                return status
        else:
            status = self._primal_simplex(phase1=True)
            if status is not LpStatus.OPTIMAL:
                return status
        # alternate until both primal and dual feasibility survive a refactor
        for _ in range(20):
            status = self._primal_simplex(phase1=False)
            if status is not LpStatus.OPTIMAL:
                return status
            self._refactor()
            if self._primal_infeasibility() <= FEAS_TOL:
                return LpStatus.OPTIMAL
            status = self._dual_simplex()
            if status is not LpStatus.OPTIMAL:
                return status
        return LpStatus.OPTIMAL

    def _primal_infeasibility(self) -> float:
        xb = self.x[self.basis]
        return float(np.max(np.maximum(self.lo[self.basis] - xb, xb - self.hi[self.basis]), initial=0.0))

    def solve(self) -> LpSolution:
        dual_ok = self._initial_basis()
        self.status = self._optimise(start_dual=dual_ok)
        return self.solution()

    def add_row(self, coefs, sense: str, rhs: float) -> None:
        """Append the row ``coefs . x (sense) rhs``; ``coefs`` is a dense
        vector of length n or a (indices, values) pair."""
        if sense not in SENSES:
            raise ValueError(f"unknown sense {sense!r}")
        if isinstance(coefs, tuple):
            idx, vals = (np.asarray(v) for v in coefs)
            row = sp.csr_matrix((vals.astype(float), (np.zeros(len(idx), dtype=np.intp), idx.astype(np.intp))),
                                shape=(1, self.n))
        else:
            row = sp.csr_matrix(np.asarray(coefs, dtype=float).reshape(1, -1))
        m = self.m
        # logicals are indexed after structurals; shift them by one slot
        self.A = sp.vstack([self.A, row], format="csc")
        self.b = np.append(self.b, float(rhs))
        lo_s, hi_s = _logical_bounds(sense)
        self.lo = np.append(self.lo, lo_s)
        self.hi = np.append(self.hi, hi_s)
        if not hasattr(self, "basis"):
            return
        self.x = np.append(self.x, 0.0)
        new = self.n + m
        self.in_basis = np.append(self.in_basis, m)
        coef_b = np.zeros(m)
        struct = self.basis < self.n
        dense_row = row.toarray().ravel()
        coef_b[struct] = dense_row[self.basis[struct]]
        Binv = np.zeros((m + 1, m + 1))
        Binv[:m, :m] = self.Binv
        Binv[m, :m] = -coef_b @ self.Binv
        Binv[m, m] = 1.0
        self.Binv = Binv
        self.basis = np.append(self.basis, new)
        self.x[new] = rhs - dense_row @ self.x[: self.n]

    def resolve(self) -> LpSolution:
        if not hasattr(self, "basis"):
            return self.solve()
        if self.status is not LpStatus.OPTIMAL:
            return self.solve()
        self.status = self._optimise(start_dual=True)
        return self.solution()

    def add_row_and_resolve(self, coefs, sense: str, rhs: float) -> LpSolution:
        self.add_row(coefs, sense, rhs)
        return self.resolve()

    def solution(self) -> LpSolution:
        n, m = self.n, self.m
        x = self.x[:n].copy()
        if self.status is LpStatus.OPTIMAL:
            lo, hi = self.lo[:n], self.hi[:n]
            x = np.where(np.abs(x - lo) <= POLISH_TOL, lo, x)
            x = np.where(np.abs(x - hi) <= POLISH_TOL, hi, x)
            y = self.cost[self.basis] @ self.Binv
            d = self.c_struct - self.A.T @ y
            obj = float(self.problem.c @ x)
            return LpSolution(self.status, obj, x, self.sign * y, self.sign * d, self.pivots)
        obj = INF if self.status is LpStatus.INFEASIBLE else -INF
        if self.problem.maximize:
            obj = -obj
        return LpSolution(self.status, obj, x, np.full(m, np.nan), np.full(n, np.nan), self.pivots)


def solve_lp(problem: LpProblem, max_iter: int = 200_000) -> LpSolution:
    return SimplexSolver(problem, max_iter=max_iter).solve()
