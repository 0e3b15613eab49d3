"""Integrality ratios, bound checks, convergence tables and the
exponential runtime model."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import PreconditionError
from .instances import Family, Instance, build_modified, satisfies_size_assumption
from .oracle import MAX_HELD_KARP, held_karp_opt
from .subtour import build_explicit_fractional, lp_bounds, solve_subtour_lp
from .tours import closed_form_length, opt_tour_bounds

BOUND_TOL = 1e-9
FOUR_THIRDS = 4.0 / 3.0
SECONDS_PER_DAY = 86400.0
SECONDS_PER_YEAR = 365.25 * SECONDS_PER_DAY

# N * (4/3 - ratio) must stay inside this band on the convergence grid. The
# bounds only give an upper end (about 23 (5n+6) / (n (1 + 1/sqrt 3)) <= 76
# for n >= 40); the lower end 1 is an empirical floor, not a theorem.
GAP_BAND = (1.0, 76.0)

CSV_HEADER = ["family", "n", "m", "N", "opt", "lp", "ratio", "gap", "thm11_ok", "thm12_ok"]


class OptSource(str, Enum):
    CLOSED_FORM = "ClosedForm"
    ORACLE = "Oracle"


class LpSource(str, Enum):
    CUT_PLANE = "CutPlane"
    EXPLICIT_UPPER = "ExplicitUpper"


@dataclass(frozen=True)
class BoundReport:
    family: str
    n: int | None
    m: int | None
    N: int
    opt_length: float
    opt_source: OptSource
    lp_value: float
    lp_source: LpSource
    ratio: float
    thm11_ok: bool | None
    thm12_ok: bool | None

    @property
    def gap(self) -> float:
        return FOUR_THIRDS - self.ratio

    def csv_row(self) -> list[str]:
        return [
            self.family,
            "" if self.n is None else str(self.n),
            "" if self.m is None else str(self.m),
            str(self.N),
            _g10(self.opt_length),
            _g10(self.lp_value),
            _g10(self.ratio),
            _g10(self.gap),
            _flag(self.thm11_ok),
            _flag(self.thm12_ok),
        ]


def _g10(v: float) -> str:
    return f"{v:.10g}"


def _flag(v: bool | None) -> str:
    return "na" if v is None else ("true" if v else "false")


def closed_form_applies(inst: Instance) -> bool:
    """Whether the closed-form length is the optimum (n >= 40, m >= 22)."""
    return (inst.family is Family.TETRA_MODIFIED and not inst.forced
            and satisfies_size_assumption(inst.n, inst.m))


def bounds_guaranteed(inst: Instance) -> bool:
    """Whether the tour and LP interval bounds are proven (also n <= 1.5 m).

    Outside that range the interval checks are still reported but may fail
    without contradicting anything."""
    return closed_form_applies(inst) and inst.n <= 1.5 * inst.m


def _within(v: float, interval: tuple[float, float], tol: float = BOUND_TOL) -> bool:
    return interval[0] - tol <= v <= interval[1] + tol


def integrality_ratio(inst: Instance, lp_source: LpSource | str = LpSource.CUT_PLANE,
                      tol: float = BOUND_TOL) -> BoundReport:
    """Optimum tour length over subtour LP optimum.

    The optimum is the closed form on modified instances with n >= 40 and
    m >= 22, Held-Karp on instances of at most 20 vertices. ``ExplicitUpper`` swaps
    the LP optimum for the length of the explicit half-integral solution,
    which bounds it from above (so the ratio is then a lower estimate).
    """
    lp_source = LpSource(lp_source)
    applies = closed_form_applies(inst)
    if applies:
        opt, opt_src = closed_form_length(inst), OptSource.CLOSED_FORM
    elif inst.n_vertices <= MAX_HELD_KARP:
        opt, opt_src = held_karp_opt(inst).length, OptSource.ORACLE
    else:
        raise PreconditionError(
            "no exact optimum available: need a modified instance with n >= 40 and m >= 22, "
            f"or at most {MAX_HELD_KARP} vertices"
        )
    if lp_source is LpSource.CUT_PLANE:
        lp = solve_subtour_lp(inst).objective
    else:
        if not applies:
            raise PreconditionError("the explicit LP solution needs a modified instance with n >= 40 and m >= 22")
        lp = build_explicit_fractional(inst).length()
    thm11 = _within(opt, opt_tour_bounds(inst.n), tol) if applies else None
    thm12 = _within(lp, lp_bounds(inst.n), tol) if applies else None
    is_tetra = inst.is_tetra
    return BoundReport(
        family=inst.family.value,
        n=inst.n if is_tetra else None,
        m=inst.m if is_tetra else None,
        N=inst.n_vertices,
        opt_length=opt,
        opt_source=opt_src,
        lp_value=lp,
        lp_source=lp_source,
        ratio=opt / lp,
        thm11_ok=thm11,
        thm12_ok=thm12,
    )


def default_m(n: int) -> int:
    return math.ceil(2 * n / 3) + 1


def ratio_interval(n: int) -> tuple[float, float]:
    """Range of ratio implied by dividing the tour bounds by the LP bounds,
    written relative to 4/3 with the slack terms linearised."""
    s = n * (1 + 1 / math.sqrt(3))
    return FOUR_THIRDS - 23 / s, FOUR_THIRDS + 17 / (3 * s)


def ratio_tolerance(n: int) -> float:
    """Allowed |ratio - 4/3| at side n: the two bound slacks combined."""
    return (69 + 44) / (3 * n * (1 + 1 / math.sqrt(3)))


@dataclass(frozen=True)
class ConvergenceRow:
    report: BoundReport

    @property
    def N(self) -> int:
        return self.report.N

    @property
    def ratio(self) -> float:
        return self.report.ratio

    @property
    def gap(self) -> float:
        return self.report.gap

    @property
    def scaled_gap(self) -> float:
        return self.N * self.gap


def convergence_table(grid: Iterable[tuple[int, int]],
                      lp_source: LpSource | str = LpSource.CUT_PLANE,
                      tol: float = BOUND_TOL) -> list[ConvergenceRow]:
    rows = []
    for n, m in grid:
        rows.append(ConvergenceRow(integrality_ratio(build_modified(n, m), lp_source, tol)))
    return rows


def gaps_strictly_decreasing(rows: Sequence[ConvergenceRow]) -> bool:
    g = [abs(r.gap) for r in rows]
    return all(b < a for a, b in zip(g, g[1:]))


def in_gap_band(rows: Sequence[ConvergenceRow], band: tuple[float, float] = GAP_BAND) -> bool:
    lo, hi = band
    if not 0 < lo <= hi:
        raise ValueError("band must satisfy 0 < lo <= hi")
    return all(lo <= r.scaled_gap <= hi for r in rows)


def write_csv(reports: Iterable[BoundReport], out: TextIO | None = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for rep in reports:
        w.writerow(rep.csv_row())
    text = buf.getvalue()
    if out is not None:
        out.write(text)
    return text


# -- runtime model -------------------------------------------------------------

@dataclass(frozen=True)
class RuntimeModel:
    """seconds(N) = a * b**N"""

    a: float
    b: float
    residual: float = 0.0

    def __post_init__(self) -> None:
        if not self.a > 0 or not math.isfinite(self.b) or not self.b > 0:
            raise ValueError(f"invalid runtime model a={self.a}, b={self.b}")


# constants of the published exponential fit to exact-solver runtimes
PUBLISHED_MODEL = RuntimeModel(0.480, 1.0724)


def fit_runtime_model(points: Iterable[tuple[float, float]]) -> RuntimeModel:
    """Least squares of log(seconds) = log a + N log b."""
    pts = np.asarray(list(points), dtype=float).reshape(-1, 2)
    if len(pts) < 3:
        raise ValueError("a runtime fit needs at least 3 points")
    if np.any(pts[:, 1] <= 0):
        raise ValueError("runtimes must be positive")
    X = np.column_stack([np.ones(len(pts)), pts[:, 0]])
    y = np.log(pts[:, 1])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = float(np.sqrt(np.mean((X @ coef - y) ** 2)))
    return RuntimeModel(float(np.exp(coef[0])), float(np.exp(coef[1])), resid)


def predict_runtime(model: RuntimeModel, N: float) -> float:
    return model.a * model.b ** N
