"""One test per acceptance criterion; each prints a single PASS/FAIL line."""
import math
import time

import numpy as np
import pytest

from tetratsp.analysis import (
    GAP_BAND,
    PUBLISHED_MODEL,
    SECONDS_PER_DAY,
    SECONDS_PER_YEAR,
    convergence_table,
    default_m,
    fit_runtime_model,
    gaps_strictly_decreasing,
    in_gap_band,
    predict_runtime,
    ratio_tolerance,
)
from tetratsp.instances import (
    build_modified,
    build_tetrahedron,
    build_three_lines,
    removal_threshold,
)
from tetratsp.oracle import held_karp_opt, permutation_opt
from tetratsp.subtour import (
    build_explicit_fractional,
    check_feasibility,
    enumerate_subtour_lp,
    lp_bounds,
    solve_subtour_lp,
)
from tetratsp.tours import (
    build_tstar,
    closed_form_opt_length,
    decompose_trips,
    hull_order_ok,
    is_simple_polygon,
    opt_tour_bounds,
    tour_length,
)
from tetratsp.instances import from_points
from tetratsp.tsplib import Metric, distance_matrix, export_instance, parse_tsplib

S3 = math.sqrt(3)
TSTAR_GRID = [(n, m) for n in (40, 44, 48, 60, 80) for m in (22, 24, 30, 40, 54) if n <= 1.5 * m]


@pytest.fixture
def report(capsys):
    def _report(k, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {k}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return _report


def _reference_points(n, m):
    """Coordinates written out vertex by vertex from the defining formulas."""
    pts = {}
    for i in range(n + 1):
        pts[f"a{i}"] = (n - i / 2, i * S3 / 2)
        pts[f"b{i}"] = (n / 2 - i / 2, (n - i) * S3 / 2)
        pts[f"c{i}"] = (i, 0.0)
    for j in range(m + 1):
        pts[f"e{j}"] = (j * n / (2 * m), j * n / (2 * S3 * m))
        pts[f"f{j}"] = (n - j * n / (2 * m), j * n / (2 * S3 * m))
        pts[f"g{j}"] = (n / 2, n * S3 / 2 - j * n / (S3 * m))
    return pts


def test_criterion_1_construction(report):
    t = time.perf_counter()
    inst = build_tetrahedron(9, 5)
    coords_err = max(float(np.hypot(*(inst.point(lab) - np.array(p))))
                     for lab, p in _reference_points(9, 5).items())
    grid = [(n, m) for n in (2, 5, 9, 17, 30) for m in (1, 3, 5, 12)]
    spacing_err = 0.0
    for n, m in grid:
        g = build_tetrahedron(n, m)
        for k in "cab":
            spacing_err = max(spacing_err, max(abs(g.dist(f"{k}{i}", f"{k}{i + 1}") - 1) for i in range(n)))
        for k in "efg":
            spacing_err = max(spacing_err,
                              max(abs(g.dist(f"{k}{j}", f"{k}{j + 1}") - n / (S3 * m)) for j in range(m)))
    elapsed = time.perf_counter() - t
    ok = len(inst) == 40 and coords_err <= 1e-9 and spacing_err <= 1e-9 and len(grid) == 20 and elapsed < 1
    report(1, ok, f"|T(9,5)|={len(inst)}, coord err {coords_err:.1e}, spacing err {spacing_err:.1e} "
                  f"on {len(grid)} grid points, {elapsed:.2f}s")


def test_criterion_2_modified_instances(report):
    t = time.perf_counter()
    inst = build_modified(48, 24)
    innermost = sorted({inst.labels[i].index for i in np.flatnonzero(inst.internal_mask)})[0]
    labels_ok = all(f"{k}9" in inst and f"{k}8" not in inst for k in "efg")
    worst_corner = worst_base = np.inf
    for n, m in TSTAR_GRID + [(48, 24), (100, 67), (150, 30)]:
        mod = build_modified(n, m)
        internal = np.flatnonzero(mod.internal_mask)
        D = mod.distance_matrix
        corners = [mod.index(x) for x in ("c0", "a0", "b0")]
        thr = removal_threshold(mod.gamma)
        worst_corner = min(worst_corner, float(D[np.ix_(internal, corners)].min() - thr))
        worst_base = min(worst_base, float(D[np.ix_(internal, mod.base_indices)].min() - 5))
    elapsed = time.perf_counter() - t
    ok = inst.i0 == 9 and innermost == 9 and labels_ok and worst_corner >= -1e-9 and worst_base >= -1e-9 \
        and elapsed < 1
    report(2, ok, f"i0(48,24)={inst.i0}, min corner slack {worst_corner:.3f}, "
                  f"min base slack {worst_base:.3f}, {elapsed:.2f}s")


def test_criterion_3_tstar_structure(report):
    bad = []
    worst = 0.0
    for n, m in TSTAR_GRID:
        inst = build_modified(n, m)
        tour = build_tstar(inst)
        trips, _ = decompose_trips(tour)
        err = abs(tour_length(tour) - closed_form_opt_length(n, m))
        worst = max(worst, err)
        if not (is_simple_polygon(tour) and hull_order_ok(tour) and len(trips) == 1 and err <= 1e-9):
            bad.append((n, m))
    report(3, not bad, f"{len(TSTAR_GRID)} grid points, failures {bad}, max |length - closed form| {worst:.1e}")


def test_criterion_4_tour_sandwich(report):
    outside = []
    slack = np.inf
    for n, m in TSTAR_GRID:
        lo, hi = opt_tour_bounds(n)
        v = closed_form_opt_length(n, m)
        if not lo - 1e-9 <= v <= hi + 1e-9:
            outside.append((n, m))
        slack = min(slack, v - lo, hi - v)
    report(4, not outside, f"{len(TSTAR_GRID)} grid points, outside {outside}, min slack {slack:.3f}")


def test_criterion_5_lp_sandwich(report):
    parts, ok = [], True
    for n, m in ((40, 27), (48, 32)):
        inst = build_modified(n, m)
        t = time.perf_counter()
        res = solve_subtour_lp(inst)
        elapsed = time.perf_counter() - t
        lo, hi = lp_bounds(n)
        explicit = build_explicit_fractional(inst)
        feas = check_feasibility(explicit)
        upper = explicit.length()
        deg_exact = np.abs(explicit.degrees() - 2).max() <= 1e-9
        this = (lo <= res.objective <= hi and feas.feasible and deg_exact
                and feas.min_cut.cut_weight >= 2 - 1e-6 and upper >= res.objective - 1e-9)
        ok &= this
        parts.append(f"T'({n},{m}) lp={res.objective:.4f} in [{lo:.2f}, {hi:.2f}] "
                     f"explicit={upper:.4f} feasible={feas.feasible} ({elapsed:.1f}s)")
    report(5, ok, "; ".join(parts))


def test_criterion_6_oracle_equivalence(report):
    rng = np.random.default_rng(6)
    worst_lp = 0.0
    for _ in range(50):
        inst = from_points(rng.random((int(rng.integers(8, 13)), 2)) * 100)
        ref = enumerate_subtour_lp(inst)
        worst_lp = max(worst_lp, abs(solve_subtour_lp(inst).objective - ref) / (1 + abs(ref)))
    hk_mismatch = 0
    for _ in range(50):
        inst = from_points(rng.random((int(rng.integers(3, 11)), 2)))
        hk_mismatch += held_karp_opt(inst).length != permutation_opt(inst).length
    ok = worst_lp <= 1e-6 and hk_mismatch == 0
    report(6, ok, f"cutting plane vs enumeration worst rel diff {worst_lp:.1e} (50 inst); "
                  f"Held-Karp vs permutation mismatches {hk_mismatch}/50")


def test_criterion_7_ratio_convergence(report):
    ns = (40, 48, 60, 80, 120)
    rows = convergence_table([(n, default_m(n)) for n in ns])
    within = all(abs(r.ratio - 4 / 3) <= ratio_tolerance(n) for n, r in zip(ns, rows))
    dec = gaps_strictly_decreasing(rows)
    band = in_gap_band(rows)
    table = ", ".join(f"n={n}: ratio {r.ratio:.5f} N*gap {r.scaled_gap:.2f}" for n, r in zip(ns, rows))
    report(7, within and dec and band,
           f"{table}; within tolerance={within}, strictly decreasing={dec}, band {GAP_BAND}={band}")


def test_criterion_8_runtime_model(report):
    days214 = predict_runtime(PUBLISHED_MODEL, 214) / SECONDS_PER_DAY
    days250 = predict_runtime(PUBLISHED_MODEL, 250) / SECONDS_PER_DAY
    years1000 = predict_runtime(PUBLISHED_MODEL, 1000) / SECONDS_PER_YEAR
    fit = fit_runtime_model([(N, predict_runtime(PUBLISHED_MODEL, N)) for N in range(52, 200)])
    checks = {
        "N=214 17 days +-5%": abs(days214 / 17 - 1) <= 0.05,
        "N=250 216 days +-5%": abs(days250 / 216 - 1) <= 0.05,
        "N=1000 3e22 years +-10%": abs(years1000 / 3e22 - 1) <= 0.10,
        "noiseless fit b within 1e-6": abs(fit.b - 1.0724) <= 1e-6,
    }
    failed = [k for k, v in checks.items() if not v]
    report(8, not failed, f"214 -> {days214:.2f} days, 250 -> {days250:.1f} days, "
                          f"1000 -> {years1000:.3e} years, fitted b {fit.b:.9f}; failed checks {failed}")


def _generated_instances(max_n=400):
    for n in range(2, max_n // 3 + 1):
        for m in range(1, max_n // 3 + 1):
            if 3 * (n + m) - 2 > max_n:
                break
            yield build_tetrahedron(n, m)
            if n >= 40 and m >= 22:
                yield build_modified(n, m)
    for n in range(1, max_n // 3 + 1):
        for d in (0.1, 0.25, 1.0, 2.5):
            yield build_three_lines(n, d)


def test_criterion_9_tsplib_round_trip(report):
    t = time.perf_counter()
    count, bad = 0, []
    for inst in _generated_instances():
        tf = export_instance(inst)
        back = parse_tsplib(tf.render())
        if not (export_instance(back).coords == tf.coords
                and np.array_equal(distance_matrix(back, Metric.EUC2D), tf.distance_matrix())):
            bad.append(inst.name)
        count += 1
    elapsed = time.perf_counter() - t
    report(9, not bad and elapsed < 60, f"{count} instances with N <= 400, mismatches {bad[:5]}, {elapsed:.1f}s")
