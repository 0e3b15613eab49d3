import math

import numpy as np
import pytest

from tetratsp.analysis import (
    BoundReport,
    CSV_HEADER,
    FOUR_THIRDS,
    GAP_BAND,
    PUBLISHED_MODEL,
    SECONDS_PER_DAY,
    SECONDS_PER_YEAR,
    ConvergenceRow,
    LpSource,
    OptSource,
    RuntimeModel,
    bounds_guaranteed,
    closed_form_applies,
    convergence_table,
    default_m,
    fit_runtime_model,
    gaps_strictly_decreasing,
    in_gap_band,
    integrality_ratio,
    predict_runtime,
    ratio_interval,
    ratio_tolerance,
    write_csv,
)
from tetratsp.errors import PreconditionError
from tetratsp.instances import build_modified, build_tetrahedron, from_points


@pytest.fixture(scope="module")
def report_48_24():
    return integrality_ratio(build_modified(48, 24))


def test_ratio_48_24_inside_interval(report_48_24):
    r = report_48_24
    lo, hi = ratio_interval(48)
    assert lo <= r.ratio <= hi
    assert r.opt_source is OptSource.CLOSED_FORM and r.lp_source is LpSource.CUT_PLANE
    assert r.ratio == pytest.approx(r.opt_length / r.lp_value, abs=0)
    assert r.thm11_ok and r.thm12_ok
    assert 1 <= r.ratio <= 1.5


def test_ratio_interval_values():
    s = 48 * (1 + 1 / math.sqrt(3))
    assert ratio_interval(48) == (FOUR_THIRDS - 23 / s, FOUR_THIRDS + 17 / (3 * s))
    assert ratio_tolerance(40) == pytest.approx(113 / (120 * (1 + 1 / math.sqrt(3))), abs=1e-15)


def test_three_points_ratio_is_one():
    r = integrality_ratio(from_points([(0, 0), (1, 0), (0, 1)]))
    assert r.ratio == pytest.approx(1.0, abs=1e-12)
    assert r.opt_source is OptSource.ORACLE
    assert r.thm11_ok is None and r.thm12_ok is None
    assert r.n is None and r.m is None


def test_small_tetrahedron_uses_oracle():
    r = integrality_ratio(build_tetrahedron(3, 2))
    assert r.opt_source is OptSource.ORACLE and r.n == 3 and r.m == 2
    assert r.opt_length >= r.lp_value - 1e-9


def test_ratio_grows_from_40_to_80():
    small = integrality_ratio(build_modified(40, 27))
    large = integrality_ratio(build_modified(80, 54))
    assert large.ratio > small.ratio
    assert large.ratio < FOUR_THIRDS


def test_no_exact_path_available():
    with pytest.raises(PreconditionError):
        integrality_ratio(build_tetrahedron(10, 5))
    with pytest.raises(PreconditionError):
        integrality_ratio(build_tetrahedron(3, 2), LpSource.EXPLICIT_UPPER)


def test_explicit_upper_gives_lower_ratio(report_48_24):
    r = integrality_ratio(build_modified(48, 24), "ExplicitUpper")
    assert r.lp_value >= report_48_24.lp_value - 1e-9
    assert r.ratio <= report_48_24.ratio + 1e-12


def test_guaranteed_range_flags():
    assert closed_form_applies(build_modified(48, 24))
    assert not bounds_guaranteed(build_modified(48, 24))
    assert bounds_guaranteed(build_modified(48, 32))
    assert not closed_form_applies(build_modified(24, 18, force=True, i0=9))
    assert not closed_form_applies(build_tetrahedron(48, 24))


def test_default_m():
    assert [default_m(n) for n in (40, 48, 60, 80, 120)] == [28, 33, 41, 55, 81]
    assert all(n <= 1.5 * default_m(n) for n in range(40, 200))


def test_convergence_table_examples():
    rows = convergence_table([(n, default_m(n)) for n in (40, 60, 80)])
    assert gaps_strictly_decreasing(rows)
    assert in_gap_band(rows)
    assert all(r.scaled_gap == r.N * r.gap for r in rows)
    assert in_gap_band(rows[:1]) and gaps_strictly_decreasing(rows[:1])


def _fake(N, ratio):
    return BoundReport("tetra-mod", 1, 1, N, ratio, OptSource.CLOSED_FORM, 1.0, LpSource.CUT_PLANE, ratio, True, True)


def test_band_helpers_on_synthetic_rows():
    rows = [ConvergenceRow(_fake(100, FOUR_THIRDS - 0.3)), ConvergenceRow(_fake(200, FOUR_THIRDS - 0.1))]
    assert gaps_strictly_decreasing(rows)
    assert in_gap_band(rows)
    assert not in_gap_band(rows, (25, 76))
    assert not gaps_strictly_decreasing(rows[::-1])
    with pytest.raises(ValueError):
        in_gap_band(rows, (0.0, 1.0))
    assert GAP_BAND[0] > 0


def test_csv_output(report_48_24):
    text = write_csv([report_48_24])
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_HEADER) == "family,n,m,N,opt,lp,ratio,gap,thm11_ok,thm12_ok"
    fields = lines[1].split(",")
    assert fields[:4] == ["tetra-mod", "48", "24", "190"]
    assert fields[8:] == ["true", "true"]
    for f in fields[4:8]:
        assert len(f.replace("-", "").replace(".", "").lstrip("0")) <= 10
    oracle_row = write_csv([integrality_ratio(from_points([(0, 0), (1, 0), (0, 1)]))]).splitlines()[1]
    assert oracle_row.startswith("imported,,,3,") and oracle_row.endswith(",na,na")


# -- runtime model -------------------------------------------------------------

NS = np.arange(52, 200, 3)


def test_noiseless_fit_recovers_constants():
    pts = [(N, predict_runtime(PUBLISHED_MODEL, N)) for N in NS]
    model = fit_runtime_model(pts)
    assert abs(model.b - 1.0724) <= 1e-6
    assert abs(model.a - 0.480) <= 1e-6
    assert model.residual < 1e-9


def test_noisy_fit_within_one_percent(rng):
    for _ in range(100):
        pts = [(N, predict_runtime(PUBLISHED_MODEL, N) * rng.lognormal(0.0, 0.05)) for N in NS]
        assert abs(fit_runtime_model(pts).b - 1.0724) <= 0.01 * 1.0724


def test_published_predictions():
    assert predict_runtime(PUBLISHED_MODEL, 214) / SECONDS_PER_DAY == pytest.approx(17, rel=0.05)
    assert predict_runtime(PUBLISHED_MODEL, 214) == pytest.approx(1.5e6, rel=0.05)
    assert predict_runtime(PUBLISHED_MODEL, 250) / SECONDS_PER_DAY == pytest.approx(216, rel=0.01)
    assert predict_runtime(PUBLISHED_MODEL, 0) == 0.480
    years = predict_runtime(PUBLISHED_MODEL, 1000) / SECONDS_PER_YEAR
    assert 1e22 < years < 1e23


@pytest.mark.parametrize("pts", [[(1, 1.0), (2, 2.0)], [(1, 1.0), (2, 0.0), (3, 1.0)], [(1, 1.0), (2, -1.0), (3, 4.0)]])
def test_fit_errors(pts):
    with pytest.raises(ValueError):
        fit_runtime_model(pts)


def test_model_validation():
    with pytest.raises(ValueError):
        RuntimeModel(0.0, 1.1)
    with pytest.raises(ValueError):
        RuntimeModel(1.0, float("inf"))
