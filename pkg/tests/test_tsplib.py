import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tetratsp.instances import build_modified, build_tetrahedron, build_three_lines, from_points
from tetratsp.tsplib import (
    Metric,
    TsplibError,
    TsplibFile,
    distance_matrix,
    euc2d_distance,
    export_instance,
    nint,
    parse_tsplib,
    parse_tsplib_file,
    scaled_coords,
)


def test_export_header_and_rows():
    tf = export_instance(build_tetrahedron(9, 5))
    text = tf.render()
    lines = text.splitlines()
    assert lines[:5] == ["NAME: tetra_9_5", "TYPE: TSP", "DIMENSION: 40",
                         "EDGE_WEIGHT_TYPE: EUC_2D", "NODE_COORD_SECTION"]
    assert lines[5] == "1 0 0"
    assert lines[-1] == "EOF"
    assert text.endswith("\n")
    assert len(lines) == 5 + 40 + 1
    for row in lines[5:-1]:
        assert all(tok.lstrip("-").isdigit() for tok in row.split())
    text.encode("ascii")


def test_third_rounds_to_3333():
    tf = export_instance(from_points([(1 / 3, 0.0), (2 / 3, 0.0)]))
    assert tf.coords[0][1:] == (3333, 0)
    assert tf.coords[1][1:] == (6667, 0)


def test_nint_rounds_half_away_from_zero():
    assert nint(np.array([2.5, -2.5, 0.49999, -0.0, 3.5])).tolist() == [3.0, -3.0, 0.0, 0.0, 4.0]


def test_euc2d_examples():
    assert euc2d_distance((0, 0), (3, 4)) == 5
    assert euc2d_distance((0, 0), (1, 1)) == 1
    assert euc2d_distance((0, 0), (10000, 0)) == 10000
    assert euc2d_distance((0, 0), (1, 2)) == 2  # sqrt 5 = 2.236


coord = st.integers(-10**6, 10**6)
pt = st.tuples(coord, coord)


@given(pt, pt, pt)
def test_euc2d_symmetric_and_nearly_metric(p, q, r):
    assert euc2d_distance(p, q) == euc2d_distance(q, p)
    assert euc2d_distance(p, r) <= euc2d_distance(p, q) + euc2d_distance(q, r) + 1


def _round_trip(inst, scale=10000):
    tf = export_instance(inst, scale)
    back = parse_tsplib(tf.render(), scale=scale)
    tf2 = export_instance(back, scale)
    assert tf2.coords == tf.coords
    assert np.array_equal(tf.distance_matrix(), tf2.distance_matrix())
    assert np.array_equal(distance_matrix(inst, Metric.EUC2D), distance_matrix(back, Metric.EUC2D))


def test_round_trip_tetra_9_5():
    inst = build_tetrahedron(9, 5)
    tf = export_instance(inst)
    back = parse_tsplib(tf.render())
    assert len(back) == 40
    assert back.family.value == "imported"
    _round_trip(inst)


@given(st.integers(2, 100), st.integers(1, 100))
def test_round_trip_tetra_property(n, m):
    _round_trip(build_tetrahedron(n, m))


@given(st.integers(40, 100), st.integers(22, 100))
def test_round_trip_modified_property(n, m):
    _round_trip(build_modified(n, m))


@given(st.integers(1, 60), st.floats(0.1, 10.0))
def test_round_trip_lines_property(n, d):
    _round_trip(build_three_lines(n, d))


def test_missing_eof_is_accepted():
    text = export_instance(build_tetrahedron(3, 2)).render().replace("EOF\n", "")
    assert len(parse_tsplib(text)) == 13


def test_unsupported_weight_type():
    text = "NAME: x\nTYPE: TSP\nDIMENSION: 1\nEDGE_WEIGHT_TYPE: EXPLICIT\nNODE_COORD_SECTION\n1 0 0\nEOF\n"
    with pytest.raises(TsplibError, match="unsupported"):
        parse_tsplib(text)


@pytest.mark.parametrize("body", [
    "DIMENSION: 3\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 1 1\n",
    "DIMENSION: 2\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 1 x\n",
    "DIMENSION: 2\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n1 0 0\n3 1 1\n",
    "DIMENSION: 2\nEDGE_WEIGHT_TYPE: EUC_2D\nEDGE_WEIGHT_SECTION\n0 1\n",
    "DIMENSION: 2\nEDGE_WEIGHT_TYPE: EUC_2D\n",
    "DIMENSION two\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 1 1\n",
    "EDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n1 0 0\n",
])
def test_malformed_files(body):
    with pytest.raises(TsplibError):
        parse_tsplib_file(body)


def test_dimension_mismatch_in_file_object():
    with pytest.raises(TsplibError):
        TsplibFile("x", 2, ((1, 0, 0),))


def test_overflow_and_bad_scale():
    with pytest.raises(OverflowError):
        scaled_coords(build_tetrahedron(10, 3), scale=10**9)
    with pytest.raises(ValueError):
        scaled_coords(build_tetrahedron(10, 3), scale=0)


def test_parse_divides_by_scale():
    inst = parse_tsplib("DIMENSION: 2\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 30000 40000\nEOF\n")
    assert inst.dist("p0", "p1") == pytest.approx(5.0)
    assert distance_matrix(inst, Metric.EUC2D)[0, 1] == 50000
