import pytest

from errors import DimensionMismatch, InvalidShape
from linalg import IntMatrix, parse_matrix
from polymaps import PolyMap


def test_parse_and_evaluate():
    f = PolyMap.parse(["x0**2 + 3*x1"], 2)
    assert f((2,), (5,)) == (19,)
    assert f.degree == 2
    assert not f.is_homomorphism


def test_constant_term_rejected():
    with pytest.raises(InvalidShape):
        PolyMap.parse(["x0 + 1"], 1)


def test_unknown_variable_rejected():
    with pytest.raises(InvalidShape):
        PolyMap.parse(["x3"], 2)


def test_canonical_form_merges_terms():
    a = PolyMap.parse(["x0 + x0"], 1)
    b = PolyMap.parse(["2*x0"], 1)
    assert a == b
    assert hash(a) == hash(b)


def test_zero_and_projection():
    zero = PolyMap.zero(2, 1)
    assert zero((4,), (5,)) == (0,)
    proj = PolyMap.projection(3, 2, 1)
    assert proj((1, 2), (3, 4), (5, 6)) == (3, 4)


def test_matrix_round_trip():
    m = parse_matrix("1 0 2 0; 0 1 0 -1")
    f = PolyMap.from_matrix(m, 2)
    assert f.to_matrix() == m
    assert f((1, 2), (3, 4)) == (7, -2)


def test_from_matrix_checks_width():
    with pytest.raises(DimensionMismatch):
        PolyMap.from_matrix(parse_matrix("1 2 3"), 2)


def test_linear_form():
    f = PolyMap.linear_form((1, 0, 1))
    assert f((5,), (7,), (11,)) == (16,)


def test_arity_mismatch_on_call():
    f = PolyMap.linear_form((1, 1))
    with pytest.raises(DimensionMismatch):
        f((1,))


def test_lift_arity_ignores_new_arguments():
    f = PolyMap.parse(["x0**2"], 1)
    g = f.lift_arity(3)
    assert g.arity == 3
    assert g((3,), (100,), (-7,)) == (9,)


def test_compose_each_applies_c_to_every_argument():
    f = PolyMap.linear_form((1, 1))
    g = f.compose_each(IntMatrix.scalar(1, 3))
    assert g((1,), (2,)) == (9,)


def test_compose_each_needs_homomorphism():
    with pytest.raises(InvalidShape):
        PolyMap.parse(["x0**2"], 1).compose_each(IntMatrix.identity(1))


def test_multidimensional_parse():
    # variable i*dim + r is coordinate r of argument i
    f = PolyMap.parse(["x0 + x1", "x2"], 2, dim=2)
    assert f((1, 2), (3, 4)) == (3, 3)
