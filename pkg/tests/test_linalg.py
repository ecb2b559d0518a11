import random

import pytest
from sympy import Rational

from errors import DimensionMismatch, UsageError
from linalg import (
    IntMatrix, adjugate, combine, in_span, index_of_image, integer_solvability, lcm_of, parse_matrix, rref,
    smith_decomposition, solve_integer_linear, solve_integer_matrix,
)


def test_parse_matrix_reads_rows():
    A = parse_matrix("1 1 -1; 0 2 3")
    assert (A.rows, A.cols) == (2, 3)
    assert A.as_rows() == [[1, 1, -1], [0, 2, 3]]
    assert str(A) == "1 1 -1; 0 2 3"


def test_parse_matrix_rejects_non_integers():
    with pytest.raises(UsageError):
        parse_matrix("1 a")
    with pytest.raises(UsageError):
        parse_matrix("1 1.5; 2 3")


def test_adjugate_inverts_up_to_the_determinant():
    adj, det = adjugate(parse_matrix("2 1; 1 1"))
    assert det == 1
    assert adj.as_rows() == [[1, -1], [-1, 2]]
    adj, det = adjugate(parse_matrix("2 0; 0 3"))
    assert (adj.as_rows(), det) == ([[3, 0], [0, 2]], 6)
    assert adjugate(parse_matrix("1 2; 2 4")) is None


def test_ragged_rows_rejected():
    with pytest.raises(DimensionMismatch):
        IntMatrix.from_rows([[1, 2], [3]])


def test_product_and_identity():
    A = parse_matrix("1 2; 3 4")
    assert A @ IntMatrix.identity(2) == A
    assert (A @ A).as_rows() == [[7, 10], [15, 22]]
    with pytest.raises(DimensionMismatch):
        A @ parse_matrix("1 2 3")


def test_block_helpers():
    b = parse_matrix("1 2; 3 4")
    diag = IntMatrix.block_diagonal(b, 2)
    assert diag.as_rows() == [[1, 2, 0, 0], [3, 4, 0, 0], [0, 0, 1, 2], [0, 0, 3, 4]]
    wide = IntMatrix.hstack([b, IntMatrix.identity(2)])
    assert wide.column_block(1, 2) == IntMatrix.identity(2)
    tall = IntMatrix.vstack([b, b])
    assert tall.row_block(1, 2) == b


def test_scalar_detection():
    assert IntMatrix.scalar(3, 2).scalar_value() == 2
    assert parse_matrix("1 1; 0 1").scalar_value() is None
    assert IntMatrix.identity(2).is_identity


def test_rref_pivots():
    _, pivots = rref(parse_matrix("1 2 3; 2 4 6; 0 0 1"))
    assert pivots == (0, 2)


def test_in_span_returns_coefficients():
    result = in_span((2, 3), [(1, 0), (0, 1)])
    assert result
    assert result.coefficients == (Rational(2), Rational(3))
    assert combine([(1, 0), (0, 1)], result.coefficients) == (2, 3)


def test_in_span_rational_coefficients():
    result = in_span((1,), [(2,)])
    assert result.coefficients == (Rational(1, 2),)


def test_in_span_rejects_and_empty_basis():
    assert not in_span((1, 1), [(1, 0)])
    assert in_span((0, 0), [])
    assert not in_span((1, 0), [])


def test_smith_decomposition_identity():
    rng = random.Random(7)
    for _ in range(50):
        rows = [[rng.randint(-6, 6) for _ in range(3)] for _ in range(2)]
        A = IntMatrix.from_rows(rows)
        D, U, V = smith_decomposition(A)
        assert U @ A @ V == D
        for i in range(D.rows):
            for j in range(D.cols):
                if i != j:
                    assert D[i, j] == 0


def test_integer_solvability_obstruction():
    # 2x = 1 has a rational but no integer solution
    result = integer_solvability(parse_matrix("2"), (1,))
    assert result.solution is None
    assert result.rational
    assert result.obstruction.divisor == 2


def test_integer_solution_found():
    A = parse_matrix("2 3")
    x = solve_integer_linear(A, (1,))
    assert A.apply(x) == (1,)


def test_inconsistent_system_is_not_rational():
    result = integer_solvability(parse_matrix("1 1; 1 1"), (1, 2))
    assert result.solution is None
    assert not result.rational


def test_solve_integer_matrix():
    c = parse_matrix("2 0; 0 3")
    rhs = parse_matrix("4 6; 3 9")
    X = solve_integer_matrix(c, rhs)
    assert c @ X == rhs
    assert solve_integer_matrix(c, parse_matrix("1 0; 0 1")) is None


@pytest.mark.parametrize("text, index", [
    ("1 0; 0 1", 1),
    ("2 0; 0 3", 6),
    ("1 1; 1 1", None),
    ("0 1; -1 0", 1),
])
def test_index_of_image(text, index):
    assert index_of_image(parse_matrix(text)) == index


def test_lcm_of():
    assert lcm_of([2, 3, 4]) == 12
    assert lcm_of([]) == 1
