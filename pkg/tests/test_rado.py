import random
from itertools import combinations, permutations, product

import pytest
from sympy import Rational

from errors import InvalidCertificate, UsageError
from linalg import IntMatrix, parse_matrix
from rado import (
    ColumnsCertificate, ColumnsDocument, GenColumnsDocument, apply_column_maps, check_columns,
    check_columns_general, columns_shape, columns_solution, deuber_reduce, find_general_columns,
    hypothesis_check, verify_columns, verify_general_columns,
)
from shapes import from_mpc, generate


def _subset_sum_zero(values):
    return any(sum(c) == 0 for size in range(1, len(values) + 1) for c in combinations(values, size))


def test_schur_matrix_blocks():
    cert = check_columns(parse_matrix("1 1 -1"))
    assert cert.blocks == ((0, 2), (1,))
    assert verify_columns(parse_matrix("1 1 -1"), cert)


def test_single_equation_matches_subset_sum_oracle():
    values = [x for x in range(-3, 4) if x]
    for row in product(values, repeat=3):
        A = IntMatrix.from_rows([list(row)])
        assert (check_columns(A) is not None) == _subset_sum_zero(row), row


def test_non_regular_equation():
    assert check_columns(parse_matrix("1 1 1")) is None
    assert check_columns(parse_matrix("1 2 -4")) is None


def test_two_row_system():
    A = parse_matrix("1 1 -1 0; 1 0 1 -1")
    cert = check_columns(A)
    assert cert is not None
    assert verify_columns(A, cert)


def test_empty_matrix_is_a_usage_error():
    with pytest.raises(UsageError):
        check_columns(IntMatrix.zeros(0, 0))


def test_tampered_certificate_rejected():
    A = parse_matrix("1 1 -1")
    cert = check_columns(A)
    bad = ColumnsCertificate(cert.blocks, ((Rational(1), Rational(1)),))
    assert not verify_columns(A, bad)
    assert not verify_columns(A, ColumnsCertificate(((0,), (1, 2)), ((Rational(1),),)))


def test_columns_document_round_trip():
    A = parse_matrix("1 1 -1")
    cert = check_columns(A)
    doc = ColumnsDocument.from_certificate(A, cert)
    A2, cert2 = ColumnsDocument.model_validate_json(doc.model_dump_json()).to_certificate()
    assert A2 == A
    assert verify_columns(A2, cert2)


def test_schur_reduction_rows_lie_in_mpc_set():
    A = parse_matrix("1 1 -1")
    red = deuber_reduce(A, check_columns(A))
    assert (A @ red.B).is_zero
    assert (red.m, red.p, red.c) == (1, 1, 1)
    assert sorted(red.B.as_rows()) == [[0, 1], [1, 0], [1, 1]]
    rng = random.Random(11)
    shape = from_mpc(red.m, red.p, red.c)
    for _ in range(100):
        s = (rng.randint(1, 10), rng.randint(1, 10))
        points = set(generate(shape, [(x,) for x in s]).points)
        for i in range(red.B.rows):
            entry = sum(b * x for b, x in zip(red.B.row(i), s))
            assert (entry,) in points


def test_reduction_clears_denominators():
    # 2x - 2y + z = 0: z = -1/2 * (-2y), so c must absorb the 2
    A = parse_matrix("2 -2 1")
    cert = check_columns(A)
    red = deuber_reduce(A, cert)
    assert (A @ red.B).is_zero
    assert red.c == 2
    rng = random.Random(5)
    shape = from_mpc(red.m, red.p, red.c)
    for _ in range(30):
        s = [rng.randint(1, 9) for _ in range(red.m + 1)]
        points = set(generate(shape, [(x,) for x in s]).points)
        for i in range(red.B.rows):
            assert (sum(b * x for b, x in zip(red.B.row(i), s)),) in points


def test_columns_condition_ignores_column_order():
    values = [-2, -1, 1, 2]
    systems = [[list(row)] for row in product(values, repeat=3)]
    systems += [[[1, 1, -1, 0], [1, 0, 1, -1]], [[1, 2, -1, 0], [0, 1, 1, -2]], [[2, -1, 0, 1], [1, 1, -2, 0]]]
    for rows in systems:
        expected = check_columns(IntMatrix.from_rows(rows)) is not None
        for perm in permutations(range(len(rows[0]))):
            shuffled = IntMatrix.from_rows([[row[j] for j in perm] for row in rows])
            cert = check_columns(shuffled)
            assert (cert is not None) == expected, (rows, perm)
            if cert is not None:
                assert verify_columns(shuffled, cert)


@pytest.mark.parametrize("row", [[1, 1, -2], [1, 1, 1, -3], [1, 1, 1, 1, -4], [1, 1, 1, -2], [1, 1, 1, 1, -3]])
def test_brauer_like_rows_reduce_into_mpc_sets(row):
    A = IntMatrix.from_rows([row])
    red = deuber_reduce(A, check_columns(A))
    assert (A @ red.B).is_zero
    rng = random.Random(sum(row))
    shape = from_mpc(red.m, red.p, red.c)
    for _ in range(100):
        s = [rng.randint(1, 10) for _ in range(red.m + 1)]
        points = set(generate(shape, [(x,) for x in s]).points)
        for i in range(red.B.rows):
            assert (sum(b * x for b, x in zip(red.B.row(i), s)),) in points


def test_reduce_rejects_bad_certificate():
    A = parse_matrix("1 1 -1")
    with pytest.raises(InvalidCertificate):
        deuber_reduce(A, ColumnsCertificate(((0,), (1, 2)), ((Rational(1),),)))


def test_general_condition_agrees_with_classic_in_dimension_one():
    c_list = [IntMatrix.from_rows([[x]]) for x in (1, 1, -1)]
    cert = check_columns_general(c_list, IntMatrix.identity(1))
    assert cert is not None
    assert verify_general_columns(cert)


def test_general_condition_needs_scalar_two():
    c_list = [IntMatrix.from_rows([[x]]) for x in (2, -2, 3)]
    assert check_columns_general(c_list, IntMatrix.identity(1)) is None
    cert = find_general_columns(c_list)
    assert cert.c.scalar_value() == 2
    assert verify_general_columns(cert)
    assert hypothesis_check(cert.c) == "center"


def test_columns_solution_solves_and_lies_in_shape():
    c_list = [IntMatrix.from_rows([[x]]) for x in (2, -2, 3)]
    cert = find_general_columns(c_list)
    shape = columns_shape(cert)
    rng = random.Random(2)
    for _ in range(50):
        s = [(rng.choice([x for x in range(-8, 9) if x]),) for _ in range(cert.m + 1)]
        x = columns_solution(cert, s)
        assert apply_column_maps(c_list, x) == (0,)
        points = set(generate(shape, s).points)
        assert all(xi in points for xi in x)


def test_two_dimensional_column_maps():
    identity = IntMatrix.identity(2)
    c_list = [identity, identity, -identity]
    cert = check_columns_general(c_list, identity)
    assert verify_general_columns(cert)
    s = [(1, 2), (3, -1)]
    x = columns_solution(cert, s)
    assert apply_column_maps(c_list, x) == (0, 0)


def test_gen_columns_document_round_trip():
    c_list = [IntMatrix.from_rows([[x]]) for x in (2, -2, 3)]
    cert = find_general_columns(c_list)
    doc = GenColumnsDocument.from_certificate(cert)
    again = GenColumnsDocument.model_validate_json(doc.model_dump_json()).to_certificate()
    assert verify_general_columns(again)


@pytest.mark.parametrize("text, reason", [
    ("3", "center"),
    ("2 0; 0 2", "center"),
    ("1 1; 0 1", "finite-index"),
    ("1 1; 1 1", None),
])
def test_hypothesis_check(text, reason):
    assert hypothesis_check(parse_matrix(text)) == reason
