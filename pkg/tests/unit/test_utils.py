from fractions import Fraction
import re
import numpy as np
import pytest
from toric_embed.utils import (
    canonical_direction,
    check_epsilon,
    direction_key,
    dot,
    format_scalar,
    format_vector,
    hausdorff_distance,
    nullspace_basis,
    primitive,
    rank,
    rowspace_basis,
    sign,
    to_scalar,
    to_vector,
    unify_vectors,
    verbose_log,
)


@pytest.mark.parametrize(
    "value, exact, expected",
    [
        (3, False, Fraction(3)),
        ("3", False, Fraction(3)),
        ("-2/5", False, Fraction(-2, 5)),
        (" 7/2 ", False, Fraction(7, 2)),
        ("0.5", False, 0.5),
        ("1e-3", False, 0.001),
        (0.25, False, 0.25),
        ("0.5", True, Fraction(1, 2)),
        (0.25, True, Fraction(1, 4)),
        (np.int64(4), False, Fraction(4)),
    ],
)
def test_to_scalar(value, exact: bool, expected):
    result = to_scalar(value, exact=exact)
    assert result == expected
    assert type(result) is type(expected)


@pytest.mark.parametrize(
    "value, expected_error",
    [
        (None, "Scalar `value` can not be null"),
        (True, "Scalar `value` can not be a boolean"),
        ("   ", "Scalar `value` can not be empty or just whitespace"),
        (float("inf"), "Scalar `value` must be finite"),
        ([1], "Unsupported scalar `value` of type list"),
    ],
)
def test_to_scalar_invalid(value, expected_error: str):
    with pytest.raises(AssertionError, match=re.escape(expected_error)):
        to_scalar(value)


def test_to_vector_mixed_becomes_float():
    vector = to_vector([1, "1/2", 0.5])
    assert vector == (1.0, 0.5, 0.5)
    assert all(isinstance(x, float) for x in vector)


def test_to_vector_exact():
    vector = to_vector([1, "1/2"])
    assert vector == (Fraction(1), Fraction(1, 2))
    assert all(isinstance(x, Fraction) for x in vector)


def test_unify_vectors():
    exact = (Fraction(1), Fraction(0))
    floating = (0.5, 0.5)
    assert unify_vectors([exact, exact]) == (exact, exact)
    unified = unify_vectors([exact, floating])
    assert unified == ((1.0, 0.0), (0.5, 0.5))
    assert all(isinstance(x, float) for v in unified for x in v)


def test_dot_exact():
    assert dot((Fraction(1, 2), Fraction(1)), (Fraction(2), Fraction(3))) == Fraction(4)


@pytest.mark.parametrize(
    "vector, expected",
    [
        ((Fraction(2), Fraction(4)), (Fraction(1), Fraction(2))),
        ((Fraction(1, 2), Fraction(1, 3)), (Fraction(3), Fraction(2))),
        ((Fraction(-3), Fraction(0)), (Fraction(-1), Fraction(0))),
    ],
)
def test_primitive_exact(vector, expected):
    assert primitive(vector) == expected


def test_primitive_float_is_unit():
    result = primitive((3.0, 4.0))
    assert result == pytest.approx((0.6, 0.8))


def test_primitive_zero():
    with pytest.raises(
        AssertionError,
        match=re.escape("Can not take the primitive representative of the zero vector"),
    ):
        primitive((Fraction(0), Fraction(0)))


def test_canonical_direction_flips_sign():
    assert canonical_direction((Fraction(-2), Fraction(4))) == (Fraction(1), Fraction(-2))
    assert canonical_direction((Fraction(0), Fraction(-5))) == (Fraction(0), Fraction(1))


def test_direction_key_signed_and_unsigned():
    a = (Fraction(1), Fraction(-2))
    b = (Fraction(-2), Fraction(4))
    assert direction_key(a) != direction_key(b)
    assert direction_key(a, signed=False) == direction_key(b, signed=False)
    assert direction_key((1.0, 2.0)) == direction_key((2.0, 4.0))


def test_rank():
    rows = [(Fraction(1), Fraction(2)), (Fraction(2), Fraction(4))]
    assert rank(rows, exact=True) == 1
    assert rank([(1.0, 0.0), (0.0, 1.0)], exact=False) == 2
    assert rank([], exact=True) == 0


def test_nullspace_basis_exact():
    basis = nullspace_basis([(Fraction(-2), Fraction(1))], 2, exact=True)
    assert len(basis) == 1
    assert dot(basis[0], (Fraction(-2), Fraction(1))) == 0
    assert all(isinstance(x, Fraction) for x in basis[0])


def test_nullspace_basis_empty_rows():
    basis = nullspace_basis([], 3, exact=True)
    assert basis == [
        (Fraction(1), Fraction(0), Fraction(0)),
        (Fraction(0), Fraction(1), Fraction(0)),
        (Fraction(0), Fraction(0), Fraction(1)),
    ]


def test_nullspace_basis_float():
    basis = nullspace_basis([(1.0, 1.0)], 2, exact=False)
    assert len(basis) == 1
    assert abs(basis[0][0] + basis[0][1]) < 1e-12
    assert np.linalg.norm(basis[0]) == pytest.approx(1.0)


def test_rowspace_basis():
    rows = [(Fraction(-2), Fraction(1)), (Fraction(2), Fraction(-1))]
    basis = rowspace_basis(rows, 2, exact=True)
    assert len(basis) == 1
    assert canonical_direction(basis[0]) == (Fraction(2), Fraction(-1))
    assert rowspace_basis([], 2, exact=True) == []


def test_format_scalar():
    assert format_scalar(Fraction(3, 2)) == "3/2"
    assert format_scalar(Fraction(2)) == "2"
    assert format_scalar(0.25) == 0.25
    assert format_vector((Fraction(1), 0.5)) == ["1", 0.5]


def test_hausdorff_distance():
    assert hausdorff_distance(np.asarray([[0.0, 0.0]]), np.asarray([[3.0, 4.0]])) == pytest.approx(5.0)
    a = np.asarray([[0.0, 0.0], [1.0, 0.0]])
    assert hausdorff_distance(a, a) == 0.0


@pytest.mark.parametrize("epsilon", [0, 1, 1.5, -0.1])
def test_check_epsilon_out_of_range(epsilon: float):
    with pytest.raises(AssertionError, match=re.escape("`epsilon` must lie in (0,1)")):
        check_epsilon(epsilon)


def test_check_epsilon_named():
    assert check_epsilon("0.25") == 0.25
    with pytest.raises(AssertionError, match=re.escape("`ratio_epsilon` must lie in (0,1)")):
        check_epsilon(2, "ratio_epsilon")


def test_sign():
    assert sign(Fraction(1, 3)) == 1
    assert sign(-1e-12, tolerance=1e-9) == 0
    assert sign(-0.5) == -1


def test_verbose_log(capsys):
    verbose_log("hidden", verbose=False)
    assert capsys.readouterr().out == ""
    verbose_log("shown")
    assert capsys.readouterr().out.strip().endswith(": shown")
