"""Utilities shared by the graph, cone, inclusion and dynamics modules."""

from datetime import datetime
from fractions import Fraction
from math import gcd, isfinite, lcm, sqrt
from numbers import Integral, Real
from typing import Any, Iterable, Optional, Sequence, Union
import numpy as np
import sympy
from scipy.linalg import null_space, orth
from scipy.spatial.distance import directed_hausdorff

Scalar = Union[Fraction, float]
Vector = tuple[Scalar, ...]

DEFAULT_TOLERANCE = 1e-9
"""
Default tolerance used by floating-point membership and sign decisions.
"""


def verbose_log(msg: Any, verbose: bool = True):
    """
    Helper method to enable verbose logging via `print()`. Logs are sent to `stdout` and prefixed with a timestamp for easy sorting.

    Args:
        msg (Any): any string-serializable object
        verbose (bool, optional): when False, this is a no-op.
    """
    if verbose:
        print(f"{datetime.now()}: {msg}")


def to_scalar(value: Any, exact: bool = False) -> Scalar:
    """
    Parses a single coordinate into the package's scalar representation.

    Integers, `fractions.Fraction` objects and rational literals (`"3"`, `"-2/5"`) always become exact `Fraction` values. Decimal literals (`"0.5"`, `"1e-3"`) and floats become `float` values unless `exact` is set, in which case they are converted to the exact rational they denote.

    Args:
        value (Any): an int, Fraction, float, numpy scalar or string.
        exact (bool, optional): force decimal inputs into exact rationals.

    Returns:
        A `Fraction` or a `float`.
    """
    assert value is not None, "Scalar `value` can not be null"
    assert not isinstance(value, bool), "Scalar `value` can not be a boolean"

    if isinstance(value, Fraction):
        return value
    if isinstance(value, Integral):
        return Fraction(int(value))
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, str):
        text = value.strip()
        assert len(text) > 0, "Scalar `value` can not be empty or just whitespace"
        if "/" in text or _is_integer_literal(text) or exact:
            return Fraction(text)
        value = float(text)
    if isinstance(value, Real):
        value = float(value)
        assert isfinite(value), f"Scalar `value` must be finite, got {value}"
        return Fraction(value) if exact else value

    raise AssertionError(f"Unsupported scalar `value` of type {type(value).__name__}")


def _is_integer_literal(text: str) -> bool:
    try:
        int(text)
        return True
    except ValueError:
        return False


def to_vector(values: Iterable[Any], exact: bool = False) -> Vector:
    """
    Parses an iterable of coordinates into a vector. Vectors are either fully exact (all `Fraction`) or fully floating: a single floating entry turns the whole vector into floats.

    Args:
        values (Iterable[Any]): coordinates accepted by [to_scalar][toric_embed.utils.to_scalar].
        exact (bool, optional): force decimal inputs into exact rationals.

    Returns:
        A tuple of scalars.
    """
    assert values is not None, "Vector `values` can not be null"
    parsed = tuple(to_scalar(v, exact=exact) for v in values)
    if all(isinstance(v, Fraction) for v in parsed):
        return parsed
    return tuple(float(v) for v in parsed)


def unify_vectors(vectors: Iterable[Vector]) -> tuple[Vector, ...]:
    """
    Makes a collection of vectors share one number type: if any vector is floating, all become floating.
    """
    vectors = tuple(vectors)
    if all(is_exact(v) for v in vectors):
        return vectors
    return tuple(tuple(float(x) for x in v) for v in vectors)


def is_exact(vector: Iterable[Scalar]) -> bool:
    return all(isinstance(v, Fraction) for v in vector)


def is_zero(vector: Iterable[Scalar], tolerance: float = 0.0) -> bool:
    return all(abs(v) <= tolerance for v in vector)


def dot(a: Sequence[Scalar], b: Sequence[Scalar]) -> Scalar:
    assert len(a) == len(b), f"Dimension mismatch in dot product: {len(a)} != {len(b)}"
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def add(a: Sequence[Scalar], b: Sequence[Scalar]) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def subtract(a: Sequence[Scalar], b: Sequence[Scalar]) -> Vector:
    return tuple(x - y for x, y in zip(a, b))


def scale(vector: Sequence[Scalar], factor: Scalar) -> Vector:
    return tuple(factor * x for x in vector)


def negate(vector: Sequence[Scalar]) -> Vector:
    return tuple(-x for x in vector)


def norm(vector: Sequence[Scalar]) -> float:
    return sqrt(float(sum(float(x) * float(x) for x in vector)))


def unit(vector: Sequence[Scalar]) -> np.ndarray:
    """
    Returns `vector` as a unit-length float array.
    """
    array = np.asarray([float(x) for x in vector], dtype=float)
    length = np.linalg.norm(array)
    assert length > 0, "Can not normalize the zero vector"
    return array / length


def primitive(vector: Sequence[Scalar]) -> Vector:
    """
    Rescales a vector by a positive factor into a canonical representative of its ray.

    Exact vectors become primitive integer vectors (coprime integer entries, still stored as `Fraction`); floating vectors become unit vectors.

    Args:
        vector (Sequence[Scalar]): a nonzero vector.

    Returns:
        The canonical representative of the ray through `vector`.
    """
    assert not is_zero(vector), "Can not take the primitive representative of the zero vector"
    if not is_exact(vector):
        return tuple(float(x) for x in unit(vector))

    multiple = 1
    for x in vector:
        multiple = lcm(multiple, x.denominator)
    integers = [int(x * multiple) for x in vector]
    divisor = 0
    for x in integers:
        divisor = gcd(divisor, abs(x))
    return tuple(Fraction(x // divisor) for x in integers)


def canonical_direction(vector: Sequence[Scalar]) -> Vector:
    """
    Canonical representative of the line through `vector`: the primitive representative whose first nonzero entry is positive.
    """
    representative = primitive(vector)
    for x in representative:
        if x != 0:
            return representative if x > 0 else negate(representative)
    return representative


def direction_key(vector: Sequence[Scalar], signed: bool = True, digits: int = 10) -> tuple:
    """
    A hashable key identifying the ray (or, when `signed` is False, the line) through `vector`. Floating vectors are rounded to `digits` decimals after normalization.
    """
    representative = primitive(vector) if signed else canonical_direction(vector)
    if is_exact(representative):
        return tuple(representative)
    return tuple(round(x, digits) + 0.0 for x in representative)


def to_fraction_vector(values: Iterable[Any]) -> Vector:
    return tuple(Fraction(int(v.p), int(v.q)) if isinstance(v, sympy.Rational) else Fraction(v) for v in values)


def rank(rows: Sequence[Sequence[Scalar]], exact: bool, tolerance: float = DEFAULT_TOLERANCE) -> int:
    """
    Rank of a list of row vectors, exact via `sympy` or floating via `numpy`.
    """
    if len(rows) == 0:
        return 0
    if exact:
        return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in rows]).rank()
    return int(np.linalg.matrix_rank(np.asarray(rows, dtype=float), tol=tolerance))


def nullspace_basis(
    rows: Sequence[Sequence[Scalar]], dimension: int, exact: bool
) -> list[Vector]:
    """
    A basis of `{x : r·x = 0 for every row r}`.

    Exact inputs use `sympy.Matrix.nullspace` and return primitive integer vectors; floating inputs use `scipy.linalg.null_space` and return orthonormal vectors.

    Args:
        rows (Sequence[Sequence[Scalar]]): the constraint rows; may be empty.
        dimension (int): the ambient dimension.
        exact (bool): whether to compute in exact arithmetic.

    Returns:
        A list of basis vectors (empty when the rows span the space).
    """
    if len(rows) == 0:
        return [
            tuple((Fraction(1) if exact else 1.0) if i == j else (Fraction(0) if exact else 0.0) for j in range(dimension))
            for i in range(dimension)
        ]
    if exact:
        matrix = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in rows])
        return [primitive(to_fraction_vector(v)) for v in matrix.nullspace()]
    basis = null_space(np.asarray(rows, dtype=float))
    return [tuple(float(x) for x in basis[:, i]) for i in range(basis.shape[1])]


def rowspace_basis(
    rows: Sequence[Sequence[Scalar]], dimension: int, exact: bool
) -> list[Vector]:
    """
    A basis of the linear span of `rows`; exact bases are primitive integer vectors, floating bases are orthonormal.
    """
    if len(rows) == 0:
        return []
    if exact:
        matrix = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in rows])
        return [primitive(to_fraction_vector(v)) for v in matrix.rowspace() if any(x != 0 for x in v)]
    basis = orth(np.asarray(rows, dtype=float).T)
    return [tuple(float(x) for x in basis[:, i]) for i in range(basis.shape[1])]


def format_scalar(value: Scalar) -> Union[str, float]:
    """
    Serializes a scalar for JSON output: exact values become `"p/q"` (or `"p"`) strings, floats stay floats.
    """
    if isinstance(value, Fraction):
        return str(value)
    return float(value)


def format_vector(vector: Iterable[Scalar]) -> list[Union[str, float]]:
    return [format_scalar(x) for x in vector]


def hausdorff_distance(a: np.ndarray, b: np.ndarray) -> float:
    """
    Symmetric Hausdorff distance between two point clouds, via [`scipy.spatial.distance.directed_hausdorff`](https://docs.scipy.org/doc/scipy/reference/generated/scipy.spatial.distance.directed_hausdorff.html).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(max(directed_hausdorff(a, b)[0], directed_hausdorff(b, a)[0]))


def check_epsilon(epsilon: Any, name: str = "epsilon") -> float:
    """
    Validates a rate bound and returns it as a float.
    """
    assert epsilon is not None, f"`{name}` can not be null"
    value = float(epsilon)
    assert 0 < value < 1, f"`{name}` must lie in (0,1)"
    return value


def sign(value: Scalar, tolerance: float = 0.0) -> int:
    if value > tolerance:
        return 1
    if value < -tolerance:
        return -1
    return 0


def optional_float(value: Optional[Scalar]) -> Optional[float]:
    return None if value is None else float(value)
