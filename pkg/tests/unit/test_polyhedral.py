from fractions import Fraction
from itertools import combinations, product
import re
import numpy as np
import pytest
import sympy
from toric_embed.polyhedral import (
    MAX_ENUMERATED_CONSTRAINTS,
    Cone,
    HyperplaneFan,
    Relation,
    SignVector,
    cone_of,
    cone_sum,
    contains,
    fan_from_hyperplanes,
    intersect,
    polar,
    project,
    whole_space,
    zero_cone,
)


def utils_quadrant(exact: bool = True) -> Cone:
    if exact:
        return Cone(2, generators=[(1, 0), (0, 1)])
    return Cone(2, generators=[(1.0, 0.0), (0.0, 1.0)])


def test_cone_requires_a_representation():
    with pytest.raises(AssertionError, match=re.escape("A `Cone` needs `generators` or `constraints`")):
        Cone(2)


def test_cone_generator_dimension():
    with pytest.raises(
        AssertionError,
        match=re.escape("Generator `0` has 3 coordinates, expected `dimension` = 2"),
    ):
        Cone(2, generators=[(1, 0, 0)])


def test_cone_generators_are_reduced():
    cone = Cone(2, generators=[(1, 0), (0, 0), (2, 0), (0, 1)])
    assert cone.generators == ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)))


def test_quadrant_constraints():
    cone = utils_quadrant()
    assert cone.exact
    assert {c.normal for c in cone.constraints} == {
        (Fraction(1), Fraction(0)),
        (Fraction(0), Fraction(1)),
    }
    assert all(c.relation == Relation.GE for c in cone.constraints)


@pytest.mark.parametrize(
    "vector, expected",
    [
        ((1, 2), True),
        ((0, 0), True),
        ((0, 5), True),
        ((-1, 0), False),
        (("1/3", "-1/1000"), False),
    ],
)
def test_quadrant_contains_exact(vector, expected: bool):
    assert utils_quadrant().contains(vector) == expected
    assert contains(utils_quadrant(), vector) == expected


@pytest.mark.parametrize(
    "vector, expected",
    [
        ((1.0, 2.0), True),
        ((-1e-12, 1.0), True),
        ((-0.1, 1.0), False),
    ],
)
def test_quadrant_contains_float(vector, expected: bool):
    assert utils_quadrant(exact=False).contains(vector) == expected


def test_half_plane_lineality():
    cone = Cone(2, generators=[(1, 0), (0, 1), (0, -1)])
    assert cone.constraints == (((Fraction(1), Fraction(0)), Relation.GE),)
    assert cone.extreme_rays == [(Fraction(1), Fraction(0))]
    assert len(cone.lineality) == 1
    assert cone.lineality[0][0] == 0


def test_polar_of_quadrant():
    quadrant = utils_quadrant()
    negative = polar(quadrant)
    assert negative.contains((-1, -3))
    assert not negative.contains((1, 0))
    assert negative.equals(Cone(2, generators=[(-1, 0), (0, -1)]))
    assert polar(negative).equals(quadrant)


def test_polar_of_zero_cone_is_whole_space():
    assert zero_cone(2).polar().equals(whole_space(2))
    assert whole_space(2).polar().equals(zero_cone(2))
    assert zero_cone(2).contains((0, 0))
    assert not zero_cone(2).contains((1, 0))
    assert whole_space(3).contains((-1, 5, 2))


def test_cone_sum():
    total = cone_sum(Cone(2, generators=[(1, 0)]), Cone(2, generators=[(0, 1)]))
    assert total.equals(utils_quadrant())


def test_intersect():
    upper = Cone(2, constraints=[((-1, 1), Relation.GE)])
    wedge = intersect(utils_quadrant(), upper)
    assert wedge.equals(Cone(2, generators=[(0, 1), (1, 1)]))
    assert {r for r in wedge.extreme_rays} == {
        (Fraction(0), Fraction(1)),
        (Fraction(1), Fraction(1)),
    }


def test_polar_of_intersection_is_sum_of_polars():
    a = utils_quadrant()
    b = Cone(2, constraints=[((-1, 1), ">=0")])
    assert polar(intersect(a, b)).equals(cone_sum(polar(a), polar(b)))


def test_dimension_mismatch():
    with pytest.raises(AssertionError, match=re.escape("Cone dimensions do not match")):
        cone_sum(utils_quadrant(), whole_space(3))


def test_three_dimensional_double_description():
    # a square-based cone has four extreme rays
    cone = Cone(3, constraints=[((1, 0, 1), ">=0"), ((-1, 0, 1), ">=0"), ((0, 1, 1), ">=0"), ((0, -1, 1), ">=0")])
    rays = {tuple(r) for r in cone.extreme_rays}
    assert rays == {
        (Fraction(1), Fraction(1), Fraction(1)),
        (Fraction(1), Fraction(-1), Fraction(1)),
        (Fraction(-1), Fraction(1), Fraction(1)),
        (Fraction(-1), Fraction(-1), Fraction(1)),
    }
    assert cone.lineality == []
    assert cone.contains((0, 0, 1))
    assert not cone.contains((2, 0, 1))


def test_lineality_is_projected_out_of_rays():
    cone = Cone(2, constraints=[((1, 1), ">=0")])
    assert cone.extreme_rays == [(Fraction(1), Fraction(1))]
    assert len(cone.lineality) == 1
    assert cone.lineality[0][0] == -cone.lineality[0][1]
    assert cone.contains((5, -5))
    assert cone.contains((-1, 2))
    assert not cone.contains((-2, 1))


def test_float_double_description():
    cone = Cone(2, constraints=[((1.0, 1.0), ">=0")])
    assert not cone.exact
    assert len(cone.extreme_rays) == 1
    assert np.allclose(cone.extreme_rays[0], (np.sqrt(0.5), np.sqrt(0.5)))
    assert len(cone.lineality) == 1
    assert abs(cone.lineality[0][0] + cone.lineality[0][1]) < 1e-12

    square = Cone(3, constraints=[((1.0, 0.0, 1.0), ">=0"), ((-1.0, 0.0, 1.0), ">=0"), ((0.0, 1.0, 1.0), ">=0"), ((0.0, -1.0, 1.0), ">=0")])
    assert len(square.extreme_rays) == 4
    assert square.lineality == []


def utils_random_rational_cone(rng: np.random.Generator, dimension: int) -> list[tuple[Fraction, ...]]:
    count = int(rng.integers(1, 4))
    generators = []
    while len(generators) < count:
        g = tuple(Fraction(int(rng.integers(-2, 3)), int(rng.integers(1, 4))) for _ in range(dimension))
        if any(x != 0 for x in g):
            generators.append(g)
    return generators


def utils_subset_membership(generators: list[tuple[Fraction, ...]], vector: tuple[Fraction, ...]) -> bool:
    # a vector lies in a cone iff it is a non-negative combination of linearly independent generators
    if all(x == 0 for x in vector):
        return True
    target = sympy.Matrix([sympy.Rational(x.numerator, x.denominator) for x in vector])
    for size in range(1, len(generators) + 1):
        for subset in combinations(generators, size):
            columns = sympy.Matrix(
                [[sympy.Rational(g[i].numerator, g[i].denominator) for g in subset] for i in range(len(vector))]
            )
            if columns.rank() < size:
                continue
            try:
                solution, _ = columns.gauss_jordan_solve(target)
            except ValueError:
                continue
            if all(x >= 0 for x in solution):
                return True
    return False


@pytest.mark.parametrize("dimension", [2, 3])
@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_contains_matches_lambda_grid(dimension: int, seed: int):
    rng = np.random.default_rng(100 * dimension + seed)
    grid = [Fraction(i, 2) for i in range(5)]
    for _ in range(5):
        generators = utils_random_rational_cone(rng, dimension)
        cone = Cone(dimension, generators=generators)

        # every grid combination is a member
        for weights in product(grid, repeat=len(generators)):
            vector = tuple(sum((w * g[i] for w, g in zip(weights, generators)), Fraction(0)) for i in range(dimension))
            assert cone.contains(vector), f"{generators} with weights {weights}"

        # arbitrary vectors agree with a brute-force search over independent subsets
        for _ in range(20):
            vector = tuple(Fraction(int(x)) for x in rng.integers(-3, 4, size=dimension))
            assert cone.contains(vector) == utils_subset_membership(generators, vector), f"{generators} at {vector}"


def test_project_enumerated():
    projection = project(utils_quadrant(), (-1, 2))
    assert projection.point == pytest.approx([0.0, 2.0])
    assert projection.distance == pytest.approx(1.0)

    inside = project(utils_quadrant(), (3, 4))
    assert inside.distance == pytest.approx(0.0)


def test_project_alternating():
    redundant = [((1, k), Relation.GE) for k in range(MAX_ENUMERATED_CONSTRAINTS)] + [((0, 1), Relation.GE)]
    cone = Cone(2, constraints=redundant)
    assert len(cone.float_constraints[0]) > MAX_ENUMERATED_CONSTRAINTS
    projection = project(cone, (-1.0, 2.0))
    assert projection.point == pytest.approx([0.0, 2.0], abs=1e-6)
    assert projection.distance == pytest.approx(1.0, abs=1e-6)


def test_sign_vector():
    sigma = SignVector("+0-")
    assert sigma == (1, 0, -1)
    assert str(sigma) == "+0-"
    assert sigma.zeros == (1,)
    assert sigma.support == (0, 2)
    assert SignVector([1, -1]) == SignVector("+-")


def test_sign_vector_invalid():
    with pytest.raises(AssertionError, match=re.escape("Invalid sign vector string `+x`")):
        SignVector("+x")


@pytest.mark.parametrize("exact", [True, False])
def test_fan_sign_vectors(exact: bool):
    normals = [(1, 0), (0, 1), (1, 1)] if exact else [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]
    fan = fan_from_hyperplanes(normals)
    assert fan.exact == exact
    # three lines through the origin: six sectors, six rays and the origin
    assert len(fan.sign_vectors) == 13
    assert list(fan.sign_vectors) == sorted(fan.sign_vectors)
    assert fan.is_realizable("+-0")
    assert not fan.is_realizable("++-")
    assert not fan.is_realizable("++0")
    assert fan.is_complete()


def test_fan_of_two_axes():
    fan = HyperplaneFan(2, [(1, 0), (0, 1)])
    assert len(fan.sign_vectors) == 9
    assert len(fan.cones()) == 9


def test_fan_deduplicates_parallel_normals():
    fan = fan_from_hyperplanes([(1, 0), (-2, 0), (0, 3)])
    assert len(fan) == 2
    assert fan.directions == ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)))
    assert np.allclose(fan.normals, [[1.0, 0.0], [0.0, 1.0]])


def test_fan_locate_and_cone_of():
    fan = fan_from_hyperplanes([(1, 0), (0, 1), (1, 1)])
    assert fan.locate((1, -1)) == SignVector("+-0")
    assert fan.locate((0.5, 2.0)) == SignVector("+++")
    cone = cone_of(fan, "+-0")
    assert cone.contains((2, -2))
    assert not cone.contains((2, -1))


def test_fan_cone_of_unrealizable():
    fan = fan_from_hyperplanes([(1, 0), (0, 1), (1, 1)])
    with pytest.raises(AssertionError, match=re.escape("Sign vector `++-` is not realizable")):
        fan.cone_of("++-")


def test_fan_zero_normal():
    with pytest.raises(AssertionError, match=re.escape("Hyperplane normal at index `1` is zero")):
        fan_from_hyperplanes([(1, 0), (0, 0)])


def test_fan_empty():
    with pytest.raises(AssertionError, match=re.escape("`dimension` is required when `normals` is empty")):
        fan_from_hyperplanes([])

    fan = fan_from_hyperplanes([], dimension=2)
    assert fan.sign_vectors == (SignVector(()),)
    assert fan.cone_of(()).equals(whole_space(2))
