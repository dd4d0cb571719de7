from fractions import Fraction
from math import exp, log, sqrt
import re
import pytest
from toric_embed.inclusion import (
    EvaluationMode,
    InclusionProvenance,
    ToricInclusion,
    build_from_differences,
    build_from_normals,
    build_reversible,
    build_weakly_reversible,
)
from toric_embed.model import EGraph
from toric_embed.polyhedral import Cone, SignVector, fan_from_hyperplanes
from tests.utils import (
    utils_example1_graph,
    utils_orthogonal_pair_graph,
    utils_single_edge_graph,
    utils_triangle_graph,
)


def utils_quadrant_cones() -> list[Cone]:
    return [
        Cone(2, generators=[(1, 0), (0, 1)]),
        Cone(2, generators=[(-1, 0), (0, 1)]),
        Cone(2, generators=[(-1, 0), (0, -1)]),
        Cone(2, generators=[(1, 0), (0, -1)]),
    ]


@pytest.mark.parametrize(
    "epsilon, expected_delta",
    [
        (exp(-1), 2 / sqrt(5)),
        (0.1, 2 * log(10) / sqrt(5)),
    ],
)
def test_build_reversible_example1(epsilon: float, expected_delta: float):
    inclusion = build_reversible(utils_example1_graph(), epsilon)
    assert inclusion.delta == pytest.approx(expected_delta)
    assert inclusion.directions == ((Fraction(2), Fraction(-1)),)
    assert inclusion.normals[0] == pytest.approx([2 / sqrt(5), -1 / sqrt(5)])
    assert inclusion.provenance.construction == "reversible"
    assert inclusion.provenance.attributions == (((0, 1),),)


def test_build_reversible_rejects_irreversible_graph():
    with pytest.raises(
        AssertionError,
        match=re.escape("Graph is not reversible: edge `0` (0->1) has no reverse edge"),
    ):
        build_reversible(utils_triangle_graph(), 0.5)


@pytest.mark.parametrize("epsilon", [0, 1, 2])
def test_build_reversible_epsilon_range(epsilon: float):
    with pytest.raises(AssertionError, match=re.escape("`epsilon` must lie in (0,1)")):
        build_reversible(utils_example1_graph(), epsilon)


def test_build_reversible_orthogonal_pair():
    inclusion = build_reversible(utils_orthogonal_pair_graph(), exp(-0.5))
    assert inclusion.delta == pytest.approx(1.0)
    assert inclusion.directions == ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)))


def test_build_weakly_reversible_triangle():
    inclusion = build_weakly_reversible(utils_triangle_graph(), exp(-1))
    assert inclusion.delta == pytest.approx(2.0)
    assert len(inclusion.directions) == 3
    assert set(inclusion.directions) == {
        (Fraction(1), Fraction(0)),
        (Fraction(0), Fraction(1)),
        (Fraction(1), Fraction(-1)),
    }
    assert inclusion.provenance.construction == "weakly-reversible"
    assert inclusion.provenance.effective_epsilon == pytest.approx(exp(-1))


def test_build_weakly_reversible_shared_edge():
    graph = EGraph(2, ((0, 0), (1, 0), (0, 1)), ((0, 1), (1, 0), (1, 2), (2, 0)))
    inclusion = build_weakly_reversible(graph, 0.2)
    assert inclusion.provenance.effective_epsilon == pytest.approx(0.1)
    assert inclusion.delta == pytest.approx(2 * log(10))


def test_build_weakly_reversible_rejects_single_edge():
    with pytest.raises(
        AssertionError,
        match=re.escape("Graph is not weakly reversible: edge `0` (0->1) lies on no directed cycle"),
    ):
        build_weakly_reversible(utils_single_edge_graph(), 0.5)


def test_build_from_differences_accepts_any_graph():
    inclusion = build_from_differences(utils_single_edge_graph(), exp(-1))
    assert inclusion.directions == ((Fraction(1), Fraction(0)),)
    assert inclusion.delta == pytest.approx(2.0)
    assert inclusion.provenance.construction == "differences"


def test_build_from_differences_no_edges():
    graph = EGraph(2, ((0, 0),), ())
    inclusion = build_from_differences(graph, exp(-1))
    assert inclusion.directions == ()
    assert inclusion.delta == pytest.approx(2.0)


def test_uncertainty_set_and_signature():
    inclusion = build_reversible(utils_example1_graph(), exp(-1))
    assert inclusion.uncertainty_set((0, 0)) == {0}
    assert inclusion.uncertainty_set((5, 0)) == set()
    assert inclusion.signature((5, 0)) == SignVector("+")
    assert inclusion.signature((-5, 0)) == SignVector("-")
    assert inclusion.signature((0.1, 0)) == SignVector("0")


def test_uncertainty_set_tie_counts_inside():
    inclusion = build_from_normals([(1, 0)], 1.0)
    assert inclusion.uncertainty_set((1.0, 7.0)) == {0}
    assert inclusion.signature((1.0, 7.0)) == SignVector("0")


def test_evaluate_hyperplane():
    inclusion = build_reversible(utils_example1_graph(), exp(-1))
    far = inclusion.evaluate_hyperplane((5, 0))
    assert far.contains((-2, 1))
    assert not far.contains((2, -1))
    near = inclusion.evaluate((0, 0), EvaluationMode.HYPERPLANE)
    assert near.contains((-2, 1)) and near.contains((2, -1))
    assert not near.contains((1, 0))


def test_cone_for_signature_is_cached():
    inclusion = build_reversible(utils_orthogonal_pair_graph(), exp(-0.5))
    assert inclusion.cone_for_signature("+0") is inclusion.cone_for_signature(SignVector("+0"))


def test_evaluate_general_hyperplane_fan():
    inclusion = build_reversible(utils_orthogonal_pair_graph(), exp(-0.5))
    cone = inclusion.evaluate_general((0.5, 5.0))
    assert cone.contains((3, -1))
    assert cone.contains((-3, 0))
    assert not cone.contains((0, 1))


def test_compare_semantics():
    inclusion = build_reversible(utils_orthogonal_pair_graph(), exp(-0.5))
    comparison = inclusion.compare_semantics((0.5, 5.0))
    assert comparison.contained
    assert comparison.equal
    assert comparison.point == (0.5, 5.0)


def test_explicit_fan():
    inclusion = ToricInclusion(utils_quadrant_cones(), 0.5)
    assert not inclusion.is_hyperplane
    assert inclusion.directions == ()

    interior = inclusion.evaluate_general((3, 3))
    assert interior.equals(Cone(2, generators=[(-1, 0), (0, -1)]))

    near_axis = inclusion.evaluate((0.2, 3), EvaluationMode.STRICT)
    assert near_axis.contains((5, -1))
    assert not near_axis.contains((0, 1))


def test_explicit_fan_not_complete():
    with pytest.raises(AssertionError, match=re.escape("Explicit fan is not complete: no cone contains")):
        ToricInclusion(utils_quadrant_cones()[:1], 0.5)


def test_explicit_fan_rejects_hyperplane_semantics():
    inclusion = ToricInclusion(utils_quadrant_cones(), 0.5)
    with pytest.raises(
        AssertionError,
        match=re.escape("Hyperplane semantics need a hyperplane-generated fan; use `evaluate_general`"),
    ):
        inclusion.evaluate_hyperplane((1, 1))


@pytest.mark.parametrize("delta", [0, -1.0, None])
def test_delta_must_be_positive(delta):
    with pytest.raises(AssertionError, match=re.escape("`delta` must be positive")):
        build_from_normals([(1, 0)], delta)


def test_provenance_must_match_directions():
    provenance = InclusionProvenance(
        graph=utils_example1_graph(),
        epsilon=0.5,
        effective_epsilon=0.5,
        attributions=(((0, 1),),),
        construction="reversible",
    )
    with pytest.raises(
        AssertionError,
        match=re.escape("Hyperplane direction `0` is not parallel to any attributed vertex difference"),
    ):
        ToricInclusion(fan_from_hyperplanes([(1, 0)]), 1.0, provenance)


def test_point_dimension():
    inclusion = build_from_normals([(1, 0)], 1.0)
    with pytest.raises(AssertionError, match=re.escape("`X` has 3 coordinates, expected `dimension` = 2")):
        inclusion.signature((1, 2, 3))


def test_to_dict_and_back():
    inclusion = build_weakly_reversible(utils_triangle_graph(), exp(-1))
    data = inclusion.to_dict()
    assert data["delta"] == pytest.approx(2.0)
    assert sorted(data["directions"]) == sorted([["1", "0"], ["0", "1"], ["1", "-1"]])
    restored = ToricInclusion.from_dict(data)
    assert restored.delta == inclusion.delta
    assert set(restored.directions) == set(inclusion.directions)
    assert restored.provenance.graph == inclusion.provenance.graph
    assert restored.provenance.attributions == inclusion.provenance.attributions
