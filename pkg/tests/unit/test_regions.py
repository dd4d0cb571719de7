from math import e, exp
import re
import numpy as np
import pytest
from toric_embed.inclusion import build_from_normals, build_reversible
from toric_embed.regions import (
    PolygonRegion,
    RegionBuildError,
    RegionCertificate,
    Side,
    build_region,
    build_separating_curve,
    outward_normals,
    region_invariance_check,
    to_xspace,
    verify_polyline,
    verify_region,
)
from tests.utils import utils_orthogonal_pair_graph

BOX = (-20.0, 20.0, -20.0, 20.0)


def utils_orthogonal_inclusion():
    return build_reversible(utils_orthogonal_pair_graph(), exp(-0.5))


def test_build_region_octagon():
    inclusion = utils_orthogonal_inclusion()
    region = build_region(inclusion)
    assert len(region.vertices) == 8
    assert region.certificate.verdict
    assert region.certificate.max_value <= 1e-10
    assert region.certificate.witnesses == []
    assert region.attempts[-1]["verdict"]
    assert set(region.attempts[-1]) == {"attempt", "tau", "radius", "verdict", "max_value"}
    assert region.contains((0.0, 0.0))
    assert not region.contains((100.0, 0.0))


def test_build_region_is_reverified():
    inclusion = utils_orthogonal_inclusion()
    region = build_region(inclusion, tau=3.0)
    assert verify_region(inclusion, region).verdict


def test_build_region_single_hyperplane_band():
    inclusion = build_from_normals([(1, 0)], 1.0)
    region = build_region(inclusion)
    assert len(region.vertices) == 4
    assert region.certificate.verdict
    xs = sorted(set(np.round(region.vertices[:, 0], 12)))
    assert xs == pytest.approx([-1.1, 1.1])


def test_build_region_without_hyperplanes():
    inclusion = build_from_normals([], 1.0, dimension=2)
    region = build_region(inclusion, tau=2.0)
    assert len(region.vertices) == 4
    assert np.abs(region.vertices).max() == 2.0
    assert region.certificate.verdict


def test_build_region_tau():
    with pytest.raises(AssertionError, match=re.escape("`tau` must be positive")):
        build_region(utils_orthogonal_inclusion(), tau=0)


def test_build_region_requires_planar_inclusion():
    with pytest.raises(AssertionError, match=re.escape("regions require dimension 2")):
        build_region(build_from_normals([(1, 0, 0)], 1.0))


def test_verify_region_fails_inside_slabs():
    inclusion = utils_orthogonal_inclusion()
    square = PolygonRegion([(-0.1, -0.1), (0.1, -0.1), (0.1, 0.1), (-0.1, 0.1)])
    certificate = verify_region(inclusion, square)
    assert not certificate.verdict
    assert certificate.max_value > 0.5
    assert len(certificate.witnesses) > 0
    assert certificate.to_dict()["verdict"] is False
    assert set(certificate.to_dict()) == {"verdict", "tolerance", "max_value", "box", "subsegments", "witnesses"}


def test_verify_polyline_cuts_at_slab_boundaries():
    inclusion = build_from_normals([(1, 0)], 1.0)
    certificate = verify_polyline(inclusion, [(-3.0, 5.0), (3.0, 5.0)], [(0.0, 1.0)])
    frame = certificate.to_frame()
    assert list(frame.columns) == [
        "segment",
        "start_x",
        "start_y",
        "end_x",
        "end_y",
        "signature",
        "generators",
        "max_value",
    ]
    # cut points at x = -1, 0, 1 plus both ends, and the four pieces between them
    assert len(frame) == 9
    assert set(frame["signature"]) == {"-", "0", "+"}
    assert certificate.verdict


def test_verify_polyline_needs_a_segment():
    with pytest.raises(AssertionError, match=re.escape("A polyline needs at least one segment")):
        verify_polyline(build_from_normals([(1, 0)], 1.0), [(0.0, 0.0)], [])


def test_polygon_region_orientation():
    clockwise = [(0, 0), (0, 1), (1, 1), (1, 0)]
    region = PolygonRegion(clockwise)
    assert np.array_equal(region.vertices, np.asarray([(1, 0), (1, 1), (0, 1), (0, 0)], dtype=float))
    assert region.normals == pytest.approx(np.asarray([(1, 0), (0, 1), (-1, 0), (0, -1)], dtype=float))
    assert region.contains((0.5, 0.5))
    assert not region.contains((1.05, 0.5))
    assert region.contains((1.05, 0.5), tolerance=0.1)
    assert region.boundary_distance((2.0, 0.5)) == pytest.approx(1.0)


def test_polygon_region_outside_points():
    region = PolygonRegion([(0, 0), (1, 0), (1, 1), (0, 1)])
    outside = region.outside_points(np.asarray([[0.5, 0.5], [2.0, 0.5], [0.2, -1.0]]))
    assert outside.tolist() == [[2.0, 0.5], [0.2, -1.0]]


@pytest.mark.parametrize(
    "vertices, expected_error",
    [
        ([(0, 0), (1, 0)], "A polygon needs at least 3 vertices"),
        ([(0, 0), (1, 0), (2, 0)], "Polygon is degenerate (zero area)"),
        ([(0, 0), (2, 2), (2, 0), (0, 1)], "Polygon is not simple: segments `0` and `2` intersect"),
        ([0, 1, 2], "Polygon vertices must be points of the plane"),
    ],
)
def test_polygon_region_invalid(vertices, expected_error: str):
    with pytest.raises(AssertionError, match=re.escape(expected_error)):
        PolygonRegion(vertices)

        # should never get here
        assert False


def test_outward_normals_open():
    normals = outward_normals(np.asarray([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)]), closed=False)
    assert normals == pytest.approx(np.asarray([(0.0, -1.0), (1.0, 0.0)]))


def test_side_corner():
    box = (-1.0, 2.0, -3.0, 4.0)
    assert Side.LOWER_LEFT.corner(box).tolist() == [-1.0, -3.0]
    assert Side.UPPER_RIGHT.corner(box).tolist() == [2.0, 4.0]
    assert Side("lower-right").corner(box).tolist() == [2.0, -3.0]


def test_build_separating_curve():
    inclusion = utils_orthogonal_inclusion()
    curve = build_separating_curve(inclusion, BOX, Side.LOWER_LEFT)
    assert curve.certificate.verdict
    assert curve.certificate.box == BOX
    assert curve.box == BOX
    assert np.all(curve.points >= -20.0 - 1e-9) and np.all(curve.points <= 20.0 + 1e-9)
    assert np.all(curve.normals @ Side.LOWER_LEFT.direction > 0)
    assert list(curve.to_frame().columns) == ["X_1", "X_2"]


def test_build_separating_curve_single_hyperplane():
    curve = build_separating_curve(build_from_normals([(1, 1)], 1.0), BOX, Side.LOWER_LEFT)
    assert curve.certificate.verdict
    assert len(curve.points) >= 2


def test_build_separating_curve_without_hyperplanes():
    inclusion = build_from_normals([], 1.0, dimension=2)
    curve = build_separating_curve(inclusion, (0.0, 4.0, 0.0, 2.0), Side.LOWER_LEFT)
    assert curve.points.tolist() == [[0.0, 1.0], [2.0, 0.0]]
    assert curve.normals[0] @ Side.LOWER_LEFT.direction > 0
    assert curve.certificate.verdict


def test_build_separating_curve_empty_box():
    with pytest.raises(AssertionError, match=re.escape("`box` must have positive width and height")):
        build_separating_curve(utils_orthogonal_inclusion(), (1.0, 1.0, 0.0, 2.0))


def test_region_build_error_carries_trace():
    error = RegionBuildError("failed", None, [{"attempt": 0}])
    assert error.trace == [{"attempt": 0}]
    assert error.certificate is None
    assert RegionCertificate((), 1e-10, True, 0.0).to_frame().empty


def test_to_xspace():
    curve = to_xspace([(0.0, 0.0), (1.0, 0.0)], samples_per_segment=2)
    assert curve == pytest.approx(np.asarray([[1.0, 1.0], [e, 1.0]]))


def test_to_xspace_closed():
    curve = to_xspace([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)], samples_per_segment=3, closed=True)
    assert len(curve) == 7
    assert curve[0] == pytest.approx(curve[-1])
    assert np.all(curve > 0)


def test_to_xspace_samples():
    with pytest.raises(AssertionError, match=re.escape("`samples_per_segment` must be at least 2")):
        to_xspace([(0.0, 0.0), (1.0, 0.0)], samples_per_segment=1)


def test_region_invariance_check():
    inclusion = utils_orthogonal_inclusion()
    region = build_region(inclusion)
    frame = region_invariance_check(
        inclusion, region, utils_orthogonal_pair_graph(), exp(-0.5), runs=3, horizon=20.0, seed=1
    )
    assert list(frame.columns) == ["run", "seed", "stayed_inside", "max_excursion", "error"]
    assert frame["stayed_inside"].all()
