"""Construction and verification of 2D invariant regions and zero-separating curves for toric differential inclusions."""

from dataclasses import dataclass, field
from enum import Enum
from math import atan2, cos, pi, sin
from typing import Any, Optional, Sequence
import numpy as np
import pandas as pd
from matplotlib.path import Path

from toric_embed.dynamics import (
    DEFAULT_ATOL,
    DEFAULT_RTOL,
    IntegrationError,
    ScheduleKind,
    sample_schedule,
    simulate,
)
from toric_embed.inclusion import ToricInclusion
from toric_embed.model import EGraph
from toric_embed.utils import verbose_log

MAX_RETRIES = 8
"""
How many times [build_region][toric_embed.regions.build_region] and [build_separating_curve][toric_embed.regions.build_separating_curve] retry with a larger scale before giving up.
"""

SLAB_MARGIN = 1.1
"""
Slab-crossing segments extend `SLAB_MARGIN * delta` to either side of their line, so their ends lie strictly outside the uncertainty slab.
"""

BOUNDARY_SLACK = 1e-12
"""
Extra width given to the uncertainty slabs when evaluating the inclusion at subsegment end points.
"""


class Side(Enum):
    """
    The corner of a box a zero-separating curve faces. Lower-left faces the boundary of the positive orthant, where both coordinates go to zero.
    """

    LOWER_LEFT = "lower-left"
    LOWER_RIGHT = "lower-right"
    UPPER_LEFT = "upper-left"
    UPPER_RIGHT = "upper-right"

    @property
    def direction(self) -> np.ndarray:
        x = -1.0 if self in (Side.LOWER_LEFT, Side.UPPER_LEFT) else 1.0
        y = -1.0 if self in (Side.LOWER_LEFT, Side.LOWER_RIGHT) else 1.0
        return np.asarray([x, y]) / np.sqrt(2)

    def corner(self, box: tuple[float, float, float, float]) -> np.ndarray:
        xmin, xmax, ymin, ymax = box
        direction = self.direction
        return np.asarray([xmin if direction[0] < 0 else xmax, ymin if direction[1] < 0 else ymax])


class RegionBuildError(RuntimeError):
    """
    Raised when a region or curve can not be built within the retry budget. Carries the last failing certificate (if any) and the retry trace.
    """

    def __init__(self, message: str, certificate: Optional["RegionCertificate"], trace: list[dict]):
        super().__init__(message)
        self.certificate = certificate
        self.trace = trace


@dataclass(frozen=True)
class SubsegmentRecord:
    """
    The inclusion's cone on one piece of a boundary segment and its worst product with the outward normal.
    """

    segment: int
    start: tuple[float, float]
    end: tuple[float, float]
    """
    Equal to `start` for records taken at a single subdivision point.
    """
    signature: str
    generators: tuple[tuple[float, ...], ...]
    max_value: float
    """
    `max g·ν` over the cone's generators `g`; `0.0` when the cone is `{0}`.
    """


@dataclass(frozen=True)
class RegionCertificate:
    """
    Evidence that no vector of the inclusion points outward anywhere along a polyline.
    """

    records: tuple[SubsegmentRecord, ...]
    tolerance: float
    verdict: bool
    """
    True iff every record's `max_value` is at most `tolerance`.
    """
    max_value: float
    box: Optional[tuple[float, float, float, float]] = None
    """
    The clipping box `(xmin, xmax, ymin, ymax)` of an open curve; None for closed regions.
    """

    @property
    def witnesses(self) -> list[SubsegmentRecord]:
        return [r for r in self.records if r.max_value > self.tolerance]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "segment": r.segment,
                    "start_x": r.start[0],
                    "start_y": r.start[1],
                    "end_x": r.end[0],
                    "end_y": r.end[1],
                    "signature": r.signature,
                    "generators": len(r.generators),
                    "max_value": r.max_value,
                }
                for r in self.records
            ],
            columns=["segment", "start_x", "start_y", "end_x", "end_y", "signature", "generators", "max_value"],
        )

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "tolerance": self.tolerance,
            "max_value": self.max_value,
            "box": None if self.box is None else list(self.box),
            "subsegments": len(self.records),
            "witnesses": [
                {"segment": r.segment, "start": list(r.start), "end": list(r.end), "signature": r.signature, "max_value": r.max_value}
                for r in self.witnesses
            ],
        }


def _signed_area(points: np.ndarray) -> float:
    x, y = points[:, 0], points[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def outward_normals(points: np.ndarray, closed: bool = True) -> np.ndarray:
    """
    Unit normals `(dy, -dx) / length` of each segment; outward for a counterclockwise polygon.
    """
    ends = np.roll(points, -1, axis=0) if closed else points[1:]
    starts = points if closed else points[:-1]
    delta = ends - starts
    lengths = np.linalg.norm(delta, axis=1)
    assert np.all(lengths > 0), "Polyline has a zero-length segment"
    return np.stack([delta[:, 1], -delta[:, 0]], axis=1) / lengths[:, None]


class PolygonRegion:
    """
    A simple closed polygon in log coordinates, stored counterclockwise with one outward unit normal per segment (segment `i` runs from vertex `i` to vertex `i + 1`).
    """

    def __init__(
        self,
        vertices: Sequence[Sequence[float]],
        tau: Optional[float] = None,
        inclusion: Optional[ToricInclusion] = None,
        certificate: Optional[RegionCertificate] = None,
        attempts: Optional[list[dict]] = None,
    ):
        """
        Create a new PolygonRegion object.

        Args:
            vertices (Sequence): polygon vertices in either orientation; clockwise input is reversed.
            tau (float, optional): the scale the region was built with.
            inclusion (ToricInclusion, optional): the inclusion the region was built for.
            certificate (RegionCertificate, optional): the verification certificate.
            attempts (list, optional): the builder's retry trace.

        Raises:
            AssertionError: if the polygon is degenerate or not simple.
        """
        points = np.asarray(vertices, dtype=float)
        assert points.ndim == 2 and points.shape[1] == 2, "Polygon vertices must be points of the plane"
        assert len(points) >= 3, "A polygon needs at least 3 vertices"
        area = _signed_area(points)
        assert abs(area) > 0, "Polygon is degenerate (zero area)"
        if area < 0:
            points = points[::-1].copy()

        self.vertices = points
        self.normals = outward_normals(points, closed=True)
        self.tau = tau
        self.inclusion = inclusion
        self.certificate = certificate
        self.attempts = attempts if attempts is not None else []

        count = len(points)
        segments = [Path(np.stack([points[i], points[(i + 1) % count]])) for i in range(count)]
        for i in range(count):
            for j in range(i + 1, count):
                if j == i + 1 or (i == 0 and j == count - 1):
                    continue
                assert not segments[i].intersects_path(segments[j], filled=False), (
                    f"Polygon is not simple: segments `{i}` and `{j}` intersect"
                )
        self._path = Path(np.vstack([points, points[:1]]), closed=True)

    def __repr__(self) -> str:
        return f"PolygonRegion(vertices={len(self.vertices)}, tau={self.tau})"

    def boundary_distance(self, point: Sequence[float]) -> float:
        p = np.asarray(point, dtype=float)
        starts = self.vertices
        ends = np.roll(self.vertices, -1, axis=0)
        delta = ends - starts
        t = np.clip(np.sum((p - starts) * delta, axis=1) / np.sum(delta * delta, axis=1), 0.0, 1.0)
        nearest = starts + t[:, None] * delta
        return float(np.min(np.linalg.norm(nearest - p, axis=1)))

    def contains(self, point: Sequence[float], tolerance: float = 0.0) -> bool:
        """
        Point-in-polygon test with `matplotlib.path.Path`; points within `tolerance` of the boundary count as inside.
        """
        if self._path.contains_point(tuple(float(x) for x in point)):
            return True
        return self.boundary_distance(point) <= tolerance

    def outside_points(self, points: np.ndarray) -> np.ndarray:
        """
        The rows of `points` that `matplotlib.path.Path.contains_points` places outside the polygon.
        """
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        return points[~self._path.contains_points(points)]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "X_1": self.vertices[:, 0],
                "X_2": self.vertices[:, 1],
                "normal_1": self.normals[:, 0],
                "normal_2": self.normals[:, 1],
            }
        )


def _require_planar(inclusion: ToricInclusion):
    assert inclusion.dimension == 2, "regions require dimension 2"
    assert inclusion.is_hyperplane, "Regions need a hyperplane-generated fan"


def _cone_value(inclusion: ToricInclusion, signature, normal: np.ndarray) -> tuple[tuple, float]:
    generators = inclusion.cone_for_signature(signature).float_generators
    if len(generators) == 0:
        return (), 0.0
    return tuple(tuple(float(x) for x in g) for g in generators), float(np.max(generators @ normal))


def verify_polyline(
    inclusion: ToricInclusion,
    points: Sequence[Sequence[float]],
    normals: Sequence[Sequence[float]],
    tolerance: float = 1e-10,
    closed: bool = False,
    box: Optional[tuple[float, float, float, float]] = None,
) -> RegionCertificate:
    """
    Checks that no vector of the inclusion points across a polyline in the direction of its normals.

    Each segment is cut wherever `X·h_i` crosses `0` or `±delta`, so the inclusion's cone is constant on every open piece. The cone is evaluated at each piece's midpoint and, with the slabs widened by [BOUNDARY_SLACK][toric_embed.regions.BOUNDARY_SLACK], at each cut point, where ties put the point inside the slab. A piece passes iff `g·ν ≤ tolerance` for every generator `g` and the segment's normal `ν`.

    Args:
        inclusion (ToricInclusion): a planar, hyperplane-generated inclusion.
        points (Sequence): polyline vertices in log coordinates.
        normals (Sequence): one unit normal per segment.
        tolerance (float, optional): the largest accepted `g·ν`.
        closed (bool, optional): whether the last vertex connects back to the first.
        box (tuple, optional): the clipping box to record in the certificate.

    Raises:
        AssertionError: if the inclusion is not planar or the normal count does not match.

    Returns:
        A [RegionCertificate][toric_embed.regions.RegionCertificate].
    """
    _require_planar(inclusion)
    points = np.asarray(points, dtype=float)
    normals = np.asarray(normals, dtype=float).reshape(-1, 2)
    segment_count = len(points) if closed else len(points) - 1
    assert segment_count >= 1, "A polyline needs at least one segment"
    assert len(normals) == segment_count, f"Expected {segment_count} normals, got {len(normals)}"

    hyperplanes = inclusion.normals
    delta = inclusion.delta
    records = []
    for s in range(segment_count):
        start, end = points[s], points[(s + 1) % len(points)]
        normal = normals[s]
        offset = hyperplanes @ start
        slope = hyperplanes @ (end - start)
        cuts = {0.0, 1.0}
        for a, b in zip(offset, slope):
            if b == 0:
                continue
            for level in (0.0, delta, -delta):
                t = (level - a) / b
                if 0 < t < 1:
                    cuts.add(float(t))
        cuts_sorted = sorted(cuts)

        def at(t: float) -> np.ndarray:
            return start + t * (end - start)

        for t in cuts_sorted:
            X = at(t)
            signature = inclusion.signature(X, slack=BOUNDARY_SLACK)
            generators, value = _cone_value(inclusion, signature, normal)
            records.append(SubsegmentRecord(s, tuple(X), tuple(X), str(signature), generators, value))
        for t0, t1 in zip(cuts_sorted[:-1], cuts_sorted[1:]):
            signature = inclusion.signature(at(0.5 * (t0 + t1)))
            generators, value = _cone_value(inclusion, signature, normal)
            records.append(SubsegmentRecord(s, tuple(at(t0)), tuple(at(t1)), str(signature), generators, value))

    max_value = max(r.max_value for r in records)
    return RegionCertificate(
        records=tuple(records),
        tolerance=tolerance,
        verdict=bool(max_value <= tolerance),
        max_value=max_value,
        box=box,
    )


def verify_region(inclusion: ToricInclusion, region: PolygonRegion, tolerance: float = 1e-10) -> RegionCertificate:
    """
    Verifies that a closed polygon is forward invariant for every trajectory of the inclusion: see [verify_polyline][toric_embed.regions.verify_polyline].
    """
    return verify_polyline(inclusion, region.vertices, region.normals, tolerance, closed=True)


def _rays(inclusion: ToricInclusion) -> list[np.ndarray]:
    rays = []
    for h in inclusion.normals:
        line = np.asarray([-h[1], h[0]])
        rays.extend([line, -line])
    return sorted(rays, key=lambda r: atan2(r[1], r[0]) % (2 * pi))


def _minimum_radius(rays: list[np.ndarray], delta: float) -> float:
    """
    A radius beyond which crossing segments leave every other slab and sector segments are correctly oriented.
    """
    width = SLAB_MARGIN * delta
    bounds = [0.0]
    angles = [atan2(r[1], r[0]) % (2 * pi) for r in rays]
    sectors = [((angles[(k + 1) % len(rays)] - angles[k]) % (2 * pi)) for k in range(len(rays))]
    separations = [
        abs(rays[i][0] * rays[j][1] - rays[i][1] * rays[j][0])
        for i in range(len(rays))
        for j in range(i + 1, len(rays))
    ]
    separations = [s for s in separations if s > 1e-12]
    smallest = min(separations) if len(separations) > 0 else 1.0
    for phi in sectors:
        if phi < pi - 1e-12:
            bounds.append(width * cos(phi / 2) / sin(phi / 2))
            bounds.append(delta / (cos(phi / 2) * smallest))
    bounds.append((delta + width) / smallest)
    return 1.05 * max(bounds)


def _polygon_points(rays: list[np.ndarray], radii: Sequence[float], delta: float) -> np.ndarray:
    width = SLAB_MARGIN * delta
    points = []
    for r, rho in zip(rays, radii):
        tangent = np.asarray([-r[1], r[0]])
        points.append(rho * r - width * tangent)
        points.append(rho * r + width * tangent)
    return np.asarray(points)


def _square(half_width: float) -> np.ndarray:
    return np.asarray([[-half_width, -half_width], [half_width, -half_width], [half_width, half_width], [-half_width, half_width]])


def build_region(
    inclusion: ToricInclusion,
    tau: float = 5.0,
    max_retries: int = MAX_RETRIES,
    tolerance: float = 1e-10,
    verbose: bool = False,
) -> PolygonRegion:
    """
    Builds a compact polygon that trajectories of the inclusion can not leave, by an angular sweep around the fan.

    Every line of the fan contributes two rays. Across the uncertainty slab of each ray, at radius `ρ`, the polygon has a crossing segment parallel to the line's normal `h`, extended [SLAB_MARGIN][toric_embed.regions.SLAB_MARGIN]` * delta` to either side, so its outward normal is the ray itself and `±h` contribute nothing outward. Consecutive crossing segments are joined through each sector by a segment whose outward normal is the normalized sum of the sector's two rays, an interior vector of the sector. One common radius `ρ = max(tau, ρ_min)` is used for all rays, `ρ_min` being the radius beyond which the construction is well formed. The result must pass [verify_region][toric_embed.regions.verify_region]; otherwise `tau` is doubled, up to `max_retries` times.

    An inclusion without hyperplanes gets the square `[-tau, tau]²`.

    Args:
        inclusion (ToricInclusion): a planar, hyperplane-generated inclusion.
        tau (float, optional): the scale.
        max_retries (int, optional): how many times to double `tau`.
        tolerance (float, optional): the verification tolerance.
        verbose (bool, optional): a flag to enable verbose logging.

    Raises:
        AssertionError: if the inclusion is not planar.
        RegionBuildError: if no attempt verifies, with the last certificate and the retry trace.

    Returns:
        A verified [PolygonRegion][toric_embed.regions.PolygonRegion] carrying its certificate and retry trace.
    """
    _require_planar(inclusion)
    assert tau > 0, "`tau` must be positive"
    rays = _rays(inclusion)
    minimum = _minimum_radius(rays, inclusion.delta) if len(rays) > 0 else 0.0
    trace: list[dict] = []
    certificate = None
    for attempt in range(max_retries + 1):
        scale = tau * 2**attempt
        radius = max(scale, minimum)
        if len(rays) == 0:
            points = _square(scale)
        else:
            points = _polygon_points(rays, [radius] * len(rays), inclusion.delta)
        try:
            region = PolygonRegion(points, tau=scale, inclusion=inclusion)
        except AssertionError as e:
            trace.append({"attempt": attempt, "tau": scale, "radius": radius, "verdict": False, "reason": str(e)})
            verbose_log(f"Attempt {attempt} (tau = {scale}): {e}", verbose)
            continue
        certificate = verify_region(inclusion, region, tolerance)
        trace.append(
            {"attempt": attempt, "tau": scale, "radius": radius, "verdict": certificate.verdict, "max_value": certificate.max_value}
        )
        verbose_log(
            f"Attempt {attempt} (tau = {scale}, radius = {radius:.4f}): verdict {certificate.verdict}, max value {certificate.max_value:.3e}",
            verbose,
        )
        if certificate.verdict:
            region.certificate = certificate
            region.attempts = trace
            return region
    raise RegionBuildError(f"No verified region after {max_retries} retries", certificate, trace)


def _clip(start: np.ndarray, end: np.ndarray, box: tuple[float, float, float, float]) -> Optional[tuple[float, float]]:
    # Liang-Barsky parametric clipping
    xmin, xmax, ymin, ymax = box
    d = end - start
    low, high = 0.0, 1.0
    for p, q in ((-d[0], start[0] - xmin), (d[0], xmax - start[0]), (-d[1], start[1] - ymin), (d[1], ymax - start[1])):
        if p == 0:
            if q < 0:
                return None
            continue
        t = q / p
        if p < 0:
            low = max(low, t)
        else:
            high = min(high, t)
        if low > high:
            return None
    return (low, high) if high > low else None


def _clip_boundary(
    points: np.ndarray, normals: np.ndarray, box: tuple[float, float, float, float]
) -> tuple[list[tuple[np.ndarray, np.ndarray]], bool]:
    """
    Pieces of a closed polygon boundary inside `box`, each as `(points, normals)`, and whether the whole boundary lies inside.
    """
    count = len(points)
    pieces: list[tuple[list, list]] = []
    current: Optional[tuple[list, list]] = None
    inside = True
    for s in range(count):
        start, end = points[s], points[(s + 1) % count]
        interval = _clip(start, end, box)
        if interval is None or interval != (0.0, 1.0):
            inside = False
        if interval is None:
            current = None
            continue
        t0, t1 = interval
        a, b = start + t0 * (end - start), start + t1 * (end - start)
        if current is not None and t0 == 0.0:
            current[0].append(b)
            current[1].append(normals[s])
        else:
            current = ([a, b], [normals[s]])
            pieces.append(current)
        if t1 < 1.0:
            current = None

    if inside:
        return [], True
    if len(pieces) > 1 and current is not None and np.allclose(pieces[0][0][0], current[0][-1], atol=0.0):
        # the last piece runs through vertex 0 into the first one
        first = pieces.pop(0)
        current[0].extend(first[0][1:])
        current[1].extend(first[1])
    return [(np.asarray(p), np.asarray(n)) for p, n in pieces], False


@dataclass
class SeparatingCurve:
    """
    An open polyline in log coordinates with one unit normal per segment; no trajectory of the inclusion crosses it in the direction of its normals.
    """

    points: np.ndarray
    normals: np.ndarray
    certificate: RegionCertificate
    side: Side
    box: tuple[float, float, float, float]
    attempts: list[dict] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"X_1": self.points[:, 0], "X_2": self.points[:, 1]})


def _corner_cut(box: tuple[float, float, float, float], side: Side) -> tuple[np.ndarray, np.ndarray]:
    xmin, xmax, ymin, ymax = box
    corner = side.corner(box)
    a = np.asarray([corner[0], 0.5 * (ymin + ymax)])
    b = np.asarray([0.5 * (xmin + xmax), corner[1]])
    points = np.stack([a, b])
    normals = outward_normals(points, closed=False)
    if normals[0] @ side.direction < 0:
        points = points[::-1].copy()
        normals = -normals
    return points, normals


def build_separating_curve(
    inclusion: ToricInclusion,
    box: tuple[float, float, float, float] = (-20.0, 20.0, -20.0, 20.0),
    side: Side = Side.LOWER_LEFT,
    tau: float = 5.0,
    max_retries: int = MAX_RETRIES,
    tolerance: float = 1e-10,
    verbose: bool = False,
) -> SeparatingCurve:
    """
    Builds an open polyline across `box` that trajectories can not cross toward `side`.

    The curve is a piece of the boundary of an invariant polygon clipped to the box: among the pieces, the one whose segments face `side` most (by length-weighted positive product of normal and side direction) is kept. With a single hyperplane the ray facing `side` sits at radius `max(tau, ρ_min)` while the opposite ray is pushed beyond the box, giving an open band end; otherwise one radius is used for all rays, starting near the box corner on `side`. When the polygon fits inside the box the radius grows, when the box fits inside the polygon it shrinks, and when verification fails it doubles. An inclusion without hyperplanes gets a straight cut across the corner. The certificate records the clipping box.

    Raises:
        AssertionError: if the inclusion is not planar or the box is empty.
        RegionBuildError: if no attempt succeeds, with the retry trace.
    """
    _require_planar(inclusion)
    side = Side(side)
    xmin, xmax, ymin, ymax = (float(v) for v in box)
    assert xmin < xmax and ymin < ymax, "`box` must have positive width and height"
    box = (xmin, xmax, ymin, ymax)

    if len(inclusion.directions) == 0:
        points, normals = _corner_cut(box, side)
        certificate = verify_polyline(inclusion, points, normals, tolerance, closed=False, box=box)
        return SeparatingCurve(points, normals, certificate, side, box)

    rays = _rays(inclusion)
    delta = inclusion.delta
    minimum = max(tau, _minimum_radius(rays, delta))
    corners = np.asarray([[xmin, ymin], [xmin, ymax], [xmax, ymin], [xmax, ymax]])
    reach = float(np.max(np.linalg.norm(corners, axis=1)))
    direction = side.direction
    if len(rays) == 2:
        radius = minimum
    else:
        radius = max(minimum, 0.75 * float(np.linalg.norm(side.corner(box))))

    trace: list[dict] = []
    certificate = None
    for attempt in range(max_retries + 1):
        if len(rays) == 2:
            far = 2 * reach + radius + SLAB_MARGIN * delta
            radii = [radius if r @ direction >= 0 else far for r in rays]
            if rays[0] @ direction == rays[1] @ direction:
                radii = [radius, far]
        else:
            radii = [radius] * len(rays)
        points = _polygon_points(rays, radii, delta)
        if _signed_area(points) < 0:
            points = points[::-1].copy()
        normals = outward_normals(points, closed=True)
        pieces, inside = _clip_boundary(points, normals, box)
        entry: dict[str, Any] = {"attempt": attempt, "radius": radius}

        if inside:
            entry.update({"verdict": False, "reason": "polygon lies inside the box"})
            trace.append(entry)
            radius *= 1.5
            continue
        scored = [
            (float(np.sum(np.linalg.norm(np.diff(p, axis=0), axis=1) * np.maximum(n @ direction, 0.0))), p, n)
            for p, n in pieces
        ]
        scored = [s for s in scored if s[0] > 0]
        if len(scored) == 0:
            entry.update({"verdict": False, "reason": "no boundary piece inside the box faces the side"})
            trace.append(entry)
            if radius * 0.75 >= minimum:
                radius *= 0.75
                continue
            break
        _, piece_points, piece_normals = max(scored, key=lambda s: s[0])
        certificate = verify_polyline(inclusion, piece_points, piece_normals, tolerance, closed=False, box=box)
        entry.update({"verdict": certificate.verdict, "max_value": certificate.max_value})
        trace.append(entry)
        verbose_log(f"Attempt {attempt} (radius = {radius:.4f}): verdict {certificate.verdict}", verbose)
        if certificate.verdict:
            return SeparatingCurve(piece_points, piece_normals, certificate, side, box, trace)
        radius *= 2
    raise RegionBuildError(f"No verified separating curve after {len(trace)} attempts", certificate, trace)


def to_xspace(points: Sequence[Sequence[float]], samples_per_segment: int = 10, closed: bool = False) -> np.ndarray:
    """
    Densifies a log-space polyline with `samples_per_segment` points per segment (end points included) and maps it to `ℝ²_{>0}` with the componentwise exponential. Closed polylines come back as closed curves whose last point repeats the first.
    """
    assert samples_per_segment >= 2, "`samples_per_segment` must be at least 2"
    points = np.asarray(points, dtype=float)
    if closed:
        points = np.vstack([points, points[:1]])
    dense = [points[:1]]
    for start, end in zip(points[:-1], points[1:]):
        t = np.linspace(0.0, 1.0, samples_per_segment)[1:, None]
        dense.append(start + t * (end - start))
    return np.exp(np.vstack(dense))


def region_invariance_check(
    inclusion: ToricInclusion,
    region: PolygonRegion,
    graph: EGraph,
    epsilon: float,
    runs: int = 100,
    horizon: float = 1000.0,
    seed: int = 0,
    kind: ScheduleKind = ScheduleKind.SINUSOIDAL,
    tolerance: float = 1e-6,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    verbose: bool = False,
) -> pd.DataFrame:
    """
    Simulates seeded variable-rate trajectories of `graph` from random starts inside `region` and records whether each stayed inside (up to `tolerance` in log coordinates).

    Returns:
        A `pandas.DataFrame` with columns `run`, `seed`, `stayed_inside`, `max_excursion` and `error`.
    """
    assert graph.dimension == 2, "regions require dimension 2"
    rng = np.random.default_rng(seed)
    low, high = region.vertices.min(axis=0), region.vertices.max(axis=0)
    rows = []
    for run in range(runs):
        start = rng.uniform(low, high)
        while not region.contains(start):
            start = rng.uniform(low, high)
        run_seed = seed * 100_003 + run
        schedule = sample_schedule(graph, epsilon, kind, run_seed)
        try:
            trajectory = simulate(graph, schedule, np.exp(start), horizon, rtol=rtol, atol=atol)
        except IntegrationError as e:
            rows.append([run, run_seed, False, np.nan, str(e)])
            continue
        excursion = 0.0
        for X in region.outside_points(trajectory.log_states):
            excursion = max(excursion, region.boundary_distance(X))
        rows.append([run, run_seed, excursion <= tolerance, excursion, None])
        verbose_log(f"Run {run}: max excursion {excursion:.3e}", verbose)
    return pd.DataFrame(rows, columns=["run", "seed", "stayed_inside", "max_excursion", "error"])
