"""Toric differential inclusions: construction from E-graphs and evaluation of the set-valued right-hand side."""

from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from math import log
from typing import Any, Optional, Sequence, Union
import numpy as np

from toric_embed.model import (
    EGraph,
    cycle_cover,
    first_edge_outside_cycles,
    first_irreversible_edge,
    linkage_classes,
    reversible_pairs,
)
from toric_embed.polyhedral import (
    Cone,
    HyperplaneFan,
    Relation,
    SignVector,
    cone_sum,
    fan_from_hyperplanes,
    intersect,
    polar,
    project,
)
from toric_embed.utils import (
    DEFAULT_TOLERANCE,
    Vector,
    check_epsilon,
    direction_key,
    format_vector,
    negate,
    norm,
    subtract,
    to_vector,
)


class EvaluationMode(Enum):
    """
    The semantics used to evaluate a toric differential inclusion at a point.
    """

    HYPERPLANE = "hyperplane"
    """
    Hyperplane-distance semantics: every hyperplane within `delta` of the point contributes both of its normal directions, every other hyperplane contributes the normal pointing away from the point. See [ToricInclusion.evaluate_hyperplane][toric_embed.inclusion.ToricInclusion.evaluate_hyperplane].
    """

    STRICT = "strict"
    """
    Cone-distance semantics: the sum of the polar cones of every fan cone within `delta` of the point. See [ToricInclusion.evaluate_general][toric_embed.inclusion.ToricInclusion.evaluate_general].
    """


@dataclass(frozen=True)
class InclusionProvenance:
    """
    Where an inclusion came from: the source graph, the rate bound, and the vertex pairs each hyperplane direction was derived from.
    """

    graph: EGraph
    epsilon: float
    """
    The rate bound `ε` supplied by the caller.
    """
    effective_epsilon: float
    """
    The bound used in the `delta` formula; smaller than `epsilon` when cycle covers split edge rates.
    """
    attributions: tuple[tuple[tuple[int, int], ...], ...]
    """
    For each fan direction, the vertex-index pairs whose difference is parallel to it.
    """
    construction: str
    """
    The builder that produced the inclusion: `reversible`, `weakly-reversible` or `differences`.
    """

    def to_dict(self) -> dict:
        return {
            "construction": self.construction,
            "epsilon": self.epsilon,
            "effective_epsilon": self.effective_epsilon,
            "graph": {
                "dimension": self.graph.dimension,
                "vertices": [format_vector(v) for v in self.graph.vertices],
                "edges": [list(e) for e in self.graph.edges],
            },
            "attributions": [[list(p) for p in pairs] for pairs in self.attributions],
        }

    @staticmethod
    def from_dict(data: dict) -> "InclusionProvenance":
        graph = data["graph"]
        return InclusionProvenance(
            graph=EGraph(graph["dimension"], tuple(graph["vertices"]), tuple(tuple(e) for e in graph["edges"])),
            epsilon=float(data["epsilon"]),
            effective_epsilon=float(data["effective_epsilon"]),
            attributions=tuple(tuple(tuple(p) for p in pairs) for pairs in data["attributions"]),
            construction=data["construction"],
        )


@dataclass(frozen=True)
class SemanticsComparison:
    """
    Both evaluations of an inclusion at one point, and how they relate.
    """

    point: tuple[float, ...]
    hyperplane: Cone
    general: Cone
    contained: bool
    """
    True iff the cone-distance result is a subset of the hyperplane-distance result.
    """
    equal: bool


class ToricInclusion:
    """
    A toric differential inclusion `dx/dt ∈ F(log x)` generated by a complete polyhedral fan and an uncertainty width `delta`.

    The fan is either a [HyperplaneFan][toric_embed.polyhedral.HyperplaneFan] (the usual case, built from the vertex differences of an E-graph) or an explicit list of cones, which must cover ℝⁿ. Evaluation is cached per sign signature, since the inclusion is piecewise constant in `X = log x`.
    """

    def __init__(
        self,
        fan: Union[HyperplaneFan, Sequence[Cone]],
        delta: float,
        provenance: Optional[InclusionProvenance] = None,
        tolerance: float = DEFAULT_TOLERANCE,
        completeness_samples: int = 1000,
    ):
        """
        Create a new ToricInclusion object.

        Args:
            fan (HyperplaneFan | Sequence[Cone]): a hyperplane fan or an explicit complete cone list.
            delta (float): the uncertainty width, strictly positive.
            provenance (InclusionProvenance, optional): the source graph and pair attribution of each direction.
            tolerance (float, optional): floating tolerance for cone membership.
            completeness_samples (int, optional): seeded sample size used to check that an explicit cone list covers ℝⁿ.

        Raises:
            AssertionError: if `delta` is not positive, the cone list is not complete, or a direction is not parallel to its attributed vertex differences.
        """
        assert delta is not None and float(delta) > 0, "`delta` must be positive"
        self.delta = float(delta)
        self.tolerance = tolerance
        self.provenance = provenance

        if isinstance(fan, HyperplaneFan):
            self.fan: Optional[HyperplaneFan] = fan
            self.cone_list: Optional[list[Cone]] = None
            self.dimension = fan.dimension
        else:
            cones = list(fan)
            assert len(cones) > 0, "An explicit fan needs at least one cone"
            self.fan = None
            self.cone_list = cones
            self.dimension = cones[0].dimension
            assert all(c.dimension == self.dimension for c in cones), "Cone dimensions do not match"
            rng = np.random.default_rng(0)
            for point in rng.uniform(-10.0, 10.0, size=(completeness_samples, self.dimension)):
                assert any(c.contains(point, 1e-7) for c in cones), (
                    f"Explicit fan is not complete: no cone contains {tuple(round(float(x), 6) for x in point)}"
                )

        if provenance is not None and self.fan is not None:
            assert len(provenance.attributions) == len(self.fan.directions), (
                "`provenance` must attribute every hyperplane direction"
            )
            vertices = provenance.graph.vertices
            for i, (direction, pairs) in enumerate(zip(self.fan.directions, provenance.attributions)):
                key = direction_key(direction, signed=False)
                assert any(
                    direction_key(subtract(vertices[b], vertices[a]), signed=False) == key for a, b in pairs
                ), f"Hyperplane direction `{i}` is not parallel to any attributed vertex difference"

        self._signature_cones: dict[SignVector, Cone] = {}
        self._general_cones: dict[tuple[int, ...], Cone] = {}

    def __repr__(self) -> str:
        return f"ToricInclusion(dimension={self.dimension}, directions={len(self.directions)}, delta={self.delta})"

    @property
    def is_hyperplane(self) -> bool:
        return self.fan is not None

    @property
    def directions(self) -> tuple[Vector, ...]:
        """
        Canonical hyperplane directions; empty for explicit cone lists.
        """
        return self.fan.directions if self.fan is not None else ()

    @property
    def normals(self) -> np.ndarray:
        """
        Unit hyperplane normals as a float matrix, one row per direction.
        """
        if self.fan is None:
            return np.zeros((0, self.dimension))
        return self.fan.normals

    def _point(self, point: Sequence[Any]) -> np.ndarray:
        x = np.asarray([float(v) for v in point], dtype=float)
        assert len(x) == self.dimension, (
            f"`X` has {len(x)} coordinates, expected `dimension` = {self.dimension}"
        )
        return x

    def _require_hyperplanes(self):
        assert self.fan is not None, (
            "Hyperplane semantics need a hyperplane-generated fan; use `evaluate_general`"
        )

    def uncertainty_set(self, point: Sequence[Any]) -> set[int]:
        """
        Indices of the hyperplanes within `delta` of `point`, i.e. `{i : |X·h_i| ≤ delta}`. Ties at exactly `delta` count as inside.
        """
        self._require_hyperplanes()
        values = self.normals @ self._point(point)
        return {i for i, v in enumerate(values) if abs(v) <= self.delta}

    def signature(self, point: Sequence[Any], slack: float = 0.0) -> SignVector:
        """
        The piecewise-constant signature of `point`: `0` for hyperplanes in the uncertainty set (widened by `slack`), otherwise the sign of `X·h_i`.
        """
        self._require_hyperplanes()
        values = self.normals @ self._point(point)
        return SignVector(0 if abs(v) <= self.delta + slack else (1 if v > 0 else -1) for v in values)

    def cone_for_signature(self, sigma: Union[str, Sequence[int]]) -> Cone:
        """
        The hyperplane-semantics cone for a signature: generated by `-σ_i h_i` for `σ_i ≠ 0` and `±h_i` for `σ_i = 0`. It is the polar of `{σ_i (X·h_i) ≥ 0, X·h_i = 0}`, so both representations are available.
        """
        self._require_hyperplanes()
        sigma = SignVector(sigma)
        assert len(sigma) == len(self.directions), (
            f"Signature has {len(sigma)} entries, expected {len(self.directions)}"
        )
        if sigma not in self._signature_cones:
            constraints = [
                ((d if s > 0 else negate(d)), Relation.GE) if s != 0 else (d, Relation.EQ)
                for d, s in zip(self.directions, sigma)
            ]
            region = Cone(self.dimension, constraints=constraints, tolerance=self.tolerance)
            self._signature_cones[sigma] = polar(region)
        return self._signature_cones[sigma]

    def evaluate_hyperplane(self, point: Sequence[Any]) -> Cone:
        """
        The right-hand-side cone at `X` under hyperplane-distance semantics: generated by `{-sign(X·h_i) h_i : i ∉ U} ∪ {±h_i : i ∈ U}` where `U` is the [uncertainty set][toric_embed.inclusion.ToricInclusion.uncertainty_set].

        Raises:
            AssertionError: if the fan is an explicit cone list.
        """
        return self.cone_for_signature(self.signature(point))

    def _fan_cones(self) -> list[Cone]:
        return self.fan.cones() if self.fan is not None else self.cone_list

    def near_cones(self, point: Sequence[Any]) -> tuple[int, ...]:
        """
        Indices (into the fan's cone list) of every cone within `delta` of `point`.
        """
        x = self._point(point)
        return tuple(i for i, c in enumerate(self._fan_cones()) if project(c, x).distance <= self.delta)

    def evaluate_general(self, point: Sequence[Any]) -> Cone:
        """
        The right-hand-side cone at `X` under cone-distance semantics: the sum of the polar cones of every fan cone `C` with `dist(X, C) ≤ delta`. The result is cross-checked against the polar of the intersection of the same cones.

        Hyperplane fans are expanded into their explicit cone list on demand.
        """
        key = self.near_cones(point)
        assert len(key) > 0, "No fan cone lies within `delta` of the point; the fan is not complete"
        if key not in self._general_cones:
            cones = self._fan_cones()
            near = [cones[i] for i in key]
            total = cone_sum(*[polar(c) for c in near])
            assert total.equals(polar(intersect(*near))), (
                "Sum of polar cones differs from the polar of their intersection"
            )
            self._general_cones[key] = total
        return self._general_cones[key]

    def evaluate(self, point: Sequence[Any], mode: EvaluationMode = EvaluationMode.HYPERPLANE) -> Cone:
        mode = EvaluationMode(mode)
        if mode == EvaluationMode.HYPERPLANE:
            return self.evaluate_hyperplane(point)
        return self.evaluate_general(point)

    def compare_semantics(self, point: Sequence[Any]) -> SemanticsComparison:
        """
        Evaluates both semantics at `point` and records whether the cone-distance result is contained in, or equal to, the hyperplane-distance result.
        """
        hyperplane = self.evaluate_hyperplane(point)
        general = self.evaluate_general(point)
        contained = general.is_subset(hyperplane)
        return SemanticsComparison(
            point=tuple(float(x) for x in point),
            hyperplane=hyperplane,
            general=general,
            contained=contained,
            equal=contained and hyperplane.is_subset(general),
        )

    def to_dict(self) -> dict:
        data: dict[str, Any] = {"dimension": self.dimension, "delta": self.delta}
        if self.fan is not None:
            data["directions"] = [format_vector(d) for d in self.fan.directions]
            data["normals"] = [[float(x) for x in row] for row in self.fan.normals]
        else:
            data["cones"] = [[format_vector(g) for g in c.generators] for c in self.cone_list]
        if self.provenance is not None:
            data["provenance"] = self.provenance.to_dict()
        return data

    @staticmethod
    def from_dict(data: dict) -> "ToricInclusion":
        dimension = int(data["dimension"])
        provenance = None
        if data.get("provenance") is not None:
            provenance = InclusionProvenance.from_dict(data["provenance"])
        if "directions" in data:
            fan: Union[HyperplaneFan, list[Cone]] = fan_from_hyperplanes(data["directions"], dimension)
        else:
            fan = [Cone(dimension, generators=generators) for generators in data["cones"]]
        return ToricInclusion(fan, float(data["delta"]), provenance)


def _delta_for(pairs: list[tuple[Vector, Vector]], epsilon: float) -> float:
    width = 2 * abs(log(epsilon))
    if len(pairs) == 0:
        return width
    return max(width / norm(subtract(b, a)) for a, b in pairs)


def _from_pairs(
    graph: EGraph,
    pairs: list[tuple[int, int]],
    epsilon: float,
    effective_epsilon: float,
    construction: str,
) -> ToricInclusion:
    attributions: dict[tuple, list[tuple[int, int]]] = {}
    directions: dict[tuple, Vector] = {}
    for a, b in pairs:
        difference = subtract(graph.vertices[b], graph.vertices[a])
        key = direction_key(difference, signed=False)
        directions.setdefault(key, difference)
        attributions.setdefault(key, [])
        if (a, b) not in attributions[key]:
            attributions[key].append((a, b))

    fan = fan_from_hyperplanes(list(directions.values()), graph.dimension)
    delta = _delta_for([(graph.vertices[a], graph.vertices[b]) for a, b in pairs], effective_epsilon)
    provenance = InclusionProvenance(
        graph=graph,
        epsilon=epsilon,
        effective_epsilon=effective_epsilon,
        attributions=tuple(tuple(attributions[k]) for k in directions),
        construction=construction,
    )
    return ToricInclusion(fan, delta, provenance)


def build_reversible(graph: EGraph, epsilon: float) -> ToricInclusion:
    """
    The toric differential inclusion of a reversible E-graph with rates in `[ε, 1/ε]`.

    Every reversible pair `s ⇌ s'` contributes the hyperplane orthogonal to `s' - s`; parallel pairs share a hyperplane. The uncertainty width is `delta = max 2|log ε| / ‖s - s'‖` over all pairs, so that outside the slab of width `delta` around each hyperplane one of the two opposing monomials dominates for every admissible rate choice.

    Args:
        graph (EGraph): a reversible graph.
        epsilon (float): the rate bound, in `(0, 1)`.

    Raises:
        AssertionError: if the graph is not reversible (naming the first edge without a reverse) or `epsilon` is out of range.

    Returns:
        A [ToricInclusion][toric_embed.inclusion.ToricInclusion] with provenance.
    """
    epsilon = check_epsilon(epsilon)
    offending = first_irreversible_edge(graph)
    if offending is not None:
        s, t = graph.edges[offending]
        raise AssertionError(f"Graph is not reversible: edge `{offending}` ({s}->{t}) has no reverse edge")
    return _from_pairs(graph, reversible_pairs(graph), epsilon, epsilon, "reversible")


def build_weakly_reversible(graph: EGraph, epsilon: float) -> ToricInclusion:
    """
    The toric differential inclusion of a weakly reversible E-graph with rates in `[ε, 1/ε]`.

    The graph is split into a [cycle cover][toric_embed.model.cycle_cover]. Each cycle contributes the hyperplanes orthogonal to all differences `s_i - s_j` between its vertices, and the fan is generated by the union. Rates of edges shared between cycles are split, so each cycle sees rates in `[ε', 1/ε']` with `ε' = ε × (smallest weight fraction)`; the uncertainty width is `delta = max 2|log ε'| / ‖s_i - s_j‖` over all included pairs.

    Args:
        graph (EGraph): a weakly reversible graph.
        epsilon (float): the rate bound, in `(0, 1)`.

    Raises:
        AssertionError: if the graph is not weakly reversible (naming an edge on no cycle) or `epsilon` is out of range.

    Returns:
        A [ToricInclusion][toric_embed.inclusion.ToricInclusion] with provenance.
    """
    epsilon = check_epsilon(epsilon)
    offending = first_edge_outside_cycles(graph)
    if offending is not None:
        s, t = graph.edges[offending]
        raise AssertionError(f"Graph is not weakly reversible: edge `{offending}` ({s}->{t}) lies on no directed cycle")
    cover = cycle_cover(graph)
    effective = epsilon * float(cover.min_fraction)
    pairs = []
    for cycle in cover.cycles:
        for a, b in combinations(sorted(cycle), 2):
            if (a, b) not in pairs:
                pairs.append((a, b))
    return _from_pairs(graph, pairs, epsilon, effective, "weakly-reversible")


def build_from_differences(graph: EGraph, epsilon: float) -> ToricInclusion:
    """
    The inclusion generated by all vertex differences inside each linkage class, with `delta` from the same formula as [build_reversible][toric_embed.inclusion.build_reversible]. It accepts any graph and is the target of [counterexample_search][toric_embed.embedding.counterexample_search].
    """
    epsilon = check_epsilon(epsilon)
    pairs = []
    for members in linkage_classes(graph):
        pairs.extend(combinations(members, 2))
    return _from_pairs(graph, pairs, epsilon, epsilon, "differences")


def build_from_normals(
    normals: Sequence[Sequence[Any]], delta: float, dimension: Optional[int] = None
) -> ToricInclusion:
    """
    An inclusion from an explicit list of hyperplane normals and an uncertainty width.
    """
    return ToricInclusion(fan_from_hyperplanes([to_vector(h) for h in normals], dimension), delta)
