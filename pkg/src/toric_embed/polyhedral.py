"""Polyhedral cones in generator and half-space form, polar duality, projection and hyperplane-generated fans."""

from enum import Enum
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Any, Iterable, NamedTuple, Optional, Sequence, Union
import cdd
import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog, nnls

from toric_embed.utils import (
    DEFAULT_TOLERANCE,
    Vector,
    canonical_direction,
    direction_key,
    dot,
    is_exact,
    is_zero,
    negate,
    primitive,
    scale,
    subtract,
    to_vector,
    unify_vectors,
    unit,
)

MAX_ENUMERATED_CONSTRAINTS = 12
"""
Above this many inequality constraints, [project][toric_embed.polyhedral.project] switches from face enumeration to alternating projections.
"""


class Relation(Enum):
    """
    The relation of a half-space constraint `a·x ≥ 0` or `a·x = 0`.
    """

    GE = ">=0"
    EQ = "=0"


class Constraint(NamedTuple):
    normal: Vector
    relation: Relation


NUMBER_TYPE = {True: "fraction", False: "float"}
"""
The `cdd` number type for exact and floating cones.
"""


def _double_description(
    rows: Sequence[Vector], dimension: int, exact: bool, tolerance: float = DEFAULT_TOLERANCE
) -> tuple[list[Vector], list[Vector]]:
    """
    Extreme rays and a lineality-space basis of `{x : r·x ≥ 0 for every row r}`, computed by [`cdd`](https://pycddlib.readthedocs.io/) (`cdd.Polyhedron`) in fraction arithmetic for exact rows and in floating point otherwise.

    Rays are projected onto the orthogonal complement of the lineality space and come back as primitive integer vectors when exact, unit vectors otherwise.
    """
    rows = [tuple(r) for r in rows if not is_zero(r)]
    if not exact:
        rows = [tuple(float(x) for x in unit(r)) for r in rows]
    if len(rows) == 0:
        identity = [tuple(Fraction(int(i == j)) for j in range(dimension)) for i in range(dimension)]
        return [], identity if exact else [tuple(float(x) for x in v) for v in identity]

    # H-representation rows are [b, a] for b + a·x ≥ 0
    matrix = cdd.Matrix([[0, *r] for r in rows], number_type=NUMBER_TYPE[exact])
    matrix.rep_type = cdd.RepType.INEQUALITY
    generators = cdd.Polyhedron(matrix).get_generators()

    rays: dict[tuple, Vector] = {}
    lineality: list[Vector] = []
    candidates: list[Vector] = []
    for i in range(generators.row_size):
        kind, *coordinates = generators[i]
        # the apex comes back as the vertex [1, 0, ..., 0]
        if kind != 0 or is_zero(coordinates, 0.0 if exact else tolerance):
            continue
        vector = tuple(Fraction(x) for x in coordinates) if exact else tuple(float(x) for x in coordinates)
        if i in generators.lin_set:
            lineality.append(primitive(vector))
        else:
            candidates.append(vector)

    orthogonal = _orthogonalize(lineality)
    for vector in candidates:
        for b in orthogonal:
            vector = subtract(vector, scale(b, dot(vector, b) / dot(b, b)))
        if is_zero(vector, 0.0 if exact else tolerance):
            continue
        vector = primitive(vector)
        rays.setdefault(direction_key(vector), vector)
    return list(rays.values()), lineality


def _orthogonalize(basis: Sequence[Vector]) -> list[Vector]:
    orthogonal: list[Vector] = []
    for v in basis:
        for b in orthogonal:
            v = subtract(v, scale(b, dot(v, b) / dot(b, b)))
        orthogonal.append(v)
    return orthogonal


def _reduce_generators(vectors: Iterable[Any], dimension: int) -> tuple[Vector, ...]:
    reduced: dict[tuple, Vector] = {}
    for i, v in enumerate(unify_vectors(to_vector(v) for v in vectors)):
        assert len(v) == dimension, (
            f"Generator `{i}` has {len(v)} coordinates, expected `dimension` = {dimension}"
        )
        if is_zero(v):
            continue
        reduced.setdefault(direction_key(v), v)
    return tuple(reduced.values())


def _reduce_constraints(constraints: Iterable[Any], dimension: int) -> tuple[Constraint, ...]:
    parsed = list(constraints)
    normals = unify_vectors(to_vector(c[0]) for c in parsed)
    reduced: dict[tuple, Constraint] = {}
    for i, (normal, c) in enumerate(zip(normals, parsed)):
        relation = Relation(c[1])
        assert len(normal) == dimension, (
            f"Constraint `{i}` has {len(normal)} coordinates, expected `dimension` = {dimension}"
        )
        if is_zero(normal):
            continue
        signed = relation == Relation.GE
        key = (relation, direction_key(normal, signed=signed))
        reduced.setdefault(key, Constraint(normal if signed else canonical_direction(normal), relation))
    return tuple(reduced.values())


class Cone:
    """
    A polyhedral cone in ℝⁿ, held in generator form (`cone(g_1, ..., g_k)`), half-space form (`{x : a_i·x ≥ 0, b_j·x = 0}`) or both. A missing representation is derived on first access with the double-description method and cached.

    A cone is exact when every vector it was built from is exact; exact cones compute every derived representation in rational arithmetic.

    Cones are immutable: derived representations are computed once and never change the set the cone describes.
    """

    def __init__(
        self,
        dimension: int,
        generators: Optional[Iterable[Any]] = None,
        constraints: Optional[Iterable[Any]] = None,
        tolerance: float = DEFAULT_TOLERANCE,
    ):
        """
        Create a new Cone object.

        Args:
            dimension (int): the ambient dimension `n`.
            generators (Iterable, optional): generating vectors; zero vectors and positive multiples of earlier generators are dropped.
            constraints (Iterable, optional): `(normal, relation)` pairs where relation is a [Relation][toric_embed.polyhedral.Relation] or its value (`">=0"`, `"=0"`).
            tolerance (float, optional): the floating tolerance used when the cone is not exact.
        """
        assert isinstance(dimension, int) and dimension > 0, "`dimension` must be a positive integer"
        assert generators is not None or constraints is not None, (
            "A `Cone` needs `generators` or `constraints`"
        )
        self.dimension = dimension
        self.tolerance = tolerance
        self._generators = None if generators is None else _reduce_generators(generators, dimension)
        self._constraints = None if constraints is None else _reduce_constraints(constraints, dimension)
        vectors = list(self._generators or ()) + [c.normal for c in self._constraints or ()]
        self.exact = all(is_exact(v) for v in vectors)

    def __repr__(self) -> str:
        if self._generators is not None:
            return f"Cone(dimension={self.dimension}, generators={list(self._generators)})"
        return f"Cone(dimension={self.dimension}, constraints={list(self._constraints)})"

    @property
    def generators(self) -> tuple[Vector, ...]:
        """
        The generator representation. Derived from the constraints as the extreme rays plus both signs of a lineality basis.
        """
        if self._generators is None:
            rays, lineality = self._constraint_rays
            self._generators = _reduce_generators(
                list(rays) + list(lineality) + [negate(v) for v in lineality], self.dimension
            )
        return self._generators

    @property
    def constraints(self) -> tuple[Constraint, ...]:
        """
        The half-space representation. Derived from the generators through the dual cone `{y : g·y ≥ 0}`: its extreme rays become inequalities and its lineality directions become equalities.
        """
        if self._constraints is None:
            rays, lineality = _double_description(
                self._generators, self.dimension, self.exact, self.tolerance
            )
            self._constraints = _reduce_constraints(
                [(r, Relation.GE) for r in rays] + [(v, Relation.EQ) for v in lineality],
                self.dimension,
            )
        return self._constraints

    def _constraint_rows(self) -> list[Vector]:
        rows = []
        for normal, relation in self.constraints:
            rows.append(normal)
            if relation == Relation.EQ:
                rows.append(negate(normal))
        return rows

    @cached_property
    def _constraint_rays(self) -> tuple[list[Vector], list[Vector]]:
        return _double_description(self._constraint_rows(), self.dimension, self.exact, self.tolerance)

    @property
    def extreme_rays(self) -> list[Vector]:
        """
        Extreme rays of the pointed part `C ∩ L⊥`, where `L` is the lineality space.
        """
        return self._constraint_rays[0]

    @property
    def lineality(self) -> list[Vector]:
        """
        A basis of the lineality space `C ∩ -C`.
        """
        return self._constraint_rays[1]

    @cached_property
    def float_constraints(self) -> tuple[np.ndarray, np.ndarray]:
        """
        The half-space representation as unit-row float matrices `(inequalities, equalities)`, used by vectorized membership checks.
        """
        ge = [unit(c.normal) for c in self.constraints if c.relation == Relation.GE]
        eq = [unit(c.normal) for c in self.constraints if c.relation == Relation.EQ]
        return (
            np.asarray(ge, dtype=float).reshape(len(ge), self.dimension),
            np.asarray(eq, dtype=float).reshape(len(eq), self.dimension),
        )

    @cached_property
    def float_generators(self) -> np.ndarray:
        """
        The generators as unit-row float matrix.
        """
        return np.asarray([unit(g) for g in self.generators], dtype=float).reshape(
            len(self.generators), self.dimension
        )

    def polar(self) -> "Cone":
        """
        The polar cone `C° = {y : x·y ≤ 0 for all x ∈ C}` with both representations populated. See [polar][toric_embed.polyhedral.polar].
        """
        generators = []
        for normal, relation in self.constraints:
            generators.append(negate(normal))
            if relation == Relation.EQ:
                generators.append(normal)
        constraints = [(negate(g), Relation.GE) for g in self.generators]
        return Cone(self.dimension, generators=generators, constraints=constraints, tolerance=self.tolerance)

    def residual(self, vector: Sequence[Any]) -> float:
        """
        The distance from `vector` to the cone, computed with non-negative least squares ([`scipy.optimize.nnls`](https://docs.scipy.org/doc/scipy/reference/generated/scipy.optimize.nnls.html)) over the generators.
        """
        v = np.asarray([float(x) for x in vector], dtype=float)
        if len(self.generators) == 0:
            return float(np.linalg.norm(v))
        matrix = np.asarray([[float(x) for x in g] for g in self.generators], dtype=float).T
        _, distance = nnls(matrix, v)
        return float(distance)

    def contains(self, vector: Sequence[Any], tolerance: Optional[float] = None) -> bool:
        """
        Membership test. Exact cones and exact vectors are decided exactly from the half-space representation (which is a Farkas certificate for the generator form); otherwise the non-negative least-squares residual is compared against `tolerance` relative to `max(1, ‖vector‖)`.
        """
        vector = to_vector(vector)
        assert len(vector) == self.dimension, (
            f"`vector` has {len(vector)} coordinates, expected `dimension` = {self.dimension}"
        )
        if is_zero(vector):
            return True
        if self.exact and is_exact(vector):
            for normal, relation in self.constraints:
                value = dot(normal, vector)
                if (relation == Relation.GE and value < 0) or (relation == Relation.EQ and value != 0):
                    return False
            return True
        tolerance = self.tolerance if tolerance is None else tolerance
        scale = max(1.0, float(np.linalg.norm([float(x) for x in vector])))
        return self.residual(vector) <= tolerance * scale

    def is_subset(self, other: "Cone") -> bool:
        """
        True iff every generator of this cone lies in `other`.
        """
        assert self.dimension == other.dimension, "Cone dimensions do not match"
        return all(other.contains(g) for g in self.generators)

    def equals(self, other: "Cone") -> bool:
        """
        Set equality, tested by mutual generator membership.
        """
        return self.is_subset(other) and other.is_subset(self)


def polar(cone: Cone) -> Cone:
    """
    The polar cone `C° = {y : x·y ≤ 0 for all x ∈ C}` (the negative of the dual cone).

    If `C = {a_i·x ≥ 0, b_j·x = 0}` then `C°` is generated by the `-a_i` and both signs of the `b_j`; if `C = cone(g_1..g_k)` then `C° = {y : -g_i·y ≥ 0}`. Both representations of the result are therefore available without further conversion, and `polar(polar(C))` equals `C`.
    """
    return cone.polar()


def cone_sum(*cones: Cone) -> Cone:
    """
    The Minkowski sum of cones: the cone generated by the union of their generator lists.

    Raises:
        AssertionError: on a dimension mismatch.
    """
    assert len(cones) > 0, "`cone_sum` needs at least one cone"
    dimension = cones[0].dimension
    assert all(c.dimension == dimension for c in cones), "Cone dimensions do not match"
    generators = [g for c in cones for g in c.generators]
    return Cone(dimension, generators=generators, tolerance=min(c.tolerance for c in cones))


def intersect(*cones: Cone) -> Cone:
    """
    The intersection of cones: the concatenation of their half-space representations. `polar(intersect(C1, C2))` equals `cone_sum(polar(C1), polar(C2))`.

    Raises:
        AssertionError: on a dimension mismatch.
    """
    assert len(cones) > 0, "`intersect` needs at least one cone"
    dimension = cones[0].dimension
    assert all(c.dimension == dimension for c in cones), "Cone dimensions do not match"
    constraints = [c for cone in cones for c in cone.constraints]
    return Cone(dimension, constraints=constraints, tolerance=min(c.tolerance for c in cones))


def contains(cone: Cone, vector: Sequence[Any], tolerance: Optional[float] = None) -> bool:
    """
    Whether `vector` is a non-negative combination of the generators of `cone`. See [Cone.contains][toric_embed.polyhedral.Cone.contains].
    """
    return cone.contains(vector, tolerance)


def whole_space(dimension: int) -> Cone:
    return Cone(dimension, constraints=[])


def zero_cone(dimension: int) -> Cone:
    return Cone(dimension, generators=[])


class Projection(NamedTuple):
    point: np.ndarray
    distance: float


def _project_onto_subspace(point: np.ndarray, rows: list[np.ndarray]) -> np.ndarray:
    if len(rows) == 0:
        return point.copy()
    basis = null_space(np.asarray(rows, dtype=float))
    if basis.shape[1] == 0:
        return np.zeros_like(point)
    return basis @ (basis.T @ point)


def _project_alternating(
    point: np.ndarray,
    inequalities: np.ndarray,
    equalities: np.ndarray,
    tolerance: float,
    max_iterations: int,
) -> np.ndarray:
    # Dykstra's algorithm over the half-spaces and hyperplanes
    sets = [(a, False) for a in inequalities] + [(a, True) for a in equalities]
    increments = [np.zeros_like(point) for _ in sets]
    current = point.copy()
    for _ in range(max_iterations):
        previous = current.copy()
        for k, (a, is_equality) in enumerate(sets):
            shifted = current + increments[k]
            value = a @ shifted
            projected = shifted - value * a if (is_equality or value < 0) else shifted
            increments[k] = shifted - projected
            current = projected
        if np.linalg.norm(current - previous) <= tolerance:
            break
    return current


def project(
    cone: Cone,
    point: Sequence[Any],
    tolerance: float = 1e-10,
    max_iterations: int = 10_000,
) -> Projection:
    """
    The nearest point of `cone` to `point` and its Euclidean distance.

    The nearest point lies in the relative interior of some face, where it is the orthogonal projection onto that face's linear span. With at most [MAX_ENUMERATED_CONSTRAINTS][toric_embed.polyhedral.MAX_ENUMERATED_CONSTRAINTS] inequalities every candidate active set is enumerated and the closest feasible candidate is returned; larger systems fall back to alternating projections (Dykstra) with the given `tolerance` and `max_iterations`.

    Args:
        cone (Cone): the target cone.
        point (Sequence): the point to project.
        tolerance (float, optional): feasibility slack for candidates and stopping tolerance for the fallback.
        max_iterations (int, optional): iteration cap for the fallback.

    Returns:
        A `Projection(point, distance)` named tuple.
    """
    x = np.asarray([float(v) for v in point], dtype=float)
    assert len(x) == cone.dimension, (
        f"`point` has {len(x)} coordinates, expected `dimension` = {cone.dimension}"
    )
    inequalities, equalities = cone.float_constraints

    if len(inequalities) > MAX_ENUMERATED_CONSTRAINTS:
        nearest = _project_alternating(x, inequalities, equalities, tolerance, max_iterations)
        return Projection(nearest, float(np.linalg.norm(x - nearest)))

    best = None
    best_distance = np.inf
    for size in range(len(inequalities) + 1):
        for active in combinations(range(len(inequalities)), size):
            rows = list(equalities) + [inequalities[i] for i in active]
            candidate = _project_onto_subspace(x, rows)
            if len(inequalities) > 0 and np.min(inequalities @ candidate) < -tolerance:
                continue
            distance = float(np.linalg.norm(x - candidate))
            if distance < best_distance - 1e-15:
                best, best_distance = candidate, distance
    assert best is not None, "No feasible face found while projecting onto the cone"
    return Projection(best, best_distance)


class SignVector(tuple):
    """
    A sign pattern `σ ∈ {+, 0, -}^m` of a point against an ordered list of hyperplane normals; it indexes the cones of a [HyperplaneFan][toric_embed.polyhedral.HyperplaneFan]. Entries are stored as `1`, `0` and `-1`; `str()` renders them as `+`, `0` and `-`.
    """

    def __new__(cls, entries: Union[str, Iterable[int]]):
        if isinstance(entries, str):
            symbols = {"+": 1, "0": 0, "-": -1}
            assert all(s in symbols for s in entries), f"Invalid sign vector string `{entries}`"
            entries = [symbols[s] for s in entries]
        entries = tuple(int(e) for e in entries)
        assert all(e in (-1, 0, 1) for e in entries), f"Sign vector entries must be -1, 0 or 1, got {entries}"
        return super().__new__(cls, entries)

    def __str__(self) -> str:
        return "".join({1: "+", 0: "0", -1: "-"}[e] for e in self)

    @property
    def zeros(self) -> tuple[int, ...]:
        return tuple(i for i, e in enumerate(self) if e == 0)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, e in enumerate(self) if e != 0)


class HyperplaneFan:
    """
    The complete fan cut out by a central hyperplane arrangement: one cone per realizable sign vector `σ`, namely `{X : σ_i (X·h_i) ≥ 0 for σ_i ≠ 0, X·h_i = 0 for σ_i = 0}`.

    Hyperplanes are deduplicated up to sign. `directions` keeps a canonical (primitive, exact when possible) direction per hyperplane for cone arithmetic; `normals` holds the matching unit vectors used for distances.
    """

    def __init__(self, dimension: int, normals: Iterable[Any], tolerance: float = DEFAULT_TOLERANCE):
        """
        Create a new HyperplaneFan object.

        Args:
            dimension (int): the ambient dimension `n`.
            normals (Iterable): hyperplane normals; parallel duplicates are dropped.
            tolerance (float, optional): strict-inequality slack for floating realizability checks.
        """
        assert isinstance(dimension, int) and dimension > 0, "`dimension` must be a positive integer"
        parsed = unify_vectors(to_vector(h) for h in normals)
        directions: dict[tuple, Vector] = {}
        for i, h in enumerate(parsed):
            assert len(h) == dimension, (
                f"Hyperplane normal `{i}` has {len(h)} coordinates, expected `dimension` = {dimension}"
            )
            assert not is_zero(h), f"Hyperplane normal at index `{i}` is zero"
            directions.setdefault(direction_key(h, signed=False), canonical_direction(h))

        self.dimension = dimension
        self.tolerance = tolerance
        self.directions: tuple[Vector, ...] = tuple(directions.values())
        self.normals = np.asarray([unit(d) for d in self.directions], dtype=float).reshape(
            len(self.directions), dimension
        )
        self.exact = all(is_exact(d) for d in self.directions)
        self._cones: dict[SignVector, Cone] = {}

    def __len__(self) -> int:
        return len(self.directions)

    def __repr__(self) -> str:
        return f"HyperplaneFan(dimension={self.dimension}, directions={list(self.directions)})"

    def _is_realizable(self, signs: Sequence[int]) -> bool:
        support = [i for i, s in enumerate(signs) if s != 0]
        if len(support) == 0:
            return True
        if self.exact:
            constraints = [
                (self.directions[i] if s > 0 else negate(self.directions[i]), Relation.GE)
                if s != 0
                else (self.directions[i], Relation.EQ)
                for i, s in enumerate(signs)
            ]
            cone = Cone(self.dimension, constraints=constraints)
            total = [sum((r[k] for r in cone.extreme_rays), Fraction(0)) for k in range(self.dimension)]
            return all(signs[i] * dot(self.directions[i], total) > 0 for i in support)

        # maximize t subject to sigma_i (h_i . X) >= t, h_i . X = 0, X in [-1, 1]^n, t <= 1
        n = self.dimension
        a_ub, a_eq = [], []
        for i, s in enumerate(signs):
            if s != 0:
                a_ub.append(list(-s * self.normals[i]) + [1.0])
            else:
                a_eq.append(list(self.normals[i]) + [0.0])
        result = linprog(
            c=[0.0] * n + [-1.0],
            A_ub=np.asarray(a_ub),
            b_ub=np.zeros(len(a_ub)),
            A_eq=np.asarray(a_eq) if len(a_eq) > 0 else None,
            b_eq=np.zeros(len(a_eq)) if len(a_eq) > 0 else None,
            bounds=[(-1.0, 1.0)] * n + [(None, 1.0)],
            method="highs",
        )
        return bool(result.success and -result.fun > self.tolerance)

    @cached_property
    def sign_vectors(self) -> tuple[SignVector, ...]:
        """
        All realizable sign vectors, sorted. Enumerated depth-first over prefixes: a prefix that is not realizable for the first hyperplanes can not be extended.
        """
        realizable: list[SignVector] = []

        def extend(prefix: tuple[int, ...]):
            if len(prefix) == len(self.directions):
                realizable.append(SignVector(prefix))
                return
            for s in (1, 0, -1):
                candidate = prefix + (s,)
                if self._is_realizable(candidate):
                    extend(candidate)

        extend(())
        return tuple(sorted(realizable))

    @cached_property
    def _sign_vector_set(self) -> frozenset:
        return frozenset(self.sign_vectors)

    def is_realizable(self, sigma: Union[str, Sequence[int]]) -> bool:
        sigma = SignVector(sigma)
        assert len(sigma) == len(self.directions), (
            f"Sign vector has {len(sigma)} entries, expected {len(self.directions)}"
        )
        return sigma in self._sign_vector_set

    def locate(self, point: Sequence[Any], tolerance: Optional[float] = None) -> SignVector:
        """
        The sign vector of `point`, i.e. the cone of the fan whose relative interior contains it. Exact points are located exactly against exact directions.
        """
        point = to_vector(point)
        if self.exact and is_exact(point):
            return SignVector((dot(d, point) > 0) - (dot(d, point) < 0) for d in self.directions)
        tolerance = self.tolerance if tolerance is None else tolerance
        values = self.normals @ np.asarray([float(x) for x in point], dtype=float)
        return SignVector(np.where(np.abs(values) <= tolerance, 0, np.sign(values)).astype(int))

    def cone_of(self, sigma: Union[str, Sequence[int]]) -> Cone:
        """
        The cone indexed by a realizable sign vector, in half-space form `{σ_i (X·h_i) ≥ 0 for σ_i ≠ 0; X·h_i = 0 for σ_i = 0}`. Its polar is generated by `{-σ_i h_i : σ_i ≠ 0} ∪ {±h_i : σ_i = 0}`.

        Raises:
            AssertionError: if `sigma` is not realizable.
        """
        sigma = SignVector(sigma)
        assert self.is_realizable(sigma), f"Sign vector `{sigma}` is not realizable"
        if sigma not in self._cones:
            constraints = [
                ((d if s > 0 else negate(d)), Relation.GE) if s != 0 else (d, Relation.EQ)
                for d, s in zip(self.directions, sigma)
            ]
            self._cones[sigma] = Cone(self.dimension, constraints=constraints, tolerance=self.tolerance)
        return self._cones[sigma]

    def cones(self) -> list[Cone]:
        """
        Every cone of the fan, in [sign_vectors][toric_embed.polyhedral.HyperplaneFan.sign_vectors] order.
        """
        return [self.cone_of(s) for s in self.sign_vectors]

    def is_complete(self, samples: int = 1000, seed: int = 0, box: float = 10.0) -> bool:
        """
        Samples random points and checks that each one is located in a realizable cone.
        """
        rng = np.random.default_rng(seed)
        points = rng.uniform(-box, box, size=(samples, self.dimension))
        return all(self.locate(p) in self._sign_vector_set for p in points)


def fan_from_hyperplanes(
    normals: Iterable[Any], dimension: Optional[int] = None, tolerance: float = DEFAULT_TOLERANCE
) -> HyperplaneFan:
    """
    The complete fan generated by a list of hyperplane normals. See [HyperplaneFan][toric_embed.polyhedral.HyperplaneFan].

    Args:
        normals (Iterable): nonzero hyperplane normals.
        dimension (int, optional): required only when `normals` is empty.
        tolerance (float, optional): strict-inequality slack for floating realizability checks.

    Raises:
        AssertionError: on a zero normal, naming its index.
    """
    normals = [to_vector(h) for h in normals]
    if dimension is None:
        assert len(normals) > 0, "`dimension` is required when `normals` is empty"
        dimension = len(normals[0])
    return HyperplaneFan(dimension, normals, tolerance)


def cone_of(fan: HyperplaneFan, sigma: Union[str, Sequence[int]]) -> Cone:
    """
    The cone of `fan` indexed by `sigma`. See [HyperplaneFan.cone_of][toric_embed.polyhedral.HyperplaneFan.cone_of].
    """
    return fan.cone_of(sigma)
