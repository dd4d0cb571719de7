from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, NamedTuple, Optional, Sequence, Union
import networkx as nx

from toric_embed.utils import (
    Scalar,
    Vector,
    add,
    is_exact,
    is_zero,
    nullspace_basis,
    rowspace_basis,
    subtract,
    to_scalar,
    to_vector,
    unify_vectors,
)


@dataclass(frozen=True)
class EGraph:
    """
    A Euclidean embedded graph: a finite directed graph whose vertices are distinct points of ℝⁿ. Each edge `(i, j)` carries the edge vector `vertices[j] - vertices[i]`.

    Vertex labels are exact (`fractions.Fraction`) when every coordinate was given as an integer or rational literal, and floating otherwise. See [to_vector][toric_embed.utils.to_vector].

    Instances are immutable; construction validates every invariant and raises `AssertionError` naming the offending vertex or edge.
    """

    dimension: int
    """
    The ambient dimension `n`.
    """
    vertices: tuple[Vector, ...]
    """
    Ordered vertex labels, pairwise distinct points of ℝⁿ.
    """
    edges: tuple[tuple[int, int], ...] = field(default=())
    """
    Ordered `(source, target)` vertex-index pairs; no loops and no duplicates.
    """

    def __post_init__(self):
        assert isinstance(self.dimension, int) and self.dimension > 0, (
            "`dimension` must be a positive integer"
        )
        vertices = unify_vectors(to_vector(v) for v in self.vertices)
        for i, v in enumerate(vertices):
            assert len(v) == self.dimension, (
                f"Vertex `{i}` has {len(v)} coordinates, expected `dimension` = {self.dimension}"
            )
        seen: dict[Vector, int] = {}
        for i, v in enumerate(vertices):
            assert v not in seen, f"Vertex `{i}` duplicates vertex `{seen[v]}`"
            seen[v] = i

        edges = tuple((int(s), int(t)) for s, t in self.edges)
        seen_edges: set[tuple[int, int]] = set()
        for e, (s, t) in enumerate(edges):
            assert 0 <= s < len(vertices) and 0 <= t < len(vertices), (
                f"Edge `{e}` references a vertex index outside 0..{len(vertices) - 1}"
            )
            assert s != t, f"Edge `{e}` is a loop at vertex `{s}`"
            assert (s, t) not in seen_edges, f"Edge `{e}` duplicates an earlier edge ({s}->{t})"
            seen_edges.add((s, t))

        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", edges)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def is_exact(self) -> bool:
        """
        True when every vertex label is an exact rational.
        """
        return all(is_exact(v) for v in self.vertices)

    def source(self, edge: int) -> Vector:
        return self.vertices[self.edges[edge][0]]

    def target(self, edge: int) -> Vector:
        return self.vertices[self.edges[edge][1]]

    def edge_vector(self, edge: int) -> Vector:
        return subtract(self.target(edge), self.source(edge))

    def edge_vectors(self) -> list[Vector]:
        return [self.edge_vector(e) for e in range(self.n_edges)]

    def vertex_index(self, point: Sequence[Any]) -> Optional[int]:
        """
        The index of the vertex labeled `point`, or None.
        """
        key = to_vector(point)
        if not self.is_exact:
            key = tuple(float(x) for x in key)
        for i, v in enumerate(self.vertices):
            if v == key:
                return i
        return None

    def to_networkx(self) -> nx.DiGraph:
        """
        The graph as a `networkx.DiGraph` on vertex indices. Nodes and edges are inserted in order, which keeps every traversal deterministic; each edge stores its position as the `index` attribute.
        """
        graph = nx.DiGraph()
        graph.add_nodes_from(range(self.n_vertices))
        for e, (s, t) in enumerate(self.edges):
            graph.add_edge(s, t, index=e)
        return graph


class Term(NamedTuple):
    """
    One monomial term `rate · x^exponent · direction` of a power-law system.
    """

    exponent: Vector
    direction: Vector
    rate: Scalar


@dataclass(frozen=True)
class PolySystem:
    """
    A polynomial (integer exponents) or power-law (real exponents) dynamical system `dx/dt = Σ k_i x^{s_i} v_i`.
    """

    dimension: int
    terms: tuple[Term, ...] = field(default=())

    def __post_init__(self):
        assert isinstance(self.dimension, int) and self.dimension > 0, (
            "`dimension` must be a positive integer"
        )
        terms = []
        seen: dict[tuple[Vector, Vector], int] = {}
        for i, term in enumerate(self.terms):
            exponent, direction, rate = term
            exponent = to_vector(exponent)
            direction = to_vector(direction)
            rate = to_scalar(rate)
            assert len(exponent) == self.dimension and len(direction) == self.dimension, (
                f"Term `{i}` does not match `dimension` = {self.dimension}"
            )
            assert rate > 0, f"Rate of term `{i}` must be positive"
            assert (exponent, direction) not in seen, (
                f"Duplicate term at index `{i}` (first seen at index `{seen[(exponent, direction)]}`)"
            )
            seen[(exponent, direction)] = i
            terms.append(Term(exponent, direction, rate))
        object.__setattr__(self, "terms", tuple(terms))

    @property
    def rates(self) -> tuple[Scalar, ...]:
        return tuple(t.rate for t in self.terms)

    def with_rates(self, rates: Sequence[Any]) -> "PolySystem":
        """
        A copy of this system with every rate constant replaced.
        """
        assert len(rates) == len(self.terms), (
            f"Expected {len(self.terms)} rates, got {len(rates)}"
        )
        return PolySystem(
            self.dimension,
            tuple(Term(t.exponent, t.direction, r) for t, r in zip(self.terms, rates)),
        )


@dataclass(frozen=True)
class CycleCover:
    """
    A decomposition of a weakly reversible E-graph into directed cycles. Each edge's rate is split among the cycles containing it; the per-edge fractions are positive and sum to 1.
    """

    cycles: tuple[tuple[int, ...], ...]
    """
    Directed cycles as vertex-index sequences; cycle `c` uses the edges `cycles[c][i] -> cycles[c][i + 1]` (wrapping around).
    """
    cycle_edges: tuple[tuple[int, ...], ...]
    """
    For each cycle, the indices of the graph edges it uses, in cycle order.
    """
    weights: tuple[tuple[tuple[int, Fraction], ...], ...]
    """
    For each graph edge, the `(cycle index, fraction)` pairs assigned to it.
    """

    @property
    def min_fraction(self) -> Fraction:
        fractions = [f for per_edge in self.weights for _, f in per_edge]
        return min(fractions) if len(fractions) > 0 else Fraction(1)

    def fraction(self, edge: int, cycle: int) -> Fraction:
        for c, f in self.weights[edge]:
            if c == cycle:
                return f
        return Fraction(0)

    def cycle_systems(self, graph: EGraph, rates: Optional[Sequence[Any]] = None) -> list[PolySystem]:
        """
        The system generated by each cycle with its share of every edge rate. Summing the returned term lists reconstructs `system_of(graph, rates)`.
        """
        rates = check_rates(graph, rates)
        systems = []
        for c, edges in enumerate(self.cycle_edges):
            terms = tuple(
                Term(graph.source(e), graph.edge_vector(e), rates[e] * self.fraction(e, c))
                for e in edges
            )
            systems.append(PolySystem(graph.dimension, terms))
        return systems


def graph_from_terms(terms: Sequence[Sequence[Any]], dimension: Optional[int] = None) -> EGraph:
    """
    The canonical E-graph generating a list of `(exponent, direction)` terms: vertices `{s_i} ∪ {s_i + v_i}` (deduplicated, in order of first appearance) and one edge `s_i -> s_i + v_i` per term.

    Args:
        terms (Sequence): `(s_i, v_i)` pairs; a trailing rate entry is ignored.
        dimension (int, optional): required only when `terms` is empty.

    Raises:
        AssertionError: on a zero direction or a duplicate `(s_i, v_i)` pair, naming the index.

    Returns:
        An [EGraph][toric_embed.model.EGraph] that generates exactly `terms` under unit rates.
    """
    assert terms is not None, "`terms` can not be null"
    if len(terms) == 0:
        assert dimension is not None, "`dimension` is required when `terms` is empty"
        return EGraph(dimension, (), ())

    parsed = []
    seen: dict[tuple[Vector, Vector], int] = {}
    for i, term in enumerate(terms):
        exponent, direction = to_vector(term[0]), to_vector(term[1])
        assert not is_zero(direction), f"Direction of term at index `{i}` is zero"
        assert (exponent, direction) not in seen, (
            f"Duplicate term at index `{i}` (first seen at index `{seen[(exponent, direction)]}`)"
        )
        seen[(exponent, direction)] = i
        parsed.append((exponent, direction))

    dimension = len(parsed[0][0]) if dimension is None else dimension
    vertices: list[Vector] = []
    index: dict[Vector, int] = {}

    def vertex(point: Vector) -> int:
        if point not in index:
            index[point] = len(vertices)
            vertices.append(point)
        return index[point]

    edges = []
    for exponent, direction in parsed:
        source = vertex(exponent)
        target = vertex(add(exponent, direction))
        edges.append((source, target))
    return EGraph(dimension, tuple(vertices), tuple(edges))


def check_rates(graph: EGraph, rates: Optional[Sequence[Any]]) -> tuple[Scalar, ...]:
    """
    Parses one positive rate per edge; unit rates when `rates` is None.
    """
    if rates is None:
        return tuple(Fraction(1) for _ in graph.edges)
    assert len(rates) >= graph.n_edges, (
        f"Missing rate for edge `{len(rates)}` ({graph.edges[len(rates)][0]}->{graph.edges[len(rates)][1]})"
    )
    assert len(rates) == graph.n_edges, (
        f"Expected {graph.n_edges} rates, got {len(rates)}"
    )
    parsed = []
    for e, rate in enumerate(rates):
        assert rate is not None, f"Missing rate for edge `{e}` ({graph.edges[e][0]}->{graph.edges[e][1]})"
        value = to_scalar(rate)
        assert value > 0, f"Rate for edge `{e}` ({graph.edges[e][0]}->{graph.edges[e][1]}) must be positive"
        parsed.append(value)
    return tuple(parsed)


def system_of(graph: EGraph, rates: Optional[Sequence[Any]] = None) -> PolySystem:
    """
    The mass-action (power-law) system generated by `graph`: one term `(s(e), v(e), k_e)` per edge.

    Args:
        graph (EGraph): the generating graph.
        rates (Sequence, optional): one positive rate per edge; unit rates when omitted.

    Returns:
        A [PolySystem][toric_embed.model.PolySystem].
    """
    rates = check_rates(graph, rates)
    return PolySystem(
        graph.dimension,
        tuple(Term(graph.source(e), graph.edge_vector(e), rates[e]) for e in range(graph.n_edges)),
    )


def first_irreversible_edge(graph: EGraph) -> Optional[int]:
    edges = set(graph.edges)
    for e, (s, t) in enumerate(graph.edges):
        if (t, s) not in edges:
            return e
    return None


def is_reversible(graph: EGraph) -> bool:
    """
    True iff the reverse of every edge is also an edge.
    """
    return first_irreversible_edge(graph) is None


def reversible_pairs(graph: EGraph) -> list[tuple[int, int]]:
    """
    Vertex pairs `(i, j)` with `i < j` joined by edges in both directions, in order of first appearance.
    """
    edges = set(graph.edges)
    pairs = []
    for s, t in graph.edges:
        pair = (min(s, t), max(s, t))
        if (t, s) in edges and pair not in pairs:
            pairs.append(pair)
    return pairs


def _sorted_components(components) -> list[list[int]]:
    return sorted((sorted(c) for c in components), key=lambda c: c[0])


def strongly_connected_components(graph: EGraph) -> list[list[int]]:
    """
    Strongly connected components as sorted vertex-index lists, ordered by their smallest vertex.
    """
    return _sorted_components(nx.strongly_connected_components(graph.to_networkx()))


def linkage_classes(graph: EGraph) -> list[list[int]]:
    """
    Weakly connected components (linkage classes), ordered like [strongly_connected_components][toric_embed.model.strongly_connected_components].
    """
    return _sorted_components(nx.weakly_connected_components(graph.to_networkx()))


def first_edge_outside_cycles(graph: EGraph) -> Optional[int]:
    """
    The first edge whose endpoints lie in different strongly connected components (an edge on no directed cycle), or None.
    """
    component = {}
    for c, members in enumerate(strongly_connected_components(graph)):
        for v in members:
            component[v] = c
    for e, (s, t) in enumerate(graph.edges):
        if component[s] != component[t]:
            return e
    return None


def is_weakly_reversible(graph: EGraph) -> bool:
    """
    True iff every edge lies on a directed cycle, equivalently every linkage class is strongly connected.
    """
    return first_edge_outside_cycles(graph) is None


def _rotate(cycle: list[int]) -> tuple[int, ...]:
    start = cycle.index(min(cycle))
    return tuple(cycle[start:] + cycle[:start])


def cycle_cover(graph: EGraph) -> CycleCover:
    """
    Covers a weakly reversible graph by directed cycles.

    For each edge `s -> t` (in edge order), the shortest directed path from `t` back to `s` is found by breadth-first search; together with the edge it closes a simple cycle. Cycles are rotated to start at their smallest vertex and deduplicated. Every edge's rate is then split equally among the retained cycles that contain it.

    Args:
        graph (EGraph): a weakly reversible graph.

    Raises:
        AssertionError: if some edge lies on no directed cycle, naming the edge.

    Returns:
        A [CycleCover][toric_embed.model.CycleCover]; the output is deterministic for a fixed input ordering.
    """
    offending = first_edge_outside_cycles(graph)
    if offending is not None:
        s, t = graph.edges[offending]
        raise AssertionError(f"Edge `{offending}` ({s}->{t}) lies on no directed cycle")

    digraph = graph.to_networkx()
    edge_index = {edge: e for e, edge in enumerate(graph.edges)}
    cycles: list[tuple[int, ...]] = []
    for s, t in graph.edges:
        path = nx.shortest_path(digraph, t, s)
        cycle = _rotate([s] + path[:-1])
        if cycle not in cycles:
            cycles.append(cycle)

    cycle_edges = tuple(
        tuple(edge_index[(c[i], c[(i + 1) % len(c)])] for i in range(len(c))) for c in cycles
    )
    weights = []
    for e in range(graph.n_edges):
        containing = [c for c, edges in enumerate(cycle_edges) if e in edges]
        weights.append(tuple((c, Fraction(1, len(containing))) for c in containing))
    return CycleCover(tuple(cycles), cycle_edges, tuple(weights))


def edge_space(graph: EGraph) -> tuple[list[Vector], list[Vector]]:
    """
    Bases of the edge space `S` (the span of all edge vectors) and of its orthogonal complement `S⊥`, whose elements are the conservation vectors of every system the graph generates.

    Exact graphs get primitive integer bases computed with `sympy`; floating graphs get orthonormal bases from `scipy.linalg`.

    Returns:
        `(basis of S, basis of S⊥)`.
    """
    exact = graph.is_exact
    vectors = graph.edge_vectors()
    span = rowspace_basis(vectors, graph.dimension, exact)
    complement = nullspace_basis(span, graph.dimension, exact)
    return span, complement


def deficiency(graph: EGraph) -> int:
    """
    `|V| - (number of linkage classes) - dim S`.
    """
    span, _ = edge_space(graph)
    return graph.n_vertices - len(linkage_classes(graph)) - len(span)


def shift_vertices(graph: EGraph, offset: Sequence[Any]) -> EGraph:
    """
    Translates every vertex by `offset`. Edges and edge vectors are unchanged, and the generated right-hand side is multiplied by the scalar field `x^offset`, so the orbits of the generated system are unchanged.
    """
    offset = to_vector(offset)
    assert len(offset) == graph.dimension, (
        f"`offset` has {len(offset)} coordinates, expected `dimension` = {graph.dimension}"
    )
    vertices = unify_vectors([add(v, offset) for v in graph.vertices] + [offset])[:-1]
    return EGraph(graph.dimension, vertices, graph.edges)


def shift_to_nonnegative(graph: EGraph) -> tuple[EGraph, Vector]:
    """
    Translates `graph` into the nonnegative orthant so that every coordinate's minimum over the vertices is zero. The translated graph generates a polynomial system whenever the original exponents are integral.

    Returns:
        `(shifted graph, offset used)`.
    """
    if graph.n_vertices == 0:
        zero = Fraction(0)
        return graph, tuple(zero for _ in range(graph.dimension))
    offset = tuple(-min(v[i] for v in graph.vertices) for i in range(graph.dimension))
    return shift_vertices(graph, offset), offset


def edge_label(graph: EGraph, edge: int) -> str:
    s, t = graph.edges[edge]
    return f"{s}->{t}"


def as_graph(source: Union[EGraph, PolySystem]) -> EGraph:
    """
    The graph behind `source`: graphs are returned as is, systems are converted with [graph_from_terms][toric_embed.model.graph_from_terms].
    """
    if isinstance(source, EGraph):
        return source
    return graph_from_terms([(t.exponent, t.direction) for t in source.terms], source.dimension)
