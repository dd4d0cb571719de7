"""Network documents, run reports and the files the command-line tools write."""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Sequence, Union
import numpy as np
import pandas as pd
import pandera.pandas as pa
from pandera import Field, Column
from pandera.typing import Series
from matplotlib.figure import Figure

from toric_embed.dynamics import Trajectory
from toric_embed.model import EGraph, check_rates
from toric_embed.utils import Scalar, Vector, format_scalar, format_vector, to_scalar, to_vector


class VertexTableSchema(pa.DataFrameModel):
    """
    A pandera.DataFrameModel for the vertex table of a network document.

    Coordinate columns `s_1..s_n` are added before validation in [NetworkDocument.vertex_frame()][toric_embed.document.NetworkDocument.vertex_frame].
    """

    id: Series[str] = Field(nullable=False, unique=True)
    """
    The vertex identifier, unique within the document.
    """

    @pa.check("id")
    def is_not_blank(self, series: Series[str]) -> bool:
        return bool((series.str.strip().str.len() > 0).all())


class EdgeTableSchema(pa.DataFrameModel):
    """
    A pandera.DataFrameModel for the edge table of a network document.
    """

    source: Series[str] = Field(nullable=False)
    """
    The id of the edge's source vertex.
    """
    target: Series[str] = Field(nullable=False)
    """
    The id of the edge's target vertex.
    """
    rate: Series[float] = Field(nullable=True, gt=0)
    """
    The edge's rate constant, if given. Missing rates default to 1 in [NetworkDocument.to_graph()][toric_embed.document.NetworkDocument.to_graph].
    """


@dataclass(frozen=True)
class VertexRecord:
    id: str
    point: Vector


@dataclass(frozen=True)
class EdgeRecord:
    source: str
    target: str
    rate: Optional[Scalar] = None


@dataclass(frozen=True)
class NetworkDocument:
    """
    The file form of an E-graph with optional rate constants.

    Documents are JSON objects with the fields `dimension`, `vertices` (a list of `{"id", "point"}` objects), `edges` (a list of `{"from", "to", "rate"?}` objects) and an optional `metadata` object. Coordinates and rates may be integers, rational strings (`"3/2"`) or decimals; rationals stay exact. [to_json()][toric_embed.document.NetworkDocument.to_json] writes the canonical form, in which exact values are `"p/q"` strings and fields appear in the order above.
    """

    dimension: int
    vertices: tuple[VertexRecord, ...]
    edges: tuple[EdgeRecord, ...] = field(default=())
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        assert isinstance(self.dimension, int) and self.dimension > 0, "`dimension` must be a positive integer"
        for record in self.vertices:
            assert len(record.point) == self.dimension, (
                f"Vertex `{record.id}` has {len(record.point)} coordinates, expected `dimension` = {self.dimension}"
            )
        VertexTableSchema.to_schema().validate(pd.DataFrame({"id": [v.id for v in self.vertices]}, dtype=str))
        known = {v.id for v in self.vertices}
        for k, edge in enumerate(self.edges):
            for vertex_id in (edge.source, edge.target):
                assert vertex_id in known, f"Edge `{k}` references unknown vertex id `{vertex_id}`"
        self.edge_frame()

    def vertex_frame(self) -> pd.DataFrame:
        """
        The vertices as a validated table with columns `id` and `s_1..s_n`.
        """
        data = pd.DataFrame({"id": [v.id for v in self.vertices]}, dtype=str)
        columns = {}
        for i in range(self.dimension):
            data[f"s_{i + 1}"] = [float(v.point[i]) for v in self.vertices]
            columns[f"s_{i + 1}"] = Column(float, nullable=False)
        return VertexTableSchema.to_schema().add_columns(columns).validate(data)

    def edge_frame(self) -> pd.DataFrame:
        data = pd.DataFrame(
            {
                "source": pd.Series([e.source for e in self.edges], dtype=str),
                "target": pd.Series([e.target for e in self.edges], dtype=str),
                "rate": pd.Series([np.nan if e.rate is None else float(e.rate) for e in self.edges], dtype=float),
            }
        )
        return EdgeTableSchema.to_schema().validate(data)

    @staticmethod
    def from_dict(data: dict, exact: bool = False) -> "NetworkDocument":
        """
        Parses a decoded JSON object.

        Args:
            data (dict): the decoded document.
            exact (bool, optional): read decimal literals as the exact rationals they denote.

        Raises:
            AssertionError: if a field is missing or malformed, an id is duplicated or an edge references an unknown id.
            pandera.errors.SchemaError: if a rate is not positive.
        """
        assert isinstance(data, dict), "Network document must be a JSON object"
        for name in ("dimension", "vertices", "edges"):
            assert name in data, f"Network document is missing field `{name}`"
        assert isinstance(data["vertices"], list), "Field `vertices` must be a list"
        assert isinstance(data["edges"], list), "Field `edges` must be a list"

        vertices = []
        for i, record in enumerate(data["vertices"]):
            assert isinstance(record, dict), f"Vertex `{i}` must be a JSON object"
            for name in ("id", "point"):
                assert name in record, f"Vertex `{i}` is missing field `{name}`"
            vertices.append(VertexRecord(str(record["id"]), to_vector(record["point"], exact=exact)))

        edges = []
        for k, record in enumerate(data["edges"]):
            assert isinstance(record, dict), f"Edge `{k}` must be a JSON object"
            for name in ("from", "to"):
                assert name in record, f"Edge `{k}` is missing field `{name}`"
            rate = record.get("rate")
            edges.append(
                EdgeRecord(str(record["from"]), str(record["to"]), None if rate is None else to_scalar(rate, exact=exact))
            )

        return NetworkDocument(
            dimension=int(data["dimension"]),
            vertices=tuple(vertices),
            edges=tuple(edges),
            metadata=dict(data.get("metadata") or {}),
        )

    @staticmethod
    def from_json(text: str, exact: bool = False) -> "NetworkDocument":
        """
        Parses a JSON string. Syntax errors are re-raised as `ValueError` naming the line and column.
        """
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ValueError(f"Invalid network JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
        return NetworkDocument.from_dict(data, exact=exact)

    @staticmethod
    def load(path: Union[str, Path], exact: bool = False) -> "NetworkDocument":
        return NetworkDocument.from_json(Path(path).read_text(encoding="utf-8"), exact=exact)

    def to_dict(self) -> dict:
        data: dict[str, Any] = {
            "dimension": self.dimension,
            "vertices": [{"id": v.id, "point": format_vector(v.point)} for v in self.vertices],
            "edges": [
                {"from": e.source, "to": e.target, **({} if e.rate is None else {"rate": format_scalar(e.rate)})}
                for e in self.edges
            ],
        }
        if len(self.metadata) > 0:
            data["metadata"] = self.metadata
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @property
    def has_rates(self) -> bool:
        return any(e.rate is not None for e in self.edges)

    def to_graph(self) -> tuple[EGraph, Optional[tuple[Scalar, ...]]]:
        """
        Builds the E-graph (vertices and edges in document order) and its rates. Rates are None when the document gives none; otherwise missing rates default to 1.
        """
        index = {v.id: i for i, v in enumerate(self.vertices)}
        graph = EGraph(
            dimension=self.dimension,
            vertices=tuple(v.point for v in self.vertices),
            edges=tuple((index[e.source], index[e.target]) for e in self.edges),
        )
        if not self.has_rates:
            return graph, None
        rates = [Fraction(1) if e.rate is None else e.rate for e in self.edges]
        return graph, check_rates(graph, rates)

    @staticmethod
    def from_graph(
        graph: EGraph,
        rates: Optional[Sequence[Any]] = None,
        ids: Optional[Sequence[str]] = None,
        metadata: Optional[dict] = None,
    ) -> "NetworkDocument":
        ids = [f"v{i}" for i in range(graph.n_vertices)] if ids is None else [str(i) for i in ids]
        assert len(ids) == graph.n_vertices, f"Expected {graph.n_vertices} `ids`, got {len(ids)}"
        parsed = check_rates(graph, rates) if rates is not None else [None] * graph.n_edges
        return NetworkDocument(
            dimension=graph.dimension,
            vertices=tuple(VertexRecord(i, v) for i, v in zip(ids, graph.vertices)),
            edges=tuple(EdgeRecord(ids[s], ids[t], k) for (s, t), k in zip(graph.edges, parsed)),
            metadata=dict(metadata or {}),
        )


def _json_default(value: Any) -> Any:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (set, tuple)):
        return list(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


@dataclass
class RunReport:
    """
    The machine-readable record of one command run: the command, every option that shaped the result, the structured results, the package version and wall-clock timing.
    """

    command: str
    config: dict
    results: dict = field(default_factory=dict)
    version: str = ""
    timing: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "version": self.version,
            "config": self.config,
            "results": self.results,
            "timing": self.timing,
        }

    def to_json(self, include_timing: bool = True) -> str:
        data = self.to_dict()
        if not include_timing:
            data.pop("timing")
        return json.dumps(data, indent=2, default=_json_default) + "\n"

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json(), encoding="utf-8")
        return path


def write_trajectory_csv(trajectory: Trajectory, path: Union[str, Path]) -> Path:
    """
    Writes a trajectory as CSV with columns `t`, `x_1..x_n` and `residual_1..residual_c`.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    trajectory.to_frame().to_csv(path, index=False)
    return path


def write_region_svg(
    path: Union[str, Path],
    log_points: np.ndarray,
    x_points: np.ndarray,
    closed: bool = True,
    title: Optional[str] = None,
    trajectories: Sequence[np.ndarray] = (),
) -> Path:
    """
    Draws a region or curve as an SVG with two panels: the polyline in log coordinates and its image in `ℝ²_{>0}`. Optional trajectories (in log coordinates) are overlaid on both panels.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    figure = Figure(figsize=(10, 5))
    log_axis, x_axis = figure.subplots(1, 2)

    points = np.asarray(log_points, dtype=float)
    if closed:
        points = np.vstack([points, points[:1]])
    log_axis.plot(points[:, 0], points[:, 1], color="tab:blue", lw=1.5)
    log_axis.set_xlabel("X_1 = log x_1")
    log_axis.set_ylabel("X_2 = log x_2")
    log_axis.set_title("log coordinates")
    log_axis.set_aspect("equal", adjustable="datalim")

    curve = np.asarray(x_points, dtype=float)
    x_axis.plot(curve[:, 0], curve[:, 1], color="tab:blue", lw=1.5)
    x_axis.set_xscale("log")
    x_axis.set_yscale("log")
    x_axis.set_xlabel("x_1")
    x_axis.set_ylabel("x_2")
    x_axis.set_title("positive orthant")

    for states in trajectories:
        states = np.asarray(states, dtype=float)
        log_axis.plot(states[:, 0], states[:, 1], color="tab:gray", lw=0.5, alpha=0.6)
        x_axis.plot(np.exp(states[:, 0]), np.exp(states[:, 1]), color="tab:gray", lw=0.5, alpha=0.6)

    if title is not None:
        figure.suptitle(title)
    figure.savefig(path, format="svg", bbox_inches="tight")
    return path
