"""Right-hand sides, positivity-preserving simulation under bounded time-varying rates, vertex-balanced equilibria and persistence experiments."""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import log, pi
from typing import Any, Optional, Sequence, Union
import numpy as np
import pandas as pd
import pandera.pandas as pa
import sympy
from pandera import Column, Field
from pandera.typing import Series
from scipy.integrate import solve_ivp
from scipy.optimize import minimize

from toric_embed.model import (
    EGraph,
    PolySystem,
    as_graph,
    check_rates,
    edge_space,
    first_edge_outside_cycles,
    linkage_classes,
)
from toric_embed.utils import Scalar, check_epsilon, nullspace_basis, to_scalar, to_vector, verbose_log

DEFAULT_RTOL = 1e-8
"""
Default relative tolerance of the log-coordinate integrator.
"""

DEFAULT_ATOL = 1e-10
"""
Default absolute tolerance of the log-coordinate integrator.
"""

BLOWUP_LOG_THRESHOLD = 50.0
"""
A failed integration whose log state exceeds this magnitude is reported as a probable finite-time blow-up.
"""

RATIO_SCALE_LOG = log(1e3)
"""
Half-width, in log space, of the common factor shared by a linkage class in ratio-bounded schedules.
"""


def rhs(
    system: PolySystem, x: Sequence[Any], rates: Optional[Sequence[Any]] = None
) -> Union[tuple[Fraction, ...], np.ndarray]:
    """
    Evaluates `Σ k_i x^{s_i} v_i`.

    When every exponent is an integer and `x`, the rates and the directions are exact, the sum is computed in rational arithmetic and returned as a tuple of `Fraction`. Otherwise it is computed in the log domain: with `L_i = log k_i + s_i·log x`, each term is scaled by `e^{L_i - max L}` and the common factor is applied last.

    Args:
        system (PolySystem): the system.
        x (Sequence): a strictly positive point.
        rates (Sequence, optional): replacement rate constants, one per term.

    Raises:
        AssertionError: if some coordinate of `x` is not positive.
    """
    point = to_vector(x)
    assert len(point) == system.dimension, (
        f"`x` has {len(point)} coordinates, expected `dimension` = {system.dimension}"
    )
    assert all(v > 0 for v in point), "`x` must be strictly positive"
    if rates is not None:
        assert len(rates) == len(system.terms), f"Expected {len(system.terms)} rates, got {len(rates)}"
        system = system.with_rates(rates)
    if len(system.terms) == 0:
        return np.zeros(system.dimension)

    exact = all(isinstance(v, Fraction) for v in point) and all(
        isinstance(t.rate, Fraction)
        and all(isinstance(c, Fraction) and c.denominator == 1 for c in t.exponent)
        and all(isinstance(c, Fraction) for c in t.direction)
        for t in system.terms
    )
    if exact:
        total = [Fraction(0)] * system.dimension
        for t in system.terms:
            monomial = t.rate
            for base, power in zip(point, t.exponent):
                monomial *= base ** int(power)
            total = [a + monomial * v for a, v in zip(total, t.direction)]
        return tuple(total)

    exponents = np.asarray([[float(c) for c in t.exponent] for t in system.terms])
    directions = np.asarray([[float(c) for c in t.direction] for t in system.terms])
    log_monomials = np.log([float(t.rate) for t in system.terms]) + exponents @ np.log([float(v) for v in point])
    top = log_monomials.max()
    return np.exp(top) * (np.exp(log_monomials - top) @ directions)


class ScheduleKind(Enum):
    """
    The shape of a [RateSchedule][toric_embed.dynamics.RateSchedule] over time.
    """

    CONSTANT = "constant"
    """
    Rates never change.
    """

    PIECEWISE_CONSTANT = "piecewise-constant"
    """
    Rates are log-uniform on each period of a seeded random time partition with exponential dwell times.
    """

    SINUSOIDAL = "sinusoidal"
    """
    Each log-rate oscillates with its own seeded frequency and phase.
    """

    CORNER_ADVERSARIAL = "corner-adversarial"
    """
    Rates sit at the corners of their bounds, switching to the complementary corner after every dwell period.
    """


class RateSchedule:
    """
    Bounded time-varying rates `k_e(t)`, one per edge.

    Internally every channel follows a unit signal `u(t) ∈ [-1, 1]` shaped by `kind`. In absolute mode `log k_e(t) = |log ε| u_e(t)`, so `ε ≤ k_e(t) ≤ 1/ε`. In ratio mode (`ratio_epsilon = ε₀`) each group of edges (normally a linkage class) shares a common factor with log amplitude [RATIO_SCALE_LOG][toric_embed.dynamics.RATIO_SCALE_LOG], and the edges within a group vary by `½|log ε₀| u_e(t)`, so ratios inside a group stay within `[ε₀, 1/ε₀]`.

    Random draws are generated period by period from one seeded generator, so the schedule does not depend on the order in which times are queried.
    """

    def __init__(
        self,
        n_edges: int,
        epsilon: float,
        kind: ScheduleKind = ScheduleKind.CONSTANT,
        seed: int = 0,
        ratio_epsilon: Optional[float] = None,
        groups: Optional[Sequence[Sequence[int]]] = None,
        values: Optional[Sequence[Any]] = None,
        mean_dwell: float = 1.0,
    ):
        """
        Create a new RateSchedule object.

        Args:
            n_edges (int): number of edges.
            epsilon (float): the rate bound, in `(0, 1)`.
            kind (ScheduleKind, optional): the time profile.
            seed (int, optional): the random seed.
            ratio_epsilon (float, optional): switches to ratio-bounded mode with bound `ε₀`.
            groups (Sequence, optional): edge-index groups sharing a common factor in ratio mode; one group of all edges by default.
            values (Sequence, optional): explicit rates for the constant kind, each within `[ε, 1/ε]`.
            mean_dwell (float, optional): mean period length for the piecewise-constant kind and period length for the corner-adversarial kind.
        """
        assert isinstance(n_edges, int) and n_edges >= 0, "`n_edges` must be a non-negative integer"
        assert mean_dwell > 0, "`mean_dwell` must be positive"
        self.n_edges = n_edges
        self.epsilon = check_epsilon(epsilon)
        self.kind = ScheduleKind(kind)
        self.seed = seed
        self.ratio_epsilon = None if ratio_epsilon is None else check_epsilon(ratio_epsilon, "ratio_epsilon")
        self.groups = [list(g) for g in groups] if groups is not None else [list(range(n_edges))]
        self.mean_dwell = float(mean_dwell)

        self.values = None
        if values is not None:
            assert self.kind == ScheduleKind.CONSTANT, "`values` are only allowed for the constant kind"
            assert len(values) == n_edges, f"Expected {n_edges} `values`, got {len(values)}"
            self.values = np.asarray([float(to_scalar(v)) for v in values])
            assert np.all(self.values >= self.epsilon * (1 - 1e-12)) and np.all(
                self.values <= (1 + 1e-12) / self.epsilon
            ), "`values` must lie in [`epsilon`, 1/`epsilon`]"

        channels = n_edges + (len(self.groups) if self.ratio_epsilon is not None else 0)
        self._channels = channels
        self._rng = np.random.default_rng(seed)
        self._period_starts: list[float] = [0.0]
        self._period_values: list[np.ndarray] = []
        if self.kind == ScheduleKind.SINUSOIDAL:
            self._frequencies = self._rng.uniform(0.5, 2.0, size=channels)
            self._phases = self._rng.uniform(0.0, 2 * pi, size=channels)
        elif self.kind == ScheduleKind.CORNER_ADVERSARIAL:
            self._period_values.append(self._rng.choice([-1.0, 1.0], size=channels))
        elif self.kind == ScheduleKind.PIECEWISE_CONSTANT:
            self._period_values.append(self._rng.uniform(-1.0, 1.0, size=channels))

    def __repr__(self) -> str:
        return f"RateSchedule(n_edges={self.n_edges}, epsilon={self.epsilon}, kind={self.kind.value}, seed={self.seed})"

    @property
    def is_continuous(self) -> bool:
        return self.kind in (ScheduleKind.CONSTANT, ScheduleKind.SINUSOIDAL)

    def _extend(self, t: float):
        while self._period_starts[-1] <= t:
            if self.kind == ScheduleKind.PIECEWISE_CONSTANT:
                start = self._period_starts[-1] + self._rng.exponential(self.mean_dwell)
                self._period_starts.append(start)
                self._period_values.append(self._rng.uniform(-1.0, 1.0, size=self._channels))
            else:
                self._period_starts.append(len(self._period_starts) * self.mean_dwell)
                previous = self._period_values[-1]
                if len(self._period_values) % 2 == 1:
                    self._period_values.append(-previous)
                else:
                    self._period_values.append(self._rng.choice([-1.0, 1.0], size=self._channels))

    def _unit(self, t: float) -> np.ndarray:
        if self.kind == ScheduleKind.CONSTANT:
            return np.zeros(self._channels)
        if self.kind == ScheduleKind.SINUSOIDAL:
            return np.sin(self._frequencies * t + self._phases)
        self._extend(t)
        period = int(np.searchsorted(self._period_starts, t, side="right")) - 1
        return self._period_values[period]

    def __call__(self, t: float) -> np.ndarray:
        """
        The rate vector at time `t ≥ 0`.
        """
        assert t >= 0, "`t` must be non-negative"
        if self.values is not None:
            return self.values.copy()
        unit = self._unit(float(t))
        if self.ratio_epsilon is None:
            return np.exp(abs(log(self.epsilon)) * unit[: self.n_edges])
        log_rates = 0.5 * abs(log(self.ratio_epsilon)) * unit[: self.n_edges]
        for g, edges in enumerate(self.groups):
            log_rates[edges] += RATIO_SCALE_LOG * unit[self.n_edges + g]
        return np.exp(log_rates)

    def breakpoints(self, horizon: float) -> list[float]:
        """
        Discontinuity times in `(0, horizon)`; empty for continuous kinds.
        """
        if self.is_continuous:
            return []
        self._extend(horizon)
        return [t for t in self._period_starts if 0 < t < horizon]

    def satisfies_bounds(self, t: float) -> bool:
        """
        Whether the rates at `t` respect the schedule's bound: `[ε, 1/ε]` per edge in absolute mode, ratios within `[ε₀, 1/ε₀]` inside each group in ratio mode.
        """
        rates = self(t)
        slack = 1 + 1e-12
        if self.ratio_epsilon is None:
            return bool(np.all(rates >= self.epsilon / slack) and np.all(rates <= slack / self.epsilon))
        for edges in self.groups:
            if len(edges) > 1 and rates[edges].max() / rates[edges].min() > slack / self.ratio_epsilon:
                return False
        return True

    def to_dict(self) -> dict:
        return {
            "n_edges": self.n_edges,
            "epsilon": self.epsilon,
            "kind": self.kind.value,
            "seed": self.seed,
            "ratio_epsilon": self.ratio_epsilon,
            "mean_dwell": self.mean_dwell,
            "values": None if self.values is None else [float(v) for v in self.values],
        }


def sample_schedule(
    graph: EGraph,
    epsilon: float,
    kind: ScheduleKind = ScheduleKind.PIECEWISE_CONSTANT,
    seed: int = 0,
    ratio_epsilon: Optional[float] = None,
    mean_dwell: float = 1.0,
) -> RateSchedule:
    """
    A seeded schedule for the edges of `graph`. Ratio-bounded schedules group the edges by linkage class.

    Raises:
        AssertionError: if `epsilon` is out of range.
    """
    epsilon = check_epsilon(epsilon)
    groups = []
    for members in linkage_classes(graph):
        members_set = set(members)
        edges = [e for e, (s, _) in enumerate(graph.edges) if s in members_set]
        if len(edges) > 0:
            groups.append(edges)
    return RateSchedule(
        graph.n_edges,
        epsilon,
        kind=kind,
        seed=seed,
        ratio_epsilon=ratio_epsilon,
        groups=groups,
        mean_dwell=mean_dwell,
    )


def constant_schedule(rates: Sequence[Any]) -> RateSchedule:
    """
    A constant schedule with the given rates; its bound is the tightest `ε ≤ ½` that contains them.
    """
    values = [float(to_scalar(r)) for r in rates]
    assert all(v > 0 for v in values), "Rates must be positive"
    epsilon = min([0.5] + [min(v, 1 / v) for v in values])
    return RateSchedule(len(values), epsilon, ScheduleKind.CONSTANT, values=values)


class IntegrationError(RuntimeError):
    """
    Raised when the integrator fails. `probable_blowup` is set when the failure looks like a finite-time blow-up.
    """

    def __init__(self, message: str, time: float, probable_blowup: bool = False):
        super().__init__(message)
        self.time = time
        self.probable_blowup = probable_blowup


class TrajectorySchema(pa.DataFrameModel):
    """
    A pandera.DataFrameModel for exported trajectories.

    State columns `x_1..x_n` and conservation residual columns `residual_1..residual_c` are added before validation in [Trajectory.to_frame()][toric_embed.dynamics.Trajectory.to_frame].
    """

    t: Series[float] = Field(nullable=False, ge=0)
    """
    Time of an accepted integrator step, strictly increasing.
    """

    @pa.check("t")
    def is_strictly_increasing(self, series: Series[float]) -> bool:
        return bool(series.is_monotonic_increasing and series.is_unique)


@dataclass
class Trajectory:
    """
    A solution curve stored in log coordinates `X(t) = log x(t)` at the integrator's accepted steps.
    """

    times: np.ndarray
    log_states: np.ndarray
    """
    Shape `(len(times), n)`.
    """
    conservation: np.ndarray
    """
    Conservation vectors (a basis of `S⊥`), shape `(c, n)`.
    """
    residuals: np.ndarray
    """
    Relative conservation residuals `|c·(x(t) - x0)| / (|c|·x0)`, shape `(len(times), c)`.
    """
    stats: dict = field(default_factory=dict)

    @property
    def states(self) -> np.ndarray:
        return np.exp(self.log_states)

    @property
    def max_residual(self) -> float:
        return float(self.residuals.max()) if self.residuals.size > 0 else 0.0

    def to_frame(self) -> pd.DataFrame:
        """
        The trajectory as a `pandas.DataFrame` with columns `t`, `x_1..x_n` and `residual_1..residual_c`.

        Raises:
            pandera.errors.SchemaError: if the table is malformed (non-increasing times, non-finite or nonpositive states).
        """
        data = pd.DataFrame({"t": self.times})
        states = self.states
        for i in range(states.shape[1]):
            data[f"x_{i + 1}"] = states[:, i]
        for j in range(self.residuals.shape[1]):
            data[f"residual_{j + 1}"] = self.residuals[:, j]

        columns = {f"x_{i + 1}": Column(float, pa.Check.gt(0), nullable=False) for i in range(states.shape[1])}
        columns.update(
            {f"residual_{j + 1}": Column(float, pa.Check.ge(0), nullable=False) for j in range(self.residuals.shape[1])}
        )
        TrajectorySchema.to_schema().add_columns(columns).validate(data)
        return data


def _log_vector_field(exponents: np.ndarray, directions: np.ndarray, rates: Any):
    def field_at(t: float, X: np.ndarray) -> np.ndarray:
        k = rates(t) if callable(rates) else rates
        log_monomials = np.log(k) + exponents @ X
        top = log_monomials.max()
        return np.exp(top - X) * (np.exp(log_monomials - top) @ directions)

    return field_at


def simulate(
    source: Union[EGraph, PolySystem],
    schedule: RateSchedule,
    x0: Sequence[Any],
    horizon: float,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    max_step: float = np.inf,
    verbose: bool = False,
) -> Trajectory:
    """
    Integrates `dx/dt = Σ k_e(t) x^{s(e)} v(e)` in log coordinates, `dX/dt = e^{-X} ⊙ RHS(e^X, k(t))`, so that every state stays strictly positive.

    The time axis is split at the schedule's discontinuities; discontinuous schedules are held at their value at each segment's midpoint. Every segment is integrated with an adaptive Runge-Kutta 4(5) pair ([`scipy.integrate.solve_ivp`](https://docs.scipy.org/doc/scipy/reference/generated/scipy.integrate.solve_ivp.html), `RK45`), keeping every accepted step.

    Args:
        source (EGraph | PolySystem): the graph, or a system whose terms are matched to the schedule's edges in order.
        schedule (RateSchedule): the rates over time.
        x0 (Sequence): a strictly positive initial state.
        horizon (float): the final time `T > 0`.
        rtol (float, optional): relative tolerance.
        atol (float, optional): absolute tolerance.
        max_step (float, optional): largest step the integrator may take.
        verbose (bool, optional): a flag to enable verbose logging.

    Raises:
        AssertionError: on a nonpositive `x0` or `horizon`, or a schedule that does not match the edges.
        IntegrationError: when the integrator fails, with the failure time and a blow-up flag.

    Returns:
        A [Trajectory][toric_embed.dynamics.Trajectory].
    """
    graph = as_graph(source)
    x_start = np.asarray([float(to_scalar(v)) for v in x0], dtype=float)
    assert len(x_start) == graph.dimension, (
        f"`x0` has {len(x_start)} coordinates, expected `dimension` = {graph.dimension}"
    )
    assert np.all(x_start > 0), "`x0` must be strictly positive"
    assert horizon > 0, "`horizon` must be positive"
    assert schedule.n_edges == graph.n_edges, (
        f"Schedule has {schedule.n_edges} edges, the graph has {graph.n_edges}"
    )

    _, complement = edge_space(graph)
    conservation = np.asarray([[float(c) for c in v] for v in complement]).reshape(len(complement), graph.dimension)
    exponents = np.asarray([[float(c) for c in graph.source(e)] for e in range(graph.n_edges)]).reshape(
        graph.n_edges, graph.dimension
    )
    directions = np.asarray([[float(c) for c in graph.edge_vector(e)] for e in range(graph.n_edges)]).reshape(
        graph.n_edges, graph.dimension
    )

    cuts = [0.0] + schedule.breakpoints(horizon) + [float(horizon)]
    times = [np.asarray([0.0])]
    states = [np.log(x_start)[None, :]]
    evaluations, steps = 0, 0
    for a, b in zip(cuts[:-1], cuts[1:]):
        X = states[-1][-1]
        if graph.n_edges == 0:
            times.append(np.asarray([b]))
            states.append(X[None, :])
            continue
        rates = schedule if schedule.is_continuous else schedule(0.5 * (a + b))
        solution = solve_ivp(
            _log_vector_field(exponents, directions, rates),
            (a, b),
            X,
            method="RK45",
            rtol=rtol,
            atol=atol,
            max_step=max_step,
        )
        evaluations += solution.nfev
        if solution.status < 0 or not np.all(np.isfinite(solution.y)):
            failed_at = float(solution.t[-1])
            blowup = bool(np.nanmax(np.abs(solution.y)) > BLOWUP_LOG_THRESHOLD) or not np.all(np.isfinite(solution.y))
            verbose_log(f"Integration failed at t = {failed_at}: {solution.message}", verbose)
            raise IntegrationError(
                f"Integration failed at t = {failed_at}"
                + (" (probable finite-time blow-up)" if blowup else "")
                + f": {solution.message}",
                time=failed_at,
                probable_blowup=blowup,
            )
        times.append(solution.t[1:])
        states.append(solution.y.T[1:])
        steps += len(solution.t) - 1
        verbose_log(f"Segment [{a:.4f}, {b:.4f}]: {len(solution.t) - 1} steps, {solution.nfev} evaluations", verbose)

    all_times = np.concatenate(times)
    log_states = np.concatenate(states, axis=0)
    x = np.exp(log_states)
    if len(conservation) > 0:
        denominators = np.abs(conservation) @ x_start
        residuals = np.abs((x - x_start) @ conservation.T) / denominators
    else:
        residuals = np.zeros((len(all_times), 0))
    return Trajectory(
        times=all_times,
        log_states=log_states,
        conservation=conservation,
        residuals=residuals,
        stats={
            "segments": len(cuts) - 1,
            "steps": steps,
            "evaluations": evaluations,
            "rtol": rtol,
            "atol": atol,
        },
    )


@dataclass
class EquilibriumResult:
    """
    A candidate vertex-balanced equilibrium and the evidence for it.
    """

    point: Optional[tuple[float, ...]]
    """
    The candidate `x̄`, or None when the log-linear system is inconsistent.
    """
    residuals: tuple[float, ...]
    """
    Per vertex, outflow minus inflow at `x̄`.
    """
    balanced: bool
    kernel: tuple[float, ...] = field(default=())
    """
    The positive Laplacian kernel vector used, one entry per vertex.
    """
    condition_number: Optional[float] = None
    lstsq_residual: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "point": None if self.point is None else list(self.point),
            "residuals": list(self.residuals),
            "balanced": self.balanced,
            "kernel": list(self.kernel),
            "condition_number": self.condition_number,
            "lstsq_residual": self.lstsq_residual,
        }


def check_vertex_balanced(
    graph: EGraph, rates: Optional[Sequence[Any]], point: Sequence[Any], tolerance: float = 1e-9
) -> EquilibriumResult:
    """
    Evaluates, at every vertex `s`, the outflow `Σ_{s -> s'} k x̄^s` minus the inflow `Σ_{s'' -> s} k x̄^{s''}`. The point is vertex balanced iff every residual is within `tolerance` relative to the largest flow (and at least absolutely).

    Raises:
        AssertionError: if `point` is not strictly positive.
    """
    rates = check_rates(graph, rates)
    x = np.asarray([float(to_scalar(v)) for v in point], dtype=float)
    assert len(x) == graph.dimension, (
        f"`point` has {len(x)} coordinates, expected `dimension` = {graph.dimension}"
    )
    assert np.all(x > 0), "`point` must be strictly positive"
    log_x = np.log(x)
    residuals = np.zeros(graph.n_vertices)
    largest = 0.0
    for e, (s, t) in enumerate(graph.edges):
        flow = float(rates[e]) * float(np.exp(np.dot([float(c) for c in graph.vertices[s]], log_x)))
        residuals[s] += flow
        residuals[t] -= flow
        largest = max(largest, flow)
    balanced = bool(np.all(np.abs(residuals) <= tolerance * max(1.0, largest)))
    return EquilibriumResult(point=tuple(float(v) for v in x), residuals=tuple(float(r) for r in residuals), balanced=balanced)


def _kernel(graph: EGraph, members: list[int], rates: Sequence[Any]) -> list[Scalar]:
    """
    Matrix-tree kernel of one linkage class: entry `s` is the determinant of the out-degree Laplacian with row and column `s` removed. Entries are `Fraction` when every rate is.
    """
    exact = all(isinstance(r, Fraction) for r in rates)
    if len(members) == 1:
        return [Fraction(1) if exact else 1.0]
    position = {v: i for i, v in enumerate(members)}
    size = len(members)
    if exact:
        laplacian = sympy.zeros(size, size)
    else:
        laplacian = np.zeros((size, size))
    for e, (s, t) in enumerate(graph.edges):
        if s not in position:
            continue
        rate = sympy.Rational(rates[e].numerator, rates[e].denominator) if exact else float(rates[e])
        i, j = position[s], position[t]
        laplacian[i, i] += rate
        laplacian[j, i] -= rate

    kernel = []
    for i in range(size):
        keep = [k for k in range(size) if k != i]
        if exact:
            determinant = sympy.Rational(laplacian.extract(keep, keep).det())
            kernel.append(Fraction(int(determinant.p), int(determinant.q)))
        else:
            kernel.append(float(np.linalg.det(laplacian[np.ix_(keep, keep)])))
    return kernel


def _kernel_is_realizable(graph: EGraph, classes: list[list[int]], kernel: Sequence[Fraction]) -> bool:
    """
    Exact consistency of `s·log x̄ = log c_s + α_class(s)`: the system is solvable iff every integer relation `Σ λ_s s = 0` with `Σ λ_s = 0` on each linkage class gives `Π c_s^{λ_s} = 1`.
    """
    columns = [tuple(v[k] for v in graph.vertices) for k in range(graph.dimension)]
    for members in classes:
        columns.append(tuple(Fraction(int(v in members)) for v in range(graph.n_vertices)))
    for relation in nullspace_basis(columns, graph.n_vertices, exact=True):
        product = Fraction(1)
        for c, power in zip(kernel, relation):
            product *= c ** int(power)
        if product != 1:
            return False
    return True


def find_vertex_balanced(
    graph: EGraph, rates: Optional[Sequence[Any]] = None, tolerance: float = 1e-9
) -> EquilibriumResult:
    """
    Searches for a vertex-balanced equilibrium of a weakly reversible graph.

    For each linkage class a strictly positive kernel vector `c` of the weighted Laplacian is computed with the matrix-tree theorem (exactly when the rates are rational). A balanced point must then satisfy `s·log x̄ = log c_s + α` for every vertex `s`, with one free offset `α` per class. With rational rates and vertices, consistency is decided exactly from the multiplicative relations among the `c_s`, and the point comes from a least-squares solve. Otherwise the log-linear system is first solved with all offsets at zero, then with free offsets, in least squares; if neither residual is within `tolerance` the system is inconsistent and no point is returned.

    Raises:
        AssertionError: if the graph is not weakly reversible, naming an edge on no cycle.

    Returns:
        An [EquilibriumResult][toric_embed.dynamics.EquilibriumResult]; a returned point always passes [check_vertex_balanced][toric_embed.dynamics.check_vertex_balanced].
    """
    offending = first_edge_outside_cycles(graph)
    if offending is not None:
        s, t = graph.edges[offending]
        raise AssertionError(f"Graph is not weakly reversible: edge `{offending}` ({s}->{t}) lies on no directed cycle")
    rates = check_rates(graph, rates)
    classes = linkage_classes(graph)

    exact_kernel: list[Scalar] = [Fraction(0)] * graph.n_vertices
    membership = np.zeros((graph.n_vertices, len(classes)))
    for c, members in enumerate(classes):
        for v, value in zip(members, _kernel(graph, members, rates)):
            exact_kernel[v] = value
            membership[v, c] = 1.0
    kernel = np.asarray([float(k) for k in exact_kernel], dtype=float)
    assert np.all(kernel > 0), "Laplacian kernel is not strictly positive"

    labels = np.asarray([[float(x) for x in v] for v in graph.vertices]).reshape(graph.n_vertices, graph.dimension)
    target = np.log(kernel)
    if graph.n_vertices == 0:
        return EquilibriumResult(point=tuple(1.0 for _ in range(graph.dimension)), residuals=(), balanced=True)

    solution, residual, matrix = None, np.inf, labels
    if graph.is_exact and all(isinstance(k, Fraction) for k in exact_kernel):
        matrix = np.hstack([labels, membership])
        candidate = np.linalg.lstsq(matrix, target, rcond=None)[0]
        residual = float(np.linalg.norm(matrix @ candidate - target))
        if _kernel_is_realizable(graph, classes, exact_kernel):
            solution = candidate[: graph.dimension]
    else:
        for matrix in (labels, np.hstack([labels, membership])):
            candidate = np.linalg.lstsq(matrix, target, rcond=None)[0]
            residual = float(np.linalg.norm(matrix @ candidate - target))
            if residual <= tolerance:
                solution = candidate[: graph.dimension]
                break
    condition = float(np.linalg.cond(matrix)) if matrix.size > 0 else 1.0

    if solution is None:
        return EquilibriumResult(
            point=None,
            residuals=(),
            balanced=False,
            kernel=tuple(float(k) for k in kernel),
            condition_number=condition,
            lstsq_residual=residual,
        )
    result = check_vertex_balanced(graph, rates, np.exp(solution), tolerance)
    result.kernel = tuple(float(k) for k in kernel)
    result.condition_number = condition
    result.lstsq_residual = residual
    return result


def birch_point(
    graph: EGraph, rates: Optional[Sequence[Any]], x0: Sequence[Any], tolerance: float = 1e-9
) -> EquilibriumResult:
    """
    The vertex-balanced equilibrium inside the affine invariant set `(x0 + S) ∩ ℝⁿ_{>0}`.

    Starting from any balanced point `x̄`, the balanced points are `x̄ ⊙ e^{Wμ}` for a basis `W` of `S⊥`; the one conserving `Wᵀx0` minimizes the strictly convex function `Σ_i x̄_i e^{(Wμ)_i} - μ·Wᵀx0`, found with BFGS.
    """
    start = np.asarray([float(to_scalar(v)) for v in x0], dtype=float)
    assert np.all(start > 0), "`x0` must be strictly positive"
    balanced = find_vertex_balanced(graph, rates, tolerance)
    if balanced.point is None:
        return balanced
    anchor = np.asarray(balanced.point)
    _, complement = edge_space(graph)
    if len(complement) == 0:
        return balanced
    W = np.asarray([[float(c) for c in v] for v in complement]).T
    target = W.T @ start

    def objective(mu: np.ndarray) -> float:
        return float(anchor @ np.exp(W @ mu) - mu @ target)

    def gradient(mu: np.ndarray) -> np.ndarray:
        return W.T @ (anchor * np.exp(W @ mu)) - target

    optimum = minimize(objective, np.zeros(W.shape[1]), jac=gradient, method="BFGS", options={"gtol": 1e-12})
    point = anchor * np.exp(W @ optimum.x)
    result = check_vertex_balanced(graph, rates, point, tolerance)
    result.kernel = balanced.kernel
    result.condition_number = balanced.condition_number
    result.lstsq_residual = balanced.lstsq_residual
    return result


def lyapunov_value(x: Sequence[Any], point: Sequence[Any]) -> float:
    """
    `h(x) = Σ_i x_i (log(x_i / x̄_i) - 1) + x̄_i`; non-negative, and zero only at `x = x̄`.
    """
    x = np.asarray([float(v) for v in x], dtype=float)
    reference = np.asarray([float(v) for v in point], dtype=float)
    assert np.all(x > 0) and np.all(reference > 0), "`x` and `point` must be strictly positive"
    return float(np.sum(x * (np.log(x / reference) - 1) + reference))


def lyapunov_monitor(trajectory: Trajectory, point: Sequence[Any]) -> pd.Series:
    """
    `h(x(t))` along a trajectory, indexed by time. See [lyapunov_value][toric_embed.dynamics.lyapunov_value].
    """
    reference = np.asarray([float(v) for v in point], dtype=float)
    assert np.all(reference > 0), "`point` must be strictly positive"
    x = trajectory.states
    values = np.sum(x * (trajectory.log_states - np.log(reference) - 1) + reference, axis=1)
    return pd.Series(values, index=pd.Index(trajectory.times, name="t"), name="h")


def _sample_initial_state(rng: np.random.Generator, reference: np.ndarray, span: list) -> np.ndarray:
    if len(span) == 0:
        return reference.copy()
    basis = np.asarray([[float(c) for c in v] for v in span])
    direction = rng.normal(size=len(basis)) @ basis
    negative = direction < 0
    limit = np.min(reference[negative] / -direction[negative]) if np.any(negative) else 1.0 / np.linalg.norm(direction)
    return reference + rng.uniform(0.0, 0.9) * limit * direction


def persistence_stats(
    graph: EGraph,
    epsilon: float,
    runs: int,
    horizon: float,
    seed: int = 0,
    kind: ScheduleKind = ScheduleKind.PIECEWISE_CONSTANT,
    reference: Optional[Sequence[Any]] = None,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    verbose: bool = False,
) -> pd.DataFrame:
    """
    Empirical persistence and permanence bounds over seeded variable-rate runs.

    Every run draws its own schedule and an initial state on the affine invariant set through `reference` (all ones by default), integrates to `horizon`, and records the smallest and largest coordinate reached. Integration failures are recorded per run in `error`.

    Raises:
        AssertionError: if the graph is not weakly reversible or `epsilon` is out of range.

    Returns:
        A `pandas.DataFrame` with columns `run`, `seed`, `min_coordinate`, `max_coordinate` and `error`.
    """
    epsilon = check_epsilon(epsilon)
    offending = first_edge_outside_cycles(graph)
    assert offending is None, f"Graph is not weakly reversible: edge `{offending}` lies on no directed cycle"
    columns = ["run", "seed", "min_coordinate", "max_coordinate", "error"]
    if runs == 0:
        return pd.DataFrame(columns=columns)

    start = np.ones(graph.dimension) if reference is None else np.asarray([float(v) for v in reference])
    span, _ = edge_space(graph)
    rng = np.random.default_rng(seed)
    rows = []
    for run in range(runs):
        run_seed = seed * 100_003 + run
        x0 = _sample_initial_state(rng, start, span)
        schedule = sample_schedule(graph, epsilon, kind, run_seed)
        try:
            trajectory = simulate(graph, schedule, x0, horizon, rtol=rtol, atol=atol)
            rows.append([run, run_seed, float(np.exp(trajectory.log_states.min())), float(np.exp(trajectory.log_states.max())), None])
        except IntegrationError as e:
            rows.append([run, run_seed, np.nan, np.nan, str(e)])
        verbose_log(f"Run {run}: {rows[-1][2:]}", verbose)
    return pd.DataFrame(rows, columns=columns)


def attractor_distances(
    graph: EGraph,
    rates: Optional[Sequence[Any]],
    initial_points: Sequence[Sequence[Any]],
    horizon: float,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> pd.DataFrame:
    """
    Distance from each trajectory's start and end to the Birch point of its affine invariant set, for fixed rates. An experimental check of global attraction; no claim is made.

    Returns:
        A `pandas.DataFrame` with columns `run`, `initial_distance`, `final_distance` and `balanced`.
    """
    parsed_rates = check_rates(graph, rates)
    schedule = constant_schedule(parsed_rates) if graph.n_edges > 0 else RateSchedule(0, 0.5)
    rows = []
    for run, x0 in enumerate(initial_points):
        target = birch_point(graph, parsed_rates, x0)
        if target.point is None:
            rows.append([run, np.nan, np.nan, False])
            continue
        trajectory = simulate(graph, schedule, x0, horizon, rtol=rtol, atol=atol)
        anchor = np.asarray(target.point)
        rows.append(
            [
                run,
                float(np.linalg.norm(trajectory.states[0] - anchor)),
                float(np.linalg.norm(trajectory.states[-1] - anchor)),
                target.balanced,
            ]
        )
    return pd.DataFrame(rows, columns=["run", "initial_distance", "final_distance", "balanced"])
