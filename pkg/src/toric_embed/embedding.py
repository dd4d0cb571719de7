"""Certificates and sampled verification that variable-rate power-law systems lie in their toric differential inclusions."""

from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import log, sqrt
from typing import Any, Optional, Sequence
import numpy as np
import pandas as pd

from toric_embed.inclusion import (
    EvaluationMode,
    ToricInclusion,
    build_from_differences,
    build_weakly_reversible,
)
from toric_embed.model import EGraph, is_weakly_reversible, linkage_classes
from toric_embed.polyhedral import Cone, HyperplaneFan, SignVector
from toric_embed.utils import (
    DEFAULT_TOLERANCE,
    Vector,
    check_epsilon,
    dot,
    is_exact,
    norm,
    subtract,
    to_vector,
    unify_vectors,
    verbose_log,
)

MAX_WITNESSES = 20
"""
The number of violating samples kept in an [EmbeddingReport][toric_embed.embedding.EmbeddingReport].
"""

MAX_CORNER_EDGES = 12
"""
Graphs with at most this many edges have every corner rate assignment `{ε, 1/ε}^E` included in the sample.
"""

RATIO_SCALE_BOUNDS = (1e-3, 1e3)
"""
Range of the common per-linkage-class factor drawn in ratio-bounded sampling.
"""


@dataclass(frozen=True)
class Witness:
    """
    One sampled `(X, k)` whose right-hand side failed the cone membership test.
    """

    sample: int
    """
    Global index of the sample in its run; together with the report seed it identifies the draw.
    """
    point: tuple[float, ...]
    """
    The sampled point `X = log x`.
    """
    rates: tuple[float, ...]
    rhs: tuple[float, ...]
    """
    The right-hand side at `(e^X, k)`, divided by its largest monomial so that it never overflows.
    """
    generators: tuple[tuple[float, ...], ...]
    """
    Generators of the cone the right-hand side was tested against.
    """
    residual: float

    def to_dict(self) -> dict:
        return {
            "sample": self.sample,
            "point": list(self.point),
            "rates": list(self.rates),
            "rhs": list(self.rhs),
            "generators": [list(g) for g in self.generators],
            "residual": self.residual,
        }

    @staticmethod
    def from_dict(data: dict) -> "Witness":
        return Witness(
            sample=int(data["sample"]),
            point=tuple(float(x) for x in data["point"]),
            rates=tuple(float(x) for x in data["rates"]),
            rhs=tuple(float(x) for x in data["rhs"]),
            generators=tuple(tuple(float(x) for x in g) for g in data["generators"]),
            residual=float(data["residual"]),
        )


@dataclass(frozen=True)
class EmbeddingReport:
    """
    The evidence gathered by a sampled embedding check.

    Reports of disjoint sample ranges combine with [merge][toric_embed.embedding.EmbeddingReport.merge], which is commutative and associative: counts add, the largest residual wins and the witnesses with the smallest sample indices are kept.
    """

    samples: int
    violations: int
    witnesses: tuple[Witness, ...] = field(default=())
    max_residual: float = 0.0
    seed: int = 0
    mode: EvaluationMode = EvaluationMode.HYPERPLANE

    def __post_init__(self):
        assert self.samples >= 0, "`samples` can not be negative"
        assert 0 <= self.violations <= self.samples, (
            f"`violations` ({self.violations}) can not exceed `samples` ({self.samples})"
        )
        object.__setattr__(self, "mode", EvaluationMode(self.mode))

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def merge(self, other: "EmbeddingReport") -> "EmbeddingReport":
        """
        Combines two reports over disjoint samples.

        Raises:
            AssertionError: if the reports use different seeds or modes.
        """
        assert self.seed == other.seed, (
            f"Can not merge reports with different `seed` ({self.seed} != {other.seed})"
        )
        assert self.mode == other.mode, (
            f"Can not merge reports with different `mode` ({self.mode.value} != {other.mode.value})"
        )
        witnesses = sorted(self.witnesses + other.witnesses, key=lambda w: w.sample)[:MAX_WITNESSES]
        return EmbeddingReport(
            samples=self.samples + other.samples,
            violations=self.violations + other.violations,
            witnesses=tuple(witnesses),
            max_residual=max(self.max_residual, other.max_residual),
            seed=self.seed,
            mode=self.mode,
        )

    def to_frame(self) -> pd.DataFrame:
        """
        The witnesses as a `pandas.DataFrame` with columns `sample`, `residual`, `X_1..X_n`, `k_1..k_E` and `rhs_1..rhs_n`.
        """
        rows = []
        for w in self.witnesses:
            row: dict[str, Any] = {"sample": w.sample, "residual": w.residual}
            row.update({f"X_{i + 1}": x for i, x in enumerate(w.point)})
            row.update({f"k_{e + 1}": k for e, k in enumerate(w.rates)})
            row.update({f"rhs_{i + 1}": x for i, x in enumerate(w.rhs)})
            rows.append(row)
        if len(rows) == 0:
            return pd.DataFrame(columns=["sample", "residual"])
        return pd.DataFrame(rows)

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "violations": self.violations,
            "max_residual": self.max_residual,
            "seed": self.seed,
            "mode": self.mode.value,
            "witnesses": [w.to_dict() for w in self.witnesses],
        }

    @staticmethod
    def from_dict(data: dict) -> "EmbeddingReport":
        return EmbeddingReport(
            samples=int(data["samples"]),
            violations=int(data["violations"]),
            witnesses=tuple(Witness.from_dict(w) for w in data["witnesses"]),
            max_residual=float(data["max_residual"]),
            seed=int(data["seed"]),
            mode=EvaluationMode(data["mode"]),
        )


class Sampler:
    """
    Sampling configuration shared by the embedding checks.

    Points `X` are drawn uniformly from the box `[-b, b]ⁿ` in log space. Rates are drawn per sample: when corners are enabled and the graph is small enough, every even-numbered sample uses the next corner assignment `{ε, 1/ε}^E` (cycling through all `2^E` of them) and every odd-numbered sample is log-uniform in `[ε, 1/ε]`.

    In ratio-bounded mode (`ratio_epsilon` set) rates are no longer bounded individually: each linkage class gets a common factor drawn log-uniformly from [RATIO_SCALE_BOUNDS][toric_embed.embedding.RATIO_SCALE_BOUNDS], and each edge gets its own factor in `[√ε₀, 1/√ε₀]`, so any two rates in one linkage class have a ratio in `[ε₀, 1/ε₀]`. This mode is experimental.
    """

    def __init__(
        self,
        samples: int = 10_000,
        seed: int = 0,
        box: Optional[float] = None,
        include_corners: bool = True,
        ratio_epsilon: Optional[float] = None,
        chunk_size: int = 4096,
    ):
        """
        Create a new Sampler object.

        Args:
            samples (int, optional): the number of `(X, k)` draws.
            seed (int, optional): the random seed; identical seeds yield identical draws.
            box (float, optional): half-width `b` of the sampling box. Defaults to `3 * delta + 5` for the inclusion under test.
            include_corners (bool, optional): interleave corner rate assignments when the graph has at most [MAX_CORNER_EDGES][toric_embed.embedding.MAX_CORNER_EDGES] edges.
            ratio_epsilon (float, optional): switches to ratio-bounded rates with bound `ε₀`.
            chunk_size (int, optional): how many samples are evaluated per vectorized batch.
        """
        assert isinstance(samples, int) and samples >= 0, "`samples` must be a non-negative integer"
        assert box is None or box > 0, "`box` must be positive"
        assert chunk_size > 0, "`chunk_size` must be positive"
        self.samples = samples
        self.seed = seed
        self.box = box
        self.include_corners = include_corners
        self.ratio_epsilon = None if ratio_epsilon is None else check_epsilon(ratio_epsilon, "ratio_epsilon")
        self.chunk_size = chunk_size

    def box_for(self, delta: float) -> float:
        return self.box if self.box is not None else 3 * delta + 5

    def chunk_rng(self, chunk: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, chunk])

    def sample_points(self, rng: np.random.Generator, count: int, dimension: int, delta: float) -> np.ndarray:
        b = self.box_for(delta)
        return rng.uniform(-b, b, size=(count, dimension))

    def sample_rates(
        self, rng: np.random.Generator, start: int, count: int, graph: EGraph, epsilon: float
    ) -> np.ndarray:
        """
        Rate assignments for the samples `start .. start + count - 1`, shape `(count, E)`.
        """
        n_edges = graph.n_edges
        if self.ratio_epsilon is None:
            low = log(epsilon)
        else:
            low = 0.5 * log(self.ratio_epsilon)
        log_rates = rng.uniform(low, -low, size=(count, n_edges))

        if self.include_corners and 0 < n_edges <= MAX_CORNER_EDGES:
            bits = 1 << np.arange(n_edges)
            index = start + np.arange(count)
            even = index % 2 == 0
            corners = (index[even] // 2) % (1 << n_edges)
            log_rates[even] = np.where((corners[:, None] & bits) != 0, -low, low)

        if self.ratio_epsilon is not None:
            low_scale, high_scale = np.log(RATIO_SCALE_BOUNDS)
            for members in linkage_classes(graph):
                members_set = set(members)
                edges = [e for e, (s, _) in enumerate(graph.edges) if s in members_set]
                if len(edges) == 0:
                    continue
                common = rng.uniform(low_scale, high_scale, size=(count, 1))
                log_rates[:, edges] += common
        return np.exp(log_rates)

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "seed": self.seed,
            "box": self.box,
            "include_corners": self.include_corners,
            "ratio_epsilon": self.ratio_epsilon,
            "chunk_size": self.chunk_size,
        }


def _rational_state(point: np.ndarray) -> tuple[Fraction, ...]:
    # the float e^X is itself an exact dyadic rational
    return tuple(Fraction(float(v)) for v in np.exp(point))


def _residuals(rhs: np.ndarray, scale: np.ndarray, cone: Cone) -> np.ndarray:
    inequalities, equalities = cone.float_constraints
    residual = np.zeros(len(rhs))
    if len(inequalities) > 0:
        residual = np.maximum(residual, -np.min(rhs @ inequalities.T, axis=1))
    if len(equalities) > 0:
        residual = np.maximum(residual, np.max(np.abs(rhs @ equalities.T), axis=1))
    return residual / scale


class EmbeddingVerifier:
    """
    Checks, on sampled `(X, k)`, that the right-hand side of a variable-rate system lies in the inclusion's cone at `X`.

    Each batch is evaluated in log space: with `L_e = log k_e + X·s(e)` every monomial is scaled by `e^{-max L}` before the right-hand side is formed, so no sample overflows. Under hyperplane semantics the samples of a batch are grouped by [signature][toric_embed.inclusion.ToricInclusion.signature] and tested against one cached cone per group; strict semantics evaluate each sample separately.
    """

    def __init__(
        self,
        inclusion: ToricInclusion,
        graph: EGraph,
        epsilon: float,
        mode: EvaluationMode = EvaluationMode.HYPERPLANE,
        sampler: Optional[Sampler] = None,
        tolerance: float = DEFAULT_TOLERANCE,
        verbose: bool = False,
        exact: bool = False,
    ):
        """
        Create a new EmbeddingVerifier object.

        Args:
            inclusion (ToricInclusion): the target inclusion.
            graph (EGraph): the graph whose generated system is tested.
            epsilon (float): the rate bound, in `(0, 1)`.
            mode (EvaluationMode, optional): the evaluation semantics.
            sampler (Sampler, optional): sampling configuration; defaults to `Sampler()`.
            tolerance (float, optional): membership residual threshold, relative to the sum of the monomial magnitudes.
            verbose (bool, optional): a flag to enable verbose logging.
            exact (bool, optional): decide membership in rational arithmetic; see [check_exact][toric_embed.embedding.EmbeddingVerifier.check_exact].
        """
        assert graph.dimension == inclusion.dimension, (
            f"Graph `dimension` ({graph.dimension}) does not match inclusion `dimension` ({inclusion.dimension})"
        )
        self.inclusion = inclusion
        self.graph = graph
        self.epsilon = check_epsilon(epsilon)
        self.mode = EvaluationMode(mode)
        self.sampler = sampler if sampler is not None else Sampler()
        self.tolerance = tolerance
        self.verbose = verbose
        self.exact = exact
        assert self.mode == EvaluationMode.STRICT or inclusion.is_hyperplane, (
            "Hyperplane semantics need a hyperplane-generated fan; use `mode` = strict"
        )
        if exact:
            assert graph.is_exact and all(x.denominator == 1 for v in graph.vertices for x in v), (
                "Exact membership needs integer vertex labels"
            )

        self._sources = np.asarray([[float(x) for x in graph.source(e)] for e in range(graph.n_edges)]).reshape(
            graph.n_edges, graph.dimension
        )
        self._vectors = np.asarray(
            [[float(x) for x in graph.edge_vector(e)] for e in range(graph.n_edges)]
        ).reshape(graph.n_edges, graph.dimension)
        self._lengths = np.linalg.norm(self._vectors, axis=1)

    def verbose_log(self, msg: Any):
        """
        Helper method to enable verbose logging via `print()`. Logs are sent to `stdout` and prefixed with a timestamp for easy sorting.

        Args:
            msg (Any): any string-serializable object
        """
        verbose_log(msg, self.verbose)

    def _empty_report(self, samples: int = 0) -> EmbeddingReport:
        return EmbeddingReport(samples=samples, violations=0, seed=self.sampler.seed, mode=self.mode)

    def check_batch(self, start: int, points: np.ndarray, rates: np.ndarray) -> EmbeddingReport:
        """
        Tests one batch of samples whose global indices start at `start`.
        """
        count = len(points)
        if self.graph.n_edges == 0 or count == 0:
            return self._empty_report(count)

        log_monomials = np.log(rates) + points @ self._sources.T
        weights = np.exp(log_monomials - log_monomials.max(axis=1, keepdims=True))
        rhs = weights @ self._vectors
        scale = weights @ self._lengths

        residuals = np.zeros(count)
        cones: list[Optional[Cone]] = [None] * count
        if self.mode == EvaluationMode.HYPERPLANE:
            values = points @ self.inclusion.normals.T
            signatures = np.where(np.abs(values) <= self.inclusion.delta, 0, np.sign(values)).astype(int)
            unique, inverse = np.unique(signatures, axis=0, return_inverse=True)
            inverse = np.asarray(inverse).reshape(-1)
            for g, sigma in enumerate(unique):
                members = np.flatnonzero(inverse == g)
                cone = self.inclusion.cone_for_signature(SignVector(sigma))
                residuals[members] = _residuals(rhs[members], scale[members], cone)
                for i in members:
                    cones[i] = cone
        else:
            for i in range(count):
                cone = self.inclusion.evaluate_general(points[i])
                residuals[i] = _residuals(rhs[i : i + 1], scale[i : i + 1], cone)[0]
                cones[i] = cone

        failing = np.flatnonzero(residuals > self.tolerance)
        witnesses = []
        for i in failing[:MAX_WITNESSES]:
            witnesses.append(
                Witness(
                    sample=int(start + i),
                    point=tuple(float(x) for x in points[i]),
                    rates=tuple(float(k) for k in rates[i]),
                    rhs=tuple(float(x) for x in rhs[i] / scale[i]),
                    generators=tuple(tuple(float(x) for x in g) for g in cones[i].float_generators),
                    residual=float(residuals[i]),
                )
            )
        return EmbeddingReport(
            samples=count,
            violations=len(failing),
            witnesses=tuple(witnesses),
            max_residual=float(residuals.max()),
            seed=self.sampler.seed,
            mode=self.mode,
        )

    def _exact_rates(self, rates: np.ndarray) -> list[list[Fraction]]:
        # corner draws land on the exact bounds; ratio-bounded draws are only made rational
        if self.sampler.ratio_epsilon is not None:
            return [[Fraction(float(k)) for k in row] for row in rates]
        low = Fraction(self.epsilon).limit_denominator(10**12)
        return [[min(max(Fraction(float(k)), low), 1 / low) for k in row] for row in rates]

    def _exact_cone(self, point: np.ndarray) -> Cone:
        if self.mode == EvaluationMode.HYPERPLANE:
            return self.inclusion.evaluate_hyperplane(point)
        return self.inclusion.evaluate_general(point)

    def check_exact(
        self, start: int, states: Sequence[Sequence[Any]], rates: Sequence[Sequence[Any]]
    ) -> EmbeddingReport:
        """
        Tests one batch of samples in rational arithmetic.

        Each sample is a strictly positive rational state `x` and rational rates `k`. With integer vertex labels every monomial `k_e x^{s(e)}` is rational, so the right-hand side is exact and membership is decided from the cone's half-space representation without rounding. Only the choice of cone uses the floating point `X = log x`.

        Args:
            start (int): the global index of the first sample.
            states (Sequence): rational states `x`, one per sample.
            rates (Sequence): rational rates, one row of `E` values per sample.

        Returns:
            An [EmbeddingReport][toric_embed.embedding.EmbeddingReport]; residuals are reported in floating point for failing samples only.
        """
        assert len(states) == len(rates), f"Got {len(states)} `states` but {len(rates)} rate rows"
        count = len(states)
        if self.graph.n_edges == 0 or count == 0:
            return self._empty_report(count)

        violations, max_residual, witnesses = 0, 0.0, []
        for i, (state, row) in enumerate(zip(states, rates)):
            x = to_vector(state)
            k = to_vector(row)
            assert is_exact(x) and is_exact(k), f"Sample `{start + i}` is not rational"
            assert all(v > 0 for v in x), f"Sample `{start + i}` has a state that is not strictly positive"
            assert len(k) == self.graph.n_edges, (
                f"Sample `{start + i}` has {len(k)} rates, expected {self.graph.n_edges}"
            )
            total = tuple(Fraction(0) for _ in range(self.graph.dimension))
            scale = Fraction(0)
            for e in range(self.graph.n_edges):
                monomial = k[e]
                for base, power in zip(x, self.graph.source(e)):
                    monomial *= base ** int(power)
                total = tuple(a + monomial * v for a, v in zip(total, self.graph.edge_vector(e)))
                scale += monomial
            point = np.log([float(v) for v in x])
            cone = self._exact_cone(point)
            if cone.contains(total):
                continue

            violations += 1
            rhs = np.asarray([float(v / scale) for v in total])
            residual = float(_residuals(rhs[None, :], np.asarray([1.0]), cone)[0])
            max_residual = max(max_residual, residual)
            if len(witnesses) < MAX_WITNESSES:
                witnesses.append(
                    Witness(
                        sample=int(start + i),
                        point=tuple(float(v) for v in point),
                        rates=tuple(float(v) for v in k),
                        rhs=tuple(float(v) for v in rhs),
                        generators=tuple(tuple(float(v) for v in g) for g in cone.float_generators),
                        residual=residual,
                    )
                )
        return EmbeddingReport(
            samples=count,
            violations=violations,
            witnesses=tuple(witnesses),
            max_residual=max_residual,
            seed=self.sampler.seed,
            mode=self.mode,
        )

    def run(self) -> EmbeddingReport:
        """
        Draws every configured sample and tests it.

        Returns:
            The merged [EmbeddingReport][toric_embed.embedding.EmbeddingReport].
        """
        sampler = self.sampler
        report = self._empty_report()
        self.verbose_log(
            f"Checking {sampler.samples} samples in box {sampler.box_for(self.inclusion.delta):.4f} "
            f"against {len(self.inclusion.directions)} hyperplanes (delta = {self.inclusion.delta:.6f}, mode = {self.mode.value})"
        )
        for chunk, start in enumerate(range(0, sampler.samples, sampler.chunk_size)):
            count = min(sampler.chunk_size, sampler.samples - start)
            rng = sampler.chunk_rng(chunk)
            points = sampler.sample_points(rng, count, self.graph.dimension, self.inclusion.delta)
            rates = sampler.sample_rates(rng, start, count, self.graph, self.epsilon)
            if self.exact:
                batch = self.check_exact(start, [_rational_state(p) for p in points], self._exact_rates(rates))
            else:
                batch = self.check_batch(start, points, rates)
            report = report.merge(batch)
            self.verbose_log(
                f"Samples {start}..{start + count - 1}: {batch.violations} violations, "
                f"max residual {batch.max_residual:.3e}"
            )
        self.verbose_log(f"Finished: {report.violations} violations in {report.samples} samples")
        return report


def replay_witness(
    inclusion: ToricInclusion,
    witness: Witness,
    mode: EvaluationMode = EvaluationMode.HYPERPLANE,
    tolerance: float = DEFAULT_TOLERANCE,
) -> bool:
    """
    Re-evaluates a recorded witness against `inclusion`.

    Returns:
        True iff the witness's right-hand side still fails the membership test.
    """
    cone = inclusion.evaluate(witness.point, mode)
    residual = _residuals(np.asarray([witness.rhs], dtype=float), np.asarray([1.0]), cone)[0]
    return bool(residual > tolerance)


def verify_embedding(
    graph: EGraph,
    epsilon: float,
    mode: EvaluationMode = EvaluationMode.HYPERPLANE,
    sampler: Optional[Sampler] = None,
    verbose: bool = False,
    exact: bool = False,
) -> EmbeddingReport:
    """
    Builds the inclusion of a weakly reversible graph with [build_weakly_reversible][toric_embed.inclusion.build_weakly_reversible] and checks the embedding on samples.

    Args:
        graph (EGraph): a weakly reversible graph.
        epsilon (float): the rate bound, in `(0, 1)`.
        mode (EvaluationMode, optional): the evaluation semantics; hyperplane semantics by default.
        sampler (Sampler, optional): sampling configuration.
        verbose (bool, optional): a flag to enable verbose logging.
        exact (bool, optional): decide membership in rational arithmetic on rational samples (integer vertex labels only).

    Raises:
        AssertionError: if the graph is not weakly reversible or `epsilon` is out of range.

    Returns:
        An [EmbeddingReport][toric_embed.embedding.EmbeddingReport]; zero violations are expected.
    """
    inclusion = build_weakly_reversible(graph, epsilon)
    return EmbeddingVerifier(inclusion, graph, epsilon, mode, sampler, verbose=verbose, exact=exact).run()


def counterexample_search(
    graph: EGraph,
    epsilon: float,
    sampler: Optional[Sampler] = None,
    mode: EvaluationMode = EvaluationMode.HYPERPLANE,
    verbose: bool = False,
    exact: bool = False,
) -> EmbeddingReport:
    """
    Runs the same sampled check as [verify_embedding][toric_embed.embedding.verify_embedding] for a graph that is not weakly reversible, against the inclusion of all its vertex differences ([build_from_differences][toric_embed.inclusion.build_from_differences]). Violations are expected and reported; none are asserted.

    A graph without edges is accepted as the vacuous case: its right-hand side is zero and lies in every cone.

    Raises:
        AssertionError: if the graph is weakly reversible and has at least one edge.
    """
    assert graph.n_edges == 0 or not is_weakly_reversible(graph), (
        "Graph is weakly reversible; use `verify_embedding`"
    )
    inclusion = build_from_differences(graph, epsilon)
    return EmbeddingVerifier(inclusion, graph, epsilon, mode, sampler, verbose=verbose, exact=exact).run()


def lemma1_certificate(
    s: Sequence[Any],
    s_prime: Sequence[Any],
    epsilon: float,
    samples: int = 1000,
    seed: int = 0,
    box: Optional[float] = None,
    points: Optional[Sequence[Sequence[Any]]] = None,
) -> EmbeddingReport:
    """
    Checks the monomial domination behind the inclusion of a single reversible edge `s ⇌ s'`.

    With `d = s' - s` and `delta = 2|log ε| / ‖d‖`, every sampled `X` at distance more than `delta` from the hyperplane `d⊥` must have one monomial strictly dominate for all rates in `[ε, 1/ε]`: if `X·d > 0` then `k_f e^{X·s} < k_b e^{X·s'}`, so the right-hand side points along `-d`, and symmetrically. The comparison is made in log space. Within `delta` only collinearity of the right-hand side with `d` is checked.

    Each point is tested against the four corner assignments `(k_f, k_b) ∈ {ε, 1/ε}²` and one log-uniform assignment.

    Args:
        s (Sequence): the source vertex.
        s_prime (Sequence): the target vertex, different from `s`.
        epsilon (float): the rate bound, in `(0, 1)`.
        samples (int, optional): number of random points, used when `points` is not given.
        seed (int, optional): the random seed.
        box (float, optional): half-width of the sampling box; defaults to `3 * delta + 5`.
        points (Sequence, optional): explicit points to test instead of random ones.

    Returns:
        An [EmbeddingReport][toric_embed.embedding.EmbeddingReport] counting one sample per `(X, k)` pair.
    """
    epsilon = check_epsilon(epsilon)
    s, s_prime = unify_vectors([to_vector(s), to_vector(s_prime)])
    assert len(s) == len(s_prime), "`s` and `s_prime` must have the same dimension"
    d = subtract(s_prime, s)
    assert any(x != 0 for x in d), "`s` and `s_prime` must differ"

    length = norm(d)
    delta = 2 * abs(log(epsilon)) / length
    rng = np.random.default_rng(seed)
    if points is None:
        b = box if box is not None else 3 * delta + 5
        X = rng.uniform(-b, b, size=(samples, len(s)))
    else:
        X = np.asarray([[float(x) for x in p] for p in points], dtype=float).reshape(-1, len(s))

    low = log(epsilon)
    corners = np.asarray([[low, low], [low, -low], [-low, low], [-low, -low]])
    random_rates = rng.uniform(low, -low, size=(len(X), 1, 2))
    log_rates = np.concatenate([np.broadcast_to(corners, (len(X), 4, 2)), random_rates], axis=1)

    s_arr = np.asarray([float(x) for x in s])
    sp_arr = np.asarray([float(x) for x in s_prime])
    d_arr = sp_arr - s_arr
    projection = X @ d_arr
    distance = np.abs(projection) / length

    forward = log_rates[:, :, 0] + (X @ s_arr)[:, None]
    backward = log_rates[:, :, 1] + (X @ sp_arr)[:, None]
    outside = (distance > delta)[:, None]
    wrong_sign = np.where(projection[:, None] > 0, forward >= backward, backward >= forward)
    failures = outside & wrong_sign

    # inside the slab the right-hand side (k_f e^{X·s} - k_b e^{X·s'}) d is collinear with d by construction
    residuals = np.where(failures, np.abs(forward - backward), 0.0)
    witnesses = []
    for i, j in zip(*np.nonzero(failures)):
        if len(witnesses) >= MAX_WITNESSES:
            break
        top = max(forward[i, j], backward[i, j])
        coefficient = np.exp(forward[i, j] - top) - np.exp(backward[i, j] - top)
        witnesses.append(
            Witness(
                sample=int(i * 5 + j),
                point=tuple(float(x) for x in X[i]),
                rates=tuple(float(x) for x in np.exp(log_rates[i, j])),
                rhs=tuple(float(x) for x in coefficient * d_arr),
                generators=(tuple(float(x) for x in -np.sign(projection[i]) * d_arr / length),),
                residual=float(residuals[i, j]),
            )
        )
    return EmbeddingReport(
        samples=int(failures.size),
        violations=int(failures.sum()),
        witnesses=tuple(witnesses),
        max_residual=float(residuals.max()) if residuals.size > 0 else 0.0,
        seed=seed,
        mode=EvaluationMode.HYPERPLANE,
    )


class PhiTerm(tuple):
    """
    A signed monomial `±k_i x^{s_i}` inside one regrouped coefficient; `edge` is the cycle position `i` of the edge `s_i -> s_{i+1}`.
    """

    def __new__(cls, sign: int, edge: int):
        assert sign in (1, -1), "`sign` must be 1 or -1"
        return super().__new__(cls, (sign, edge))

    @property
    def sign(self) -> int:
        return self[0]

    @property
    def edge(self) -> int:
        return self[1]

    def __repr__(self) -> str:
        return f"{'+' if self.sign > 0 else '-'}k{self.edge}"


@dataclass(frozen=True)
class CycleCertificate:
    """
    The regrouping of a cycle's right-hand side along a direction `w`.

    The cycle's vertices `s_0 .. s_{r-1}` are renamed `v_0 .. v_{r-1}` in decreasing order of `s·w`. Each edge difference `s_{i+1} - s_i` telescopes into consecutive differences `v_{l+1} - v_l`, so the right-hand side `Σ k_i x^{s_i} (s_{i+1} - s_i)` becomes `Σ_l Φ_l (v_{l+1} - v_l)` where each coefficient `Φ_l` is a signed sum of the cycle's monomials.
    """

    vertices: tuple[Vector, ...]
    """
    The cycle's vertex labels in cycle order.
    """
    direction: Vector
    """
    The direction witness `w`.
    """
    ordering: tuple[int, ...]
    """
    `ordering[l]` is the cycle position of `v_l`.
    """
    inverse: tuple[int, ...]
    """
    `inverse[i]` is the rank `l` of the cycle vertex `s_i`.
    """
    ties: tuple[tuple[int, int], ...] = field(default=())
    """
    Consecutive ranks `(l, l + 1)` with equal projections on `w`; only present in tie-tolerant mode.
    """
    sign_vector: Optional[SignVector] = None
    """
    The sign vector of `w` in the fan, when a fan was supplied.
    """
    phi: tuple[tuple[PhiTerm, ...], ...] = field(default=())
    """
    For each `l` in `0 .. r-2`, the signed terms of `Φ_l`.
    """
    positivity: tuple[Optional[bool], ...] = field(default=())
    """
    Per `l`, whether `Φ_l` evaluated positive at the last evaluation point; `None` at ties.
    """
    telescoping: Optional[bool] = None
    """
    Whether expanding the regrouped sum reproduces every edge difference exactly.
    """

    @property
    def length(self) -> int:
        return len(self.vertices)

    def to_dict(self) -> dict:
        return {
            "ordering": list(self.ordering),
            "inverse": list(self.inverse),
            "ties": [list(t) for t in self.ties],
            "sign_vector": None if self.sign_vector is None else str(self.sign_vector),
            "phi": [[repr(t) for t in terms] for terms in self.phi],
            "positivity": list(self.positivity),
            "telescoping": self.telescoping,
        }


def cycle_order(
    vertices: Sequence[Sequence[Any]],
    direction: Sequence[Any],
    tie_tolerant: bool = False,
    fan: Optional[HyperplaneFan] = None,
) -> CycleCertificate:
    """
    Renames the vertices of a cycle in decreasing order of their projection on `direction`, breaking ties by cycle position.

    Args:
        vertices (Sequence): the cycle's vertex labels in cycle order.
        direction (Sequence): the nonzero witness `w`.
        tie_tolerant (bool, optional): accept equal projections and record them instead of rejecting.
        fan (HyperplaneFan, optional): when given, the certificate records the sign vector of `w`.

    Raises:
        AssertionError: if `w` is zero, or in strict mode two vertices tie, naming their cycle positions.

    Returns:
        A [CycleCertificate][toric_embed.embedding.CycleCertificate] with the ordering filled in.
    """
    parsed = unify_vectors([to_vector(v) for v in vertices] + [to_vector(direction)])
    labels, w = parsed[:-1], parsed[-1]
    assert len(labels) >= 2, "A cycle needs at least 2 vertices"
    assert any(x != 0 for x in w), "Direction `w` can not be zero"
    projections = [dot(v, w) for v in labels]
    ordering = tuple(sorted(range(len(labels)), key=lambda i: (-projections[i], i)))
    inverse = [0] * len(labels)
    for rank, position in enumerate(ordering):
        inverse[position] = rank

    ties = []
    for rank in range(len(ordering) - 1):
        a, b = ordering[rank], ordering[rank + 1]
        if projections[a] == projections[b]:
            assert tie_tolerant, f"Cycle vertices at positions `{min(a, b)}` and `{max(a, b)}` tie along `w`"
            ties.append((rank, rank + 1))

    return CycleCertificate(
        vertices=tuple(labels),
        direction=w,
        ordering=ordering,
        inverse=tuple(inverse),
        ties=tuple(ties),
        sign_vector=None if fan is None else fan.locate(w),
    )


def phi_decomposition(certificate: CycleCertificate) -> CycleCertificate:
    """
    Regroups a cycle's right-hand side along a computed ordering.

    The edge from cycle position `i` goes from rank `a = inverse[i]` to rank `b = inverse[i + 1]`. If `b > a` its difference is `Σ_{l=a}^{b-1} (v_{l+1} - v_l)`, so `+k_i x^{s_i}` joins `Φ_l` for `a ≤ l < b`; otherwise it is the negative sum over `b ≤ l < a` and `-k_i x^{s_i}` joins those `Φ_l`. Every `Φ_l` ends up with as many positive as negative terms, and the expansion is checked term by term.

    Raises:
        AssertionError: if the ordering does not match the cycle length.

    Returns:
        A copy of `certificate` with `phi` and `telescoping` filled in.
    """
    r = certificate.length
    assert len(certificate.ordering) == r and len(certificate.inverse) == r, (
        f"Ordering of length {len(certificate.ordering)} does not match a cycle of length {r}"
    )
    assert sorted(certificate.ordering) == list(range(r)), "`ordering` must be a permutation"

    phi: list[list[PhiTerm]] = [[] for _ in range(r - 1)]
    for i in range(r):
        a, b = certificate.inverse[i], certificate.inverse[(i + 1) % r]
        if b > a:
            for l in range(a, b):
                phi[l].append(PhiTerm(1, i))
        else:
            for l in range(b, a):
                phi[l].append(PhiTerm(-1, i))

    for l, terms in enumerate(phi):
        positive = sum(1 for t in terms if t.sign > 0)
        assert positive == len(terms) - positive, (
            f"Coefficient `{l}` has {positive} positive and {len(terms) - positive} negative terms"
        )

    v = [certificate.vertices[p] for p in certificate.ordering]
    steps = [subtract(v[l + 1], v[l]) for l in range(r - 1)]
    exact = all(isinstance(x, Fraction) for vertex in v for x in vertex)
    telescoping = True
    for i in range(r):
        expected = subtract(certificate.vertices[(i + 1) % r], certificate.vertices[i])
        total: Vector = tuple(Fraction(0) if exact else 0.0 for _ in expected)
        for l, terms in enumerate(phi):
            for t in terms:
                if t.edge == i:
                    total = tuple(x + t.sign * y for x, y in zip(total, steps[l]))
        if exact:
            telescoping = telescoping and total == expected
        else:
            telescoping = telescoping and bool(np.allclose(total, expected, rtol=0, atol=1e-12))

    return replace(certificate, phi=tuple(tuple(terms) for terms in phi), telescoping=telescoping)


def evaluate_phi(certificate: CycleCertificate, point: Sequence[Any], rates: Sequence[Any]) -> np.ndarray:
    """
    The coefficients `Φ_l` at `x = e^X` for the cycle rates `rates` (one per cycle position), all divided by the cycle's largest monomial `max_i k_i e^{X·s_i}`.
    """
    assert len(certificate.phi) == certificate.length - 1, "Run `phi_decomposition` first"
    assert len(rates) == certificate.length, (
        f"Expected {certificate.length} rates, got {len(rates)}"
    )
    x = np.asarray([float(v) for v in point], dtype=float)
    labels = np.asarray([[float(c) for c in s] for s in certificate.vertices])
    log_monomials = np.log(np.asarray([float(k) for k in rates])) + labels @ x
    monomials = np.exp(log_monomials - log_monomials.max())
    return np.asarray([sum(t.sign * monomials[t.edge] for t in terms) for terms in certificate.phi], dtype=float)


def phi_positivity(certificate: CycleCertificate, point: Sequence[Any], rates: Sequence[Any]) -> CycleCertificate:
    """
    A copy of `certificate` with the positivity verdict of each `Φ_l` at `(X, k)`. Tied ranks get no verdict.
    """
    values = evaluate_phi(certificate, point, rates)
    tied = {l for l, _ in certificate.ties}
    return replace(
        certificate,
        positivity=tuple(None if l in tied else bool(value > 0) for l, value in enumerate(values)),
    )


def cycle_certificate(
    vertices: Sequence[Sequence[Any]],
    point: Sequence[Any],
    rates: Sequence[Any],
    tie_tolerant: bool = False,
    fan: Optional[HyperplaneFan] = None,
) -> CycleCertificate:
    """
    The full certificate of a cycle at `X`: ordering along `w = X`, regrouping and positivity at the given rates.
    """
    certificate = phi_decomposition(cycle_order(vertices, point, tie_tolerant=tie_tolerant, fan=fan))
    return phi_positivity(certificate, point, rates)


def pair_delta(s: Sequence[Any], s_prime: Sequence[Any], epsilon: float) -> float:
    """
    `2|log ε| / ‖s' - s‖`, the uncertainty width of a single reversible edge.
    """
    epsilon = check_epsilon(epsilon)
    return 2 * abs(log(epsilon)) / sqrt(sum(float(b - a) ** 2 for a, b in zip(to_vector(s), to_vector(s_prime))))
