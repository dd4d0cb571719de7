"""The `toric-embed` command-line tool."""

import argparse
import json
import os
import sys
from pathlib import Path
from time import perf_counter
from typing import Callable, Optional, Sequence
from pandera.errors import SchemaError

from toric_embed import __version__
from toric_embed.document import NetworkDocument, RunReport, write_region_svg, write_trajectory_csv
from toric_embed.dynamics import (
    DEFAULT_ATOL,
    DEFAULT_RTOL,
    IntegrationError,
    ScheduleKind,
    constant_schedule,
    find_vertex_balanced,
    sample_schedule,
    simulate,
)
from toric_embed.embedding import Sampler, counterexample_search, verify_embedding
from toric_embed.inclusion import EvaluationMode, ToricInclusion, build_reversible, build_weakly_reversible
from toric_embed.model import (
    EGraph,
    deficiency,
    edge_space,
    first_edge_outside_cycles,
    first_irreversible_edge,
    is_reversible,
    is_weakly_reversible,
    linkage_classes,
    strongly_connected_components,
)
from toric_embed.regions import (
    RegionBuildError,
    Side,
    build_region,
    build_separating_curve,
    to_xspace,
)
from toric_embed.utils import DEFAULT_TOLERANCE, check_epsilon, format_vector, to_vector, verbose_log

EXIT_OK = 0
EXIT_ERROR = 1
"""
Operational errors: unreadable or invalid input, failed preconditions, integration failures.
"""
EXIT_VIOLATIONS = 2
"""
An embedding check found violations.
"""
EXIT_REGION_FAILURE = 3
"""
No region or curve could be built and verified.
"""

SEED_VARIABLE = "TORIC_EMBED_SEED"
"""
Environment variable holding the default `--seed`.
"""


def default_seed() -> int:
    return int(os.environ.get(SEED_VARIABLE, "0"))


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip() != ""]


def _load(args: argparse.Namespace) -> tuple[NetworkDocument, EGraph, Optional[tuple]]:
    document = NetworkDocument.load(args.network, exact=args.rational)
    graph, rates = document.to_graph()
    verbose_log(f"Loaded {args.network}: {graph.n_vertices} vertices, {graph.n_edges} edges", args.verbose)
    return document, graph, rates


def _base_config(args: argparse.Namespace) -> dict:
    return {
        "network": str(args.network),
        "tolerance": args.tolerance,
        "rational": args.rational,
        "seed": args.seed,
        "output_dir": str(args.output_dir),
    }


def _inclusion_for(graph: EGraph, epsilon: float) -> ToricInclusion:
    if is_reversible(graph):
        return build_reversible(graph, epsilon)
    return build_weakly_reversible(graph, epsilon)


def cmd_check(args: argparse.Namespace) -> tuple[RunReport, int]:
    """
    Reports the structure of a network: reversibility, strongly connected components, linkage classes, the edge space and its conservation laws.
    """
    _, graph, _ = _load(args)
    basis, complement = edge_space(graph)
    irreversible = first_irreversible_edge(graph)
    outside = first_edge_outside_cycles(graph)
    results = {
        "vertices": graph.n_vertices,
        "edges": graph.n_edges,
        "reversible": is_reversible(graph),
        "weakly_reversible": is_weakly_reversible(graph),
        "first_irreversible_edge": irreversible,
        "first_edge_outside_cycles": outside,
        "strongly_connected_components": strongly_connected_components(graph),
        "linkage_classes": linkage_classes(graph),
        "edge_space_dimension": len(basis),
        "edge_space_basis": [format_vector(v) for v in basis],
        "conservation_basis": [format_vector(v) for v in complement],
        "deficiency": deficiency(graph),
    }
    results["summary"] = (
        f"reversible: {str(results['reversible']).lower()}, "
        f"weakly reversible: {str(results['weakly_reversible']).lower()}, dim S = {len(basis)}"
    )
    return RunReport("check", _base_config(args), results), EXIT_OK


def cmd_build_inclusion(args: argparse.Namespace) -> tuple[RunReport, int]:
    """
    Builds the toric differential inclusion of a (weakly) reversible network and writes it to `inclusion.json`.
    """
    epsilon = check_epsilon(args.epsilon)
    _, graph, _ = _load(args)
    inclusion = _inclusion_for(graph, epsilon)
    config = _base_config(args) | {"epsilon": epsilon, "delta": inclusion.delta}
    results = {
        "inclusion": inclusion.to_dict(),
        "hyperplanes": len(inclusion.directions),
        "summary": f"{len(inclusion.directions)} hyperplane(s), delta = {inclusion.delta:.6g}",
    }
    (Path(args.output_dir) / "inclusion.json").write_text(json.dumps(inclusion.to_dict(), indent=2) + "\n", encoding="utf-8")
    return RunReport("build-inclusion", config, results), EXIT_OK


def cmd_verify(args: argparse.Namespace) -> tuple[RunReport, int]:
    """
    Checks on samples that the network's variable-rate systems are embedded in its inclusion. Exits with [EXIT_VIOLATIONS][toric_embed.cli.EXIT_VIOLATIONS] when any sample violates membership. With `--rational` and integer vertex labels, membership is decided in rational arithmetic.
    """
    epsilon = check_epsilon(args.epsilon)
    _, graph, _ = _load(args)
    mode = EvaluationMode(args.mode)
    sampler = Sampler(
        samples=args.samples,
        seed=args.seed,
        box=args.box,
        ratio_epsilon=args.ratio_epsilon,
    )
    exact = args.rational and graph.is_exact and all(x.denominator == 1 for v in graph.vertices for x in v)
    if graph.n_edges > 0 and not is_weakly_reversible(graph) and args.allow_counterexample:
        report = counterexample_search(graph, epsilon, sampler, mode, verbose=args.verbose, exact=exact)
        search = "counterexample"
    else:
        report = verify_embedding(graph, epsilon, mode, sampler, verbose=args.verbose, exact=exact)
        search = "embedding"
    config = _base_config(args) | {
        "epsilon": epsilon,
        "mode": mode.value,
        "search": search,
        "exact_membership": exact,
        "sampler": sampler.to_dict(),
    }
    if report.violations > 0:
        report.to_frame().to_csv(Path(args.output_dir) / "witnesses.csv", index=False)
    results = report.to_dict() | {
        "passed": report.passed,
        "summary": f"{report.violations} violation(s) in {report.samples} samples",
    }
    return RunReport("verify", config, results), EXIT_OK if report.passed else EXIT_VIOLATIONS


def cmd_simulate(args: argparse.Namespace) -> tuple[RunReport, int]:
    """
    Integrates one variable-rate trajectory and writes it to `trajectory.csv`.
    """
    epsilon = check_epsilon(args.epsilon)
    _, graph, rates = _load(args)
    x0 = to_vector(args.x0.split(","), exact=args.rational)
    kind = ScheduleKind(args.schedule)
    if kind == ScheduleKind.CONSTANT:
        schedule = constant_schedule(rates if rates is not None else [1] * graph.n_edges)
    else:
        schedule = sample_schedule(graph, epsilon, kind, args.seed)
    config = _base_config(args) | {
        "epsilon": epsilon,
        "schedule": schedule.to_dict(),
        "x0": format_vector(x0),
        "horizon": args.horizon,
        "rtol": args.rtol,
        "atol": args.atol,
    }
    try:
        trajectory = simulate(graph, schedule, x0, args.horizon, args.rtol, args.atol, verbose=args.verbose)
    except IntegrationError as e:
        results = {
            "error": str(e),
            "time": e.time,
            "probable_blowup": e.probable_blowup,
            "summary": str(e),
        }
        return RunReport("simulate", config, results), EXIT_ERROR

    path = write_trajectory_csv(trajectory, Path(args.output_dir) / "trajectory.csv")
    results = {
        "trajectory": str(path),
        "steps": len(trajectory.times),
        "final_state": [float(x) for x in trajectory.states[-1]],
        "min_coordinate": float(trajectory.states.min()),
        "max_coordinate": float(trajectory.states.max()),
        "max_conservation_residual": trajectory.max_residual,
        "stats": trajectory.stats,
        "summary": f"{len(trajectory.times)} steps, max conservation residual {trajectory.max_residual:.3e}",
    }
    return RunReport("simulate", config, results), EXIT_OK


def cmd_equilibrium(args: argparse.Namespace) -> tuple[RunReport, int]:
    """
    Searches for a vertex-balanced equilibrium with the document's rates (unit rates when none are given).
    """
    _, graph, rates = _load(args)
    result = find_vertex_balanced(graph, rates, tolerance=args.tolerance)
    results = result.to_dict() | {
        "summary": f"balanced: {str(result.balanced).lower()}, point = {result.point}",
    }
    return RunReport("equilibrium", _base_config(args), results), EXIT_OK


def cmd_region(args: argparse.Namespace) -> tuple[RunReport, int]:
    """
    Builds and verifies a compact invariant region of a planar network's inclusion and writes it to `region.csv` and an SVG. With `--box`, also builds a zero-separating curve clipped to the box.
    """
    epsilon = check_epsilon(args.epsilon)
    _, graph, _ = _load(args)
    assert graph.dimension == 2, "regions require dimension 2"
    inclusion = _inclusion_for(graph, epsilon)
    box = None if args.box is None else tuple(_floats(args.box))
    assert box is None or len(box) == 4, "`--box` takes four values: xmin,xmax,ymin,ymax"
    config = _base_config(args) | {
        "epsilon": epsilon,
        "delta": inclusion.delta,
        "tau": args.tau,
        "box": box,
        "side": args.side,
        "max_retries": args.max_retries,
    }
    output_dir = Path(args.output_dir)
    try:
        region = build_region(inclusion, args.tau, args.max_retries, args.tolerance, verbose=args.verbose)
    except RegionBuildError as e:
        results = {
            "verified": False,
            "error": str(e),
            "attempts": e.trace,
            "certificate": None if e.certificate is None else e.certificate.to_dict(),
            "summary": str(e),
        }
        return RunReport("region", config, results), EXIT_REGION_FAILURE

    region.to_frame().to_csv(output_dir / "region.csv", index=False)
    curve = to_xspace(region.vertices, closed=True)
    svg = write_region_svg(Path(args.out) if args.out else output_dir / "region.svg", region.vertices, curve, closed=True)
    results = {
        "verified": True,
        "vertices": region.vertices.tolist(),
        "normals": region.normals.tolist(),
        "certificate": region.certificate.to_dict(),
        "attempts": region.attempts,
        "svg": str(svg),
    }

    if box is not None:
        try:
            separating = build_separating_curve(
                inclusion, box, Side(args.side), args.tau, args.max_retries, args.tolerance, verbose=args.verbose
            )
        except RegionBuildError as e:
            results |= {"separating_curve": {"verified": False, "error": str(e), "attempts": e.trace}}
            results["summary"] = f"region verified, separating curve failed: {e}"
            return RunReport("region", config, results), EXIT_REGION_FAILURE
        curve_path = write_region_svg(
            output_dir / "separating_curve.svg",
            separating.points,
            to_xspace(separating.points),
            closed=False,
        )
        results["separating_curve"] = {
            "verified": separating.certificate.verdict,
            "points": separating.points.tolist(),
            "certificate": separating.certificate.to_dict(),
            "attempts": separating.attempts,
            "svg": str(curve_path),
        }

    results["summary"] = f"verified region with {len(region.vertices)} vertices (tau = {region.tau})"
    return RunReport("region", config, results), EXIT_OK


def _add_common_options(parser: argparse.ArgumentParser, suppress: bool):
    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--tolerance", type=float, default=default(DEFAULT_TOLERANCE), help="numerical tolerance")
    parser.add_argument("--rational", action="store_true", default=default(False), help="read decimals as exact rationals; `verify` also decides membership in rational arithmetic")
    parser.add_argument("--output-dir", type=Path, default=default(Path(".")), help="where reports and files are written")
    parser.add_argument("--seed", type=int, default=default(None), help=f"random seed (default: ${SEED_VARIABLE} or 0)")
    parser.add_argument("--verbose", action="store_true", default=default(False), help="enable verbose logging")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toric-embed",
        description="Embed weakly reversible power-law systems into toric differential inclusions.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _add_common_options(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _add_common_options(common, suppress=True)

    commands = parser.add_subparsers(dest="command", required=True)

    def command(name: str, handler: Callable, help: str) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, parents=[common], help=help)
        sub.add_argument("network", type=Path, help="network JSON document")
        sub.set_defaults(handler=handler)
        return sub

    command("check", cmd_check, "report reversibility, components and the edge space")

    sub = command("build-inclusion", cmd_build_inclusion, "build the toric differential inclusion")
    sub.add_argument("--epsilon", type=float, required=True)

    sub = command("verify", cmd_verify, "check the embedding on sampled points and rates")
    sub.add_argument("--epsilon", type=float, required=True)
    sub.add_argument("--samples", type=int, default=10_000)
    sub.add_argument("--mode", choices=[m.value for m in EvaluationMode], default=EvaluationMode.HYPERPLANE.value)
    sub.add_argument("--box", type=float, default=None, help="half-width of the log-space sampling box")
    sub.add_argument("--ratio-epsilon", type=float, default=None, help="experimental ratio-bounded rates")
    sub.add_argument("--allow-counterexample", action="store_true", help="search non weakly reversible input for violations")

    sub = command("simulate", cmd_simulate, "integrate a variable-rate trajectory")
    sub.add_argument("--epsilon", type=float, default=0.5)
    sub.add_argument("--schedule", choices=[k.value for k in ScheduleKind], default=ScheduleKind.CONSTANT.value)
    sub.add_argument("--x0", type=str, required=True, help="comma separated positive initial state")
    sub.add_argument("--horizon", type=float, default=10.0)
    sub.add_argument("--rtol", type=float, default=DEFAULT_RTOL)
    sub.add_argument("--atol", type=float, default=DEFAULT_ATOL)

    command("equilibrium", cmd_equilibrium, "find a vertex-balanced equilibrium")

    sub = command("region", cmd_region, "build and verify a planar invariant region")
    sub.add_argument("--epsilon", type=float, required=True)
    sub.add_argument("--tau", type=float, default=5.0)
    sub.add_argument("--box", type=str, default=None, help="xmin,xmax,ymin,ymax for a zero-separating curve")
    sub.add_argument("--side", choices=[s.value for s in Side], default=Side.LOWER_LEFT.value)
    sub.add_argument("--max-retries", type=int, default=8)
    sub.add_argument("--out", type=str, default=None, help="path of the region SVG")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Runs one command, writes `<command>-report.json` into the output directory and prints a one-line summary.

    Returns:
        The exit code: [EXIT_OK][toric_embed.cli.EXIT_OK], [EXIT_ERROR][toric_embed.cli.EXIT_ERROR], [EXIT_VIOLATIONS][toric_embed.cli.EXIT_VIOLATIONS] or [EXIT_REGION_FAILURE][toric_embed.cli.EXIT_REGION_FAILURE].
    """
    args = build_parser().parse_args(argv)
    if args.seed is None:
        args.seed = default_seed()
    args.output_dir.mkdir(parents=True, exist_ok=True)

    started = perf_counter()
    try:
        report, code = args.handler(args)
    except (AssertionError, ValueError, SchemaError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR

    report.version = __version__
    report.timing = {"seconds": perf_counter() - started}
    report.save(args.output_dir / f"{args.command}-report.json")
    print(f"{args.command}: {report.results.get('summary', '')}")
    return code


if __name__ == "__main__":
    sys.exit(main())
