from pathlib import Path
from toric_embed.model import EGraph

FIXTURE_DATA_PATH = Path(__file__).resolve().parent / "fixtures"


def utils_example1_graph() -> EGraph:
    # 2X1 <-> X2
    return EGraph(2, ((2, 0), (0, 1)), ((0, 1), (1, 0)))


def utils_triangle_graph() -> EGraph:
    # 0 -> X1 -> X2 -> 0
    return EGraph(2, ((0, 0), (1, 0), (0, 1)), ((0, 1), (1, 2), (2, 0)))


def utils_orthogonal_pair_graph() -> EGraph:
    # X1 <-> 0 <-> X2
    return EGraph(2, ((0, 0), (1, 0), (0, 1)), ((0, 1), (1, 0), (0, 2), (2, 0)))


def utils_single_edge_graph() -> EGraph:
    return EGraph(2, ((0, 0), (1, 0)), ((0, 1),))


def utils_inconsistent_cycle_graph() -> EGraph:
    # 0 -> X -> 2X -> 0 in one dimension
    return EGraph(1, ((0,), (1,), (2,)), ((0, 1), (1, 2), (2, 0)))


def utils_four_cycle_graph() -> EGraph:
    return EGraph(2, ((0, 0), (1, 0), (1, 1), (0, 1)), ((0, 1), (1, 2), (2, 3), (3, 0)))


def utils_four_cycle_3d_graph() -> EGraph:
    return EGraph(
        3,
        ((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0)),
        ((0, 1), (1, 2), (2, 3), (3, 0)),
    )
