from .dst import TIMEOUT, DstCandidate, convex_coverage_set, dst_candidates, dst_optimal_value, shortest_paths
from .minecart import IDLE, MinecartCandidate, ScriptedDriver, minecart_candidates, minecart_optimal_value
from .partition import partition_simplex, region_components, region_shares, simplex_grid, write_partition_csv

__all__ = [
    "IDLE",
    "TIMEOUT",
    "DstCandidate",
    "MinecartCandidate",
    "ScriptedDriver",
    "convex_coverage_set",
    "dst_candidates",
    "dst_optimal_value",
    "minecart_candidates",
    "minecart_optimal_value",
    "partition_simplex",
    "region_components",
    "region_shares",
    "shortest_paths",
    "simplex_grid",
    "write_partition_csv",
]
