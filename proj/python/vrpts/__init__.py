"""Vehicle routing local search with scalar and batched neighbourhood evaluation."""

from ._vrpts import (  # noqa: F401
    ContractError,
    ParseError,
    StructureError,
    Instance,
    Solution,
    backends,
    best_move,
    descend,
    generate_uniform,
    initial_solution,
    load_instance,
    lockstep,
    mask_stats,
    operators,
    parse_instance,
    route_attributes,
    solve,
)

__all__ = [
    "ContractError",
    "ParseError",
    "StructureError",
    "Instance",
    "Solution",
    "backends",
    "best_move",
    "descend",
    "generate_uniform",
    "initial_solution",
    "load_instance",
    "lockstep",
    "mask_stats",
    "operators",
    "parse_instance",
    "route_attributes",
    "solve",
]
