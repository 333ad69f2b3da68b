"""Near-identical partitioning bin packing workbench."""

__version__ = "0.1.0"

from .bounds import BoundReport, bound_report, lb_size, lb_waste, max_fill
from .configs import (
    BinConfiguration,
    ConfigSet,
    KnapsackGraph,
    build_kpg,
    delta_feasible,
    enumerate_configs,
    min_delta,
    prune_useless,
    sample_configs,
)
from .core import (
    Instance,
    SizeGrid,
    build_instance,
    distribution_vector,
    instance_from_sizes,
    read_bpx,
    segment,
    truncate_segment,
    write_bpx,
)
from .cover import Cover, CoverError, Demand, Packing, ScaleExceeded, materialize, min_cover, min_cover_exact, validate_packing
from .generators import GenSpec, generate_h, generate_r
from .kernels import BACKEND
from .solvers import algorithm_b, bfd, best_fit, exact_min_packing, ffd, first_fit, heuristic_c, next_fit, nfd

__all__ = [
    "__version__",
    "BACKEND",
    "BinConfiguration",
    "BoundReport",
    "ConfigSet",
    "Cover",
    "CoverError",
    "Demand",
    "GenSpec",
    "Instance",
    "KnapsackGraph",
    "Packing",
    "ScaleExceeded",
    "SizeGrid",
    "algorithm_b",
    "best_fit",
    "bfd",
    "bound_report",
    "build_instance",
    "build_kpg",
    "delta_feasible",
    "distribution_vector",
    "enumerate_configs",
    "exact_min_packing",
    "ffd",
    "first_fit",
    "generate_h",
    "generate_r",
    "heuristic_c",
    "instance_from_sizes",
    "lb_size",
    "lb_waste",
    "materialize",
    "max_fill",
    "min_cover",
    "min_cover_exact",
    "min_delta",
    "next_fit",
    "nfd",
    "prune_useless",
    "read_bpx",
    "sample_configs",
    "segment",
    "truncate_segment",
    "validate_packing",
    "write_bpx",
]
