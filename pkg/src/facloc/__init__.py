"""Facility location on a bandwidth-limited clique network.

Exact sequential machinery (characteristic radii, charges, bounds),
sequential baselines, a deterministic round-synchronous simulator, the
sparse-MIS and 2-ruling-set subroutines, and the distributed solver built
from them.
"""

from .baselines import OptResult, brute_force_opt, mettu_plaxton
from .generators import GeneratorSpec, figure2_instance, generate, random_instance
from .metric import (
    Configuration,
    MetricInstance,
    RadiiProfile,
    characteristic_radii,
    charge,
    cost_lower_bound,
    read_instance,
    smoothed_radii,
    total_cost,
    validate_instance,
    write_instance,
)
from .ruling_set import (
    RulingSetRun,
    measure_thresholds,
    run_two_ruling_set,
    sample_test_set_edges,
    verify_ruling_set,
)
from .simulator import Message, NodeProgram, Payload, Trace, run
from .solver import SolveResult, radii_profile, solve
from .sparse_mis import greedy_mis, run_sparse_mis

__all__ = [
    "Configuration",
    "GeneratorSpec",
    "Message",
    "MetricInstance",
    "NodeProgram",
    "OptResult",
    "Payload",
    "RadiiProfile",
    "RulingSetRun",
    "SolveResult",
    "Trace",
    "brute_force_opt",
    "characteristic_radii",
    "charge",
    "cost_lower_bound",
    "figure2_instance",
    "generate",
    "greedy_mis",
    "measure_thresholds",
    "mettu_plaxton",
    "radii_profile",
    "random_instance",
    "read_instance",
    "run",
    "run_sparse_mis",
    "run_two_ruling_set",
    "sample_test_set_edges",
    "smoothed_radii",
    "solve",
    "total_cost",
    "validate_instance",
    "verify_ruling_set",
    "write_instance",
]
