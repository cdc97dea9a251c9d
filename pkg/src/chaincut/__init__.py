"""chaincut: minimum end-to-end delay for service function chains.

Computes the minimum transmission delay of a chained-function request in a
capacitated directed network by selecting redundant computation sets per
chain stage, evaluates the resulting per-round min-cut delay bounds
exactly, and certifies achievability with random linear network coding.
"""

from .netgraph import (
    MICRO,
    Capacity,
    Edge,
    Network,
    NodeSet,
    build_auxiliary_multicast,
    cut_value,
    max_flow,
    mincut_bruteforce,
    multicast_mincut,
    to_micro,
)
from .chain import (
    ChainRequest,
    Delay,
    Placement,
    ValidationReport,
    end_to_end_delay,
    round_delay,
    validate,
)
from .solvers import (
    MincutCache,
    SolveResult,
    SolveStats,
    solve_alpha_greedy,
    solve_alpha_optimal,
    solve_exhaustive,
    solve_greedy,
    solve_no_redundancy,
)
from .analytic import (
    CompleteGraphDelays,
    CompleteGraphParams,
    complete_graph_delays,
    complete_graph_network,
    closed_form_mincut,
    normalized_curves,
    tradeoff_rows,
)
from .coding import (
    CodingAssignment,
    PlacementCertificate,
    RoundCertificate,
    UnitDag,
    build_unit_dag,
    certify_placement,
    certify_round,
    draw_assignment,
    target_rank,
)
from .experiments import (
    ExperimentConfig,
    SummaryRow,
    SweepSpec,
    TrialRow,
    gen_layered_network,
    run_sweep,
    summarize,
    write_rows_csv,
    write_summary_csv,
)
from .fixtures import butterfly, complete_graph, example1, example2

__all__ = [
    "MICRO",
    "Capacity",
    "ChainRequest",
    "CodingAssignment",
    "CompleteGraphDelays",
    "CompleteGraphParams",
    "Delay",
    "Edge",
    "ExperimentConfig",
    "MincutCache",
    "Network",
    "NodeSet",
    "Placement",
    "PlacementCertificate",
    "RoundCertificate",
    "SolveResult",
    "SolveStats",
    "SummaryRow",
    "SweepSpec",
    "TrialRow",
    "UnitDag",
    "ValidationReport",
    "build_auxiliary_multicast",
    "build_unit_dag",
    "butterfly",
    "certify_placement",
    "certify_round",
    "complete_graph",
    "complete_graph_delays",
    "complete_graph_network",
    "cut_value",
    "draw_assignment",
    "end_to_end_delay",
    "example1",
    "example2",
    "gen_layered_network",
    "closed_form_mincut",
    "max_flow",
    "mincut_bruteforce",
    "multicast_mincut",
    "normalized_curves",
    "round_delay",
    "run_sweep",
    "solve_alpha_greedy",
    "solve_alpha_optimal",
    "solve_exhaustive",
    "solve_greedy",
    "solve_no_redundancy",
    "summarize",
    "target_rank",
    "to_micro",
    "tradeoff_rows",
    "validate",
    "write_rows_csv",
    "write_summary_csv",
]

__version__ = "0.1.0"
