"""Pareto sets of multi-objective problems, their stratification by subproblems, and simplicity tests."""

__version__ = "0.1.0"

from .dominance import (  # noqa: E402
    GridSpec,
    Relation,
    compare,
    dominates_with_tolerance,
    grid_oracle,
    inclusion_check,
    pareto_filter,
    weak_pareto_filter,
)
from .problem import (  # noqa: E402
    DomainError,
    EvaluationError,
    EvaluationRecord,
    ObjectiveSubset,
    Problem,
    SolutionArchive,
    enumerate_subproblems,
    evaluate,
    restrict,
)
from .scalarize import (  # noqa: E402
    SolverConfig,
    UtopianPoint,
    estimate_utopian,
    generate_face_weights,
    solve_scalarized,
    tchebyshev_value,
    weight_sweep,
)
from .simplicity import SimplicityReport, Status, SuiteConfig, Verdict, run_simplicity_suite  # noqa: E402
from .strata import (  # noqa: E402
    Label,
    Stratification,
    Stratum,
    build_stratification,
    check_boundary_coverage,
    check_disjoint_interiors,
    check_inclusion,
    classify_boundary,
    hausdorff_distance,
)
from .suites import MedConfig, WfgConfig, dtlz, example1, fig1_problem, from_selector, med, wfg, zdt  # noqa: E402
