"""Information measures on finite weighted measure spaces.

Shannon, Renyi, and Tsallis entropies and relative entropies against an
explicit reference measure; dyadic mean-value approximation of densities with
a convergence harness for the generalized divergences; classical and
escort-constrained Tsallis maximum-entropy solvers with identity checks.
"""

from .qcalc import DeformationIndex, as_index, q_exp, q_log
from .measure import (
    AbsoluteContinuityError,
    Cell,
    DensityVector,
    ProbabilityVector,
    WeightedPartition,
    induced_pmf,
    radon_nikodym,
    uniform_partition,
)
from .entropy import (
    kl_divergence,
    measure_entropy,
    renyi_divergence,
    renyi_entropy,
    shannon_entropy,
    tsallis_divergence,
    tsallis_entropy,
)
from .dyadic import (
    BaseGridDensity,
    CommonRefinement,
    ConvergenceRow,
    DemoReport,
    DemoRow,
    DyadicApproximation,
    ResolutionError,
    approximating_pmf,
    common_refinement,
    convergence_table,
    demo_to_csv,
    dyadic_approximation,
    entropy_nonextension_demo,
    reference_divergence,
    table_to_csv,
)
from .maxent import (
    ConstraintSet,
    ConvergenceError,
    GibbsSolution,
    InfeasibleError,
    partition_function,
    solve_maxent,
    thermo_residuals,
)
from .tsallis import (
    ConsistencyReport,
    EmptySupportError,
    EscortView,
    TsallisSolution,
    discrete_consistency_report,
    escort_expectation,
    escort_view,
    identity_residuals,
    q_maxent_density,
    solve_tsallis_maxent,
    tsallis_thermo,
)
from .verify import run_suite, run_suites

__version__ = "0.1.0"

__all__ = [
    "DeformationIndex",
    "as_index",
    "q_exp",
    "q_log",
    "AbsoluteContinuityError",
    "Cell",
    "DensityVector",
    "ProbabilityVector",
    "WeightedPartition",
    "induced_pmf",
    "radon_nikodym",
    "uniform_partition",
    "kl_divergence",
    "measure_entropy",
    "renyi_divergence",
    "renyi_entropy",
    "shannon_entropy",
    "tsallis_divergence",
    "tsallis_entropy",
    "BaseGridDensity",
    "CommonRefinement",
    "ConvergenceRow",
    "DemoReport",
    "DemoRow",
    "DyadicApproximation",
    "ResolutionError",
    "approximating_pmf",
    "common_refinement",
    "convergence_table",
    "demo_to_csv",
    "dyadic_approximation",
    "entropy_nonextension_demo",
    "reference_divergence",
    "table_to_csv",
    "ConstraintSet",
    "ConvergenceError",
    "GibbsSolution",
    "InfeasibleError",
    "partition_function",
    "solve_maxent",
    "thermo_residuals",
    "ConsistencyReport",
    "EmptySupportError",
    "EscortView",
    "TsallisSolution",
    "discrete_consistency_report",
    "escort_expectation",
    "escort_view",
    "identity_residuals",
    "q_maxent_density",
    "solve_tsallis_maxent",
    "tsallis_thermo",
    "run_suite",
    "run_suites",
    "__version__",
]
