"""Stochastic-geometry laboratory for K-user downlink NOMA in multi-tier
Poisson cellular networks.

Closed-form coverage/throughput analytics with power-allocation optimization,
cross-validated by a Monte Carlo simulator with SIC decoding and coordinated
joint transmission from void base stations.
"""

__version__ = "0.1.0"

from nomalab.errors import IntegrationError, NomalabError, RetryBudgetError, SpecError
from nomalab.geometry import (
    AssociationMap,
    Deployment,
    DerivedTierStats,
    NetworkConfig,
    TierParams,
    associate,
    derived_stats,
    sample_deployment,
    sample_scheduled_distances,
    user_count_pmf,
)
from nomalab.analytics import (
    MetricResult,
    PowerAllocation,
    Scheme,
    ccdf_desired_sir,
    cell_coverage,
    cell_throughput,
    coverage_jt,
    coverage_noncoord,
    ell,
    ell_tilde,
    single_user_throughput,
    theta_eff,
    throughput_jt,
    throughput_noncoord,
)
from nomalab.montecarlo import (
    SimMode,
    SirSampleBatch,
    estimate_coverage,
    estimate_throughput,
    simulate_sir_samples,
)
from nomalab.poweropt import (
    FeasibleRegion,
    Feasibility,
    OptResult,
    feasible,
    feasible_region,
    optimize_cell_coverage,
    optimize_cell_throughput,
)
from nomalab.experiments import (
    ExperimentSpec,
    ResultTable,
    RunResult,
    SweepSpec,
    load_spec,
    recipe_names,
    recipe_spec,
    run_experiment,
    spec_from_dict,
)

__all__ = [name for name in dir() if not name.startswith("_")]
