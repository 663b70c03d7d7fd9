"""anomalylab: a mixing-cascade laboratory for vanishing-viscosity experiments.

Glued self-similar shear drifts advect a passive scalar on the periodic
torus; exact spectral advection and exact heat multipliers keep the energy
ledger closed to rounding, which makes dissipation-anomaly measurements a
matter of bookkeeping rather than discretization error.
"""

__version__ = "0.1.0"

from .blocks import (
    BlockParams,
    BlockReport,
    ShearStep,
    apply_shear_exact,
    build_block_drift,
    run_inviscid_cascade,
    verify_block_estimates,
)
from .diagnostics import (
    FamilySummary,
    ShellSpectrum,
    family_summary,
    h_minus1_norm,
    kolmogorov_wavenumber,
    low_mode_bound_check,
    project_high,
    project_low,
    shell_spectrum,
    work_of_drift_force,
)
from .fields import ScalarField2D, SpectralGrid, block_initial_density
from .glue import CutoffPair, GlueSchedule, TimeWarp, stage_times, time_warp_eval
from .solver import (
    RunLedger,
    SolverConfig,
    advect_substep,
    heat_substep,
    pair_margins,
    run,
    run_family,
    run_pair,
)
from .experiments import (
    DragReport,
    ScenarioResult,
    drag_bound_fit,
    find_viscosity_for_dissipation,
    run_forward_scenario,
    run_longtime_scenario,
    run_reversed_scenario,
    sweep,
    viscosity_schedule,
)
from .config import ExperimentConfig, parse_config
