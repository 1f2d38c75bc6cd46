"""shocklab: non-planar shock waves for multi-D scalar conservation laws.

Construct admissibility cones and two-valued steady shocks, evolve perturbed
shocks with monotone finite-volume schemes whose semigroup contracts are
testable, and run the stability / extinction / dispersion / support
experiments at desk scale.
"""

from .cones import (
    AdmissibleCone,
    DualCone,
    admissible_cone,
    cone_contains,
    dual_cone,
    dual_cone_from_flux,
    gauge_value,
    sector_cone,
)
from .experiments import (
    AbsorptionEstimate,
    Check,
    ExperimentReport,
    SupportHull,
    dispersion_experiment,
    dispersion_exponents,
    normalization_residual_study,
    overhead_experiment,
    predicted_absorption_time,
    smooth_burgers_solution,
    stability_experiment,
    support_experiment,
    support_hull,
)
from .fluxes import (
    Flux,
    Normalization,
    ShockPair,
    burgers_flux,
    burgers_normalization,
    check_nondegeneracy,
    eval_flux,
    make_shock_pair,
    normal_speed,
    oleinik_admissible,
)
from .profiles import (
    PerturbationSpec,
    ShockProfile,
    bounded_intersection,
    estimate_rho,
    eval_profile,
    extract_front,
    front_surgery,
    make_graph,
    make_planar,
    make_scaled_gauge,
    perturb_end_states,
    sandwich_bounds,
)
from .snapshots import read_snapshot, write_snapshot
from .solver import (
    Background,
    Field,
    Grid,
    SchemeConfig,
    constant_background,
    l1_distance,
    numerical_flux,
    profile_background,
    run,
    sample_function,
    sample_profile,
    step,
)

__version__ = "0.1.0"
