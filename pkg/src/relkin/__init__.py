"""relkin: relativistic elastic-plastic constitutive model and 1+1D bar simulator."""

from .constitutive import (
    ConsistencySnapshot,
    InternalState,
    Loading,
    MaterialParams,
    StressState,
    dissipation,
    effective_stress,
    elastic_cg,
    elastic_split,
    energy_momentum,
    flow_direction,
    flow_stress,
    free_energy,
    loading_check,
    plastic_cg,
    plastic_multiplier,
    plastic_rate_tensors,
    rate_conversion,
    stress,
    update_internal,
)
from .kinematics import (
    RateTensors,
    cg_invariants,
    invariant_derivative,
    jacobian,
    left_cauchy_green,
    particle_conservation_residual,
    rate_tensors,
    right_cauchy_green,
    spatial_part,
)
from .minkowski import (
    DEFAULT_BETA_MAX,
    TOL_ALG,
    BetaSuperluminal,
    Causality,
    LorentzBoost,
    Projector,
    WorldVelocity,
    apply_boost_tensor,
    apply_boost_vector,
    boost_from_beta,
    classify,
    metric,
    norm_sq,
    projector,
    split,
    world_velocity,
)
from .scenario import CSV_HEADER, ParseError, ValidationError, load_scenario, write_csv
from .worldline import (
    MOTION_PRESETS,
    BarScenario,
    Motion,
    TimeSeriesRecord,
    boosted_stretch,
    eval_kinematics,
    nonrelativistic_run,
    observables,
    rigid_boost,
    simulate,
    step,
    uniform_stretch,
)

__version__ = "0.1.0"
