"""ferrohyst: rate-independent hysteresis operators, a thermodynamically
consistent ferroelectric/ferroelastic material law, inversion of Preisach
equations with time dependent coefficients, and a 1D piezoelectric beam
solver."""

from .beam import (
    BeamMesh,
    BeamRun,
    BeamState,
    BoundaryData,
    StepperConfig,
    energy_audit,
    hysteretic_stress_functional,
    initial_beam_state,
    simulate,
    step,
)
from .constitutive import (
    MaterialParams,
    PointState,
    PointTrajectory,
    ShapeFunction,
    clausius_duhem_residuals,
    dielectric_displacement,
    drive_field,
    drive_stress,
    free_energy,
    shape_eval,
    solve_field_from_D,
    stress,
)
from .errors import (
    CutoffViolationError,
    FerrohystError,
    InvalidCoefficientError,
    InvalidDensityError,
    InvalidParameterError,
    OutOfRangeError,
    ShapeDegeneracyError,
    StepDivergenceError,
)
from .hysteresis import (
    DiscreteWeights,
    MemoryState,
    PrandtlStack,
    PreisachDensity,
    RGrid,
    density_constants,
    dissipation_increment,
    evolve_memory,
    operator_outputs,
    operator_series,
    play_init,
    play_update,
    potential_output,
    preisach_output,
    replay_inputs,
)
from .inversion import (
    InversionProblem,
    invert_step,
    invert_trajectory,
    lipschitz_bound_prop3,
    lipschitz_bound_theorem1,
)

__version__ = "0.1.0"
