"""Pseudo-spectral compressible flow coupled to P1 gray radiation.

Solves the viscous heat-conducting flow equations coupled to the two
radiation moments on the periodic torus, in both the finite-eps form
(eps = reciprocal light speed) and its relaxation limit, and ships a
convergence harness that measures the O(eps) approach of one to the
other. A discrete-ordinates gray-transport module validates the
two-moment closure the solver rests on.
"""

from .analysis import (
    EnergyRecord,
    ErrorFields,
    RateFit,
    energy,
    error_fields,
    fit_rate,
    gamma_bound_check,
    hypothesis_deviation,
    well_prepared_init,
)
from .config import RunConfig, load_config
from .errors import (
    BlowUp,
    ConfigError,
    DegenerateFit,
    NonPositiveState,
    NotInP1Subspace,
    ParseError,
    PositivityLost,
    RadHydroError,
    TimeMismatch,
    ValidationError,
)
from .fluid import (
    FluidParams,
    FluidState,
    dissipation,
    fluid_rhs_eps,
    fluid_rhs_limit,
    strain,
    viscous_stress,
)
from .kinetic import (
    KineticField,
    OrdinateSet,
    kinetic_rhs,
    make_ordinates,
    moment_system_check,
    moments,
    p1_projection_residual,
)
from .radiation import (
    RadiationMoments,
    limit_I0,
    limit_closure_residual,
    limit_q,
    radiation_rhs,
)
from .runner import RunSummary, emit_series, emit_summary, run
from .spectral import (
    Grid,
    SpectralField,
    VectorField,
    dealias,
    div,
    grad,
    helmholtz_inverse,
    l2_inner,
    laplacian,
    sobolev_norm,
)
from .stepping import (
    EpsState,
    LimitState,
    StepControl,
    cfl_dt,
    radiation_exact_substep,
    step_eps,
    step_limit,
)

__version__ = "0.1.0"
