"""Superintegrable geodesic and central-potential dynamics on 3D spaces of
non-constant curvature built from a deformed sl(2) Poisson coalgebra."""

from .coalgebra import (
    DeformedGenerators,
    bracket_residuals,
    casimir_three,
    casimir_two,
    casimir_two_lower,
    casimir_values,
    poisson_bracket,
    realize_generators,
)
from .dynamics import (
    HamiltonianSpec,
    RadialProblem,
    Trajectory,
    extra_integral_staeckel,
    flow_derivatives,
    hamiltonian,
    integrals_of_motion,
    integrate,
    spherical_constants,
    spherical_state,
    radial_reduce,
    spherical_counterpart,
)
from .errors import (
    ConfigError,
    DomainError,
    EvaluationError,
    NoBoundRegion,
    NumericalError,
    QuadratureFailure,
    SeriesDivergence,
    SingularityApproach,
    SlzError,
    SpecialFunctionError,
    StepUnderflow,
)
from .geometry import (
    CurvatureReport,
    christoffel_cartesian,
    christoffel_spherical,
    curvature_cartesian,
    curvature_oracle_fd,
    curvature_spherical,
    metric_cartesian,
    metric_spherical,
    to_cartesian,
    to_spherical,
)
from .potentials import (
    GreenFunction,
    IntrinsicPotential,
    green_closed_form,
    green_quadrature,
    intrinsic_potential,
    kepler_coulomb,
    oscillator,
)
from .spaces import ConformalProfile, PhasePointCartesian, PhasePointSpherical, SpaceSpec
from .specfun import incomplete_beta, incomplete_elliptic_e

__version__ = "0.1.0"
