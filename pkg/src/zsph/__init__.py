"""Structure-preserving spectral solver for 2D incompressible flow on the sphere.

The solver evolves an N x N skew-Hermitian, traceless vorticity matrix whose
Lie-Poisson dynamics converge to the Euler equations on the sphere as N grows.
Deterministic (Euler, Navier-Stokes, dissipated-Euler) and transport-noise
stochastic variants share an isospectral midpoint integrator that preserves
the spectrum, and hence every Casimir, to solver tolerance.
"""

from .diagnostics import (
    DiagnosticsSample,
    ScalingNorms,
    casimirs,
    energy,
    enstrophy,
    nide_rates,
    sample_diagnostics,
    scaling_norms,
    spectrum,
    spectrum_drift,
)
from .dynamics import (
    NideOperator,
    NideSpec,
    NoiseGenerators,
    NoiseScaling,
    apply_nide,
    build_nide_operator,
    build_noise_generators,
    build_noise_scaling,
    hamiltonian_rhs,
    viscous_rhs,
)
from .ensemble import (
    EnsembleSummary,
    RunConfig,
    SimulationContext,
    TimeSeries,
    aggregate,
    run_ensemble,
    run_trajectory,
    write_summary_csv,
    write_timeseries_csv,
)
from .errors import (
    AggregationError,
    CorruptCacheError,
    EnsembleError,
    InternalConsistencyError,
    InvalidResolutionError,
    InvalidStepError,
    ResolutionMismatchError,
    ShapeError,
    StepFailureError,
    TruncationOverflowError,
    ZeroMeanViolationError,
    ZsphError,
)
from .fields import (
    GridField,
    load_grid,
    random_initial_condition,
    save_grid,
    synthesize_grid,
)
from .integrators import (
    FixedPointSettings,
    ModelSpec,
    NoiseDraw,
    Stepper,
    sample_noise_draw,
    truncation_bound,
)
from .laplacian import (
    LaplaceFactorization,
    apply_laplacian,
    build_factorization,
    solve_stream,
)
from .quantization import (
    BasisCache,
    BasisElement,
    HarmonicCoefficients,
    Resolution,
    SpinGenerators,
    build_basis,
    build_spin_generators,
    extract,
    load_cache,
    project,
    save_cache,
)

__version__ = "0.1.0"
