"""decaylab: measure algebraic decay rates of dissipative flows on big boxes.

The package builds periodic pseudo-spectral surrogates of whole-space decay
problems: it estimates the low-frequency decay character of initial data,
evolves linear and nonlinear dissipative equations, fits the algebraic decay
of Sobolev norms over the window where the box is trustworthy, and checks
the measured exponents against the proven bounds.
"""

__version__ = "0.1.0"

from .grid import SpectralGrid, make_grid
from .field import (
    SpectralField,
    dealias,
    from_physical,
    hermitian_defect,
    physical_energy,
    shell_mass,
    sobolev_norm_sq,
    to_physical,
)
from .dclb import read_field, write_field
from .symbols import (
    CompressibleStokes,
    DissipativeSymbol,
    FractionalLaplacian,
    dissipativity_report,
    propagator,
    propagator_oracle,
    symbol_matrix,
)
from .character import (
    Classification,
    DecayCharacterEstimate,
    DecayIndicatorCurve,
    ResolutionError,
    ShiftConsistencyReport,
    estimate_character,
    estimate_field_character,
    indicator_curve,
    max_fit_radius,
    shift_consistency,
)
from .initial_data import (
    Annulus,
    DatumSpec,
    Gaussian,
    PowerLaw,
    RandomPhasePowerLaw,
    generate,
    solenoidal_project,
)
from .series import NormTimeSeries, geometric_sample_times, read_series_csv, write_series_csv
from .linear import (
    DecaySpeed,
    LinearDecayPrediction,
    dissipation_step_defects,
    evolve_linear,
    linear_norm_series,
    modewise_lower_bound_defect,
    predicted_linear_exponent,
)
from .rates import (
    BoundCheck,
    BoundPrediction,
    FitError,
    HypothesisError,
    Model,
    RateFit,
    WindowError,
    box_validity_window,
    check_bounds,
    fit_power_law,
    predict_bounds,
)
from .solvers import (
    BlowupError,
    CFLError,
    CompressibleConfig,
    QGConfig,
    RunResult,
    compressible_nonlinear,
    nonlinear_orthogonality_defect,
    qg_energy_law_residual,
    qg_nonlinear,
    riesz_velocity,
    run_simulation,
    step_exponential,
)
from .experiment import (
    ConfigError,
    ExperimentBlowup,
    ExperimentConfig,
    RunRecord,
    read_config,
    run_experiment,
    run_sweep,
    write_config,
)
from .kernels import BACKEND as KERNEL_BACKEND

__all__ = [name for name in dir() if not name.startswith("_")]
