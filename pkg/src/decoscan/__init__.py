"""Tunable collisional decoherence of two-state superpositions in an
ultracold buffer gas: coefficient evaluation, field scans, coherence
evolution, and recovery of complex scattering lengths from measured
decoherence rates."""

from .constants import BOHR_RADIUS, BOLTZMANN, HBAR
from .core import GasParameters, UnitContext, build_gas_parameters, convert_length
from .decoherence import (
    CoherenceTrajectory,
    DecoherenceCoefficients,
    coefficients,
    decoherence_rate,
    decoherence_rate_t0,
    eta_polynomial,
    eta_series,
    first_order_rate_magnitude,
    population_loss_rate,
    population_series,
    rate_polynomial,
    rate_prefactor,
    rho_offdiag_series,
    trajectory,
    validity_window,
)
from .errors import (
    AccuracyError,
    BracketError,
    ConfigError,
    DecoscanError,
    DomainError,
    GridError,
    MeasurementError,
    NumericalError,
    SingularityError,
    UnitError,
)
from .fieldscan import (
    ScanResult,
    ScanRow,
    SkippedPoint,
    SuppressionWindow,
    dynamic_range,
    locate_suppression_windows,
    rate_at,
    refine_minimum,
    scan,
)
from .invert import (
    BranchSeries,
    InversionResult,
    RateMeasurementSeries,
    beta_from_decay,
    path_cost,
    select_branch_flat,
    select_branch_smooth,
    synth_measurements,
    two_branches,
)
from .numerov import (
    NumerovConfig,
    RadialPotential,
    analytic_square_well,
    default_config,
    extract_scattering_length,
    solve_swave,
    well_depth_for,
)
from .scattering import (
    AmplitudeExpansion,
    ComplexScatteringLength,
    ResonanceTerm,
    StateScatteringModel,
    amplitude,
    evaluate_model,
    low_momentum_expansion,
)

__version__ = "0.1.0"
