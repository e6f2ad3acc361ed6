"""Time-of-arrival distributions for free and scattered quantum wave packets."""

from .asymptotics import (
    TwoPacketParams,
    asym_current,
    asym_interference_current,
    asym_positive_current,
    negative_flux_condition,
    rescale_hbar,
    semiclassical_scan,
)
from .errors import ComputationError, ConfigError, ToaError
from .observables import (
    arrival_amplitude,
    arrival_distribution,
    current_expectation,
    current_series,
    mean_time_ab_operator,
    mean_time_current,
    mean_time_grt_operator,
    mean_time_spectral,
    positive_current_expectation,
    suggest_tau_window,
    total_arrival_probability,
)
from .oscquad import (
    PhaseContext,
    WeightKind,
    choose_grid,
    eval_functional,
    find_stationary_point,
    stationary_phase_value,
)
from .packets import (
    Direction,
    GaussianComponent,
    MomentumAmplitude,
    MomentumGrid,
    PhysicalConstants,
    WavePacketSpec,
    build_amplitude,
    polar_decompose,
    superpose,
)
from .scattering import delta_barrier, free, rectangular_barrier, transmit
from .wigner import wigner_current_check, wigner_function

__version__ = "0.1.0"
