"""Event-triggered backstepping control of the linearized FitzHugh-Nagumo system."""

from .analysis import (
    DwellTimeConstants,
    ModeSpectrum,
    certificate_phi,
    decay_rate_fit,
    dwell_time_bound,
    gronwall_constant,
    instability_check,
    iss_gain,
    mode_spectrum,
    sup_norm_constant,
)
from .discretization import (
    DiscreteSystem,
    Grid,
    build_grid,
    build_system,
    discrete_l2_norm,
    implicit_euler_solve,
)
from .kernel import (
    KernelParams,
    TransformMatrices,
    gain_norm,
    gain_vector,
    inverse_kernel_value,
    kernel_value,
    transform_matrices,
)
from .params import SystemParams
from .simulator import EventLog, Trajectory, deviation, run, sample_initial, trigger_fired

__version__ = "0.1.0"
