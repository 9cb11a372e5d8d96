"""Intercore spontaneous Raman scattering (ICSRS) in multicore fiber and its
effect on decoy-state BB84 key rates."""

__version__ = "0.1.0"

from .analysis import (
    Comparison,
    FlatCurveError,
    Peak,
    PeakAtBoundaryError,
    Scenario,
    SweepPointError,
    SweepResult,
    SweepSpec,
    SweepVariable,
    compare_srs_icsrs,
    find_forward_peak,
    find_forward_srs_peak,
    find_peak,
    forward_srs_peak_closed_form,
    run_sweep,
)
from .config import ConfigError, ScenarioConfig, load_config, load_recipe
from .dwdm import (
    ChannelPlan,
    ClassicalChannel,
    Direction,
    RamanEfficiencyProfile,
    aggregate_icsrs,
    eta_lookup,
    load_profile,
)
from .fiber import FiberLink, classical_power_at, icxt_power_at, icxt_transfer
from .qkd import (
    DeadLinkError,
    LinkBudget,
    NoiseMode,
    NoSecureKeyError,
    QuantumReceiver,
    binary_entropy,
    max_secure_distance,
    noise_to_click_prob,
    secure_key_rate,
    vacuum_yield,
)
from .quadrature import QuadratureError
from .raman import (
    NoiseDensity,
    Process,
    RamanEfficiency,
    backward_icsrs,
    backward_srs_singlecore,
    f_factor,
    forward_icsrs,
    forward_srs_singlecore,
    g_factor,
    quadrature_oracle,
)
from .units import (
    AttenuationCoeff,
    CouplingCoeff,
    Power,
    Wavelength,
    bandwidth_ghz_to_nm,
    db_per_km_to_linear,
    dbm_to_mw,
)
