"""kinres: high-kinetic-inductance superconducting Kerr resonator toolkit.

Forward-models, simulates and fits the microwave response of Kerr
nonlinear hanger resonators, extracts quality factors and the self-Kerr
rate from power sweeps, fits TLS/quasiparticle loss models against power
and temperature scans, and estimates film kinetic inductance from
simulated design points.

Internal convention: rates and frequencies are angular (rad/s); every
user-facing surface (files, CLI, reports, estimators) speaks Hz.
"""

__version__ = "0.1.0"

from .data import BaselineEnv, ComplexTrace, PowerSweep
from .errors import (
    CalibrationError,
    DataFormatError,
    FitDivergenceError,
    InvalidParameterError,
    KinresError,
    NoResonanceError,
)
from .film import (
    BCS_GAP_RATIO,
    FAST_RELAXATION_EXPONENT,
    FilmProperties,
    InductorGeometry,
    LossModelParams,
    freq_shift_model,
    freq_shift_terms,
    gap_energy,
    kerr_scaling,
    lk_bcs,
    lk_current,
    lk_current_weak,
    loss_budget,
    n_qp,
    qi_model,
)
from .leastsq import FitConfig, FitResult, least_squares
from .model import (
    DriveCondition,
    KerrResonatorParams,
    PhotonSolution,
    ReducedDriveVars,
    forward_trace,
    kerr_from_fit,
    multiplex_feedline,
    photon_roots,
    reduced_vars,
    s21_hanger,
    select_photon_branch,
    solve_photon_cubic,
)
from .baseline import estimate_baseline, normalize_baseline
from .trace_fit import (
    CalibratedPower,
    GlobalFitResult,
    calibrate_power,
    fit_global_power,
    fit_single_trace,
)
from .loss_fit import (
    TemperatureFitResult,
    TlsPowerFit,
    fit_temperature,
    fit_tls_power,
)
from .lkest import (
    HyperbolaFit,
    LkComparison,
    SimPoint,
    average_film_lk,
    compare_bcs_vs_resonator,
    fit_hyperbola,
    invert_frequency,
)
from .special import digamma
from .synth import (
    NoiseSpec,
    SweepPlan,
    generate_ageing_pair,
    generate_power_sweep,
    generate_qi_curve,
    generate_temperature_sweep,
)
from .estimators import (
    HangerResonatorModel,
    KerrPowerSweepModel,
    SheetInductanceModel,
    TemperatureLossModel,
    TlsLossModel,
)

__all__ = [
    "__version__",
    # data
    "BaselineEnv", "ComplexTrace", "PowerSweep",
    # errors
    "KinresError", "InvalidParameterError", "DataFormatError",
    "CalibrationError", "NoResonanceError", "FitDivergenceError",
    # film physics
    "BCS_GAP_RATIO", "FAST_RELAXATION_EXPONENT", "FilmProperties",
    "InductorGeometry", "LossModelParams", "gap_energy", "lk_bcs",
    "lk_current", "lk_current_weak", "kerr_scaling", "n_qp", "qi_model",
    "loss_budget", "freq_shift_model", "freq_shift_terms",
    # core model
    "KerrResonatorParams", "DriveCondition", "ReducedDriveVars",
    "PhotonSolution", "reduced_vars", "solve_photon_cubic", "photon_roots",
    "select_photon_branch", "s21_hanger", "forward_trace", "kerr_from_fit",
    "multiplex_feedline",
    # fitting
    "FitConfig", "FitResult", "least_squares", "estimate_baseline",
    "normalize_baseline", "fit_single_trace", "fit_global_power",
    "GlobalFitResult", "calibrate_power", "CalibratedPower",
    "fit_tls_power", "TlsPowerFit", "fit_temperature", "TemperatureFitResult",
    # lk estimation
    "SimPoint", "HyperbolaFit", "fit_hyperbola", "invert_frequency",
    "average_film_lk", "compare_bcs_vs_resonator", "LkComparison",
    # special functions
    "digamma",
    # synth
    "NoiseSpec", "SweepPlan", "generate_power_sweep", "generate_qi_curve",
    "generate_temperature_sweep", "generate_ageing_pair",
    # estimator facade
    "HangerResonatorModel", "KerrPowerSweepModel", "TlsLossModel",
    "TemperatureLossModel", "SheetInductanceModel",
]
