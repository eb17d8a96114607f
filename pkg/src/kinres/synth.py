"""Synthetic dataset generators with known ground truth.

Every generator is deterministic given its seed, and the emitted objects
round-trip through the file formats in :mod:`kinres.fileio`.  Measurement
noise is additive complex Gaussian, independent per point, with ``sigma``
the standard deviation of each quadrature.
"""

from dataclasses import dataclass

import numpy as np

from .data import BaselineEnv, ComplexTrace, PowerSweep
from .errors import InvalidParameterError
from .film import LossModelParams, freq_shift_model, qi_model
from .model import KerrResonatorParams, forward_trace
from .trace_fit import DEFAULT_ATTENUATION_DB, calibrate_power
from .validation import as_float_array, check_non_negative


@dataclass(frozen=True)
class NoiseSpec:
    """Additive complex Gaussian noise: per-quadrature std and RNG seed."""

    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        check_non_negative(self.sigma, "sigma")


@dataclass(frozen=True)
class SweepPlan:
    """Instrument-side plan of a power sweep.

    ``powers_dbm`` are instrument output powers; ``attenuation_db`` maps
    them to the device plane.  ``freq_span`` is (start_hz, stop_hz, points).
    """

    powers_dbm: tuple[float, ...]
    freq_span: tuple[float, float, int]
    attenuation_db: float = DEFAULT_ATTENUATION_DB
    direction: str = "up"

    def __post_init__(self):
        object.__setattr__(self, "powers_dbm", tuple(self.powers_dbm))
        start, stop, points = self.freq_span
        if points < 50:
            raise InvalidParameterError("freq_span must have >= 50 points")
        if not start < stop:
            raise InvalidParameterError("freq_span start must be below stop")

    @property
    def freqs_hz(self):
        start, stop, points = self.freq_span
        return np.linspace(start, stop, int(points))

    def shifted(self, df_hz):
        start, stop, points = self.freq_span
        return SweepPlan(
            powers_dbm=self.powers_dbm,
            freq_span=(start + df_hz, stop + df_hz, points),
            attenuation_db=self.attenuation_db,
            direction=self.direction,
        )


def generate_power_sweep(truth: KerrResonatorParams, env: BaselineEnv | None,
                         plan: SweepPlan, noise: NoiseSpec = NoiseSpec(),
                         device_id=None, temperature_k=None) -> PowerSweep:
    """Forward-model traces at each planned power, plus optional noise.

    The sweep metadata records the truth, plan and seed so round-trip tests
    can compare against the generator input.
    """
    rng = np.random.default_rng(noise.seed)
    freqs = plan.freqs_hz
    traces = []
    for p_dbm in plan.powers_dbm:
        power = calibrate_power(p_dbm, plan.attenuation_db)
        clean = forward_trace(
            truth,
            env,
            freqs,
            power.watts,
            direction=plan.direction,
            temperature_k=temperature_k,
            device_id=device_id,
        )
        s21 = clean.s21
        if noise.sigma > 0:
            s21 = s21 + noise.sigma * (
                rng.standard_normal(freqs.size)
                + 1j * rng.standard_normal(freqs.size)
            )
        traces.append(
            clean.replace(
                s21=s21, power_dbm=p_dbm, attenuation_db=plan.attenuation_db
            )
        )
    return PowerSweep(
        traces=tuple(traces),
        device_id=device_id,
        meta={"truth": truth, "plan": plan, "noise": noise},
    )


def generate_qi_curve(p: LossModelParams, t, f_r, n_grid, scatter=0.0, seed=0):
    """(n_ph, Q_i) pairs from the loss model on a photon-number grid.

    ``scatter`` is the sigma of an optional multiplicative log-normal factor.
    """
    n_grid = as_float_array(n_grid, "n_grid")
    if np.any(np.diff(n_grid) <= 0) or np.any(n_grid <= 0):
        raise InvalidParameterError("n_grid must be positive and ascending")
    qi = qi_model(n_grid, t, f_r, p)
    if scatter > 0:
        rng = np.random.default_rng(seed)
        qi = qi * np.exp(scatter * rng.standard_normal(n_grid.size))
    return [(float(n), float(q)) for n, q in zip(n_grid, qi)]


def generate_temperature_sweep(p: LossModelParams, f_r, t_grid, n_ph=50.0,
                               qi_scatter=0.0, df_sigma=0.0, seed=0):
    """Exact (T, Q_i) and (T, delta_f/f_r) lists on a temperature grid.

    ``qi_scatter`` applies multiplicative log-normal scatter to Q_i and
    ``df_sigma`` additive Gaussian noise to the fractional shift; both are
    zero by default (exact model values).
    """
    t_grid = as_float_array(t_grid, "t_grid")
    if np.any(np.diff(t_grid) <= 0) or np.any(t_grid <= 0):
        raise InvalidParameterError("t_grid must be positive and ascending")
    qi = qi_model(n_ph, t_grid, f_r, p)
    df = freq_shift_model(t_grid, f_r, p)
    if qi_scatter > 0 or df_sigma > 0:
        rng = np.random.default_rng(seed)
        if qi_scatter > 0:
            qi = qi * np.exp(qi_scatter * rng.standard_normal(t_grid.size))
        if df_sigma > 0:
            df = df + df_sigma * rng.standard_normal(t_grid.size)
    qi_list = [(float(t), float(q)) for t, q in zip(t_grid, qi)]
    df_list = [(float(t), float(d)) for t, d in zip(t_grid, df)]
    return qi_list, df_list


def generate_ageing_pair(truth: KerrResonatorParams, df_age_hz, qi_scale,
                         env: BaselineEnv | None, plan: SweepPlan,
                         noise: NoiseSpec = NoiseSpec(), device_id=None):
    """(fresh, aged) power sweeps differing by the two ageing observables.

    The aged resonance sits ``df_age_hz`` lower and its internal loss is
    scaled by ``qi_scale``; the aged sweep window follows the resonance, as
    a re-scan would.  Both sweeps use the same noise seed, so a zero shift
    with unit loss scale reproduces the fresh dataset exactly.
    """
    check_non_negative(df_age_hz, "df_age_hz")
    if qi_scale <= 0:
        raise InvalidParameterError("qi_scale must be positive")
    before = generate_power_sweep(truth, env, plan, noise, device_id=device_id)
    aged = KerrResonatorParams(
        omega0=truth.omega0 - 2.0 * np.pi * df_age_hz,
        kappa=truth.kappa,
        gamma=truth.gamma * qi_scale,
        kerr=truth.kerr,
        phi=truth.phi,
    )
    after = generate_power_sweep(
        aged, env, plan.shifted(-df_age_hz), noise, device_id=device_id
    )
    return before, after
