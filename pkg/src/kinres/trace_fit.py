"""Resonator parameter extraction from normalized complex traces.

``fit_single_trace`` fits the linear hanger model to one trace;
``fit_global_power`` fits all traces of a power sweep jointly, sharing
(omega0, kappa, kerr, phi) while the internal loss gamma is free per power
(its power dependence is what the downstream TLS fit consumes).  Real and
imaginary parts enter as separate, uniformly weighted residuals.

Traces are expected baseline-normalized (see
:func:`kinres.baseline.normalize_baseline`).
"""

from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar

from .data import ComplexTrace, PowerSweep
from .errors import InvalidParameterError, NoResonanceError
from .leastsq import FitConfig, FitResult, least_squares, resolve_bounds
from .model import KerrResonatorParams, kerr_from_fit, kerr_response, linear_s21

#: Default total line attenuation between the instrument and the device (dB).
DEFAULT_ATTENUATION_DB = 68.0

#: Default systematic uncertainty of the line calibration (dB).
POWER_SYSTEMATIC_DB = 2.0


@dataclass(frozen=True)
class CalibratedPower:
    """Drive power at the device plane with its systematic calibration band."""

    watts: float
    err_db: float = POWER_SYSTEMATIC_DB

    @property
    def bounds(self):
        """Multiplicative uncertainty interval ``(lo, hi)`` in watts."""
        factor = 10.0 ** (self.err_db / 10.0)
        return (self.watts / factor, self.watts * factor)


def calibrate_power(vna_power_dbm, line_attenuation_db=DEFAULT_ATTENUATION_DB,
                    err_db=POWER_SYSTEMATIC_DB) -> CalibratedPower:
    """Device-plane power from the instrument output power and line attenuation.

    ``P = 10**((vna_power_dbm - line_attenuation_db - 30) / 10)`` watts; the
    result carries the +-``err_db`` systematic band of the line calibration,
    which propagates multiplicatively into photon numbers and the Kerr rate.
    """
    watts = 10.0 ** ((vna_power_dbm - line_attenuation_db - 30.0) / 10.0)
    return CalibratedPower(watts=watts, err_db=err_db)


def _device_power_w(trace: ComplexTrace):
    if trace.power_w is not None:
        return trace.power_w
    if trace.power_dbm is not None:
        atten = (
            trace.attenuation_db
            if trace.attenuation_db is not None
            else DEFAULT_ATTENUATION_DB
        )
        return calibrate_power(trace.power_dbm, atten).watts
    raise InvalidParameterError(
        "trace has neither power_w nor power_dbm; drive power is required"
    )


def _notch_guess(trace: ComplexTrace):
    """(omega0, total_rate, depth, phi) seed from the shape of the notch."""
    mag = np.abs(trace.s21)
    omega = trace.omega
    n_edge = max(3, trace.npoints // 10)
    level = float(np.median(np.concatenate([mag[:n_edge], mag[-n_edge:]])))
    imin = int(np.argmin(mag))
    depth_abs = level - mag[imin]
    if mag[imin] > 0.99 or depth_abs < 0.01:
        raise NoResonanceError(
            f"no notch found (min |S21| = {mag[imin]:.4f}, baseline = {level:.4f})"
        )
    omega0 = omega[imin]

    half = level - 0.5 * depth_abs

    def _crossing(step):
        i = imin
        while 0 < i < trace.npoints - 1 and mag[i] < half:
            i += step
        if mag[i] < half:  # ran off the grid
            return None
        j = i - step
        frac = (half - mag[j]) / (mag[i] - mag[j])
        return omega[j] + frac * (omega[i] - omega[j])

    left = _crossing(-1)
    right = _crossing(+1)
    if left is not None and right is not None:
        width = right - left
    elif left is not None:
        width = 2.0 * (omega0 - left)
    elif right is not None:
        width = 2.0 * (right - omega0)
    else:
        width = (omega[-1] - omega[0]) / 10.0
    width = max(width, 2.0 * (omega[1] - omega[0]))

    ref = level + 0j  # off-resonant point of a normalized trace
    phi = float(np.angle(ref - trace.s21[imin]))
    phi = float(np.clip(phi, -1.4, 1.4))
    depth = abs(ref - trace.s21[imin]) * np.cos(phi) / level
    depth = float(np.clip(depth, 0.01, 0.99))
    return omega0, width, depth, phi


_SINGLE_NAMES = ("omega0", "kappa", "gamma", "phi")


def fit_single_trace(trace: ComplexTrace, cfg: FitConfig | None = None) -> FitResult:
    """Fit (omega0, kappa, gamma, phi) of the linear hanger model to one trace.

    The drive must be in the linear regime (Kerr shift much smaller than the
    linewidth; caller-asserted) and the trace baseline-normalized.  Raises
    :class:`NoResonanceError` when no dip is present.
    """
    cfg = cfg or FitConfig()
    omega0_i, w0, depth, phi_i = _notch_guess(trace)
    center = trace.omega_center
    omega, s21 = trace.omega, trace.s21

    def residual(p):
        model = linear_s21(omega, center + p[0], p[1], p[2], p[3])
        d = model - s21
        return np.concatenate([d.real, d.imag])

    init = np.array([omega0_i - center, depth * w0, (1.0 - depth) * w0, phi_i])
    defaults = {
        "omega0": (omega[0] - center, omega[-1] - center),
        "kappa": (1e-6 * w0, 1e4 * w0),
        "gamma": (0.0, 1e4 * w0),
        "phi": (-1.5, 1.5),
    }
    bounds = resolve_bounds(list(_SINGLE_NAMES), defaults, cfg)
    result = least_squares(
        residual,
        init,
        cfg,
        bounds=bounds,
        x_scale=np.array([w0, w0, w0, 1.0]),
        param_names=_SINGLE_NAMES,
    )
    result.params = result.params.copy()
    result.params[0] += center  # back to absolute omega0; d omega0/d offset = 1
    return result


@dataclass
class GlobalFitResult:
    """Joint multi-power fit: shared (omega0, kappa, kerr, phi), gamma per power.

    ``n_ph`` is the reported photon number |alpha_in~|^2 per power;
    ``n_cavity_peak`` the peak intracavity occupation n * |alpha_in~|^2 on
    the corresponding trace.  ``kerr_sys_band`` is the multiplicative
    systematic interval on ``kerr`` implied by the +-2 dB line-power
    calibration.
    """

    fit: FitResult
    powers_w: np.ndarray
    powers_dbm: np.ndarray
    n_ph: np.ndarray
    n_cavity_peak: np.ndarray
    xi: np.ndarray
    kerr_sys_band: tuple[float, float]
    power_err_db: float = POWER_SYSTEMATIC_DB

    @property
    def omega0(self):
        return self.fit.value("omega0")

    @property
    def kappa(self):
        return self.fit.value("kappa")

    @property
    def kerr(self):
        return self.fit.value("kerr")

    @property
    def phi(self):
        return self.fit.value("phi")

    @property
    def gammas(self):
        return np.array(
            [self.fit.value(n) for n in self.fit.param_names if n.startswith("gamma[")]
        )

    @property
    def gamma_errors(self):
        return np.array(
            [self.fit.error(n) for n in self.fit.param_names if n.startswith("gamma[")]
        )

    @property
    def qi_per_power(self):
        return self.omega0 / self.gammas

    @property
    def converged(self):
        return self.fit.converged

    def resonator_params(self, power_index=0) -> KerrResonatorParams:
        return KerrResonatorParams(
            omega0=self.omega0,
            kappa=self.kappa,
            gamma=float(self.gammas[power_index]),
            kerr=self.kerr,
            phi=self.phi,
        )


def _check_sweep(sweep: PowerSweep):
    if len(sweep) < 3:
        raise InvalidParameterError(
            f"global power fit needs >= 3 powers, got {len(sweep)}"
        )
    ref = sweep.traces[0].omega
    for t in sweep.traces[1:]:
        if t.omega.shape != ref.shape or not np.array_equal(t.omega, ref):
            raise InvalidParameterError(
                "traces of a power sweep must share one frequency grid"
            )
    dips = np.array([t.omega[np.argmin(np.abs(t.s21))] for t in sweep.traces])
    span = ref[-1] - ref[0]
    if dips.max() - dips.min() > 0.5 * span:
        raise InvalidParameterError(
            "notch windows of the sweep traces do not overlap"
        )
    return ref, dips


def fit_global_power(sweep: PowerSweep, cfg: FitConfig | None = None) -> GlobalFitResult:
    """Joint fit of a power sweep; see :class:`GlobalFitResult`.

    The Kerr rate is reported through the reduced-variable identity
    ``kerr = xi*(kappa+gamma)/n_ph`` evaluated at the highest power, which
    is the exact inverse of the model's xi construction.
    """
    cfg = cfg or FitConfig()
    omega, dips = _check_sweep(sweep)
    center = 0.5 * (omega[0] + omega[-1])
    powers = np.array([_device_power_w(t) for t in sweep.traces])
    if np.any(powers <= 0):
        raise InvalidParameterError("all sweep powers must be positive")
    n_traces = len(sweep)

    i_low = int(np.argmin(powers))
    seed_fit = fit_single_trace(sweep.traces[i_low], cfg)
    omega0_i, kappa_i, gamma_i, phi_i = seed_fit.params
    w0 = kappa_i + gamma_i

    # Kerr seed: the dip sits at a detuning of 2*xi, so the dip frequency
    # moves by 2*kerr*n_ph across the sweep.
    nph_est = kappa_i / w0**2 * powers / (hbar * omega0_i)
    slope = np.polynomial.polynomial.polyfit(nph_est, dips, 1)[1]
    kerr_i = 0.5 * slope
    nph_max = max(nph_est.max(), 1.0)
    kerr_scale = max(abs(kerr_i), w0 / (100.0 * nph_max))
    kerr_lim = 10.0 * w0 / nph_max

    names = ["omega0", "kappa", "kerr", "phi"] + [
        f"gamma[{i}]" for i in range(n_traces)
    ]
    s21_data = [t.s21 for t in sweep.traces]
    directions = [t.sweep_direction for t in sweep.traces]

    def residual(p):
        out = []
        for i in range(n_traces):
            params = KerrResonatorParams(
                omega0=center + p[0],
                kappa=p[1],
                gamma=p[4 + i],
                kerr=p[2],
                phi=p[3],
            )
            model, _, _, _ = kerr_response(params, omega, powers[i], directions[i])
            d = model - s21_data[i]
            out.append(d.real)
            out.append(d.imag)
        return np.concatenate(out)

    init = np.concatenate(
        [[omega0_i - center, kappa_i, kerr_i, phi_i], np.full(n_traces, gamma_i)]
    )
    x_scale = np.concatenate([[w0, w0, kerr_scale, 1.0], np.full(n_traces, w0)])
    defaults = {
        "omega0": (omega[0] - center, omega[-1] - center),
        "kappa": (1e-6 * w0, 1e4 * w0),
        "kerr": (-kerr_lim, kerr_lim),
        "phi": (-1.5, 1.5),
    }
    for i in range(n_traces):
        defaults[f"gamma[{i}]"] = (0.0, 1e4 * w0)
    bounds = resolve_bounds(names, defaults, cfg)

    result = least_squares(
        residual, init, cfg, bounds=bounds, x_scale=x_scale, param_names=tuple(names)
    )
    attempt = 0
    rng = np.random.default_rng(cfg.seed)
    while not result.converged and attempt < 2:
        attempt += 1
        jitter = init * (1.0 + 0.02 * rng.standard_normal(init.size))
        retry = least_squares(
            residual, jitter, cfg, bounds=bounds, x_scale=x_scale,
            param_names=tuple(names),
        )
        if retry.cost < result.cost or retry.converged:
            result = retry

    result.params = result.params.copy()
    result.params[0] += center

    omega0, kappa, kerr_direct, phi = result.params[:4]
    gammas = result.params[4:]
    n_ph = kappa / (kappa + gammas) ** 2 * powers / (hbar * omega0)
    xi = n_ph * kerr_direct / (kappa + gammas)
    n_cavity = np.empty(n_traces)
    for i in range(n_traces):
        params = KerrResonatorParams(
            omega0=omega0, kappa=kappa, gamma=gammas[i], kerr=kerr_direct, phi=phi
        )
        _, n_pt, _, _ = kerr_response(params, omega, powers[i], directions[i])
        n_cavity[i] = n_pt.max() * n_ph[i]

    # Report kerr through the fitted-variable identity at the highest power.
    i_hi = int(np.argmax(n_ph))
    kerr = kerr_from_fit(xi[i_hi], kappa, gammas[i_hi], n_ph[i_hi])
    result.params[2] = kerr

    sys_factor = 10.0 ** (POWER_SYSTEMATIC_DB / 10.0)
    band = (kerr * sys_factor, kerr / sys_factor) if kerr < 0 else (
        kerr / sys_factor, kerr * sys_factor
    )
    return GlobalFitResult(
        fit=result,
        powers_w=powers,
        powers_dbm=sweep.powers_dbm,
        n_ph=n_ph,
        n_cavity_peak=n_cavity,
        xi=xi,
        kerr_sys_band=band,
    )
