"""Scikit-learn-style estimator facade over the fitting routines.

These wrappers follow the fit/predict convention with trailing-underscore
fitted attributes and ``get_params``/``set_params`` via
:class:`sklearn.base.BaseEstimator`, so resonator fits compose with generic
model-selection and pipeline tooling.  All estimator inputs and fitted
attributes are Hz-denominated; the angular-rate conversion happens here.
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .baseline import normalize_baseline
from .data import TWO_PI, ComplexTrace, PowerSweep
from .leastsq import FitConfig
from .lkest import fit_hyperbola, invert_frequency
from .loss_fit import DEFAULT_BETA, fit_temperature, fit_tls_power
from .model import KerrResonatorParams, kerr_response, linear_s21
from .trace_fit import fit_global_power, fit_single_trace
from .validation import as_complex_array, as_float_array, check_same_length


def _require_fitted(estimator, attr):
    if not hasattr(estimator, attr):
        raise NotFittedError(
            f"{type(estimator).__name__} must be fitted before this call"
        )


class HangerResonatorModel(BaseEstimator):
    """Linear hanger resonator fitted to one complex trace.

    Parameters
    ----------
    normalize : bool
        Remove the transmission baseline before fitting (default True).
    config : FitConfig or None
        Optimizer settings.

    Attributes (after fit)
    ----------------------
    f0_hz_, kappa_hz_, gamma_hz_, phi_rad_ : float
        Fitted resonator parameters.
    q_internal_, q_coupling_ : float
    baseline_ : BaselineEnv or None
    result_ : FitResult
    """

    def __init__(self, normalize=True, config=None):
        self.normalize = normalize
        self.config = config

    def fit(self, freq_hz, s21, power_w=None):
        freq_hz = as_float_array(freq_hz, "freq_hz")
        s21 = as_complex_array(s21, "s21")
        check_same_length(freq_hz, s21, "freq_hz", "s21")
        trace = ComplexTrace(omega=TWO_PI * freq_hz, s21=s21, power_w=power_w)
        if self.normalize:
            trace, env = normalize_baseline(trace)
            self.baseline_ = env
        else:
            self.baseline_ = None
        result = fit_single_trace(trace, self.config or FitConfig())
        self.result_ = result
        self.f0_hz_ = result.value("omega0") / TWO_PI
        self.kappa_hz_ = result.value("kappa") / TWO_PI
        self.gamma_hz_ = result.value("gamma") / TWO_PI
        self.phi_rad_ = result.value("phi")
        self.q_coupling_ = self.f0_hz_ / self.kappa_hz_
        self.q_internal_ = (
            self.f0_hz_ / self.gamma_hz_ if self.gamma_hz_ > 0 else np.inf
        )
        return self

    def predict(self, freq_hz):
        """Baseline-free model S21 on a frequency grid (Hz)."""
        _require_fitted(self, "result_")
        omega = TWO_PI * as_float_array(freq_hz, "freq_hz")
        return linear_s21(
            omega,
            TWO_PI * self.f0_hz_,
            TWO_PI * self.kappa_hz_,
            TWO_PI * self.gamma_hz_,
            self.phi_rad_,
        )


class KerrPowerSweepModel(BaseEstimator):
    """Global Kerr fit of a multi-power sweep (shared f0/kappa/kerr/phi).

    Attributes (after fit): ``f0_hz_``, ``kappa_hz_``, ``kerr_hz_``,
    ``phi_rad_``, per-power ``gamma_hz_`` and ``n_ph_`` arrays, and the
    full :class:`kinres.trace_fit.GlobalFitResult` as ``result_``.
    """

    def __init__(self, normalize=True, config=None):
        self.normalize = normalize
        self.config = config

    def fit(self, sweep: PowerSweep):
        traces = sweep.traces
        if self.normalize:
            traces = tuple(normalize_baseline(t)[0] for t in traces)
        result = fit_global_power(
            PowerSweep(traces=traces, device_id=sweep.device_id),
            self.config or FitConfig(),
        )
        self.result_ = result
        self.f0_hz_ = result.omega0 / TWO_PI
        self.kappa_hz_ = result.kappa / TWO_PI
        self.kerr_hz_ = result.kerr / TWO_PI
        self.phi_rad_ = result.phi
        self.gamma_hz_ = result.gammas / TWO_PI
        self.n_ph_ = result.n_ph
        self.qi_ = result.qi_per_power
        return self

    def predict(self, freq_hz, power_w, power_index=0, direction="up"):
        """Model S21 at a drive power, using the fitted shared parameters."""
        _require_fitted(self, "result_")
        params = KerrResonatorParams(
            omega0=TWO_PI * self.f0_hz_,
            kappa=TWO_PI * self.kappa_hz_,
            gamma=TWO_PI * float(self.gamma_hz_[power_index]),
            kerr=TWO_PI * self.kerr_hz_,
            phi=self.phi_rad_,
        )
        omega = TWO_PI * as_float_array(freq_hz, "freq_hz")
        s21, _, _, _ = kerr_response(params, omega, power_w, direction)
        return s21


class TlsLossModel(BaseEstimator):
    """Saturable TLS loss model fitted to Q_i versus photon number.

    ``beta=None`` lets the saturation exponent float; a number freezes it.
    Fitted attributes: ``delta0_``, ``f_delta_tls_``, ``n_c_``, ``beta_``.
    """

    def __init__(self, temperature_k=0.015, fr_hz=5e9, beta=None, config=None):
        self.temperature_k = temperature_k
        self.fr_hz = fr_hz
        self.beta = beta
        self.config = config

    def fit(self, n_ph, qi):
        n_ph = as_float_array(n_ph, "n_ph")
        qi = as_float_array(qi, "qi")
        check_same_length(n_ph, qi, "n_ph", "qi")
        fit = fit_tls_power(
            list(zip(n_ph, qi)),
            self.temperature_k,
            self.fr_hz,
            self.config or FitConfig(),
            beta_fixed=self.beta if self.beta is not None else DEFAULT_BETA,
        )
        self.result_ = fit
        chosen = fit.result if self.beta is None else fit.fixed_beta_result
        self.delta0_ = chosen.value("delta0")
        self.f_delta_tls_ = chosen.value("f_delta_tls")
        self.n_c_ = chosen.value("n_c")
        self.beta_ = (
            chosen.value("beta") if self.beta is None else float(self.beta)
        )
        return self

    def predict(self, n_ph):
        """Model Q_i on a photon-number grid."""
        _require_fitted(self, "result_")
        from .loss_fit import _tls_delta

        n_ph = as_float_array(n_ph, "n_ph")
        delta = _tls_delta(
            n_ph, self.temperature_k, self.fr_hz,
            self.delta0_, self.f_delta_tls_, self.n_c_, self.beta_,
        )
        return 1.0 / delta


class TemperatureLossModel(BaseEstimator):
    """Joint Q_i(T) / frequency-shift(T) model at fixed photon number.

    ``n_c`` and ``beta`` come frozen from a power-scan fit.  Fitted
    attributes: ``t_c_k_``, ``f_delta_tls_``, ``delta0_``,
    ``lk_shift_coeff_``.
    """

    def __init__(self, fr_hz=5e9, n_ph=50.0, n_c=10.0, beta=DEFAULT_BETA,
                 alpha_k=1.0, config=None):
        self.fr_hz = fr_hz
        self.n_ph = n_ph
        self.n_c = n_c
        self.beta = beta
        self.alpha_k = alpha_k
        self.config = config

    def fit(self, t_k, qi=None, df_over_f=None):
        t_k = as_float_array(t_k, "t_k")
        qi_pairs = None
        df_pairs = None
        if qi is not None:
            qi = as_float_array(qi, "qi")
            check_same_length(t_k, qi, "t_k", "qi")
            qi_pairs = list(zip(t_k, qi))
        if df_over_f is not None:
            df_over_f = as_float_array(df_over_f, "df_over_f")
            check_same_length(t_k, df_over_f, "t_k", "df_over_f")
            df_pairs = list(zip(t_k, df_over_f))
        fit = fit_temperature(
            qi_pairs, df_pairs, self.fr_hz, self.n_ph, self.n_c, self.beta,
            self.config or FitConfig(), alpha_k=self.alpha_k,
        )
        self.result_ = fit
        self.t_c_k_ = fit.t_c
        self.f_delta_tls_ = fit.f_delta_tls
        self.delta0_ = fit.delta0
        self.lk_shift_coeff_ = fit.lk_shift_coeff
        return self

    def predict(self, t_k):
        """(Q_i, delta_f/f_r) model curves on a temperature grid."""
        _require_fitted(self, "result_")
        from .film import freq_shift_model, qi_model

        t_k = as_float_array(t_k, "t_k")
        lp = self.result_.loss_params
        return qi_model(self.n_ph, t_k, self.fr_hz, lp), freq_shift_model(
            t_k, self.fr_hz, lp
        )


class SheetInductanceModel(BaseEstimator):
    """Hyperbola ``f = scale/sqrt(ls + offset)`` through simulated designs.

    ``fit(ls_h_per_sq, f0_hz)`` learns the curve; ``predict(f0_hz)`` maps
    measured resonant frequencies back to sheet inductances.
    """

    def __init__(self, config=None):
        self.config = config

    def fit(self, ls_h_per_sq, f0_hz):
        ls = as_float_array(ls_h_per_sq, "ls_h_per_sq")
        f0 = as_float_array(f0_hz, "f0_hz")
        check_same_length(ls, f0, "ls_h_per_sq", "f0_hz")
        self.result_ = fit_hyperbola(list(zip(ls, f0)), self.config)
        self.scale_ = self.result_.scale
        self.offset_ = self.result_.offset
        self.rms_hz_ = self.result_.rms
        return self

    def predict(self, f0_hz):
        _require_fitted(self, "result_")
        f0 = np.atleast_1d(as_float_array(f0_hz, "f0_hz"))
        out = np.array([invert_frequency(self.result_, f) for f in f0])
        return out if np.ndim(f0_hz) else float(out[0])
