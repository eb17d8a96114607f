"""Fits of the TLS/quasiparticle loss models to extracted quality factors.

``fit_tls_power`` extracts (delta0, F*delta0_TLS, n_c, beta) from a
Q_i-versus-photon-number scan at fixed temperature; ``fit_temperature``
jointly fits Q_i(T) and the fractional frequency shift with the TLS
amplitude and the critical temperature shared between the two datasets.

Q_i spans decades with multiplicative scatter, so Q_i data enter as
logarithmic residuals; frequency-shift data enter linearly.  Each dataset
is weighted by a robust second-difference noise estimate.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import IllConditionedWarning, InvalidParameterError
from .film import LossModelParams, freq_shift_terms, gap_energy, loss_budget
from .leastsq import FitConfig, FitResult, least_squares, resolve_bounds

#: Default TLS saturation exponent reported for this family of films.
DEFAULT_BETA = 0.2

# Gap placeholder for TLS-only evaluations where the quasiparticle term is
# excluded anyway (at fixed temperature it is a constant absorbed in delta0).
_DUMMY_GAP = 1e-22

_TINY_DELTA = 1e-30


def _as_xy(points, name):
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InvalidParameterError(f"{name} must be a sequence of (x, y) pairs")
    if not np.all(np.isfinite(arr)):
        raise InvalidParameterError(f"{name} contains non-finite values")
    order = np.argsort(arr[:, 0], kind="stable")
    return arr[order, 0], arr[order, 1]


def _second_diff_sigma(y, floor):
    if y.size < 4:
        return max(floor, 1e-3 * (np.max(np.abs(y)) + floor))
    s = 1.4826 * np.median(np.abs(np.diff(y, n=2))) / np.sqrt(6.0)
    return max(float(s), floor)


def _tls_delta(n_ph, t, f_r, delta0, f_delta, n_c, beta):
    lp = LossModelParams(
        delta0=delta0, f_delta_tls=f_delta, n_c=n_c, beta=beta, gap=_DUMMY_GAP
    )
    residual, tls, _ = loss_budget(n_ph, t, f_r, lp)
    return residual + tls


@dataclass
class TlsPowerFit:
    """Free-beta and fixed-beta variants of the TLS power fit."""

    result: FitResult
    fixed_beta_result: FitResult
    beta_fixed_value: float
    ill_conditioned: bool
    temperature_k: float
    f_r_hz: float

    @property
    def delta0(self):
        return self.result.value("delta0")

    @property
    def f_delta_tls(self):
        return self.result.value("f_delta_tls")

    @property
    def n_c(self):
        return self.result.value("n_c")

    @property
    def beta(self):
        return self.result.value("beta")


def _tls_linear_seed(n, delta_data, t, f_r, n_c, beta):
    """Least-squares (delta0, f_delta) at fixed (n_c, beta), clipped to >= 0."""
    basis = _tls_delta(n, t, f_r, 0.0, 1.0, n_c, beta)
    a = np.column_stack([np.ones_like(n), basis])
    w = 1.0 / np.maximum(delta_data, _TINY_DELTA)  # ~ log-space weighting
    coef, *_ = np.linalg.lstsq(a * w[:, None], delta_data * w, rcond=None)
    d0 = max(float(coef[0]), 0.0)
    f_delta = max(float(coef[1]), 1e-12)
    cost = float(
        np.sum(
            (
                np.log(np.maximum(d0 + f_delta * basis, _TINY_DELTA))
                - np.log(delta_data)
            )
            ** 2
        )
    )
    return d0, f_delta, cost


def _run_tls_fit(n, delta_data, t, f_r, beta_fixed, cfg):
    beta_grid = (
        [beta_fixed]
        if beta_fixed is not None
        else list(np.linspace(0.05, 0.7, 14))
    )
    nc_grid = np.geomspace(max(n.min() / 30.0, 1e-6), n.max() * 30.0, 25)
    best = None
    for beta in beta_grid:
        for n_c in nc_grid:
            d0, f_delta, cost = _tls_linear_seed(n, delta_data, t, f_r, n_c, beta)
            if best is None or cost < best[0]:
                best = (cost, d0, f_delta, n_c, beta)
    _, d0, f_delta, n_c, beta = best

    log_data = np.log(delta_data)
    if beta_fixed is None:
        names = ("delta0", "f_delta_tls", "n_c", "beta")

        def residual(p):
            model = _tls_delta(n, t, f_r, p[0], p[1], p[2], p[3])
            return np.log(np.maximum(model, _TINY_DELTA)) - log_data

        init = np.array([d0, f_delta, n_c, beta])
        defaults = {
            "delta0": (0.0, np.inf),
            "f_delta_tls": (0.0, np.inf),
            "n_c": (1e-6, 1e12),
            "beta": (0.02, 1.0),
        }
        x_scale = np.array([max(d0, 1e-8), max(f_delta, 1e-8), max(n_c, 1.0), 0.2])
    else:
        names = ("delta0", "f_delta_tls", "n_c")

        def residual(p):
            model = _tls_delta(n, t, f_r, p[0], p[1], p[2], beta_fixed)
            return np.log(np.maximum(model, _TINY_DELTA)) - log_data

        init = np.array([d0, f_delta, n_c])
        defaults = {
            "delta0": (0.0, np.inf),
            "f_delta_tls": (0.0, np.inf),
            "n_c": (1e-6, 1e12),
        }
        x_scale = np.array([max(d0, 1e-8), max(f_delta, 1e-8), max(n_c, 1.0)])
    bounds = resolve_bounds(list(names), defaults, cfg)
    return least_squares(
        residual, init, cfg, bounds=bounds, x_scale=x_scale, param_names=names
    )


def fit_tls_power(qi_points, t, f_r, cfg: FitConfig | None = None,
                  beta_fixed=DEFAULT_BETA) -> TlsPowerFit:
    """Fit the saturable TLS loss model to (n_ph, Q_i) points at fixed T.

    Needs at least 6 points; a photon-number dynamic range below three
    decades is flagged (and warned) as ill-conditioned.  The quasiparticle
    term is constant at fixed temperature and is absorbed into ``delta0``.
    Returns both the free-beta fit and the fixed-beta variant
    (``beta_fixed``, 0.2 by default).
    """
    cfg = cfg or FitConfig()
    n, qi = _as_xy(qi_points, "qi_points")
    if n.size < 6:
        raise InvalidParameterError("TLS power fit needs >= 6 (n_ph, Q_i) points")
    if np.any(n <= 0) or np.any(qi <= 0):
        raise InvalidParameterError("photon numbers and Q_i must be positive")
    decades = np.log10(n.max() / n.min())
    ill = bool(decades < 3.0)
    if ill:
        warnings.warn(
            f"photon-number range spans only {decades:.1f} decades (< 3); "
            "TLS parameters may be degenerate",
            IllConditionedWarning,
            stacklevel=2,
        )
    delta_data = 1.0 / qi
    free = _run_tls_fit(n, delta_data, t, f_r, None, cfg)
    fixed = _run_tls_fit(n, delta_data, t, f_r, beta_fixed, cfg)
    free.ill_conditioned = ill
    fixed.ill_conditioned = ill
    return TlsPowerFit(
        result=free,
        fixed_beta_result=fixed,
        beta_fixed_value=beta_fixed,
        ill_conditioned=ill,
        temperature_k=t,
        f_r_hz=f_r,
    )


@dataclass
class TemperatureFitResult:
    """Joint temperature fit with (n_c, beta) frozen from the power fit.

    Parameters that a missing dataset leaves unconstrained are frozen (NaN
    stderr) and the fit is flagged via ``single_dataset``.
    """

    fit: FitResult
    delta0: float
    f_delta_tls: float
    t_c: float
    lk_shift_coeff: float
    frozen: dict = field(default_factory=dict)
    single_dataset: str | None = None
    ill_conditioned: bool = False

    def stderr_of(self, name):
        if name in self.fit.param_names:
            return self.fit.error(name)
        return np.nan

    @property
    def loss_params(self) -> LossModelParams:
        return LossModelParams(
            delta0=self.delta0,
            f_delta_tls=self.f_delta_tls,
            n_c=self.frozen["n_c"],
            beta=self.frozen["beta"],
            gap=gap_energy(self.t_c),
            alpha_k=self.frozen.get("alpha_k", 1.0),
            lk_shift_coeff=self.lk_shift_coeff,
        )


def _temperature_model(t_qi, t_df, f_r, n_ph, n_c, beta, alpha_k,
                       delta0, f_delta, t_c, c_k):
    lp = LossModelParams(
        delta0=delta0,
        f_delta_tls=f_delta,
        n_c=n_c,
        beta=beta,
        gap=gap_energy(t_c),
        alpha_k=alpha_k,
        lk_shift_coeff=c_k,
    )
    out = []
    if t_qi is not None:
        residual, tls, qp = loss_budget(n_ph, t_qi, f_r, lp)
        out.append(residual + tls + qp)
    else:
        out.append(None)
    if t_df is not None:
        tls_df, kin_df = freq_shift_terms(t_df, f_r, lp)
        out.append(tls_df + kin_df)
    else:
        out.append(None)
    return out


def fit_temperature(qi_vs_t, df_vs_t, f_r, n_ph, n_c, beta,
                    cfg: FitConfig | None = None, alpha_k=1.0) -> TemperatureFitResult:
    """Joint fit of Q_i(T) and delta_f/f_r(T) at fixed photon number.

    Free parameters: (delta0, f_delta_tls, t_c, lk_shift_coeff), with
    ``f_delta_tls`` and ``t_c`` shared between the datasets; ``n_c`` and
    ``beta`` come frozen from the power-scan fit.  With only one dataset
    supplied the fit falls back to the parameters that dataset can
    constrain and flags the rest as frozen.
    """
    cfg = cfg or FitConfig()
    have_qi = qi_vs_t is not None and len(qi_vs_t) > 0
    have_df = df_vs_t is not None and len(df_vs_t) > 0
    if not (have_qi or have_df):
        raise InvalidParameterError("at least one dataset is required")

    t_qi = delta_data = t_df = df_data = None
    w_qi = w_df = 1.0
    if have_qi:
        t_qi, qi = _as_xy(qi_vs_t, "qi_vs_t")
        if np.any(t_qi <= 0) or np.any(qi <= 0):
            raise InvalidParameterError("temperatures and Q_i must be positive")
        delta_data = 1.0 / qi
        w_qi = 1.0 / _second_diff_sigma(np.log(delta_data), 1e-6)
    if have_df:
        t_df, df_data = _as_xy(df_vs_t, "df_vs_t")
        if np.any(t_df <= 0):
            raise InvalidParameterError("temperatures must be positive")
        w_df = 1.0 / _second_diff_sigma(df_data, 1e-12)

    t_max = max(
        t_qi.max() if have_qi else 0.0, t_df.max() if have_df else 0.0
    )

    # Grid over t_c with a weighted linear solve for the remaining
    # parameters (the model is linear in delta0, f_delta_tls and the
    # kinetic-shift coefficient once t_c is fixed).
    best = None
    for t_c in np.geomspace(t_max * 1.5, t_max * 120.0, 48):
        rows, rhs = [], []
        qp = tls_basis_qi = None
        if have_qi:
            lp = LossModelParams(
                delta0=0.0, f_delta_tls=1.0, n_c=n_c, beta=beta,
                gap=gap_energy(t_c), alpha_k=alpha_k,
            )
            _, tls_basis_qi, qp = loss_budget(n_ph, t_qi, f_r, lp)
            wl = w_qi / np.maximum(delta_data, _TINY_DELTA)
            rows.append(
                np.column_stack(
                    [np.ones_like(t_qi), tls_basis_qi, np.zeros_like(t_qi)]
                )
                * wl[:, None]
            )
            rhs.append((delta_data - qp) * wl)
        if have_df:
            lp = LossModelParams(
                delta0=0.0, f_delta_tls=1.0, n_c=n_c, beta=beta,
                gap=gap_energy(t_c), alpha_k=alpha_k, lk_shift_coeff=1.0,
            )
            tls_basis_df, kin_basis = freq_shift_terms(t_df, f_r, lp)
            rows.append(
                np.column_stack(
                    [np.zeros_like(t_df), tls_basis_df, kin_basis]
                )
                * w_df
            )
            rhs.append(df_data * w_df)
        a = np.vstack(rows)
        b = np.concatenate(rhs)
        coef, *_ = np.linalg.lstsq(a, b, rcond=None)
        d0 = max(float(coef[0]), 0.0)
        f_delta = max(float(coef[1]), 1e-12)
        c_k = max(float(coef[2]), 0.0)
        qi_m, df_m = _temperature_model(
            t_qi, t_df, f_r, n_ph, n_c, beta, alpha_k, d0, f_delta, t_c, c_k
        )
        cost = 0.0
        if have_qi:
            cost += np.sum(
                (
                    w_qi
                    * (
                        np.log(np.maximum(qi_m, _TINY_DELTA))
                        - np.log(delta_data)
                    )
                )
                ** 2
            )
        if have_df:
            cost += np.sum((w_df * (df_m - df_data)) ** 2)
        if best is None or cost < best[0]:
            best = (cost, d0, f_delta, t_c, c_k)
    _, d0_i, f_delta_i, t_c_i, c_k_i = best

    if t_max < 0.08 * t_c_i:
        warnings.warn(
            "temperature range does not reach the quasiparticle-dominated "
            f"regime (max T = {t_max:.3g} K < 0.08 * Tc estimate); "
            "t_c is weakly constrained",
            IllConditionedWarning,
            stacklevel=2,
        )
        ill = True
    else:
        ill = False

    # Decide which parameters the available data can constrain.
    frozen = {"n_c": n_c, "beta": beta, "alpha_k": alpha_k, "n_ph": n_ph}
    if have_qi and have_df:
        names = ("delta0", "f_delta_tls", "t_c", "lk_shift_coeff")
        single = None
    elif have_qi:
        names = ("delta0", "f_delta_tls", "t_c")
        frozen["lk_shift_coeff"] = 0.0
        c_k_i = 0.0
        single = "qi"
    else:
        names = ("f_delta_tls", "lk_shift_coeff")
        frozen["delta0"] = 0.0
        frozen["t_c"] = t_c_i  # degenerate with the coefficient in df-only data
        d0_i = 0.0
        single = "df"
        ill = True

    full = {"delta0": d0_i, "f_delta_tls": f_delta_i, "t_c": t_c_i,
            "lk_shift_coeff": c_k_i}

    def residual(p):
        vals = dict(full)
        vals.update(dict(zip(names, p)))
        qi_m, df_m = _temperature_model(
            t_qi, t_df, f_r, n_ph, n_c, beta, alpha_k,
            vals["delta0"], vals["f_delta_tls"], vals["t_c"],
            vals["lk_shift_coeff"],
        )
        parts = []
        if have_qi:
            parts.append(
                w_qi
                * (np.log(np.maximum(qi_m, _TINY_DELTA)) - np.log(delta_data))
            )
        if have_df:
            parts.append(w_df * (df_m - df_data))
        return np.concatenate(parts)

    defaults = {
        "delta0": (0.0, np.inf),
        "f_delta_tls": (0.0, np.inf),
        "t_c": (0.5 * t_max + 1e-3, 1e4),
        "lk_shift_coeff": (0.0, np.inf),
    }
    scales = {
        "delta0": max(d0_i, 1e-8),
        "f_delta_tls": max(f_delta_i, 1e-8),
        "t_c": max(t_c_i, 1.0),
        "lk_shift_coeff": max(c_k_i, 0.1),
    }
    bounds = resolve_bounds(list(names), defaults, cfg)
    init = np.array([full[n] for n in names])
    x_scale = np.array([scales[n] for n in names])
    result = least_squares(
        residual, init, cfg, bounds=bounds, x_scale=x_scale, param_names=names
    )
    result.ill_conditioned = ill
    vals = dict(full)
    vals.update(result.values)
    return TemperatureFitResult(
        fit=result,
        delta0=vals["delta0"],
        f_delta_tls=vals["f_delta_tls"],
        t_c=vals["t_c"],
        lk_shift_coeff=vals["lk_shift_coeff"],
        frozen=frozen,
        single_dataset=single,
        ill_conditioned=ill,
    )
