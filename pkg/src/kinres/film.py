"""Film-level physics of disordered superconducting resonators.

Covers the BCS kinetic inductance of a thin film, its bias-current
dependence, the resulting self-Kerr scaling law, the thermal quasiparticle
population, and the combined TLS + quasiparticle models for the internal
quality factor and the fractional frequency shift.
"""

from dataclasses import dataclass

import numpy as np
from scipy.constants import h, hbar, k as k_B, pi

from .errors import InvalidParameterError
from .special import digamma
from .validation import check_non_negative, check_positive

#: BCS weak-coupling ratio between the zero-temperature gap and k_B * T_C.
BCS_GAP_RATIO = 1.764

#: Exponent of the fast-relaxation limit of the current dependence of the
#: kinetic inductance of a dirty superconducting nanowire.
FAST_RELAXATION_EXPONENT = 2.21


@dataclass(frozen=True)
class FilmProperties:
    """Measured properties of one deposited film.

    tc: critical temperature (K); r_sq: normal-state sheet resistance
    (ohm/sq); thickness (m); lk0: zero-temperature, zero-current kinetic
    inductance (H/sq); jc: critical current density (A/m^2), 0 if unknown.
    """

    tc: float
    r_sq: float
    thickness: float
    lk0: float
    jc: float = 0.0

    def __post_init__(self):
        check_positive(self.tc, "tc")
        check_positive(self.r_sq, "r_sq")
        check_positive(self.thickness, "thickness")
        check_positive(self.lk0, "lk0")
        check_non_negative(self.jc, "jc")


@dataclass(frozen=True)
class InductorGeometry:
    """Cross-section of the nanowire inductor (width and thickness in m)."""

    width: float
    thickness: float
    n_fr: float = FAST_RELAXATION_EXPONENT

    def __post_init__(self):
        check_positive(self.width, "width")
        check_positive(self.thickness, "thickness")
        check_positive(self.n_fr, "n_fr")


@dataclass(frozen=True)
class LossModelParams:
    """Parameters of the power/temperature loss and frequency-shift models.

    delta0: residual loss; f_delta_tls: filling factor times intrinsic TLS
    loss (only the product is identifiable); n_c: TLS saturation photon
    number; beta: saturation exponent; alpha_k: kinetic-inductance fraction
    (1 by default, the kinetic inductance dominates); gap: superconducting
    gap (J); ns0: Cooper-pair zero-energy density of states (1/(J m^3)) --
    it cancels against the quasiparticle density in the loss model and is
    kept only so the standalone quasiparticle density carries real units;
    lk_shift_coeff: prefactor of the (k_B T / gap)^4 kinetic term of the
    frequency shift, promoted to an explicit fit parameter.
    """

    delta0: float
    f_delta_tls: float
    n_c: float
    beta: float
    gap: float
    alpha_k: float = 1.0
    ns0: float = 1.0
    lk_shift_coeff: float = 0.0

    def __post_init__(self):
        check_non_negative(self.delta0, "delta0")
        check_non_negative(self.f_delta_tls, "f_delta_tls")
        check_positive(self.n_c, "n_c")
        check_positive(self.gap, "gap")
        check_non_negative(self.lk_shift_coeff, "lk_shift_coeff")
        if not 0.0 < self.beta <= 1.0:
            raise InvalidParameterError("beta must be in (0, 1]")
        if not 0.0 <= self.alpha_k <= 1.0:
            raise InvalidParameterError("alpha_k must be in [0, 1]")

    @property
    def tc(self):
        """Critical temperature implied by the gap (K)."""
        return self.gap / (BCS_GAP_RATIO * k_B)


def gap_energy(tc):
    """Zero-temperature superconducting gap from the critical temperature.

    Uses the weak-coupling BCS estimate ``gap = 1.764 * k_B * tc`` (J).
    """
    tc = check_positive(tc, "tc")
    return BCS_GAP_RATIO * k_B * tc


def lk_bcs(r_sq, gap, t=0.0):
    """Kinetic inductance per square of a dirty superconducting film (H/sq).

    Parameters
    ----------
    r_sq : float
        Normal-state sheet resistance (ohm/sq).
    gap : float
        Superconducting gap (J).
    t : float
        Film temperature (K).  ``t = 0`` returns the saturated
        zero-temperature value ``r_sq * hbar / (pi * gap)``.
    """
    r_sq = check_positive(r_sq, "r_sq")
    gap = check_positive(gap, "gap")
    t = check_non_negative(t, "t")
    lk0 = r_sq * hbar / (pi * gap)
    if t == 0.0:
        return lk0
    return lk0 / np.tanh(gap / (2.0 * k_B * t))


def lk_current(i, ic, lk0, n_fr=FAST_RELAXATION_EXPONENT):
    """Kinetic inductance at bias current ``i``, exact nanowire form.

    ``lk0 * (1 - (i/ic)**n_fr) ** (-1/n_fr)``; diverges as ``i -> ic``.
    """
    ic = check_positive(ic, "ic")
    lk0 = check_positive(lk0, "lk0")
    i = check_non_negative(i, "i")
    if i >= ic:
        raise InvalidParameterError(f"bias current {i} must be below ic = {ic}")
    return lk0 * (1.0 - (i / ic) ** n_fr) ** (-1.0 / n_fr)


def lk_current_weak(i, ic, lk0, n_fr=FAST_RELAXATION_EXPONENT):
    """Small-current expansion of :func:`lk_current`.

    ``lk0 * (1 + (1/n_fr) * (i/ic)**n_fr)``; agrees with the exact form to
    O((i/ic)**(2*n_fr)).
    """
    ic = check_positive(ic, "ic")
    lk0 = check_positive(lk0, "lk0")
    i = check_non_negative(i, "i")
    if i >= ic:
        raise InvalidParameterError(f"bias current {i} must be below ic = {ic}")
    return lk0 * (1.0 + (i / ic) ** n_fr / n_fr)


def kerr_scaling(lk0, omega0, jc, geom: InductorGeometry):
    """Self-Kerr proportionality combination ``lk0 * omega0^2 / (jc*w*t)^n_fr``.

    The unknown absolute prefactor is excluded; the value is meaningful only
    in ratios between devices (e.g. the two inductor widths of one film).
    """
    lk0 = check_positive(lk0, "lk0")
    omega0 = check_positive(omega0, "omega0")
    jc = check_positive(jc, "jc")
    ic = jc * geom.width * geom.thickness
    return lk0 * omega0**2 / ic**geom.n_fr


def n_qp(t, gap, ns0):
    """Thermal quasiparticle density ``ns0*sqrt(2 pi k_B t gap)*exp(-gap/k_B t)``.

    Vectorized over ``t``; returns 0 at ``t = 0``.
    """
    gap = check_positive(gap, "gap")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise InvalidParameterError("t must be >= 0")
    with np.errstate(divide="ignore"):
        val = ns0 * np.sqrt(2.0 * pi * k_B * t * gap) * np.exp(
            -gap / (k_B * np.where(t > 0, t, 1.0))
        )
    out = np.where(t > 0, val, 0.0)
    return float(out) if out.ndim == 0 else out


def _tls_loss(n_ph, t, f_r, p: LossModelParams):
    with np.errstate(divide="ignore", over="ignore"):
        th = np.where(
            t > 0, np.tanh(h * f_r / (2.0 * k_B * np.where(t > 0, t, 1.0))), 1.0
        )
    return p.f_delta_tls * th / (1.0 + n_ph / p.n_c) ** p.beta


def _qp_loss(t, f_r, p: LossModelParams):
    # n_qp / (ns0 * gap) reduced analytically so ns0 cancels.
    with np.errstate(divide="ignore"):
        red = np.sqrt(2.0 * pi * k_B * t / p.gap) * np.exp(
            -p.gap / (k_B * np.where(t > 0, t, 1.0))
        )
    red = np.where(t > 0, red, 0.0)
    return p.alpha_k / pi * np.sqrt(2.0 * p.gap / (h * f_r)) * red


def loss_budget(n_ph, t, f_r, p: LossModelParams):
    """The three contributions to 1/Q_i: (residual, TLS, quasiparticle)."""
    n_ph = np.asarray(n_ph, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(n_ph < 0):
        raise InvalidParameterError("n_ph must be >= 0")
    if np.any(t < 0):
        raise InvalidParameterError("t must be >= 0")
    check_positive(f_r, "f_r")
    shape = np.broadcast_shapes(n_ph.shape, t.shape)
    return (
        np.broadcast_to(p.delta0, shape).astype(float, copy=True),
        np.broadcast_to(_tls_loss(n_ph, t, f_r, p), shape).astype(float, copy=True),
        np.broadcast_to(_qp_loss(t, f_r, p), shape).astype(float, copy=True),
    )


def qi_model(n_ph, t, f_r, p: LossModelParams):
    """Internal quality factor at photon number ``n_ph`` and temperature ``t``.

    1/Q_i is the sum of a residual loss, a saturable TLS loss
    ``f_delta_tls * tanh(h f_r / 2 k_B t) / (1 + n_ph/n_c)**beta`` and the
    quasiparticle loss ``(alpha_k/pi) * sqrt(2 gap / h f_r) *
    sqrt(2 pi k_B t / gap) * exp(-gap / k_B t)``.  Vectorized over ``n_ph``
    and/or ``t``.
    """
    residual, tls, qp = loss_budget(n_ph, t, f_r, p)
    inv_q = residual + tls + qp
    out = 1.0 / inv_q
    return float(out) if out.ndim == 0 else out


def freq_shift_terms(t, f_r, p: LossModelParams):
    """(TLS, kinetic) contributions to the fractional frequency shift.

    The TLS term is
    ``(f_delta_tls/pi) * (Re psi(1/2 - i*x) - ln x)`` with
    ``x = h f_r / (2 pi k_B t)``; the kinetic term is
    ``-alpha_k * lk_shift_coeff * (k_B t / gap)**4``.  Both vanish at t = 0.
    """
    check_positive(f_r, "f_r")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise InvalidParameterError("t must be >= 0")
    t1 = np.atleast_1d(t)
    tls = np.zeros(t1.shape)
    hot = t1 > 0
    if np.any(hot):
        x = h * f_r / (2.0 * pi * k_B * t1[hot])
        bracket = np.real(digamma(0.5 - 1j * x)) - np.log(x)
        tls[hot] = p.f_delta_tls / pi * bracket
    kinetic = -p.alpha_k * p.lk_shift_coeff * (k_B * t1 / p.gap) ** 4
    if t.ndim == 0:
        return float(tls[0]), float(kinetic[0])
    return tls, kinetic


def freq_shift_model(t, f_r, p: LossModelParams):
    """Fractional frequency shift ``delta_f / f_r`` at temperature ``t``.

    Sum of the TLS and kinetic terms of :func:`freq_shift_terms`;
    vectorized over ``t``.
    """
    tls, kinetic = freq_shift_terms(t, f_r, p)
    return tls + kinetic
