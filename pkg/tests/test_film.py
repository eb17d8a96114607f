"""Film physics: BCS inductance, current dependence, loss and shift models."""

import mpmath as mp
import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.constants import h, hbar, k as k_B, pi

from kinres.errors import InvalidParameterError
from kinres.film import (
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
from kinres.presets import FILMS

K_B = 1.380649e-23  # exact SI


class TestGapEnergy:
    def test_linear_in_tc(self):
        assert gap_energy(1e-9) == pytest.approx(1.764 * K_B * 1e-9, rel=1e-14)

    def test_film_80_8(self):
        assert gap_energy(4.2) == pytest.approx(1.764 * K_B * 4.2, rel=1e-14)
        assert gap_energy(4.2) == pytest.approx(1.0229e-22, rel=1e-4)

    def test_film_80_3(self):
        assert gap_energy(7.5) == pytest.approx(1.8266e-22, rel=1e-4)

    def test_rejects_nonpositive(self):
        with pytest.raises(InvalidParameterError):
            gap_energy(0.0)


class TestLkBcs:
    def test_zero_temperature_limit(self):
        gap = gap_energy(5.0)
        assert lk_bcs(200.0, gap, 0.0) == pytest.approx(
            200.0 * hbar / (pi * gap), rel=1e-14
        )

    def test_film_80_8_is_170_ph(self):
        lk = lk_bcs(518.0, gap_energy(4.2), 0.0)
        assert lk * 1e12 == pytest.approx(170.0, abs=0.5)

    def test_monotone_in_temperature(self):
        gap = gap_energy(4.2)
        ts = np.linspace(0.1, 3.5, 30)
        vals = np.array([lk_bcs(518.0, gap, t) for t in ts])
        assert np.all(np.diff(vals) > 0)

    def test_tanh_saturation_at_tc_over_100(self):
        for key in ("80/1", "80/8"):
            film = FILMS[key]
            gap = gap_energy(film.tc)
            lo = lk_bcs(film.r_sq, gap, 0.0)
            at = lk_bcs(film.r_sq, gap, film.tc / 100.0)
            assert abs(at - lo) / lo < 1e-6


class TestLkCurrent:
    def test_zero_current(self):
        assert lk_current(0.0, 1e-3, 50e-12) == 50e-12

    def test_exact_vs_expansion_small_current(self):
        exact = lk_current(1e-4, 1e-3, 50e-12)
        approx = lk_current_weak(1e-4, 1e-3, 50e-12)
        assert abs(exact - approx) / exact < 0.1 ** (2 * 2.21)

    def test_expansion_gap_bound_up_to_30_percent(self):
        for ratio in (0.05, 0.1, 0.2, 0.3):
            exact = lk_current(ratio, 1.0, 1.0)
            approx = lk_current_weak(ratio, 1.0, 1.0)
            assert abs(exact - approx) / exact < ratio ** (2 * 2.21)

    def test_divergence_near_critical_current(self):
        assert lk_current(1.0 - 1e-13, 1.0, 1.0) > 1e3

    def test_current_at_or_above_critical_rejected(self):
        with pytest.raises(InvalidParameterError):
            lk_current(1.0, 1.0, 1.0)
        with pytest.raises(InvalidParameterError):
            lk_current_weak(2.0, 1.0, 1.0)


class TestKerrScaling:
    def test_width_power_law(self):
        g1 = InductorGeometry(width=250e-9, thickness=13e-9)
        g2 = InductorGeometry(width=500e-9, thickness=13e-9)
        s1 = kerr_scaling(50e-12, 2 * pi * 5e9, 1e10, g1)
        s2 = kerr_scaling(50e-12, 2 * pi * 5e9, 1e10, g2)
        assert s2 / s1 == pytest.approx(2.0 ** (-2.21), rel=1e-12)

    def test_frequency_squared(self):
        g = InductorGeometry(width=500e-9, thickness=13e-9)
        s1 = kerr_scaling(50e-12, 2 * pi * 5e9, 1e10, g)
        s2 = kerr_scaling(50e-12, 2 * pi * 10e9, 1e10, g)
        assert s2 / s1 == pytest.approx(4.0, rel=1e-12)

    def test_film_ratio_80_3_vs_80_5(self):
        g = InductorGeometry(width=500e-9, thickness=13e-9)
        a, b = FILMS["80/3"], FILMS["80/5"]
        omega0 = 2 * pi * 5e9
        ratio = kerr_scaling(a.lk0, omega0, a.jc, g) / kerr_scaling(
            b.lk0, omega0, b.jc, g
        )
        expected = (a.lk0 / b.lk0) * (a.jc / b.jc) ** (-2.21)
        assert ratio == pytest.approx(expected, rel=1e-12)


class TestNqp:
    def test_zero_temperature(self):
        assert n_qp(0.0, gap_energy(7.5), 1e47) == 0.0

    def test_monotone_below_half_tc(self):
        gap = gap_energy(7.5)
        ts = np.linspace(0.05, 3.75, 60)
        vals = n_qp(ts, gap, 1e47)
        assert np.all(np.diff(vals) > 0)

    def test_ratio_0p7_to_0p5_high_precision_oracle(self):
        gap = gap_energy(7.5)
        with mp.workdps(50):
            g = mp.mpf(1.764) * mp.mpf("1.380649e-23") * mp.mpf("7.5")
            num = mp.sqrt(2 * mp.pi * mp.mpf("1.380649e-23") * mp.mpf("0.7") * g) \
                * mp.e ** (-g / (mp.mpf("1.380649e-23") * mp.mpf("0.7")))
            den = mp.sqrt(2 * mp.pi * mp.mpf("1.380649e-23") * mp.mpf("0.5") * g) \
                * mp.e ** (-g / (mp.mpf("1.380649e-23") * mp.mpf("0.5")))
            expected = float(num / den)
        got = n_qp(0.7, gap, 1.0) / n_qp(0.5, gap, 1.0)
        assert got == pytest.approx(expected, rel=1e-10)
        assert got == pytest.approx(2271.6, rel=1e-4)


def loss_params_803_500(**overrides):
    defaults = dict(
        delta0=1e-6,
        f_delta_tls=1.83e-5,
        n_c=1.74,
        beta=0.2,
        gap=gap_energy(7.4),
        lk_shift_coeff=0.56,
    )
    defaults.update(overrides)
    return LossModelParams(**defaults)


class TestQiModel:
    def test_saturated_and_frozen_limit(self):
        # beta = 0.2 saturates slowly: push n_ph far out to reach 1/delta0.
        p = loss_params_803_500()
        qi = qi_model(1e30, 1e-7, 5.95e9, p)
        assert qi == pytest.approx(1.0 / p.delta0, rel=1e-4)

    def test_single_photon_tls_limit_803_500(self):
        p = loss_params_803_500(delta0=0.0)
        qi = qi_model(0.0, 1e-8, 5.95e9, p)
        assert qi == pytest.approx(1.0 / 1.83e-5, rel=1e-6)
        assert qi == pytest.approx(5.46e4, rel=1e-2)

    def test_nondecreasing_in_photon_number(self):
        p = loss_params_803_500()
        n = np.geomspace(1e-2, 1e6, 200)
        qi = qi_model(n, 0.015, 5.95e9, p)
        assert np.all(np.diff(qi) >= 0)

    def test_interior_maximum_in_temperature(self):
        # TLS loss shrinks with T while quasiparticle loss grows: Q_i(T)
        # at n_ph = 50 rises from 15 mK and falls again before Tc/2.
        p = loss_params_803_500()
        ts = np.linspace(0.015, 7.4 / 2.0, 1500)
        qi = qi_model(50.0, ts, 5.95e9, p)
        imax = int(np.argmax(qi))
        assert 0 < imax < ts.size - 1
        assert qi[imax] > qi[0]
        assert qi[imax] > qi[-1]

    def test_budget_matches_total(self):
        p = loss_params_803_500()
        residual, tls, qp = loss_budget(50.0, 0.5, 5.95e9, p)
        assert 1.0 / qi_model(50.0, 0.5, 5.95e9, p) == pytest.approx(
            residual + tls + qp, rel=1e-14
        )


class TestFreqShift:
    def test_zero_temperature_limit(self):
        p = loss_params_803_500()
        assert freq_shift_model(0.0, 5.95e9, p) == 0.0

    def test_bracket_vanishes_deep_in_quantum_regime(self):
        # h f / (2 pi k_B T) > 1e3 pushes the TLS bracket below 1e-6.
        p = loss_params_803_500(lk_shift_coeff=0.0)
        f_r = 5.95e9
        t = h * f_r / (2 * pi * k_B * 2e3)
        tls, _ = freq_shift_terms(t, f_r, p)
        assert abs(tls) * pi / p.f_delta_tls < 1e-6

    def test_negative_and_decreasing_at_high_temperature(self):
        p = loss_params_803_500()
        ts = np.linspace(1.5, 3.0, 40)
        df = freq_shift_model(ts, 5.95e9, p)
        assert np.all(df < 0)
        assert np.all(np.diff(df) < 0)

    def test_bracket_at_unit_argument_matches_digamma_oracle(self):
        # At h f_r/(2 pi k_B T) = 1 the bracket is Re psi(1/2 - i) - ln 1.
        p = loss_params_803_500(lk_shift_coeff=0.0, f_delta_tls=np.pi)
        f_r = 5.95e9
        t = h * f_r / (2 * pi * k_B)
        tls, _ = freq_shift_terms(t, f_r, p)  # = bracket with this f_delta
        expected = float(mp.re(mp.digamma(mp.mpc(0.5, -1))))
        assert tls == pytest.approx(expected, rel=1e-10)

    def test_tls_dominates_kinetic_term_at_200_mk(self):
        p = loss_params_803_500()
        tls, kinetic = freq_shift_terms(0.2, 5.95e9, p)
        assert abs(tls) > abs(kinetic)

    def test_kinetic_dominates_near_1_k(self):
        p = loss_params_803_500()
        tls, kinetic = freq_shift_terms(1.0, 5.95e9, p)
        assert abs(kinetic) > abs(tls)


class TestParamValidation:
    def test_beta_range(self):
        with pytest.raises(InvalidParameterError):
            loss_params_803_500(beta=0.0)
        with pytest.raises(InvalidParameterError):
            loss_params_803_500(beta=1.5)

    def test_alpha_range(self):
        with pytest.raises(InvalidParameterError):
            loss_params_803_500(alpha_k=1.2)

    def test_film_table_values_are_valid(self):
        for film in FILMS.values():
            assert film.tc > 0 and film.r_sq > 0 and film.jc >= 0

    def test_implied_tc_round_trip(self):
        p = loss_params_803_500()
        assert p.tc == pytest.approx(7.4, rel=1e-12)
