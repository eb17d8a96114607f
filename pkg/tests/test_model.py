"""Core forward-model tests: reduced variables, photon cubic, hanger S21."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy.constants import hbar

from kinres.data import BaselineEnv
from kinres.errors import InvalidParameterError, OverlapWarning
from kinres.model import (
    DriveCondition,
    KerrResonatorParams,
    forward_trace,
    kerr_from_fit,
    kerr_response,
    linear_s21,
    multiplex_feedline,
    photon_cubic_residual,
    photon_roots,
    reduced_vars,
    s21_hanger,
    select_photon_branch,
    solve_photon_cubic,
)
from oracles import bisect_photon_roots

TWO_PI = 2.0 * np.pi


def make_params(f0_ghz, kappa_khz, gamma_khz, kerr_hz=0.0, phi=0.0):
    return KerrResonatorParams(
        omega0=TWO_PI * f0_ghz * 1e9,
        kappa=TWO_PI * kappa_khz * 1e3,
        gamma=TWO_PI * gamma_khz * 1e3,
        kerr=TWO_PI * kerr_hz,
        phi=phi,
    )


class TestReducedVars:
    def test_zero_detuning_on_resonance(self):
        p = make_params(5.95, 91.88, 95.96)
        rv = reduced_vars(p, DriveCondition(p.omega0, 1e-15))
        assert rv.delta == 0.0

    def test_linear_resonator_has_zero_xi(self):
        p = make_params(5.95, 91.88, 95.96, kerr_hz=0.0)
        for power in (0.0, 1e-18, 1e-9):
            rv = reduced_vars(p, DriveCondition(p.omega0 + 1e5, power))
            assert rv.xi == 0.0

    def test_photon_number_803_500_hand_evaluation(self):
        # Hand evaluation with explicit constants, device 803-500 at 1 fW;
        # hbar from the exact SI value of h.
        hbar_si = 6.62607015e-34 / TWO_PI
        kappa = TWO_PI * 91.88e3
        total = TWO_PI * (91.88e3 + 95.96e3)
        omega0 = TWO_PI * 5.95e9
        expected = kappa / total**2 * 1e-15 / (hbar_si * omega0)
        p = make_params(5.95, 91.88, 95.96, kerr_hz=-4.17)
        rv = reduced_vars(p, DriveCondition(omega0, 1e-15))
        assert_allclose(rv.n_tilde_sq, expected, rtol=1e-12)
        assert 100 < rv.n_tilde_sq < 110  # ~1e2 photons at -120 dBm, sanity
        assert rv.xi == pytest.approx(expected * p.kerr / total, rel=1e-12)
        assert rv.xi < 0

    def test_degenerate_rates_rejected(self):
        with pytest.raises(InvalidParameterError):
            KerrResonatorParams(omega0=1.0, kappa=0.0, gamma=0.0)


class TestPhotonCubic:
    def test_zero_detuning_zero_xi(self):
        sol = solve_photon_cubic(0.0, 0.0)
        assert sol.n == 2.0
        assert sol.roots == (2.0,)

    def test_half_detuning_zero_xi(self):
        assert solve_photon_cubic(0.5, 0.0).n == 1.0

    def test_xi_zero_reduction_is_exact(self):
        deltas = np.arange(-10.0, 10.0001, 0.05)
        roots, counts = photon_roots(deltas, 0.0)
        assert np.all(counts == 1)
        assert np.array_equal(roots[:, 0], 0.5 / (deltas**2 + 0.25))

    def test_single_root_delta1_xi1_versus_bisection(self):
        # n^3 - 2 n^2 + (5/4) n - 1/2 = 0, bisected on [0, 10] to 1e-12.
        def f(n):
            return n**3 - 2.0 * n**2 + 1.25 * n - 0.5

        lo, hi = 0.0, 10.0
        assert f(lo) < 0 < f(hi)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if f(mid) < 0:
                lo = mid
            else:
                hi = mid
        expected = 0.5 * (lo + hi)
        sol = solve_photon_cubic(1.0, 1.0)
        assert len(sol.roots) == 1
        assert sol.n == pytest.approx(expected, abs=1e-12)

    def test_residuals_and_counts_on_grid(self):
        # Coarse version of the acceptance grid.
        deltas = np.arange(-10.0, 10.0001, 0.25)
        for xi in np.arange(-2.0, 2.0001, 0.1):
            roots, counts = photon_roots(deltas, xi)
            assert set(np.unique(counts)) <= {1, 3}
            for col in range(3):
                mask = ~np.isnan(roots[:, col])
                if mask.any():
                    res = photon_cubic_residual(roots[mask, col], deltas[mask], xi)
                    assert res.max() < 1e-10
                    assert np.all(roots[mask, col] >= 0)

    def test_matches_bisection_oracle_spot_checks(self):
        deltas = np.linspace(-4, 4, 81)
        for xi in (-1.3, -0.2, 0.05, 0.9, 2.0):
            ours, _ = photon_roots(deltas, xi)
            ref = bisect_photon_roots(deltas, xi)
            for i in range(deltas.size):
                got = ours[i][~np.isnan(ours[i])]
                exp = ref[i][~np.isnan(ref[i])]
                for root in got:
                    assert np.min(np.abs(exp - root)) < 1e-10

    @settings(max_examples=150, deadline=None)
    @given(
        st.floats(-10, 10, allow_nan=False),
        st.floats(-2, 2, allow_nan=False),
    )
    def test_symmetry_negated_arguments(self, delta, xi):
        a, ca = photon_roots(delta, xi)
        b, cb = photon_roots(-delta, -xi)
        assert np.array_equal(ca, cb)
        assert_allclose(
            np.nan_to_num(a), np.nan_to_num(b), rtol=1e-9, atol=1e-12
        )

    def test_branch_rules(self):
        deltas = np.linspace(-1, 3, 401)
        roots, counts = photon_roots(deltas, 1.0)
        assert np.any(counts == 3)
        low = select_photon_branch(roots, counts, branch_rule="lowest")
        high = select_photon_branch(roots, counts, branch_rule="highest")
        assert np.all(low <= high + 1e-15)
        up = select_photon_branch(roots, counts, "up")
        down = select_photon_branch(roots, counts, "down")
        tri = counts == 3
        assert np.max(np.abs(up[tri] - down[tri])) > 1e-3  # hysteresis
        mono = counts == 1
        assert np.array_equal(up[mono], down[mono])

    def test_solution_object_continuation(self):
        sol = solve_photon_cubic(1.8, 1.0, prev_n=3.0)
        assert len(sol.roots) == 3
        assert sol.n == min(sol.roots, key=lambda r: abs(r - 3.0))
        assert solve_photon_cubic(1.8, 1.0).selected == 0  # tie-break: lowest


class TestS21Hanger:
    def test_critical_coupling_on_resonance(self):
        p = make_params(5.0, 100.0, 100.0)
        assert s21_hanger(p, 0.0, 0.0, 2.0) == pytest.approx(0.5, abs=1e-15)

    def test_off_resonant_baseline(self):
        p = make_params(5.0, 100.0, 80.0, phi=0.2)
        for delta in (-1e8, 1e8):
            assert abs(s21_hanger(p, delta, 0.0, 0.0) - 1.0) < 1e-7

    def test_801_500_resonance_depth(self):
        # 1 - 86.95/144.47 evaluated directly from the tabulated rates.
        p = make_params(5.58, 86.95, 57.52)
        expected = 1.0 - 86.95 / (86.95 + 57.52)
        got = s21_hanger(p, 0.0, 0.0, 2.0)
        assert got == pytest.approx(expected, rel=1e-12)
        assert expected == pytest.approx(0.3981, abs=5e-5)

    def test_circle_invariant_phi_zero(self):
        p = make_params(5.0, 120.0, 60.0)
        deltas = np.linspace(-50, 50, 2001)
        s = s21_hanger(p, deltas, 0.0, np.zeros_like(deltas))
        center = 1.0 - p.kappa / (2.0 * p.total_rate)
        radii = np.abs(s - center)
        assert radii.max() - radii.min() < 1e-10

    def test_phi_rotation_rejected_at_limit(self):
        with pytest.raises(InvalidParameterError):
            make_params(5.0, 100.0, 100.0, phi=np.pi / 2)


class TestForwardTrace:
    def test_linear_path_equals_closed_form(self):
        p = make_params(5.0, 100.0, 80.0, kerr_hz=0.0, phi=0.1)
        freqs = np.linspace(4.999e9, 5.001e9, 501)
        trace = forward_trace(p, None, freqs, 1e-13)
        expected = linear_s21(TWO_PI * freqs, p.omega0, p.kappa, p.gamma, p.phi)
        assert_allclose(trace.s21, expected, rtol=1e-14)

    def test_env_identity_flag(self):
        p = make_params(5.0, 100.0, 80.0)
        freqs = np.linspace(4.999e9, 5.001e9, 101)
        t1 = forward_trace(p, None, freqs, 1e-15)
        t2 = forward_trace(p, BaselineEnv.identity(), freqs, 1e-15)
        assert np.array_equal(t1.s21, t2.s21)

    def test_bistable_sweeps_differ(self):
        p = make_params(5.0, 100.0, 100.0, kerr_hz=-50.0)
        w_hz = p.total_rate / TWO_PI
        freqs = np.linspace(5e9 - 6 * w_hz, 5e9 + 6 * w_hz, 2001)
        # Choose drive power so |xi| ~ 1: strongly bistable.
        power = 1.0 * p.total_rate**2 / p.kappa * hbar * p.omega0 * (
            p.total_rate / abs(p.kerr)
        )
        up = forward_trace(p, None, freqs, power, direction="up")
        down = forward_trace(p, None, freqs, power, direction="down")
        assert np.max(np.abs(up.s21 - down.s21)) > 1e-2
        _, _, _, xi = kerr_response(p, TWO_PI * freqs, power)
        assert abs(xi) > 0.2

    def test_frequencies_must_increase(self):
        p = make_params(5.0, 100.0, 80.0)
        with pytest.raises(InvalidParameterError):
            forward_trace(p, None, [5e9, 5e9 - 1e3], 1e-15)


class TestKerrFromFit:
    def test_zero_xi_gives_zero_kerr(self):
        assert kerr_from_fit(0.0, 1e6, 1e6, 50.0) == 0.0

    def test_round_trip_identity(self):
        p = make_params(5.95, 91.88, 95.96, kerr_hz=-4.17)
        rv = reduced_vars(p, DriveCondition(p.omega0 + 1e4, 3e-14))
        k = kerr_from_fit(rv.xi, p.kappa, p.gamma, rv.n_tilde_sq)
        assert k == pytest.approx(p.kerr, rel=1e-12)

    def test_807_250_table_value_reproduced(self):
        p = make_params(6.59, 49.06, 62.92, kerr_hz=-82.39)
        rv = reduced_vars(p, DriveCondition(p.omega0, 2e-14))
        k = kerr_from_fit(rv.xi, p.kappa, p.gamma, rv.n_tilde_sq)
        assert k / TWO_PI == pytest.approx(-82.39, rel=1e-12)

    def test_zero_photons_is_undefined(self):
        with pytest.raises(InvalidParameterError):
            kerr_from_fit(0.1, 1e6, 1e6, 0.0)


class TestMultiplex:
    def test_empty_list_is_unit_transmission(self):
        freqs = np.linspace(4e9, 6e9, 101)
        trace = multiplex_feedline([], freqs, 1e-15)
        assert np.array_equal(trace.s21, np.ones(101, dtype=complex))

    def test_single_matches_forward_trace(self):
        p = make_params(5.0, 100.0, 80.0, kerr_hz=-5.0)
        freqs = np.linspace(4.999e9, 5.001e9, 301)
        a = multiplex_feedline([p], freqs, 1e-14)
        b = forward_trace(p, None, freqs, 1e-14)
        assert_allclose(a.s21, b.s21, rtol=1e-14)

    def test_product_of_seven_resonators(self):
        devs = [make_params(4.5 + 0.2 * i, 100.0, 80.0) for i in range(7)]
        freqs = np.linspace(4.4e9, 5.9e9, 4001)
        combined = multiplex_feedline(devs, freqs, 1e-15)
        manual = np.ones(freqs.size, dtype=complex)
        for d in devs:
            manual *= forward_trace(d, None, freqs, 1e-15).s21
        assert_allclose(combined.s21, manual, rtol=1e-13)

    def test_two_far_resonators_keep_isolated_depths(self):
        a = make_params(4.8, 100.0, 80.0)
        b = make_params(5.2, 90.0, 70.0)
        freqs = np.linspace(4.79e9, 5.21e9, 20001)
        combined = np.abs(multiplex_feedline([a, b], freqs, 1e-15).s21)
        for dev in (a, b):
            iso = np.abs(forward_trace(dev, None, freqs, 1e-15).s21)
            window = np.abs(freqs - dev.f0_hz) < 5 * dev.total_rate / TWO_PI
            assert abs(combined[window].min() - iso[window].min()) < 1e-3

    def test_overlap_warning(self):
        a = make_params(5.0, 100.0, 80.0)
        b = make_params(5.0001, 100.0, 80.0)  # ~0.55 linewidths apart
        freqs = np.linspace(4.99e9, 5.01e9, 501)
        with pytest.warns(OverlapWarning):
            multiplex_feedline([a, b], freqs, 1e-15)
