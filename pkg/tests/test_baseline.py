"""Baseline self-calibration round trips."""

import numpy as np
import pytest

from kinres.baseline import estimate_baseline, normalize_baseline
from kinres.data import TWO_PI, BaselineEnv, ComplexTrace
from kinres.errors import CalibrationError, CalibrationWarning
from kinres.model import KerrResonatorParams, forward_trace

F0 = 5.0e9
PARAMS = KerrResonatorParams(
    omega0=TWO_PI * F0, kappa=TWO_PI * 1e5, gamma=TWO_PI * 8e4
)


def make_trace(env, span_linewidths=25.0, points=2001, with_resonator=True):
    span = span_linewidths * PARAMS.total_rate / TWO_PI
    freqs = np.linspace(F0 - span / 2, F0 + span / 2, points)
    if with_resonator:
        return forward_trace(PARAMS, env, freqs, 1e-15)
    omega = TWO_PI * freqs
    return ComplexTrace(omega=omega, s21=env.response(omega))


def test_round_trip_recovers_environment():
    env = BaselineEnv(amp=0.5, slope=2e-9, tau=40e-9, phase0=0.7)
    trace = make_trace(env)
    normalized, est = normalize_baseline(trace)
    assert est.amp == pytest.approx(env.amp, rel=0.01)
    assert est.tau == pytest.approx(env.tau, rel=0.01)
    assert est.phase0 == pytest.approx(env.phase0, abs=0.01)
    assert est.slope == pytest.approx(env.slope, rel=0.05, abs=1e-11)
    # Off-resonant points sit at unit magnitude with flat phase.
    mag = np.abs(normalized.s21)
    edges = np.concatenate([mag[:100], mag[-100:]])
    assert np.all(np.abs(edges - 1.0) < 1e-2)
    phase = np.angle(normalized.s21)
    assert np.abs(np.concatenate([phase[:100], phase[-100:]])).max() < 1e-3


def test_identity_environment_round_trip():
    trace = make_trace(BaselineEnv.identity())
    _, est = normalize_baseline(trace)
    assert est.amp == pytest.approx(1.0, abs=1e-3)
    assert est.tau == pytest.approx(0.0, abs=1e-12)
    assert est.phase0 == pytest.approx(0.0, abs=1e-3)


def test_pure_delay_no_resonator_flattens():
    env = BaselineEnv(tau=25e-9)
    trace = make_trace(env, with_resonator=False)
    normalized, est = normalize_baseline(trace)
    assert np.max(np.abs(normalized.s21 - 1.0)) < 1e-9
    assert est.tau == pytest.approx(25e-9, rel=1e-6)


def test_notch_filling_span_rejected():
    with pytest.warns(CalibrationWarning):
        trace = make_trace(BaselineEnv.identity(), span_linewidths=1.2)
        with pytest.raises(CalibrationError):
            normalize_baseline(trace)


def test_narrow_span_warns():
    trace = make_trace(BaselineEnv.identity(), span_linewidths=6.0)
    with pytest.warns(CalibrationWarning):
        normalize_baseline(trace)


def test_estimate_is_deterministic():
    env = BaselineEnv(amp=0.8, slope=-1e-9, tau=10e-9, phase0=-0.3)
    trace = make_trace(env)
    a = estimate_baseline(trace)
    b = estimate_baseline(trace)
    assert a == b
