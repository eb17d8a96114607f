"""Self-calibration of traces against the feedline transmission baseline.

Hanger resonators leave the off-resonant transmission at the bare feedline
level, so the baseline (amplitude, amplitude slope, cable delay, global
phase) is estimated from the off-resonant edges of the span and divided
out.  A second pass removes the resonator's own dispersive tail from the
edge windows: the pass-1 trace is fitted with the linear hanger model,
the raw data are divided by that resonance, and the baseline is
re-estimated on the quotient.  Without the refinement the tail biases the
apparent cable delay by a few percent of a linewidth period.

All baseline terms are referenced to the center of the frequency grid; see
:class:`kinres.data.BaselineEnv`.
"""

import warnings

import numpy as np

from .data import TWO_PI, BaselineEnv, ComplexTrace
from .errors import CalibrationError, CalibrationWarning, NoResonanceError

#: Fraction of points at each end of the span treated as off-resonant.
EDGE_FRACTION = 0.1

#: Soft precondition: the span should exceed this many linewidths.
MIN_SPAN_LINEWIDTHS = 10.0


def _edge_indices(npoints, edge_fraction):
    n_edge = max(3, int(round(edge_fraction * npoints)))
    n_edge = min(n_edge, npoints // 3) or 1
    return np.concatenate([np.arange(n_edge), np.arange(npoints - n_edge, npoints)])


def _fit_edges(freq_hz, s21, idx):
    fc = 0.5 * (freq_hz[0] + freq_hz[-1])
    df = freq_hz - fc
    mag = np.abs(s21)
    c_amp = np.polynomial.polynomial.polyfit(df[idx], mag[idx], 1)
    amp = float(c_amp[0])
    if amp <= 0:
        raise CalibrationError("edge amplitude fit produced a non-positive level")
    slope = float(c_amp[1] / amp)
    phase = np.unwrap(np.angle(s21))
    c_ph = np.polynomial.polynomial.polyfit(df[idx], phase[idx], 1)
    return BaselineEnv(
        amp=amp, slope=slope, tau=float(-c_ph[1] / TWO_PI), phase0=float(c_ph[0])
    )


def estimate_baseline(trace: ComplexTrace, edge_fraction=EDGE_FRACTION) -> BaselineEnv:
    """Fit the baseline model to the off-resonant edges of a trace."""
    idx = _edge_indices(trace.npoints, edge_fraction)
    return _fit_edges(trace.freq_hz, trace.s21, idx)


def _check_notch_extent(trace, rel):
    dip_min = rel.min()
    depth = 1.0 - dip_min
    if depth <= 0.01:
        return  # no notch: nothing to check
    half_level = 1.0 - 0.5 * depth
    in_dip = rel < half_level
    frac = in_dip.mean()
    if frac > 0.5:
        raise CalibrationError(
            f"resonance occupies {frac:.0%} of the span; "
            "cannot separate the baseline"
        )
    span = trace.freq_hz[-1] - trace.freq_hz[0]
    width = max(in_dip.sum(), 1) * span / trace.npoints
    if span < MIN_SPAN_LINEWIDTHS * width:
        warnings.warn(
            f"span covers only {span / width:.1f} dip widths "
            f"(< {MIN_SPAN_LINEWIDTHS:g}); baseline estimate may be biased",
            CalibrationWarning,
            stacklevel=3,
        )


def normalize_baseline(trace: ComplexTrace, edge_fraction=EDGE_FRACTION,
                       refine=True):
    """Divide the estimated baseline out of a trace.

    Returns ``(normalized_trace, env)``.  Raises
    :class:`CalibrationError` when the notch occupies more than half of the
    span (the edges are then not off-resonant), and warns when the span
    looks narrower than ``MIN_SPAN_LINEWIDTHS`` dip widths.
    """
    env = estimate_baseline(trace, edge_fraction)
    normalized = trace.s21 / env.response(trace.omega)
    _check_notch_extent(trace, np.abs(normalized))

    if refine:
        from .model import linear_s21
        from .trace_fit import fit_single_trace

        try:
            fit = fit_single_trace(trace.replace(s21=normalized))
        except NoResonanceError:
            fit = None
        if fit is not None and fit.converged:
            resonance = linear_s21(trace.omega, *fit.params)
            idx = _edge_indices(trace.npoints, edge_fraction)
            env = _fit_edges(trace.freq_hz, trace.s21 / resonance, idx)
            normalized = trace.s21 / env.response(trace.omega)

    return trace.replace(s21=normalized), env
