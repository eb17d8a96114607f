"""Film kinetic inductance from simulated (sheet inductance, frequency) points.

With the resonator capacitance fixed, the resonant frequency follows
``f = scale / sqrt(ls + offset)``; the offset absorbs any series geometric
inductance and degrades gracefully to zero for the purely kinetic case.
Fitting this hyperbola to a handful of simulated design points and
inverting it at the measured resonant frequency yields the film's sheet
inductance; per-design estimates are then averaged.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ExtrapolationWarning, InvalidParameterError
from .film import FilmProperties, gap_energy, lk_bcs
from .leastsq import FitConfig, least_squares
from .validation import check_non_negative, check_positive


@dataclass(frozen=True)
class SimPoint:
    """One electromagnetic simulation: sheet inductance (H/sq), frequency (Hz)."""

    ls: float
    f0: float

    def __post_init__(self):
        check_positive(self.ls, "ls")
        check_positive(self.f0, "f0")


@dataclass(frozen=True)
class HyperbolaFit:
    """Fitted ``f = scale/sqrt(ls + offset)`` with its residual and data range."""

    scale: float
    offset: float
    rms: float
    f_min: float
    f_max: float

    def __post_init__(self):
        check_positive(self.scale, "scale")
        check_non_negative(self.offset, "offset")


def fit_hyperbola(points, cfg: FitConfig | None = None) -> HyperbolaFit:
    """Least-squares hyperbola through >= 3 simulated design points.

    Raises on duplicate sheet-inductance values and on data where the
    frequency does not strictly decrease with inductance.
    """
    pts = [p if isinstance(p, SimPoint) else SimPoint(*p) for p in points]
    if len(pts) < 3:
        raise InvalidParameterError("hyperbola fit needs >= 3 simulation points")
    ls = np.array([p.ls for p in pts])
    f0 = np.array([p.f0 for p in pts])
    order = np.argsort(ls)
    ls, f0 = ls[order], f0[order]
    if np.any(np.diff(ls) == 0):
        raise InvalidParameterError("simulation points have duplicate ls values")
    if not np.all(np.diff(f0) < 0):
        raise InvalidParameterError(
            "simulated frequency must decrease with sheet inductance"
        )

    # Linear seed: 1/f^2 = ls/scale^2 + offset/scale^2.
    y = 1.0 / f0**2
    coef = np.polynomial.polynomial.polyfit(ls, y, 1)
    if coef[1] <= 0:
        raise InvalidParameterError("simulation points do not follow 1/sqrt(ls)")
    scale0 = 1.0 / np.sqrt(coef[1])
    offset0 = max(coef[0] / coef[1], 0.0)

    def residual(p):
        return p[0] / np.sqrt(ls + p[1]) - f0

    result = least_squares(
        residual,
        np.array([scale0, offset0]),
        cfg or FitConfig(),
        bounds=[(1e-30, np.inf), (0.0, np.inf)],
        x_scale=np.array([scale0, np.median(ls)]),
        param_names=("scale", "offset"),
    )
    scale, offset = result.params
    rms = float(np.sqrt(np.mean(residual(result.params) ** 2)))
    return HyperbolaFit(
        scale=float(scale),
        offset=float(offset),
        rms=rms,
        f_min=float(f0.min()),
        f_max=float(f0.max()),
    )


def invert_frequency(fit: HyperbolaFit, f_measured) -> float:
    """Sheet inductance implied by a measured resonant frequency (H/sq).

    Warns when ``f_measured`` falls outside [0.5, 2] times the simulated
    frequency range; raises when the inversion gives a non-positive
    inductance (measurement inconsistent with the simulations).
    """
    f_measured = check_positive(f_measured, "f_measured")
    if not 0.5 * fit.f_min <= f_measured <= 2.0 * fit.f_max:
        warnings.warn(
            f"measured frequency {f_measured:.4g} Hz is outside "
            f"[0.5, 2] x simulated range [{fit.f_min:.4g}, {fit.f_max:.4g}] Hz",
            ExtrapolationWarning,
            stacklevel=2,
        )
    ls = (fit.scale / f_measured) ** 2 - fit.offset
    if ls <= 0:
        raise InvalidParameterError(
            f"inverted sheet inductance is non-positive ({ls:.4g} H/sq); "
            "measurement inconsistent with the simulated designs"
        )
    return float(ls)


def average_film_lk(estimates):
    """Mean and sample standard deviation of per-design inductance estimates."""
    arr = np.asarray(list(estimates), dtype=float)
    if arr.size == 0:
        raise InvalidParameterError("no inductance estimates to average")
    mean = float(arr.mean())
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return mean, std


@dataclass(frozen=True)
class LkComparison:
    """BCS-theory versus resonator-derived kinetic inductance (H/sq)."""

    bcs_lk: float
    resonator_lk: float

    @property
    def relative_difference(self):
        """(resonator - BCS) / resonator."""
        return (self.resonator_lk - self.bcs_lk) / self.resonator_lk

    def as_dict(self):
        return {
            "lk_bcs_h_per_sq": self.bcs_lk,
            "lk_resonator_h_per_sq": self.resonator_lk,
            "relative_difference": self.relative_difference,
        }


def compare_bcs_vs_resonator(film: FilmProperties, resonator_estimate) -> LkComparison:
    """Zero-temperature BCS estimate of the film against the resonator value."""
    resonator_estimate = check_positive(resonator_estimate, "resonator_estimate")
    bcs = lk_bcs(film.r_sq, gap_energy(film.tc), 0.0)
    return LkComparison(bcs_lk=bcs, resonator_lk=resonator_estimate)
