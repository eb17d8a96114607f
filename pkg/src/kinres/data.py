"""Immutable data containers: traces, sweeps, and the transmission baseline.

Internal convention: every frequency or rate carried by these containers is
angular (rad/s).  Conversion to and from Hz happens at the user-facing
boundaries (file parsers, CLI, reports, estimator facade).
"""

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError
from .validation import (
    as_complex_array,
    as_float_array,
    check_finite,
    check_same_length,
    check_strictly_increasing,
)

TWO_PI = 2.0 * np.pi

SWEEP_DIRECTIONS = ("up", "down")


def _frozen_array(values, kind, name):
    arr = (as_float_array if kind == "f" else as_complex_array)(values, name)
    check_finite(arr, name)
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ComplexTrace:
    """One frequency sweep of complex S21 at a stated drive power.

    ``omega`` is the stored (always ascending) angular frequency axis;
    ``sweep_direction`` records how the instrument actually traversed it.
    ``power_w`` is the drive power at the device plane.
    """

    omega: np.ndarray
    s21: np.ndarray
    power_w: float | None = None
    power_dbm: float | None = None
    attenuation_db: float | None = None
    temperature_k: float | None = None
    sweep_direction: str = "up"
    device_id: str | None = None

    def __post_init__(self):
        omega = _frozen_array(self.omega, "f", "omega")
        check_strictly_increasing(omega, "omega")
        s21 = _frozen_array(self.s21, "c", "s21")
        check_same_length(omega, s21, "omega", "s21")
        if self.sweep_direction not in SWEEP_DIRECTIONS:
            raise InvalidParameterError(
                f"sweep_direction must be one of {SWEEP_DIRECTIONS}"
            )
        if self.power_w is not None and self.power_w < 0:
            raise InvalidParameterError("power_w must be >= 0")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "s21", s21)

    @property
    def freq_hz(self):
        return self.omega / TWO_PI

    @property
    def npoints(self):
        return self.omega.size

    @property
    def omega_center(self):
        return 0.5 * (self.omega[0] + self.omega[-1])

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class PowerSweep:
    """A set of traces of the same resonator at different drive powers."""

    traces: tuple[ComplexTrace, ...]
    device_id: str | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "traces", tuple(self.traces))

    def __len__(self):
        return len(self.traces)

    def __iter__(self):
        return iter(self.traces)

    @property
    def powers_w(self):
        return np.array([t.power_w for t in self.traces], dtype=float)

    @property
    def powers_dbm(self):
        return np.array(
            [np.nan if t.power_dbm is None else t.power_dbm for t in self.traces]
        )


@dataclass(frozen=True)
class BaselineEnv:
    """Feedline transmission baseline removed before resonator fitting.

    Evaluated relative to the center of whatever frequency grid it is
    applied to:

        env(f) = amp * (1 + slope*(f - fc)) * exp(i*(phase0 - 2*pi*tau*(f - fc)))

    with ``fc`` the midpoint of the grid, ``slope`` in 1/Hz and ``tau`` the
    cable delay in seconds.
    """

    amp: float = 1.0
    slope: float = 0.0
    tau: float = 0.0
    phase0: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.amp) and self.amp > 0):
            raise InvalidParameterError("amp must be positive")

    @classmethod
    def identity(cls):
        return cls()

    @property
    def is_identity(self):
        return (
            self.amp == 1.0
            and self.slope == 0.0
            and self.tau == 0.0
            and self.phase0 == 0.0
        )

    def response(self, omega):
        """Complex baseline factor on an angular-frequency grid."""
        omega = np.asarray(omega, dtype=float)
        f = omega / TWO_PI
        fc = 0.5 * (f.flat[0] + f.flat[-1]) if f.size else 0.0
        df = f - fc
        return (
            self.amp
            * (1.0 + self.slope * df)
            * np.exp(1j * (self.phase0 - TWO_PI * self.tau * df))
        )
