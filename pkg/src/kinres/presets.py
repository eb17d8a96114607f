"""Reference parameter sets for NbN films and measured hanger devices.

Bundled so that demos, synthetic-data presets and round-trip tests can run
against realistic numbers without external files.  Films are keyed by their
Ar/N2 sputtering flow ratio, devices by ``<film>-<inductor width in nm>``.
All values are SI (critical current densities converted from A/cm^2,
frequencies in Hz).
"""

from dataclasses import dataclass

import numpy as np

from .film import FilmProperties
from .model import KerrResonatorParams

_FILM_THICKNESS_M = 13e-9


def _film(tc, r_sq, lk0_ph, jc_a_cm2):
    return FilmProperties(
        tc=tc,
        r_sq=r_sq,
        thickness=_FILM_THICKNESS_M,
        lk0=lk0_ph * 1e-12,
        jc=jc_a_cm2 * 1e4 if jc_a_cm2 else 0.0,
    )


#: Deposited films: Ar/N2 flow -> measured properties.
FILMS = {
    "80/0.5": _film(5.0, 106.0, 34.5, 0.0),
    "80/1": _film(5.2, 122.0, 38.2, 1.23e6),
    "80/2": _film(7.3, 151.0, 34.9, 1.36e6),
    "80/3": _film(7.5, 196.0, 44.4, 1.66e6),
    "80/4": _film(6.5, 225.0, 52.5, 1.51e6),
    "80/5": _film(6.0, 267.0, 57.2, 1.21e6),
    "80/6": _film(5.8, 310.0, 76.8, 1.05e6),
    "80/7": _film(5.6, 362.0, 91.3, 0.0),
    "80/8": _film(4.2, 518.0, 173.3, 0.0),
}


@dataclass(frozen=True)
class DeviceParams:
    """Measured parameters of one near-critically-coupled hanger device."""

    device_id: str
    width_m: float
    f0_hz: float
    kappa_hz: float
    gamma_hz: float
    kerr_hz: float
    f_delta_tls: float
    f_delta_tls_err: float
    n_c: float
    n_c_err: float
    df_age_hz: float | None = None

    def resonator(self, phi=0.0) -> KerrResonatorParams:
        """The device as forward-model parameters (angular rates)."""
        return KerrResonatorParams(
            omega0=2.0 * np.pi * self.f0_hz,
            kappa=2.0 * np.pi * self.kappa_hz,
            gamma=2.0 * np.pi * self.gamma_hz,
            kerr=2.0 * np.pi * self.kerr_hz,
            phi=phi,
        )


def _device(device_id, width_nm, f0_ghz, kappa_khz, gamma_khz, kerr_hz,
            fdtls_1e5, fdtls_err_1e5, n_c, n_c_err, df_age_mhz=None):
    return DeviceParams(
        device_id=device_id,
        width_m=width_nm * 1e-9,
        f0_hz=f0_ghz * 1e9,
        kappa_hz=kappa_khz * 1e3,
        gamma_hz=gamma_khz * 1e3,
        kerr_hz=kerr_hz,
        f_delta_tls=fdtls_1e5 * 1e-5,
        f_delta_tls_err=fdtls_err_1e5 * 1e-5,
        n_c=n_c,
        n_c_err=n_c_err,
        df_age_hz=df_age_mhz * 1e6 if df_age_mhz is not None else None,
    )


#: Near-critically-coupled devices, one per film and inductor width.
DEVICES = {
    "801-500": _device("801-500", 500, 5.58, 86.95, 57.52, -2.40, 1.02, 0.16, 34.14, 12.97, 3.42),
    "801-250": _device("801-250", 250, 4.95, 112.87, 68.00, -19.58, 1.40, 0.05, 9.69, 4.35),
    "802-500": _device("802-500", 500, 5.87, 74.51, 61.77, -3.05, 1.00, 0.03, 47.07, 11.08, 3.78),
    "802-250": _device("802-250", 250, 5.17, 40.59, 66.21, -5.56, 1.22, 0.27, 42.84, 48.82),
    "803-500": _device("803-500", 500, 5.95, 91.88, 95.96, -4.17, 1.83, 0.12, 1.74, 1.58, 4.83),
    "803-250": _device("803-250", 250, 5.15, 50.42, 66.66, -11.50, 1.31, 0.07, 44.38, 16.56),
    "804-500": _device("804-500", 500, 5.49, 123.21, 95.31, -7.13, 1.69, 0.20, 77.03, 34.87, 4.00),
    "804-250": _device("804-250", 250, 4.74, 45.52, 90.26, -9.59, 1.88, 0.094, 64.42, 22.21),
    "805-500": _device("805-500", 500, 5.72, 105.78, 91.09, -5.77, 1.53, 0.15, 47.82, 29.05, 3.76),
    "805-250": _device("805-250", 250, 5.06, 59.69, 73.91, -13.94, 1.41, 0.07, 51.64, 14.33),
    "806-500": _device("806-500", 500, 4.93, 76.049, 111.30, -5.17, 2.16, 0.17, 48.56, 18.93, 3.28),
    "806-250": _device("806-250", 250, 4.37, 64.83, 132.39, -14.88, 2.84, 0.19, 22.71, 12.56),
    "807-500": _device("807-500", 500, 6.47, 64.81, 42.17, -18.46, 0.67, 0.05, 94.46, 50.58),
    "807-250": _device("807-250", 250, 6.59, 49.06, 62.92, -82.39, 1.43, 0.63, 2.23, 4.27),
    "808-500": _device("808-500", 500, 3.34, 45.63, 233.55, -6.23, 6.72, 0.29, 30.84, 12.42),
}
