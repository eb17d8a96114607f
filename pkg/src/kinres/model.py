"""Steady-state forward model of a Kerr resonator hanging off a feedline.

The response at drive detuning ``delta = (omega_d - omega0)/(kappa+gamma)``
and reduced nonlinearity ``xi = n_tilde_sq * K / (kappa+gamma)`` is

    S21 = 1 - kappa/(kappa+gamma) * exp(i*phi)/cos(phi) * 1/(1 + 2i*(delta - xi*n)),

where the dimensionless intensity ``n`` solves the cubic

    (delta^2 + 1/4) n - 2 delta xi n^2 + xi^2 n^3 = 1/2.

``n_tilde_sq = kappa/(kappa+gamma)^2 * P_in/(hbar*omega0)`` is the reported
average photon number; the intracavity occupation is ``n * n_tilde_sq``.

The cubic is solved in the substituted variable ``m = xi * n``, where it
becomes the monic, uniformly well-conditioned

    ((m - delta)^2 + 1/4) m = xi / 2,

so the closed form stays accurate down to arbitrarily small |xi|.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar

from .data import TWO_PI, BaselineEnv, ComplexTrace
from .errors import InvalidParameterError, OverlapWarning
from .validation import (
    as_float_array,
    check_finite,
    check_non_negative,
    check_positive,
    check_strictly_increasing,
)

BRANCH_RULES = ("continuation", "lowest", "highest")

#: Minimum spacing, in units of the larger total linewidth, below which two
#: multiplexed hangers are no longer treated as independent notches.
MULTIPLEX_SEPARATION_LINEWIDTHS = 10.0


@dataclass(frozen=True)
class KerrResonatorParams:
    """Kerr hanger resonator: all rates angular (rad/s), ``kerr`` signed.

    ``phi`` is the impedance-mismatch rotation of the notch term
    (the phi-rotation method); it must keep ``cos(phi)`` away from zero.
    """

    omega0: float
    kappa: float
    gamma: float
    kerr: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        check_positive(self.omega0, "omega0")
        check_positive(self.kappa, "kappa")
        check_non_negative(self.gamma, "gamma")
        if not np.isfinite(self.phi) or abs(self.phi) >= np.pi / 2:
            raise InvalidParameterError("phi must satisfy |phi| < pi/2")

    @property
    def total_rate(self):
        return self.kappa + self.gamma

    @property
    def f0_hz(self):
        return self.omega0 / TWO_PI

    @property
    def q_coupling(self):
        return self.omega0 / self.kappa

    @property
    def q_internal(self):
        return self.omega0 / self.gamma if self.gamma > 0 else np.inf


@dataclass(frozen=True)
class DriveCondition:
    """Drive tone: angular frequency (rad/s) and power at the device (W)."""

    omega_d: float
    power_at_device: float

    def __post_init__(self):
        if not np.isfinite(self.omega_d):
            raise InvalidParameterError("omega_d must be finite")
        check_non_negative(self.power_at_device, "power_at_device")


@dataclass(frozen=True)
class ReducedDriveVars:
    """Dimensionless drive variables: detuning, nonlinearity, photon number."""

    delta: float
    xi: float
    n_tilde_sq: float


@dataclass(frozen=True)
class PhotonSolution:
    """Real nonnegative intensity roots at one drive point, ascending."""

    roots: tuple[float, ...]
    selected: int
    branch_rule: str

    @property
    def n(self):
        return self.roots[self.selected]


def reduced_vars(params: KerrResonatorParams, drive: DriveCondition) -> ReducedDriveVars:
    """Reduced drive variables for one resonator/drive combination.

    ``delta = (omega_d - omega0)/(kappa+gamma)``,
    ``n_tilde_sq = kappa/(kappa+gamma)^2 * P/(hbar*omega0)``,
    ``xi = n_tilde_sq * kerr/(kappa+gamma)``.
    """
    w = params.total_rate
    if w <= 0:
        raise InvalidParameterError("kappa + gamma must be positive")
    delta = (drive.omega_d - params.omega0) / w
    n_tilde_sq = params.kappa / w**2 * drive.power_at_device / (hbar * params.omega0)
    xi = n_tilde_sq * params.kerr / w
    return ReducedDriveVars(delta=delta, xi=xi, n_tilde_sq=n_tilde_sq)


def kerr_from_fit(xi, kappa, gamma, n_tilde_sq):
    """Self-Kerr rate from fitted reduced variables: ``xi*(kappa+gamma)/n_tilde_sq``.

    Exact algebraic inverse of the ``xi`` construction in :func:`reduced_vars`.
    """
    if n_tilde_sq <= 0:
        raise InvalidParameterError(
            "Kerr is undefined at zero photon number (n_tilde_sq must be > 0)"
        )
    return xi * (kappa + gamma) / n_tilde_sq


def photon_cubic_residual(n, delta, xi):
    """Relative residual of the intensity cubic at candidate root(s) ``n``."""
    n = np.asarray(n, dtype=float)
    t1 = (delta**2 + 0.25) * n
    t2 = -2.0 * delta * xi * n**2
    t3 = xi**2 * n**3
    scale = np.maximum.reduce([np.full_like(t1, 0.5), np.abs(t1), np.abs(t2), np.abs(t3)])
    return np.abs(t1 + t2 + t3 - 0.5) / scale


def _cubic_m_roots(delta, xi):
    """Roots of ((m-d)^2 + 1/4) m = xi/2 for an array of detunings d.

    Returns ``(m_roots, counts)`` with ``m_roots`` of shape (npts, 3),
    ascending, NaN-padded, and ``counts`` in {1, 3}.
    """
    d = np.asarray(delta, dtype=float)
    # Monic cubic m^3 + a m^2 + b m + c, depressed with m = t - a/3.
    a = -2.0 * d
    p = 0.25 - d * d / 3.0
    q = 2.0 * d**3 / 27.0 + d / 6.0 - xi / 2.0
    disc = -4.0 * p**3 - 27.0 * q * q

    m = np.full((d.size, 3), np.nan)
    counts = np.ones(d.size, dtype=int)

    three = disc > 0.0
    if np.any(three):
        p3, q3, d3 = p[three], q[three], d[three]
        rho = 2.0 * np.sqrt(-p3 / 3.0)
        cos3t = np.clip(-4.0 * q3 / rho**3, -1.0, 1.0)
        theta = np.arccos(cos3t) / 3.0
        ks = np.array([0.0, 1.0, 2.0])
        t3roots = rho[:, None] * np.cos(theta[:, None] - 2.0 * np.pi * ks / 3.0)
        m[three] = t3roots + (2.0 * d3 / 3.0)[:, None]
        counts[three] = 3

    one = ~three
    if np.any(one):
        p1, q1, d1 = p[one], q[one], d[one]
        s = np.sqrt(np.maximum(q1 * q1 / 4.0 + p1**3 / 27.0, 0.0))
        big = -np.sign(q1) * np.cbrt(np.abs(q1) / 2.0 + s)
        small = np.where(big != 0.0, -p1 / (3.0 * big), 0.0)
        m[one, 0] = big + small + 2.0 * d1 / 3.0

    # Newton polish in the product form h(m) = ((m-d)^2 + 1/4) m - xi/2;
    # guarded steps keep near-fold double roots from ping-ponging.
    dm = d[:, None]
    for _ in range(3):
        h = ((m - dm) ** 2 + 0.25) * m - xi / 2.0
        hp = 3.0 * m * m - 4.0 * dm * m + dm * dm + 0.25
        with np.errstate(invalid="ignore", divide="ignore"):
            step = h / hp
        ok = np.isfinite(step) & (np.abs(step) < 0.5 * (1.0 + np.abs(m)))
        m = np.where(ok, m - step, m)

    m.sort(axis=1)  # NaN entries sort to the end
    return m, counts


def photon_roots(delta, xi):
    """All real nonnegative intensity roots per detuning point.

    Parameters
    ----------
    delta : array_like
        Reduced detunings (any shape is flattened to 1-D).
    xi : float
        Reduced nonlinearity, constant over the sweep.

    Returns
    -------
    roots : ndarray, shape (npts, 3)
        Ascending roots ``n``, NaN-padded.
    counts : ndarray of int
        Number of real roots per point (1 or 3).
    """
    d = np.atleast_1d(np.asarray(delta, dtype=float))
    check_finite(d, "delta")
    if not np.isfinite(xi):
        raise InvalidParameterError("xi must be finite")
    if xi == 0.0:
        roots = np.full((d.size, 3), np.nan)
        roots[:, 0] = 0.5 / (d * d + 0.25)
        return roots, np.ones(d.size, dtype=int)
    m, counts = _cubic_m_roots(d, xi)
    n = m / xi
    # Every real root of the m-cubic has sign(m) == sign(xi), so n >= 0 up
    # to rounding of roots at n ~ 0.
    n = np.where(np.isnan(n), np.nan, np.maximum(n, 0.0))
    if xi < 0:
        # Dividing by a negative xi reversed the ordering; restore ascending
        # order and re-pack so valid roots lead each NaN-padded row.
        n = n[:, ::-1]
        idx = np.argsort(np.isnan(n), axis=1, kind="stable")
        n = np.take_along_axis(n, idx, axis=1)
    return n, counts


def select_photon_branch(roots, counts, direction="up", branch_rule="continuation",
                         initial=None):
    """Pick one physical root per sweep point.

    ``continuation`` walks the sweep in its physical direction and keeps the
    root nearest the previous point's solution, reproducing how a slowly
    swept drive populates the resonator through the bistable window;
    ``lowest``/``highest`` are diagnostic selectors.  ``initial`` seeds the
    continuation when the sweep starts inside a multi-root window (the
    lowest root is used when it is None).
    """
    if branch_rule not in BRANCH_RULES:
        raise InvalidParameterError(f"branch_rule must be one of {BRANCH_RULES}")
    npts = counts.size
    if branch_rule == "lowest":
        return roots[:, 0].copy()
    if branch_rule == "highest":
        return roots[np.arange(npts), counts - 1].copy()

    order_rev = direction == "down"
    c = counts[::-1] if order_rev else counts
    r = roots[::-1] if order_rev else roots
    out = np.empty(npts)
    change = np.nonzero(np.diff(c))[0] + 1
    starts = np.concatenate(([0], change))
    ends = np.concatenate((change, [npts]))
    prev = initial
    for s, e in zip(starts, ends):
        if c[s] == 1:
            out[s:e] = r[s:e, 0]
        else:
            # Branches of the cubic cannot cross inside a run (crossings are
            # folds, which bound the run), so the sorted index is locked.
            if prev is None:
                k = 0
            else:
                k = int(np.nanargmin(np.abs(r[s, :] - prev)))
            out[s:e] = r[s:e, k]
        prev = out[e - 1]
    return out[::-1] if order_rev else out


def solve_photon_cubic(delta, xi, branch_rule="continuation", prev_n=None) -> PhotonSolution:
    """Solve the intensity cubic at a single drive point.

    ``branch_rule='continuation'`` selects the root nearest ``prev_n`` (the
    solution at the previous sweep point); without ``prev_n`` it falls back
    to the lowest root.
    """
    if branch_rule not in BRANCH_RULES:
        raise InvalidParameterError(f"branch_rule must be one of {BRANCH_RULES}")
    roots, counts = photon_roots(float(delta), float(xi))
    vals = tuple(float(v) for v in roots[0, : counts[0]])
    if branch_rule == "highest":
        selected = len(vals) - 1
    elif branch_rule == "continuation" and prev_n is not None:
        selected = int(np.argmin([abs(v - prev_n) for v in vals]))
    else:
        selected = 0
    return PhotonSolution(roots=vals, selected=selected, branch_rule=branch_rule)


def s21_hanger(params: KerrResonatorParams, delta, xi, n):
    """Hanger transmission at reduced detuning(s) ``delta`` and intensity ``n``."""
    cphi = np.cos(params.phi)
    if abs(cphi) < 1e-12:
        raise InvalidParameterError("cos(phi) = 0: phi rotation is degenerate")
    depth = params.kappa / params.total_rate
    rot = np.exp(1j * params.phi) / cphi
    return 1.0 - depth * rot / (1.0 + 2j * (np.asarray(delta) - xi * np.asarray(n)))


def linear_s21(omega, omega0, kappa, gamma, phi):
    """Closed-form linear (kerr = 0) hanger response on an angular grid."""
    w = kappa + gamma
    delta = (np.asarray(omega, dtype=float) - omega0) / w
    cphi = np.cos(phi)
    if abs(cphi) < 1e-12:
        raise InvalidParameterError("cos(phi) = 0: phi rotation is degenerate")
    return 1.0 - (kappa / w) * np.exp(1j * phi) / cphi / (1.0 + 2j * delta)


def kerr_response(params: KerrResonatorParams, omega, power_w, direction="up",
                  branch_rule="continuation"):
    """Bare resonator response on an angular grid at one drive power.

    Returns ``(s21, n, n_tilde_sq, xi)`` where ``n`` is the selected
    intensity branch per point.
    """
    omega = np.asarray(omega, dtype=float)
    w = params.total_rate
    n_tilde_sq = params.kappa / w**2 * power_w / (hbar * params.omega0)
    xi = n_tilde_sq * params.kerr / w
    delta = (omega - params.omega0) / w
    roots, counts = photon_roots(delta, xi)
    n = select_photon_branch(roots, counts, direction=direction, branch_rule=branch_rule)
    return s21_hanger(params, delta, xi, n), n, n_tilde_sq, xi


def forward_trace(params: KerrResonatorParams, env: BaselineEnv | None, freqs_hz,
                  power_w, direction="up", branch_rule="continuation",
                  temperature_k=None, device_id=None) -> ComplexTrace:
    """Model trace over a frequency grid (Hz), baseline applied.

    The photon branch is selected by sweep-direction continuation by
    default.  ``env=None`` means identity baseline.
    """
    freqs_hz = as_float_array(freqs_hz, "freqs_hz")
    check_finite(freqs_hz, "freqs_hz")
    check_strictly_increasing(freqs_hz, "freqs_hz")
    check_non_negative(power_w, "power_w")
    omega = TWO_PI * freqs_hz
    s21, _, _, _ = kerr_response(params, omega, power_w, direction, branch_rule)
    if env is not None and not env.is_identity:
        s21 = s21 * env.response(omega)
    return ComplexTrace(
        omega=omega,
        s21=s21,
        power_w=float(power_w),
        temperature_k=temperature_k,
        sweep_direction=direction,
        device_id=device_id,
    )


def multiplex_feedline(resonators, freqs_hz, power_w, direction="up",
                       branch_rule="continuation") -> ComplexTrace:
    """Response of several hangers on one feedline: product of notch factors.

    Valid for well-separated resonances; emits :class:`OverlapWarning`
    (non-fatal) when any pair sits closer than
    ``MULTIPLEX_SEPARATION_LINEWIDTHS`` times the larger total linewidth.
    An empty list yields unit transmission.
    """
    freqs_hz = as_float_array(freqs_hz, "freqs_hz")
    check_finite(freqs_hz, "freqs_hz")
    check_strictly_increasing(freqs_hz, "freqs_hz")
    check_non_negative(power_w, "power_w")
    resonators = list(resonators)
    for i, a in enumerate(resonators):
        for b in resonators[i + 1:]:
            sep = abs(a.omega0 - b.omega0)
            if sep <= MULTIPLEX_SEPARATION_LINEWIDTHS * max(a.total_rate, b.total_rate):
                warnings.warn(
                    "multiplexed resonators closer than "
                    f"{MULTIPLEX_SEPARATION_LINEWIDTHS:g} linewidths; "
                    "the product model may be inaccurate",
                    OverlapWarning,
                    stacklevel=2,
                )
    omega = TWO_PI * freqs_hz
    total = np.ones(omega.size, dtype=complex)
    for res in resonators:
        s21, _, _, _ = kerr_response(res, omega, power_w, direction, branch_rule)
        total = total * s21
    return ComplexTrace(
        omega=omega, s21=total, power_w=float(power_w), sweep_direction=direction
    )
