"""Levenberg-Marquardt least squares with a numeric Jacobian.

The Jacobian is built from central differences with a per-parameter relative
step of 1e-6 (one-sided next to an active bound).  The damping parameter
multiplies the diagonal of J^T J (Marquardt scaling), and box constraints are
enforced by projecting trial steps onto the feasible region.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import FitDivergenceError, InvalidParameterError

_REL_STEP = 1e-6
_LAMBDA_UP = 10.0
_LAMBDA_DOWN = 3.0
_LAMBDA_MAX = 1e15
_MAX_BAD_TRIALS = 50


@dataclass
class FitConfig:
    """Optimizer knobs shared by every fitting routine.

    ``bounds`` maps parameter names to ``(lo, hi)`` pairs and overrides the
    defaults a fitter chooses for its own parameters.  ``seed`` feeds the
    deterministic jitter used when a fitter restarts a non-converged fit.
    """

    max_iterations: int = 100
    gradient_tol: float = 1e-8
    step_tol: float = 1e-10
    residual_tol: float = 1e-12
    damping_init: float = 1e-3
    seed: int = 0
    bounds: dict | None = None

    def __post_init__(self):
        if self.max_iterations <= 0:
            raise InvalidParameterError("max_iterations must be > 0")
        for name in ("gradient_tol", "step_tol", "residual_tol", "damping_init"):
            if getattr(self, name) <= 0:
                raise InvalidParameterError(f"{name} must be > 0")


@dataclass
class FitResult:
    """Outcome of one least-squares run.

    ``covariance`` is sigma^2 (J^T J)^-1 with sigma^2 the residual variance;
    ``stderr`` its diagonal square root.  ``pinv_fallback`` flags a singular
    J^T J handled through the pseudo-inverse.
    """

    params: np.ndarray
    covariance: np.ndarray
    stderr: np.ndarray
    residual_rms: float
    n_iterations: int
    converged: bool
    cost: float = np.nan
    message: str = ""
    pinv_fallback: bool = False
    ill_conditioned: bool = False
    param_names: tuple = ()
    extra: dict = field(default_factory=dict)

    def _index(self, name):
        try:
            return self.param_names.index(name)
        except ValueError:
            raise KeyError(f"unknown parameter {name!r}") from None

    def value(self, name):
        return float(self.params[self._index(name)])

    def error(self, name):
        return float(self.stderr[self._index(name)])

    @property
    def values(self):
        return {n: float(v) for n, v in zip(self.param_names, self.params)}


def resolve_bounds(param_names, defaults, cfg: FitConfig | None):
    """Merge per-fitter default bounds with any user overrides in ``cfg``."""
    lo = np.array([defaults.get(n, (-np.inf, np.inf))[0] for n in param_names])
    hi = np.array([defaults.get(n, (-np.inf, np.inf))[1] for n in param_names])
    if cfg is not None and cfg.bounds:
        for name, pair in cfg.bounds.items():
            if name in param_names:
                j = param_names.index(name)
                lo[j], hi[j] = pair
    return np.column_stack([lo, hi])


def _jacobian(fn, p, x_scale, lo, hi, r0):
    n = p.size
    J = np.empty((r0.size, n))
    for j in range(n):
        h = _REL_STEP * max(abs(p[j]), x_scale[j])
        up = min(p[j] + h, hi[j])
        dn = max(p[j] - h, lo[j])
        if up == dn:  # bound interval narrower than the step
            up = min(p[j] + h, hi[j] if np.isfinite(hi[j]) else p[j] + h)
            dn = up - h
        pj = p.copy()
        pj[j] = up
        r_up = fn(pj)
        pj[j] = dn
        r_dn = fn(pj)
        if not (np.all(np.isfinite(r_up)) and np.all(np.isfinite(r_dn))):
            raise FitDivergenceError(
                "non-finite residual while forming the Jacobian",
                last_params=p.copy(),
                last_cost=float(r0 @ r0),
            )
        J[:, j] = (r_up - r_dn) / (up - dn)
    return J


def _covariance(J, cost, m, n):
    dof = m - n
    sigma2 = cost / dof if dof > 0 else np.nan
    jtj = J.T @ J
    pinv_used = False
    try:
        inv = np.linalg.solve(jtj, np.eye(n))
        if not np.all(np.isfinite(inv)):
            raise np.linalg.LinAlgError
    except np.linalg.LinAlgError:
        inv = np.linalg.pinv(jtj)
        pinv_used = True
    cov = sigma2 * inv
    cov = 0.5 * (cov + cov.T)
    stderr = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    return cov, stderr, pinv_used


def least_squares(residual_fn, init, cfg: FitConfig | None = None, *,
                  bounds=None, x_scale=None, param_names=()) -> FitResult:
    """Minimize ``sum(residual_fn(p)**2)`` over ``p`` starting from ``init``.

    Parameters
    ----------
    residual_fn : callable
        Maps a parameter vector to a 1-D float residual vector (complex
        residuals must be split into real and imaginary parts by the
        caller).  Must be finite at ``init``.
    init : array_like
        Starting parameter vector.
    cfg : FitConfig, optional
    bounds : array_like of shape (nparams, 2), optional
        Box constraints; trial steps are projected onto them.
    x_scale : array_like, optional
        Typical magnitude per parameter, used for difference steps and the
        step-size convergence test.  Defaults to 1.

    Raises
    ------
    InvalidParameterError
        Empty residual vector, or non-finite residual at ``init``.
    FitDivergenceError
        The iteration hit non-finite residuals it could not step around;
        carries the last good parameters and cost.
    """
    cfg = cfg or FitConfig()
    p = np.asarray(init, dtype=float).copy()
    if p.ndim != 1:
        raise InvalidParameterError("init must be a 1-D parameter vector")
    nparams = p.size
    if bounds is None:
        lo = np.full(nparams, -np.inf)
        hi = np.full(nparams, np.inf)
    else:
        b = np.asarray(bounds, dtype=float)
        lo, hi = b[:, 0], b[:, 1]
        p = np.clip(p, lo, hi)
    if x_scale is None:
        x_scale = np.ones(nparams)
    else:
        x_scale = np.asarray(x_scale, dtype=float)

    r = np.asarray(residual_fn(p), dtype=float)
    if r.size == 0:
        raise InvalidParameterError("residual vector is empty")
    if not np.all(np.isfinite(r)):
        raise InvalidParameterError("residual is not finite at the initial point")
    m = r.size
    cost = float(r @ r)

    lam = cfg.damping_init
    converged = False
    message = "max_iterations reached"
    n_iter = 0
    J = None

    for n_iter in range(1, cfg.max_iterations + 1):
        J = _jacobian(residual_fn, p, x_scale, lo, hi, r)
        g = J.T @ r
        # Scale-invariant gradient test: g_j carries units of 1/param_j.
        if np.max(np.abs(g) * (np.abs(p) + x_scale)) < cfg.gradient_tol * (1.0 + cost):
            converged = True
            message = "gradient below tolerance"
            break

        jtj = J.T @ J
        diag = np.diag(jtj).copy()
        floor = max(diag.max(), 1.0) * 1e-14
        diag = np.maximum(diag, floor)

        accepted = False
        bad_trials = 0
        while not accepted:
            try:
                step = np.linalg.solve(jtj + lam * np.diag(diag), -g)
            except np.linalg.LinAlgError:
                step = np.linalg.lstsq(jtj + lam * np.diag(diag), -g, rcond=None)[0]
            trial = np.clip(p + step, lo, hi)
            r_trial = np.asarray(residual_fn(trial), dtype=float)
            finite = np.all(np.isfinite(r_trial))
            cost_trial = float(r_trial @ r_trial) if finite else np.inf
            if finite and cost_trial < cost:
                rel_step = np.max(np.abs(trial - p) / (np.abs(p) + x_scale))
                rel_drop = (cost - cost_trial) / cost if cost > 0 else 0.0
                p, r, cost = trial, r_trial, cost_trial
                lam = max(lam / _LAMBDA_DOWN, 1e-14)
                accepted = True
                if rel_step < cfg.step_tol:
                    converged = True
                    message = "step below tolerance"
                elif rel_drop < cfg.residual_tol:
                    converged = True
                    message = "cost decrease below tolerance"
            else:
                if not finite:
                    bad_trials += 1
                    if bad_trials > _MAX_BAD_TRIALS:
                        raise FitDivergenceError(
                            "residual stayed non-finite over "
                            f"{_MAX_BAD_TRIALS} damped trial steps",
                            last_params=p.copy(),
                            last_cost=cost,
                        )
                lam *= _LAMBDA_UP
                if lam > _LAMBDA_MAX:
                    # No descent direction at machine scale: treat the
                    # current point as the (local) optimum.
                    converged = True
                    message = "damping saturated"
                    accepted = True
        if converged:
            break

    J = _jacobian(residual_fn, p, x_scale, lo, hi, r)
    cov, stderr, pinv_used = _covariance(J, cost, m, nparams)
    return FitResult(
        params=p,
        covariance=cov,
        stderr=stderr,
        residual_rms=float(np.sqrt(cost / m)),
        n_iterations=n_iter,
        converged=converged,
        cost=cost,
        message=message,
        pinv_fallback=pinv_used,
        param_names=tuple(param_names),
    )
