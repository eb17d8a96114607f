"""Levenberg-Marquardt engine behavior."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from kinres.errors import FitDivergenceError, InvalidParameterError
from kinres.leastsq import FitConfig, least_squares, resolve_bounds


def test_exact_linear_model_recovery():
    x = np.linspace(0.0, 1.0, 40)
    y = 3.7 * x

    res = least_squares(lambda p: p[0] * x - y, np.array([1.0]))
    assert res.converged
    assert res.params[0] == pytest.approx(3.7, rel=1e-10)
    assert res.n_iterations <= 10


def test_rosenbrock_from_standard_start():
    def residual(p):
        return np.array([10.0 * (p[1] - p[0] ** 2), 1.0 - p[0]])

    res = least_squares(
        residual, np.array([-1.2, 1.0]), FitConfig(max_iterations=200)
    )
    assert res.converged
    assert_allclose(res.params, [1.0, 1.0], atol=1e-8)
    assert res.n_iterations <= 200


def test_empty_residual_rejected():
    with pytest.raises(InvalidParameterError):
        least_squares(lambda p: np.array([]), np.array([1.0]))


def test_non_finite_at_init_rejected():
    with pytest.raises(InvalidParameterError):
        least_squares(lambda p: np.array([np.nan]), np.array([1.0]))


def test_divergence_reports_last_good_state():
    # Blows up as soon as the optimizer moves away from the start.
    def residual(p):
        if abs(p[0] - 1.0) > 1e-12:
            return np.array([np.inf])
        return np.array([5.0])

    with pytest.raises(FitDivergenceError) as err:
        least_squares(residual, np.array([1.0]), FitConfig(max_iterations=3))
    assert err.value.last_params is not None


def test_covariance_properties():
    rng = np.random.default_rng(0)
    x = np.linspace(0.0, 1.0, 200)
    y = 2.0 * x + 1.0 + rng.normal(0, 0.05, x.size)

    res = least_squares(
        lambda p: p[0] * x + p[1] - y, np.array([1.0, 0.0]),
        param_names=("a", "b"),
    )
    cov = res.covariance
    assert_allclose(cov, cov.T, atol=1e-15)
    eig = np.linalg.eigvalsh(cov)
    assert eig.min() > -1e-8 * eig.max()
    assert_allclose(res.stderr, np.sqrt(np.diag(cov)), rtol=1e-12)
    assert res.value("a") == pytest.approx(2.0, abs=5 * res.error("a"))


def test_stderr_brackets_monte_carlo_scatter():
    x = np.linspace(0.0, 1.0, 100)
    fitted, errs = [], []
    for seed in range(100):
        y = 3.0 * x + np.random.default_rng(seed).normal(0, 0.1, x.size)
        res = least_squares(lambda p: p[0] * x - y, np.array([1.0]))
        fitted.append(res.params[0])
        errs.append(res.stderr[0])
    mc = np.std(fitted)
    reported = np.mean(errs)
    assert 0.5 < mc / reported < 2.0


def test_pinv_fallback_on_degenerate_parameter():
    x = np.linspace(0.0, 1.0, 30)

    def residual(p):
        return p[0] * x - 2.0 * x  # p[1] never enters

    res = least_squares(residual, np.array([1.0, 1.0]))
    assert res.pinv_fallback
    assert res.params[0] == pytest.approx(2.0, rel=1e-8)


def test_bounds_are_enforced():
    x = np.linspace(0.0, 1.0, 30)
    res = least_squares(
        lambda p: p[0] * x - 5.0 * x, np.array([1.0]), bounds=[(0.0, 2.0)]
    )
    assert res.params[0] == 2.0


def test_config_validation():
    with pytest.raises(InvalidParameterError):
        FitConfig(max_iterations=0)
    with pytest.raises(InvalidParameterError):
        FitConfig(gradient_tol=0.0)
    with pytest.raises(InvalidParameterError):
        FitConfig(step_tol=-1.0)


def test_resolve_bounds_merges_overrides():
    cfg = FitConfig(bounds={"kappa": (1.0, 2.0)})
    out = resolve_bounds(["omega0", "kappa"], {"omega0": (-1.0, 1.0)}, cfg)
    assert_allclose(out[0], [-1.0, 1.0])
    assert_allclose(out[1], [1.0, 2.0])
