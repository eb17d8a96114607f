"""Complex digamma accuracy against known constants and independent oracles."""

import numpy as np
import pytest
import scipy.special
from hypothesis import given, settings
from hypothesis import strategies as st

from kinres.errors import InvalidParameterError
from kinres.special import digamma
from oracles import digamma_series

EULER_GAMMA = 0.57721566490153286060651209


def test_psi_of_one_is_minus_euler_gamma():
    assert digamma(1.0 + 0j) == pytest.approx(-EULER_GAMMA, abs=1e-12)
    assert abs(digamma(1.0 + 0j).imag) < 1e-15


def test_psi_of_one_half():
    expected = -EULER_GAMMA - 2.0 * np.log(2.0)
    assert digamma(0.5 + 0j) == pytest.approx(expected, abs=1e-12)


def test_complex_point_against_series_oracle():
    z = 0.5 + 5j
    expected = digamma_series(z)
    got = digamma(z)
    assert abs(got - expected) / abs(expected) < 1e-12


def test_small_real_point_against_series_oracle():
    z = 0.25 + 0j
    expected = digamma_series(z, terms=2_000_000)
    assert abs(digamma(z) - expected) < 1e-11


def test_reflection_identity_on_grid():
    # psi(1-z) - psi(z) = pi * cot(pi z), away from the poles.
    rng = np.random.default_rng(3)
    re = rng.uniform(-8.3, 9.3, 1000) + 0.41  # keeps Re z off the integers
    im = rng.uniform(0.05, 12.0, 1000)
    z = re + 1j * im
    lhs = digamma(1.0 - z) - digamma(z)
    rhs = np.pi / np.tan(np.pi * z)
    err = np.abs(lhs - rhs) / np.maximum(np.abs(rhs), 1.0)
    assert err.max() < 1e-10


def test_against_scipy_cross_check():
    rng = np.random.default_rng(11)
    z = rng.uniform(-20, 20, 300) + 1j * rng.uniform(-30, 30, 300)
    z = z[np.abs(z.imag) > 1e-3]
    ours = digamma(z)
    ref = scipy.special.psi(z)
    assert np.max(np.abs(ours - ref) / np.maximum(np.abs(ref), 1.0)) < 1e-12


@settings(max_examples=200, deadline=None)
@given(
    st.floats(-30, 30, allow_nan=False),
    st.floats(0.01, 50, allow_nan=False),
)
def test_conjugate_symmetry(re, im):
    z = complex(re, im)
    assert digamma(np.conj(z)) == pytest.approx(np.conj(digamma(z)), rel=1e-12)


def test_poles_raise():
    for z in (0.0, -1.0, -2.0, -17.0):
        with pytest.raises(InvalidParameterError):
            digamma(z)


def test_array_input_shape():
    z = np.array([[1.0 + 1j, 2.0 + 0j], [0.5 - 3j, 10.0 + 10j]])
    out = digamma(z)
    assert out.shape == z.shape
    assert out[0, 1] == pytest.approx(1.0 - EULER_GAMMA, abs=1e-12)  # psi(2)
