import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from fujita.errors import DomainError
from fujita.special_functions import b_kernel, bessel_k, gamma_fn, riesz_constant, sphere_area

# high-precision reference values (mpmath, 30 digits)
K_REFERENCE = [
    (0.25, 1.3, 0.28344915098216074),
    (0.75, 0.2, 3.1516010863828757),
    (1.5, 5.0, 0.0045319360495714591),
    (0.0, 0.01, 4.7212447301610949),
    (2.3, 40.0, 8.9592320251161493e-19),
]


@pytest.mark.parametrize("nu,z,expected", K_REFERENCE)
def test_bessel_k_reference_values(nu, z, expected):
    assert bessel_k(nu, z) == pytest.approx(expected, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(nu=st.floats(-3, 3, allow_subnormal=False), z=st.floats(1e-3, 50))
def test_bessel_k_matches_scipy(nu, z):
    assert bessel_k(nu, z) == pytest.approx(special.kv(nu, z), rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(nu=st.floats(0, 3), z=st.floats(1e-2, 30))
def test_bessel_k_even_in_order(nu, z):
    assert bessel_k(-nu, z) == pytest.approx(bessel_k(nu, z), rel=1e-12)


@pytest.mark.parametrize("z", [0.1, 1.0, 7.5])
def test_bessel_k_half_order_closed_form(z):
    assert bessel_k(0.5, z) == pytest.approx(math.sqrt(math.pi / (2 * z)) * math.exp(-z), rel=1e-13)


def test_bessel_k_vectorised():
    out = bessel_k(np.array([0.5, 1.0]), np.array([[1.0], [2.0]]))
    assert out.shape == (2, 2)
    assert out[1, 1] == pytest.approx(special.kv(1.0, 2.0), rel=1e-12)


@pytest.mark.parametrize("z", [0.0, -1.0, math.inf])
def test_bessel_k_domain(z):
    with pytest.raises(DomainError):
        bessel_k(0.5, z)


@settings(max_examples=100, deadline=None)
@given(x=st.floats(1e-3, 170))
def test_gamma_matches_math(x):
    assert gamma_fn(x) == pytest.approx(math.gamma(x), rel=1e-12)


@pytest.mark.parametrize("x", [0.0, -2.5, math.nan])
def test_gamma_domain(x):
    with pytest.raises(DomainError):
        gamma_fn(x)


@pytest.mark.parametrize("d,w", [(1, 0.5), (1, 1.5), (3, 1.0), (3, 4.0), (2, 2.5)])
def test_b_kernel_is_a_probability_density(d, w):
    # B_w is the inverse transform of (1 + 4 pi^2 |xi|^2)^(-w/2); its mass is 1
    area = sphere_area(d)
    f = lambda r: area * r ** (d - 1) * b_kernel(w, d, r)
    mass = sum(integrate.quad(f, a, b, limit=200)[0] for a, b in ((0, 1), (1, 10), (10, 80)))
    assert mass == pytest.approx(1.0, rel=1e-7)


@pytest.mark.parametrize("d,alpha,expected", [
    (1, 0.5, 0.39894228040143268),
    (3, 1.0, 0.050660591821168886),
    (2, 1.5, 0.33296793550170026),
])
def test_riesz_constant_reference(d, alpha, expected):
    assert float(riesz_constant(d, alpha)) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("d,alpha", [(1, 1.0), (1, 1.5), (2, 2.0), (0, 0.5)])
def test_riesz_constant_recurrent_case_rejected(d, alpha):
    with pytest.raises(DomainError):
        riesz_constant(d, alpha)


@pytest.mark.parametrize("d,expected", [(1, 2.0), (2, 2 * math.pi), (3, 4 * math.pi), (4, 2 * math.pi**2)])
def test_sphere_area(d, expected):
    assert sphere_area(d) == pytest.approx(expected, rel=1e-14)
