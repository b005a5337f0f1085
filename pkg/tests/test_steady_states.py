import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fujita.errors import DomainError, ValidationError
from fujita.steady_states import (
    SteadyStateParams,
    eval_family,
    eval_singular,
    family_alpha2,
    fourier_side_check,
    fourier_transform_radial,
    kelvin,
    kelvin_image,
    riesz_residual,
    singular_coefficient,
    weight_exponent,
)

RADII = np.linspace(0.0, 5.0, 11)


def test_a_scale_reference():
    # mpmath, 30 digits
    assert SteadyStateParams(1.0, 1, 0.5).a_scale == pytest.approx(4.3768792304529533, rel=1e-13)


def test_singular_coefficient_reference():
    assert singular_coefficient(3, 1.0) == pytest.approx(2 / math.pi, rel=1e-13)


@settings(max_examples=100, deadline=None)
@given(d=st.integers(3, 5), A=st.floats(0.05, 20), r=st.floats(0, 50))
def test_alpha_two_reduces_to_classical_bubble(d, A, r):
    assert SteadyStateParams(A, d, 2.0).profile(r) == pytest.approx(family_alpha2(A, d, r), rel=1e-12)


@pytest.mark.parametrize("d,alpha", [(1, 0.5), (2, 1.0), (3, 1.5)])
def test_tail_constant(d, alpha):
    sp = SteadyStateParams(1.3, d, alpha)
    r = 1e6
    assert r ** (d - alpha) * sp.profile(r) == pytest.approx(sp.tail_constant, rel=1e-9)


def test_family_is_translation_covariant():
    sp = SteadyStateParams(2.0, 2, 1.0, c=(1.0, -2.0))
    pts = np.array([[1.0, -2.0], [2.0, -2.0], [1.0, 0.0]])
    vals = eval_family(sp, pts)
    assert vals[0] == pytest.approx(2.0)
    assert vals[1] == pytest.approx(sp.profile(1.0))
    assert vals[2] == pytest.approx(sp.profile(2.0))


@pytest.mark.parametrize("kwargs", [dict(A=1.0, d=1, alpha=1.0), dict(A=-1.0, d=3, alpha=1.0), dict(A=1.0, d=3, alpha=2.5)])
def test_parameter_validation(kwargs):
    with pytest.raises(ValidationError):
        SteadyStateParams(**kwargs)


points = st.lists(st.floats(-3, 3), min_size=3, max_size=3).filter(lambda v: sum(x * x for x in v) > 1e-4)


@settings(max_examples=100, deadline=None)
@given(x=points, A=st.floats(0.2, 5), alpha=st.floats(0.2, 2.0))
def test_kelvin_involution_and_family_closure(x, A, alpha):
    d = 3
    sp = SteadyStateParams(A, d, alpha)
    u = lambda y: eval_family(sp, y)
    v = lambda y: kelvin(u, np.zeros(d), d, alpha, y)
    assert kelvin(v, np.zeros(d), d, alpha, x) == pytest.approx(u(np.array(x)), rel=1e-10)
    assert v(x) == pytest.approx(eval_family(kelvin_image(sp), np.array(x)), rel=1e-10)


@settings(max_examples=100, deadline=None)
@given(x=points, alpha=st.floats(0.2, 1.9))
def test_singular_solution_is_kelvin_invariant(x, alpha):
    d = 3
    u = lambda y: eval_singular(d, alpha, y)
    assert kelvin(u, np.zeros(d), d, alpha, x) == pytest.approx(u(np.array(x)), rel=1e-10)


def test_singular_solution_undefined_at_origin():
    with pytest.raises(DomainError):
        eval_singular(3, 1.0, np.zeros(3))
    with pytest.raises(DomainError):
        kelvin(lambda y: 1.0, np.zeros(2), 2, 1.0, np.zeros(2))


@pytest.mark.parametrize("d,alpha", [(1, 0.5), (3, 1.0), (2, 1.5)])
def test_weight_exponent_vanishes_at_critical_power(d, alpha):
    p = SteadyStateParams(1.0, d, alpha).p
    assert weight_exponent(d, alpha, p) == pytest.approx(0.0, abs=1e-14)
    assert weight_exponent(d, alpha, p + 0.5) < 0


@pytest.mark.parametrize("d,alpha,A", [(1, 0.5, 1.0), (1, 0.75, 2.0), (2, 1.0, 1.0), (3, 1.0, 0.5), (3, 1.5, 1.0), (3, 0.5, 1.0)])
def test_family_is_a_riesz_fixed_point(d, alpha, A):
    sp = SteadyStateParams(A, d, alpha)
    rep = riesz_residual(sp.profile, d, alpha, sp.p, RADII)
    assert rep.max_normalized < 1e-9


@settings(max_examples=8, deadline=None)
@given(s=st.floats(0.5, 1.5))
def test_scaled_input_residual_is_exact(s):
    # the potential of (s u)^p is s^p u, so R = (s - s^p) u
    sp = SteadyStateParams(1.0, 1, 0.5)
    rep = riesz_residual(lambda r: s * sp.profile(r), 1, 0.5, sp.p, [0.0, 1.0])
    assert np.allclose(rep.residuals, (s - s**3) * sp.profile(rep.radii), atol=1e-9)


def test_perturbed_input_reference():
    sp = SteadyStateParams(1.0, 1, 0.5)
    rep = riesz_residual(lambda r: 1.1 * sp.profile(r), 1, 0.5, sp.p, [0.0])
    assert rep.residuals[0] == pytest.approx(1.1 - 1.1**3, abs=1e-9)


def test_zero_input_and_nonintegrable_input():
    rep = riesz_residual(lambda r: 0.0, 1, 0.5, 3.0, [0.0, 1.0])
    assert rep.max_normalized == 0.0
    with pytest.raises(ValidationError):
        riesz_residual(lambda r: 1.0 / (1 + r), 1, 0.5, 0.4, [0.0])
    with pytest.raises(DomainError):
        riesz_residual(lambda r: 0.0, 1, 0.5, 3.0, [-1.0])


@pytest.mark.parametrize("d,alpha", [(1, 0.5), (3, 1.0), (2, 0.8)])
def test_fourier_side_identity(d, alpha):
    pairs = fourier_side_check(1.0, d, alpha, np.linspace(0.1, 1.0, 10))
    assert np.allclose(pairs[:, 0], pairs[:, 1], rtol=1e-10, atol=0)


@pytest.mark.parametrize("d,alpha", [(1, 0.5), (3, 1.0)])
def test_fourier_lhs_matches_direct_transform(d, alpha):
    sp = SteadyStateParams(1.0, d, alpha)
    radii = [0.05, 0.2, 0.5]
    lhs = fourier_side_check(1.0, d, alpha, radii)[:, 0]
    direct = [fourier_transform_radial(sp.profile, d, r) for r in radii]
    assert np.allclose(lhs, direct, rtol=1e-6)
