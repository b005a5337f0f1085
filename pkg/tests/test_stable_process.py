import math

import numpy as np
import pytest
from scipy import integrate, stats

from fujita.errors import DomainError, ValidationError
from fujita.stable_process import (
    density_at_origin,
    make_rng,
    positive_stable,
    sample_increments,
    simulate_path,
    transition_density,
)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5, 2.0])
@pytest.mark.parametrize("d", [1, 2, 3])
def test_characteristic_function(alpha, d):
    # E cos(theta . X_h) = exp(-h |theta|^alpha)
    h, n = 0.7, 200_000
    x = sample_increments(alpha, h, d, make_rng(11, d), n)
    theta = np.zeros(d)
    theta[0] = 0.8
    emp = np.cos(x @ theta).mean()
    assert abs(emp - math.exp(-h * 0.8**alpha)) < 5 / math.sqrt(n)


@pytest.mark.parametrize("alpha,cdf", [
    (1.0, stats.cauchy(scale=0.5).cdf),
    (2.0, stats.norm(scale=math.sqrt(2 * 0.5)).cdf),
    (0.7, stats.levy_stable(0.7, 0.0, scale=0.5 ** (1 / 0.7)).cdf),
])
def test_one_dimensional_sampler_ks(alpha, cdf):
    n = 100_000 if alpha != 0.7 else 3000  # the general stable cdf is slow
    x = sample_increments(alpha, 0.5, 1, make_rng(3), n)[:, 0]
    assert stats.kstest(x, cdf).pvalue > 0.01


@pytest.mark.parametrize("d", [2, 3])
def test_subordinated_cauchy_radial_law(d):
    # multivariate Cauchy: |X|^2 / d ~ F(d, 1)
    x = sample_increments(1.0, 1.0, d, make_rng(5, d), 100_000)
    assert stats.kstest((x**2).sum(axis=1) / d, stats.f(d, 1).cdf).pvalue > 0.01


@pytest.mark.parametrize("d", [2, 3])
def test_subordinated_gaussian_radial_law(d):
    h = 0.3
    x = sample_increments(2.0, h, d, make_rng(6, d), 100_000)
    assert stats.kstest((x**2).sum(axis=1) / (2 * h), stats.chi2(d).cdf).pvalue > 0.01


def test_subordinated_sampler_isotropic():
    x = sample_increments(0.8, 1.0, 2, make_rng(8), 100_000)
    angle = np.arctan2(x[:, 1], x[:, 0])
    assert stats.kstest(angle, stats.uniform(-math.pi, 2 * math.pi).cdf).pvalue > 0.01


@pytest.mark.parametrize("a", [0.25, 0.5, 0.9])
def test_positive_stable_laplace_transform(a):
    s = positive_stable(a, make_rng(9), 200_000)
    assert np.all(s > 0)
    for lam in (0.5, 2.0):
        assert abs(np.exp(-lam * s).mean() - math.exp(-(lam**a))) < 5e-3


def test_gaussian_variance():
    x = sample_increments(2.0, 0.25, 1, make_rng(1), 400_000)[:, 0]
    assert x.var() == pytest.approx(0.5, rel=0.01)


def test_rng_streams_reproducible_and_distinct():
    a = sample_increments(1.3, 1.0, 2, make_rng(4, 0), 10)
    b = sample_increments(1.3, 1.0, 2, make_rng(4, 0), 10)
    c = sample_increments(1.3, 1.0, 2, make_rng(4, 1), 10)
    assert np.array_equal(a, b)
    assert not np.allclose(a, c)


def test_simulate_path_scaling_and_reproducibility():
    times = np.linspace(0, 1, 11)
    p1 = simulate_path(1.5, 2, [1.0, -1.0], times, seed=2)
    p2 = simulate_path(1.5, 2, [1.0, -1.0], times, seed=2)
    assert np.array_equal(p1.positions, p2.positions)
    assert np.array_equal(p1.positions[0], [1.0, -1.0])
    with pytest.raises(ValidationError):
        simulate_path(1.5, 2, [0.0, 0.0], [0.0, 0.5, 0.5], seed=1)
    with pytest.raises(ValidationError):
        simulate_path(1.5, 2, [0.0], times, seed=1)


@pytest.mark.parametrize("alpha", [0.0, 2.5, -1.0])
def test_alpha_out_of_range(alpha):
    with pytest.raises(DomainError):
        sample_increments(alpha, 1.0, 1, make_rng(0), 1)


@pytest.mark.parametrize("alpha", [1.0, 2.0])
@pytest.mark.parametrize("d", [1, 2, 3])
def test_fourier_inversion_reproduces_closed_forms(alpha, d):
    r = np.array([0.0, 0.3, 1.0, 2.5, 6.0])
    x = np.zeros((r.size, d))
    x[:, 0] = r
    y = np.zeros(d)
    closed = transition_density(alpha, d, 0.8, x, y, method="auto")
    inverted = transition_density(alpha, d, 0.8, x, y, method="fourier")
    assert np.max(np.abs(inverted - closed) / closed) < 1e-6


@pytest.mark.parametrize("alpha,d", [(0.5, 1), (1.2, 2), (1.7, 3)])
def test_density_at_origin_closed_form(alpha, d):
    t = 1.7
    assert transition_density(alpha, d, t, np.zeros(d), np.zeros(d)) == pytest.approx(density_at_origin(alpha, d, t), rel=1e-9)


@pytest.mark.parametrize("alpha", [0.5, 1.5])
def test_density_normalised_and_scaling(alpha):
    f = lambda r: 2 * transition_density(alpha, 1, 1.0, r, 0.0)
    mass = integrate.quad(f, 0, 50, limit=200)[0]
    # two-sided tail of p_1(x) ~ Gamma(1+alpha) sin(pi alpha/2) / (pi |x|^(1+alpha)); the
    # next asymptotic term is smaller by a factor 50^(-alpha)
    tail = 2 * math.sin(math.pi * alpha / 2) * math.gamma(alpha) / math.pi * 50.0 ** (-alpha)
    assert mass + tail == pytest.approx(1.0, abs=0.2 * tail)
    # p_t(x) = t^(-1/alpha) p_1(x t^(-1/alpha))
    t = 3.0
    assert transition_density(alpha, 1, t, 0.9, 0.0) == pytest.approx(
        t ** (-1 / alpha) * transition_density(alpha, 1, 1.0, 0.9 * t ** (-1 / alpha), 0.0), rel=1e-10)


def test_chapman_kolmogorov():
    alpha, s, t, x = 1.5, 0.4, 0.6, 0.7
    f = lambda y: transition_density(alpha, 1, s, y, 0.0) * transition_density(alpha, 1, t, x, y)
    conv = sum(integrate.quad(f, a, b, limit=200)[0] for a, b in ((-np.inf, -20), (-20, 20), (20, np.inf)))
    assert conv == pytest.approx(transition_density(alpha, 1, s + t, x, 0.0), rel=1e-6)


def test_density_time_must_be_positive():
    with pytest.raises(DomainError):
        transition_density(1.0, 1, 0.0, 0.0, 0.0)
