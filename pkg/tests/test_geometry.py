import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from onofri_lab import geometry as G
from onofri_lab.geometry import Dimension, constants, harmonic_number


@pytest.mark.parametrize("n", range(2, 9))
def test_constants_against_gamma(n):
    g = constants(n)
    assert g.ball_volume == pytest.approx(math.pi ** (n / 2) / math.gamma(n / 2 + 1), rel=1e-14)
    assert g.sphere_measure == pytest.approx(n * g.ball_volume, rel=1e-14)
    expected = n**n * (n / (n - 1)) ** (n - 1) * g.sphere_measure
    assert g.omega_tilde == pytest.approx(expected, rel=1e-14)


def test_known_values():
    assert constants(2).ball_volume == pytest.approx(math.pi)
    assert constants(3).ball_volume == pytest.approx(4 * math.pi / 3)
    assert constants(2).omega_tilde == pytest.approx(16 * math.pi)
    assert constants(4).harmonic == Fraction(11, 6)


def test_harmonic_numbers_exact():
    assert harmonic_number(1) == 1
    assert harmonic_number(2) == Fraction(3, 2)
    assert harmonic_number(19) == sum(Fraction(1, k) for k in range(1, 20))


@pytest.mark.parametrize("bad", [1, 0, -3])
def test_dimension_rejects_small(bad):
    with pytest.raises(ValueError):
        Dimension(bad)
    with pytest.raises(ValueError):
        constants(bad)


def test_dimension_type_and_index():
    with pytest.raises(TypeError):
        Dimension(2.0)
    assert constants(Dimension(3)) is constants(3)


def test_negative_radius_rejected():
    with pytest.raises(ValueError):
        G.mu_density(2, -1.0)


def test_scalar_and_array_shapes():
    assert isinstance(G.mu_density(3, 0.5), float)
    out = G.mu_density(3, np.array([[0.0, 1.0], [2.0, 3.0]]))
    assert out.shape == (2, 2)


@pytest.mark.parametrize("n", range(2, 7))
def test_density_matches_direct_formula(n):
    r = np.array([0.0, 0.3, 1.0, 4.0, 50.0])
    direct = 1.0 / (constants(n).ball_volume * (1 + r ** (n / (n - 1))) ** n)
    np.testing.assert_allclose(G.mu_density(n, r), direct, rtol=1e-13)
    np.testing.assert_allclose(G.v_potential(n, r), np.log(direct), rtol=1e-13)


def test_far_field_is_finite():
    r = np.array([1e150, 1e300])
    assert np.all(np.isfinite(G.v_potential(3, r)))
    g = G.grad_v_magnitude(3, r)
    np.testing.assert_allclose(g * r, 4.5, rtol=1e-12)
    assert G.tail_measure(3, 1e100) == pytest.approx(2e-150, rel=1e-12)


def test_tail_at_one_in_plane():
    assert G.tail_measure(2, 1.0) == pytest.approx(0.5, abs=1e-15)
    assert G.mass_inside(2, 1.0) == pytest.approx(0.5, abs=1e-15)


@given(st.integers(2, 6), st.floats(0, 1e6))
def test_mass_and_tail_sum_to_one(n, r):
    assert G.mass_inside(n, r) + G.tail_measure(n, r) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_tail_against_mpmath(n):
    mpmath.mp.dps = 30
    v = constants(n).ball_volume
    w = constants(n).sphere_measure
    for r in (0.5, 2.0, 10.0):
        p = mpmath.mpf(n) / (n - 1)
        exact = mpmath.quad(lambda x: w * x ** (n - 1) / (v * (1 + x**p) ** n), [r, 10 * r, mpmath.inf])
        assert G.tail_measure(n, r) == pytest.approx(float(exact), rel=1e-12)


@pytest.mark.parametrize("n", range(2, 7))
def test_grad_v_against_finite_difference(n):
    r = np.array([0.2, 1.0, 3.0, 20.0])
    h = 1e-6 * r
    fd = -(G.v_potential(n, r + h) - G.v_potential(n, r - h)) / (2 * h)
    np.testing.assert_allclose(G.grad_v_magnitude(n, r), fd, rtol=1e-7)


@pytest.mark.parametrize("n", range(2, 6))
def test_grad_v_argmax(n):
    r0 = G.grad_v_argmax(n)
    g0 = G.grad_v_magnitude(n, r0)
    assert G.grad_v_magnitude(n, r0 * 0.99) < g0
    assert G.grad_v_magnitude(n, r0 * 1.01) < g0


@pytest.mark.parametrize("n", range(2, 6))
def test_n_laplacian_symbolic(n):
    """Independent sympy derivation of the radial N-Laplacian of ln mu."""
    r = sp.symbols("r", positive=True)
    p = sp.Rational(n, n - 1)
    v = -n * sp.log(1 + r**p)  # additive constant irrelevant
    flux = -((-sp.diff(v, r)) ** (n - 1))
    lap = sp.diff(flux, r) + (n - 1) / r * flux
    target = -(n**n) * p ** (n - 1) / (1 + r**p) ** n
    f = sp.lambdify(r, lap - target, "mpmath")
    for x in (0.3, 1.0, 2.5, 40.0):
        assert abs(float(f(x))) < 1e-12
    rs = np.array([0.3, 1.0, 2.5, 40.0])
    np.testing.assert_allclose(G.n_laplacian(n, rs), G.n_laplacian_target(n, rs), rtol=1e-11)


@pytest.mark.parametrize("n", range(2, 7))
def test_n_laplacian_finite_difference(n):
    rs = np.array([0.1, 0.7, 2.0, 15.0])
    res = G.n_laplacian_residual(n, rs, method="fd")
    np.testing.assert_allclose(res, 0.0, atol=1e-6 * np.abs(G.n_laplacian_target(n, rs)).max())


def test_n_laplacian_rejects_origin():
    with pytest.raises(ValueError):
        G.n_laplacian(3, 0.0)


def test_radial_weight_consistent():
    r = np.array([0.5, 2.0, 1e200])
    n = 3
    w = G.radial_mu_weight(n, r)
    direct = constants(n).sphere_measure * G.mu_density(n, r[:2]) * r[:2] ** (n - 1)
    np.testing.assert_allclose(w[:2], direct, rtol=1e-13)
    assert np.isfinite(w[2]) and w[2] < 1e-300


def test_as_dict_round_trip():
    d = constants(3).as_dict()
    assert d["n"] == 3
    assert Fraction(d["harmonic"]) == Fraction(3, 2)
