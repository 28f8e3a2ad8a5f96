from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from onofri_lab import remainder as R
from onofri_lab.remainder import RadialGradientPair

coord = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def vec(n):
    return st.lists(coord, min_size=n, max_size=n).map(np.array)


def exact_remainder(n, X, Y):
    """R_N in exact rationals for even N (no square roots needed)."""
    X = [Fraction(x) for x in X]
    Y = [Fraction(y) for y in Y]
    nx2 = sum(x * x for x in X)
    s2 = sum((x + y) ** 2 for x, y in zip(X, Y))
    dot = sum(x * y for x, y in zip(X, Y))
    h = n // 2
    return s2**h - nx2**h - n * nx2 ** (h - 1) * dot


def test_plane_remainder_is_square_norm():
    X = np.array([1.5, -2.0])
    Y = np.array([0.25, 3.0])
    assert R.remainder_vec(2, X, Y) == pytest.approx(np.dot(Y, Y), rel=1e-14)


@pytest.mark.parametrize("n", [2, 4, 6])
def test_matches_exact_rational(n):
    rng = np.random.default_rng(n)
    for _ in range(50):
        X, Y = rng.uniform(-3, 3, size=(2, n))
        exact = float(exact_remainder(n, X, Y))
        scale = (np.linalg.norm(X) + np.linalg.norm(Y)) ** n
        assert abs(R.remainder_vec(n, X, Y) - exact) <= 1e-13 * scale


def test_vectorized_shape():
    X = np.ones((7, 3))
    Y = np.zeros((7, 3))
    out = R.remainder_vec(3, X, Y)
    assert out.shape == (7,)
    np.testing.assert_array_equal(out, 0.0)


def test_radial_matches_vector_form():
    for n in range(2, 7):
        X = np.zeros(n)
        Y = np.zeros(n)
        X[0], Y[0] = -2.0, 0.7
        assert R.remainder_radial(n, -2.0, 0.7) == R.remainder_vec(n, X, Y)
        assert R.remainder_radial(n, RadialGradientPair(-2.0, 0.7)) == R.remainder_vec(n, X, Y)


def test_pair_sign_enforced():
    with pytest.raises(ValueError):
        RadialGradientPair(0.5, 1.0)


def test_constants():
    assert R.upper_bound_constant(2) == 1.0
    assert R.upper_bound_constant(3) == 3.0
    assert R.upper_bound_constant(4) == 12.0
    assert R.upper_bound_constant(6) == 120.0


@pytest.mark.parametrize("n", range(2, 7))
@settings(max_examples=200, deadline=None)
@given(data=st.data())
def test_two_sided_bound_property(n, data):
    X = data.draw(vec(n))
    Y = data.draw(vec(n))
    rep = R.check_two_sided_bound(n, X, Y)
    assert rep.passed, rep.as_dict()


@pytest.mark.parametrize("n", [4, 6])
@settings(max_examples=200, deadline=None)
@given(data=st.data())
def test_even_lower_bound_property(n, data):
    X = data.draw(vec(n))
    Y = data.draw(vec(n))
    assert R.check_even_lower_bound(n, X, Y).passed


@pytest.mark.parametrize("n", [3, 5, 2])
def test_even_lower_bound_rejects_other_n(n):
    with pytest.raises(ValueError):
        R.check_even_lower_bound(n, np.ones(n), np.ones(n))


def test_y_zero_is_equality():
    for n in range(2, 7):
        rep = R.check_two_sided_bound(n, np.arange(1.0, n + 1), np.zeros(n))
        assert rep.passed and rep.lhs == 0.0 and rep.rhs == 0.0


def test_x_zero_upper_bound():
    # R = |Y|^N exactly, below c_N |Y|^N
    for n in range(2, 7):
        Y = np.full(n, 0.5)
        rep = R.check_two_sided_bound(n, np.zeros(n), Y)
        assert rep.lhs == pytest.approx(np.linalg.norm(Y) ** n)
        assert rep.passed


@settings(max_examples=300, deadline=None)
@given(st.integers(2, 12), st.floats(0, 10), st.floats(-10, 10))
def test_binomial_property(k, a, b):
    assume(a + b >= 0)
    assert R.check_binomial_inequalities(k, a, b).passed


def test_binomial_exact_small_case():
    # k = 3: (a+b)^3 - a^3 - 3a^2 b - b^3 = 3ab^2, so the second form is tight
    rep = R.check_binomial_inequalities(3, 2.0, 1.0)
    assert rep.lhs == 27.0
    assert rep.details["second"] == 27.0
    assert rep.margin == 0.0


@pytest.mark.parametrize("k,a,b", [(1, 1.0, 1.0), (3, -1.0, 2.0), (3, 1.0, -2.0)])
def test_binomial_bad_args(k, a, b):
    with pytest.raises(ValueError):
        R.check_binomial_inequalities(k, a, b)


def test_fuzz_is_deterministic():
    a = R.fuzz_two_sided(4, 1000, np.random.default_rng(3))
    b = R.fuzz_two_sided(4, 1000, np.random.default_rng(3))
    assert a == b and a.passed


def test_fuzz_reports_witness_on_violation(monkeypatch):
    monkeypatch.setattr(R, "upper_bound_constant", lambda dim: 1e-6)
    s = R.fuzz_two_sided(3, 100, np.random.default_rng(0))
    assert s.violations > 0
    assert set(s.witness) == {"X", "Y"}
