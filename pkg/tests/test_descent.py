import numpy as np
import pytest

from onofri_lab.descent import DiscreteJ, finite_difference_gradient, projected_descent
from onofri_lab.functionals import cc_J
from onofri_lab.geometry import constants
from onofri_lab.profile import default_grid, minimizing_family


def small_grid(m=20):
    return np.concatenate([[0.0], np.geomspace(1e-3, 1.0, m - 1)])


@pytest.mark.parametrize("n", [2, 3])
def test_gradient_matches_central_differences(n):
    obj = DiscreteJ(n, small_grid())
    x = np.random.default_rng(n).normal(size=19)
    g = obj.gradient(x)
    fd = finite_difference_gradient(obj, x)
    assert np.max(np.abs(g - fd)) / np.max(np.abs(fd)) < 1e-5


@pytest.mark.parametrize("n", [2, 3, 4])
def test_discrete_value_matches_quadrature(n):
    obj = DiscreteJ(n, small_grid())
    x = np.random.default_rng(7).normal(size=19)
    assert obj.value(x) == pytest.approx(cc_J(n, obj.profile(x)).value, rel=1e-10)


def test_zero_profile():
    obj = DiscreteJ(3, small_grid())
    assert obj.value(np.zeros(19)) == pytest.approx(0.0, abs=1e-14)


def test_node_validation():
    with pytest.raises(ValueError):
        DiscreteJ(2, [0.0, 0.5, 0.9])
    with pytest.raises(ValueError):
        DiscreteJ(2, [0.1, 1.0])


@pytest.mark.parametrize("n", [2, 3])
def test_descent_stays_above_sharp_constant(n):
    grid = default_grid(1.0)
    obj = DiscreteJ(n, grid)
    start = minimizing_family(n, 3.0).value(grid)[:-1]
    res = projected_descent(obj, start, steps=150)
    assert res.best_value <= res.history[0]
    assert all(b <= a for a, b in zip(res.history, res.history[1:]))
    assert res.best_value > -float(constants(n).harmonic)
    assert obj.profile(res.best_free).value(1.0) == 0.0
