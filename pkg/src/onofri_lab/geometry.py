"""Dimension-dependent constants and the radial potential.

Everything here is radial: ``r`` is the distance to the origin. Functions
accept scalars or numpy arrays and return the same shape.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class Dimension:
    """Ambient dimension N >= 2."""

    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or isinstance(self.n, bool):
            raise TypeError(f"dimension must be an int, got {self.n!r}")
        if self.n < 2:
            raise ValueError(f"dimension must be >= 2, got {self.n}")

    def __index__(self) -> int:
        return self.n

    __int__ = __index__


def as_n(dim) -> int:
    """Normalize an ``int`` or :class:`Dimension` to a validated int."""
    n = operator.index(dim)
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    return n


@dataclass(frozen=True)
class GeometryConstants:
    n: int
    ball_volume: float
    sphere_measure: float
    omega_tilde: float
    harmonic: Fraction

    @property
    def exponent(self) -> float:
        """N/(N-1), the exponent of |x| inside the density."""
        return self.n / (self.n - 1)

    @property
    def grad_coefficient(self) -> float:
        """N^2/(N-1), the far-field coefficient of |grad v_N|."""
        return self.n * self.n / (self.n - 1)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "ball_volume": self.ball_volume,
            "sphere_measure": self.sphere_measure,
            "omega_tilde": self.omega_tilde,
            "harmonic": str(self.harmonic),
            "harmonic_float": float(self.harmonic),
        }


def _double_factorial(m: int) -> int:
    out = 1
    while m > 1:
        out *= m
        m -= 2
    return out


def harmonic_number(m: int) -> Fraction:
    """Exact H_m = 1 + 1/2 + ... + 1/m (H_0 = 0)."""
    return sum((Fraction(1, k) for k in range(1, m + 1)), Fraction(0))


def constants(dim) -> GeometryConstants:
    return _constants(as_n(dim))


@lru_cache(maxsize=None)
def _constants(n: int) -> GeometryConstants:
    if n % 2 == 0:
        # Gamma(n/2 + 1) = (n/2)!
        ball_volume = math.pi ** (n // 2) / math.factorial(n // 2)
    else:
        # Gamma(n/2 + 1) = n!! sqrt(pi) / 2^((n+1)/2)
        ball_volume = (
            math.pi ** ((n - 1) // 2) * 2 ** ((n + 1) // 2) / _double_factorial(n)
        )
    sphere_measure = n * ball_volume
    omega_tilde = n**n * (n / (n - 1)) ** (n - 1) * sphere_measure
    return GeometryConstants(
        n=n,
        ball_volume=ball_volume,
        sphere_measure=sphere_measure,
        omega_tilde=omega_tilde,
        harmonic=harmonic_number(n - 1),
    )


def _check_nonneg(r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(np.isnan(r)):
        raise ValueError("radius must be >= 0")
    return r


def _ret(x, scalar):
    return float(x) if scalar else x


def _log_softplus_term(n: int, r: np.ndarray) -> np.ndarray:
    """ln(1 + r^(N/(N-1))), stable for huge r; r = 0 gives 0."""
    with np.errstate(divide="ignore"):
        log_r = np.log(r)
    return np.logaddexp(0.0, (n / (n - 1)) * log_r)


def mu_density(dim, r):
    """Probability density 1 / (V_N (1 + r^(N/(N-1)))^N)."""
    n = as_n(dim)
    scalar = np.ndim(r) == 0
    r = _check_nonneg(r)
    g = constants(n)
    out = np.exp(-n * _log_softplus_term(n, r)) / g.ball_volume
    return _ret(out, scalar)


def v_potential(dim, r):
    """v_N = ln mu_N, evaluated directly in log form."""
    n = as_n(dim)
    scalar = np.ndim(r) == 0
    r = _check_nonneg(r)
    g = constants(n)
    out = -math.log(g.ball_volume) - n * _log_softplus_term(n, r)
    return _ret(out, scalar)


def _root_power(n: int, r: np.ndarray) -> np.ndarray:
    """r^(1/(N-1)) via exp(ln r / (N-1)), with 0 mapped to 0."""
    with np.errstate(divide="ignore"):
        out = np.exp(np.log(r) / (n - 1))
    return np.where(r == 0, 0.0, out)


def grad_v_magnitude(dim, r):
    """|grad v_N| = (N^2/(N-1)) r^(1/(N-1)) / (1 + r^(N/(N-1)))."""
    n = as_n(dim)
    scalar = np.ndim(r) == 0
    r = _check_nonneg(r)
    c = n * n / (n - 1)
    with np.errstate(divide="ignore"):
        log_r = np.log(r)
    # log form keeps the far field finite: |grad v| ~ c / r
    out = c * np.exp(log_r / (n - 1) - _log_softplus_term(n, r))
    out = np.where(r == 0, 0.0, out)
    return _ret(out, scalar)


def grad_v_argmax(dim) -> float:
    """Radius where |grad v_N| peaks: T = r^(N/(N-1)) = 1/(N-1) there."""
    n = as_n(dim)
    return (n - 1) ** (-(n - 1) / n)


def mass_inside(dim, r):
    """mu_N(B_r) = (T/(1+T))^(N-1) with T = r^(N/(N-1))."""
    n = as_n(dim)
    scalar = np.ndim(r) == 0
    r = _check_nonneg(r)
    out = np.exp((n - 1) * _log_ratio(n, r))
    return _ret(out, scalar)


def _log_ratio(n: int, r: np.ndarray) -> np.ndarray:
    """ln(T/(1+T)) = -ln(1 + 1/T), T = r^(N/(N-1))."""
    with np.errstate(divide="ignore"):
        log_t = (n / (n - 1)) * np.log(r)
    return -np.logaddexp(0.0, -log_t)


def tail_measure(dim, r):
    """mu_N(R^N minus B_r) = 1 - r^N / (1 + r^(N/(N-1)))^(N-1)."""
    n = as_n(dim)
    scalar = np.ndim(r) == 0
    r = _check_nonneg(r)
    out = -np.expm1((n - 1) * _log_ratio(n, r))
    return _ret(out, scalar)


def radial_mu_weight(dim, r):
    """omega_{N-1} mu_N(r) r^(N-1): the radial density of the measure.

    Computed in log space so that it stays finite (and tends to 0) for
    radii where r^(N-1) alone would overflow.
    """
    n = as_n(dim)
    scalar = np.ndim(r) == 0
    r = _check_nonneg(r)
    g = constants(n)
    with np.errstate(divide="ignore"):
        log_r = np.log(r)
    log_w = (
        math.log(g.sphere_measure / g.ball_volume)
        + (n - 1) * log_r
        - n * _log_softplus_term(n, r)
    )
    return _ret(np.exp(log_w), scalar)


def _grad_v_derivative(n: int, r: np.ndarray) -> np.ndarray:
    """d/dr |grad v_N|, closed form, r > 0."""
    c = n * n / (n - 1)
    p = n / (n - 1)
    a = 1.0 / (n - 1)
    t = r**p
    return c * (a * r ** (a - 1) * (1 + t) - p * r ** (2 * a)) / (1 + t) ** 2


def n_laplacian(dim, r, method: str = "analytic", step: float | None = None):
    """Radial N-Laplacian of v_N: (|f'|^(N-2) f')' + ((N-1)/r) |f'|^(N-2) f'.

    ``method="analytic"`` differentiates the closed form; ``method="fd"``
    uses central differences of the flux ``|f'|^(N-2) f'`` with f = v_N.
    """
    n = as_n(dim)
    scalar = np.ndim(r) == 0
    r = _check_nonneg(r)
    if np.any(r == 0):
        raise ValueError("the radial N-Laplacian is singular at r = 0")

    def flux(x):
        # f' = -|grad v|, so |f'|^(N-2) f' = -|grad v|^(N-1)
        return -grad_v_magnitude(n, x) ** (n - 1)

    if method == "analytic":
        g = grad_v_magnitude(n, r)
        dflux = -(n - 1) * g ** (n - 2) * _grad_v_derivative(n, r)
    elif method == "fd":
        h = step if step is not None else 1e-4 * np.maximum(r, 1e-3)
        h = np.minimum(h, 0.5 * r)
        dflux = (flux(r + h) - flux(r - h)) / (2 * h)
    else:
        raise ValueError(f"unknown method {method!r}")
    out = dflux + (n - 1) / r * flux(r)
    return _ret(out, scalar)


def n_laplacian_target(dim, r):
    """-N^N (N/(N-1))^(N-1) V_N mu_N(r)."""
    n = as_n(dim)
    g = constants(n)
    return -(n**n) * (n / (n - 1)) ** (n - 1) * g.ball_volume * mu_density(n, r)


def n_laplacian_residual(dim, r, method: str = "analytic", step: float | None = None):
    """Radial N-Laplacian of v_N minus its closed-form value; r > 0."""
    return n_laplacian(dim, r, method=method, step=step) - n_laplacian_target(dim, r)
