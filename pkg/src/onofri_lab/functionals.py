"""Weighted norm, the Onofri functional I and the Carleson-Chang functional J.

All profiles are radial, so every integral over R^N or a ball reduces to a
1-D radial integral. Compactly supported (or eventually constant) profiles
are integrated numerically only up to their support bound; the remaining
region uses closed forms for the measure tail.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import geometry
from .geometry import as_n, constants
from .identities import remainder_bound
from .profile import Profile
from .quadrature import (
    DEFAULT_CONFIG,
    IntegralResult,
    QuadratureConfig,
    integrate,
    integrate_pieces,
    zero_result,
)
from .remainder import remainder_radial

# Largest |u| admitted by I and J; keeps e^u comfortably inside double range.
MAX_PROFILE_MAGNITUDE = 50.0


class FunctionalError(ValueError):
    pass


@dataclass
class NormBreakdown:
    weighted_l1: float
    grad_n: float
    mixed: float
    total: float
    diagnostics: list = field(default_factory=list)

    @property
    def membership_failed(self) -> bool:
        return not all(d.converged for d in self.diagnostics)

    @property
    def mixed_squared(self) -> float:
        return self.mixed**2

    def as_dict(self) -> dict:
        return {
            "weighted_l1": self.weighted_l1,
            "grad_n": self.grad_n,
            "mixed": self.mixed,
            "total": self.total,
            "membership_failed": self.membership_failed,
            "diagnostics": [d.as_dict() for d in self.diagnostics],
        }


@dataclass
class FunctionalReport:
    name: str
    n: int
    dirichlet_term: float
    mean_term: float
    log_term: float
    value: float
    quadrature_diagnostics: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def error_estimate(self) -> float:
        """Propagated quadrature error bound on ``value`` (first order)."""
        return sum(d.meta.get("propagated", d.error_estimate)
                   for d in self.quadrature_diagnostics)

    @property
    def converged(self) -> bool:
        return all(d.converged for d in self.quadrature_diagnostics)

    def as_dict(self) -> dict:
        return {
            "functional": self.name,
            "n": self.n,
            "dirichlet_term": self.dirichlet_term,
            "mean_term": self.mean_term,
            "log_term": self.log_term,
            "value": self.value,
            "error_estimate": self.error_estimate,
            "converged": self.converged,
            "quadrature_diagnostics": [d.as_dict() for d in self.quadrature_diagnostics],
            "geometry": constants(self.n).as_dict(),
            **self.extra,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.as_dict(), **kwargs)


# -- integration helpers ------------------------------------------------------


def _dx_weight(n: int, omega: float):
    def w(rho):
        with np.errstate(over="ignore"):
            return omega * rho ** (n - 1)

    return w


def integrate_profile_break_aware(dim, profile: Profile, integrand, cfg=None,
                                  weight: str = "dx", upper: float | None = None,
                                  label: str = "") -> IntegralResult:
    """Radial integral of ``integrand(rho)`` split at every profile kink.

    ``weight="dx"`` integrates against Lebesgue measure on R^N
    (omega_{N-1} rho^(N-1) d rho); ``weight="mu"`` against d mu_N. The
    range is [0, upper]; by default [0, support_bound], or [0, inf) when
    the profile has no support bound.
    """
    n = as_n(dim)
    cfg = cfg or DEFAULT_CONFIG
    omega = constants(n).sphere_measure
    if upper is None:
        upper = profile.support_bound if profile.support_bound is not None else math.inf
    if upper == 0:
        return zero_result(label)
    breaks = list(profile.breakpoints(None if math.isinf(upper) else upper))
    if math.isinf(upper):
        breaks.append(math.inf)

    if weight == "dx":
        wfn = _dx_weight(n, omega)
    elif weight == "mu":
        def wfn(rho):
            return geometry.radial_mu_weight(n, rho)
    else:
        raise ValueError(f"unknown weight {weight!r}")

    def f(rho):
        w = wfn(rho)
        val = np.asarray(integrand(rho), dtype=float)
        with np.errstate(invalid="ignore", over="ignore"):
            out = val * w
        # far field: vanishing integrand against an overflowing weight
        return np.where(val == 0, 0.0, out)

    res = integrate_pieces(f, breaks, cfg)
    res.label = label
    return res


def _check_magnitude(u: Profile):
    upper = u.support_bound if u.support_bound is not None else 1e300
    grid = u.breakpoints(upper)
    if upper > 1e-6:
        grid = np.unique(np.concatenate([grid, np.geomspace(1e-6, upper, 400)]))
    peak = float(np.max(np.abs(u.value(grid))))
    if not np.isfinite(peak) or peak > MAX_PROFILE_MAGNITUDE or abs(u.tail_value) > MAX_PROFILE_MAGNITUDE:
        raise FunctionalError(
            f"profile magnitude {peak:.3g} exceeds the admissible cap {MAX_PROFILE_MAGNITUDE}"
        )


def _outer_tail(n: int, u: Profile) -> float:
    """mu_N of the region beyond the support bound (0 if unbounded)."""
    if u.support_bound is None:
        return 0.0
    return geometry.tail_measure(n, u.support_bound)


# -- norm and H ---------------------------------------------------------------


def w_mu_norm(dim, u: Profile, cfg: QuadratureConfig | None = None) -> NormBreakdown:
    n = as_n(dim)
    cfg = cfg or DEFAULT_CONFIG
    l1 = integrate_profile_break_aware(n, u, lambda r: np.abs(u.value(r)), cfg, "mu",
                                       label="weighted_l1")
    l1_val = l1.value + abs(u.tail_value) * _outer_tail(n, u)
    grad = integrate_profile_break_aware(n, u, lambda r: np.abs(u.slope(r)) ** n, cfg,
                                         label="grad_n^N")

    def mixed_integrand(r):
        return u.slope(r) ** 2 * geometry.grad_v_magnitude(n, r) ** (n - 2)

    mixed = integrate_profile_break_aware(n, u, mixed_integrand, cfg, label="mixed^2")
    grad_n = max(grad.value, 0.0) ** (1.0 / n)
    mixed_v = math.sqrt(max(mixed.value, 0.0))
    return NormBreakdown(
        weighted_l1=l1_val,
        grad_n=grad_n,
        mixed=mixed_v,
        total=l1_val + grad_n + mixed_v,
        diagnostics=[l1, grad, mixed],
    )


def _h_result(n: int, u: Profile, cfg) -> IntegralResult:
    def integrand(r):
        a = -geometry.grad_v_magnitude(n, r)
        return remainder_radial(n, a, u.slope(r))

    return integrate_profile_break_aware(n, u, integrand, cfg, label="H_N")


def h_integral(dim, u: Profile, cfg: QuadratureConfig | None = None) -> float:
    """Integral over R^N of R_N(grad v_N, grad u); H vanishes where u' = 0."""
    n = as_n(dim)
    res = _h_result(n, u, cfg or DEFAULT_CONFIG)
    if not res.converged:
        raise FunctionalError(f"H_N integral did not converge: {res.as_dict()}")
    return res.value


# -- the functionals ----------------------------------------------------------


def onofri_I(dim, u: Profile, cfg: QuadratureConfig | None = None) -> FunctionalReport:
    """I(u) = (1/omega~) int H_N + int u d mu - ln int e^u d mu."""
    n = as_n(dim)
    cfg = cfg or DEFAULT_CONFIG
    g = constants(n)
    _check_magnitude(u)
    tail = _outer_tail(n, u)

    h = _h_result(n, u, cfg)
    mean = integrate_profile_break_aware(n, u, u.value, cfg, "mu", label="mean")
    expo = integrate_profile_break_aware(n, u, lambda r: np.exp(u.value(r)), cfg, "mu",
                                         label="exp")
    if not expo.converged:
        raise FunctionalError(f"exponential integral did not converge: {expo.as_dict()}")
    exp_total = expo.value + math.exp(u.tail_value) * tail
    if not exp_total > 0:
        raise FunctionalError("exponential integral is not positive")

    dirichlet = h.value / g.omega_tilde
    mean_term = mean.value + u.tail_value * tail
    log_term = math.log(exp_total)
    h.meta["propagated"] = h.error_estimate / g.omega_tilde
    expo.meta["propagated"] = expo.error_estimate / exp_total
    return FunctionalReport(
        name="I",
        n=n,
        dirichlet_term=dirichlet,
        mean_term=mean_term,
        log_term=log_term,
        value=dirichlet + mean_term - log_term,
        quadrature_diagnostics=[h, mean, expo],
        extra={"closed_form_tail_measure": tail},
    )


def ball_dirichlet(dim, w: Profile, radius: float = 1.0, cfg=None) -> IntegralResult:
    """Integral of |grad w|^N over B_radius."""
    n = as_n(dim)
    return integrate_profile_break_aware(n, w, lambda r: np.abs(w.slope(r)) ** n,
                                         cfg, upper=radius, label="dirichlet")


def ball_mean_exp(dim, w: Profile, radius: float = 1.0, cfg=None) -> IntegralResult:
    """(1/|B_radius|) times the integral of e^w over B_radius."""
    n = as_n(dim)
    res = integrate_profile_break_aware(n, w, lambda r: np.exp(w.value(r)), cfg,
                                        upper=radius, label="mean_exp")
    return res.scaled(1.0 / (constants(n).ball_volume * radius**n))


def _check_ball_profile(u: Profile, atol: float = 1e-10):
    if u.support_bound is None or u.support_bound > 1.0 + 1e-12 or u.tail_value != 0.0:
        raise FunctionalError("J needs a profile supported in the closed unit ball")
    if abs(u.value(1.0)) > atol:
        raise FunctionalError(f"J needs u(1) = 0, got {u.value(1.0)!r}")


def cc_J(dim, u: Profile, cfg: QuadratureConfig | None = None) -> FunctionalReport:
    """J(u) = (1/omega~) int_{B_1} |grad u|^N - ln((1/V_N) int_{B_1} e^u)."""
    n = as_n(dim)
    cfg = cfg or DEFAULT_CONFIG
    g = constants(n)
    _check_ball_profile(u)
    _check_magnitude(u)
    dir_res = ball_dirichlet(n, u, 1.0, cfg)
    exp_res = ball_mean_exp(n, u, 1.0, cfg)
    if not exp_res.converged:
        raise FunctionalError(f"exponential integral did not converge: {exp_res.as_dict()}")
    dirichlet = dir_res.value / g.omega_tilde
    log_term = math.log(exp_res.value)
    value = dirichlet - log_term
    dir_res.meta["propagated"] = dir_res.error_estimate / g.omega_tilde
    exp_res.meta["propagated"] = exp_res.error_estimate / exp_res.value
    sharp = float(g.harmonic)
    return FunctionalReport(
        name="J",
        n=n,
        dirichlet_term=dirichlet,
        mean_term=0.0,
        log_term=log_term,
        value=value,
        quadrature_diagnostics=[dir_res, exp_res],
        extra={"sharp_constant": -sharp, "margin": value + sharp},
    )


def sandwich_upper_limit(dim, u: Profile, cfg: QuadratureConfig | None = None) -> float:
    """Limit of I(lift_to_space(u, r)) as r grows.

    (1/omega~) int_{B_1} |grad u|^N + H_{N-1} - ln((1/V_N) int_{B_1} e^u + N - 1)
    """
    n = as_n(dim)
    g = constants(n)
    _check_ball_profile(u)
    d = ball_dirichlet(n, u, 1.0, cfg).value / g.omega_tilde
    e = ball_mean_exp(n, u, 1.0, cfg).value
    return d + float(g.harmonic) - math.log(e + n - 1)


# -- asymptotics --------------------------------------------------------------


class AsymptoticGap(NamedTuple):
    numeric: float
    asymptote: float
    gap: float
    error_estimate: float = 0.0


def gradv_dirichlet_asymptotic(dim, r: float, cfg: QuadratureConfig | None = None) -> AsymptoticGap:
    """(1/omega~) int_{B_r} |grad v_N|^N against (N/(N-1)) ln r - H_{N-1}."""
    n = as_n(dim)
    if not r > 1:
        raise ValueError("r must exceed 1")
    g = constants(n)

    def f(rho):
        return geometry.grad_v_magnitude(n, rho) ** n * rho ** (n - 1)

    peak = geometry.grad_v_argmax(n)
    res = integrate(f, 0.0, r, cfg, points=[peak] if peak < r else None)
    if not res.converged:
        raise FunctionalError(f"quadrature did not converge: {res.as_dict()}")
    numeric = res.value * g.sphere_measure / g.omega_tilde
    asymptote = n / (n - 1) * math.log(r) - float(g.harmonic)
    err = res.error_estimate * g.sphere_measure / g.omega_tilde
    return AsymptoticGap(numeric, asymptote, numeric - asymptote, err)


def gradv_gap_bound(dim, r: float) -> float:
    """Upper bound on the asymptotic gap at radius r > 1.

    With T = r^(N/(N-1)) the gap equals ln(1 + 1/T) plus the binomially
    weighted tails of int t^k/(1+t)^N beyond T; ln(1 + 1/T) <= 1/T and each
    tail is bounded by ``identities.remainder_bound``.
    """
    n = as_n(dim)
    t = r ** (n / (n - 1))
    return 1.0 / t + sum(math.comb(n - 1, k) * remainder_bound(n, k, t) for k in range(n - 1))


def log_weight_integral(dim, cfg: QuadratureConfig | None = None) -> float:
    """N^2 int_0^inf rho^(N-1) ln(1 + rho^p) / (1 + rho^p)^N d rho, p = N/(N-1)."""
    return log_weight_integral_result(dim, cfg).value


def log_weight_integral_result(dim, cfg: QuadratureConfig | None = None) -> IntegralResult:
    n = as_n(dim)
    g = constants(n)
    p = n / (n - 1)
    scale = n * n * g.ball_volume / g.sphere_measure

    def f(rho):
        rho = np.asarray(rho, dtype=float)
        with np.errstate(divide="ignore"):
            log_t = p * np.log(rho)
        return scale * geometry.radial_mu_weight(n, rho) * np.logaddexp(0.0, log_t)

    res = integrate(f, 0.0, math.inf, cfg)
    if not res.converged:
        raise FunctionalError(f"quadrature did not converge: {res.as_dict()}")
    return res


def family_J_closed_form(dim, r: float) -> float:
    """J along the minimizing family without quadrature.

    With T = r^(N/(N-1)) and X = T/(1+T), the substitution x = t/(1+t)
    turns J(W_r) into -sum_{m=1}^{N-1} X^m / m, which tends to -H_{N-1}.
    """
    n = as_n(dim)
    if not r > 0:
        raise ValueError("r must be positive")
    log_t = n / (n - 1) * math.log(r)
    x = math.exp(-np.logaddexp(0.0, -log_t))
    return -sum(x**m / m for m in range(1, n))
