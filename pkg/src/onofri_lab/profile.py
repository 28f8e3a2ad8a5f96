"""Radial profiles u(rho), rho >= 0, and the constructions applied to them.

Two representations share the :class:`Profile` interface:

* :class:`AnalyticProfile` wraps closed-form value/slope callables;
* :class:`SampledProfile` is piecewise linear on a node grid.

Every profile carries ``kinks`` (radii where the slope may jump, used to
split integrals), and optionally ``support_bound``: beyond it the profile
is the constant ``tail_value`` (0 for compactly supported profiles).
Profiles are immutable; every operation returns a new one.
"""

from __future__ import annotations

import csv
import math
from typing import Callable, Iterable

import numpy as np
from scipy.optimize import brentq

from . import geometry

ArrayFn = Callable[[np.ndarray], np.ndarray]

# Radius up to which unbounded profiles are scanned for truncation crossings.
SCAN_LIMIT = 1e300


def default_grid(support: float, ratio: float = 1.05, r_min: float = 1e-4) -> np.ndarray:
    """Node 0 plus a geometric grid from ``r_min`` to ``support``."""
    if support <= r_min:
        return np.array([0.0, support])
    count = int(math.ceil(math.log(support / r_min) / math.log(ratio)))
    pts = r_min * ratio ** np.arange(count)
    return np.concatenate([[0.0], pts[pts < support], [support]])


class Profile:
    kind: str = "analytic"
    kinks: tuple = ()
    support_bound: float | None = None
    tail_value: float = 0.0

    def value(self, r):
        raise NotImplementedError

    def slope(self, r):
        raise NotImplementedError

    def __call__(self, r):
        return self.value(r)

    @property
    def compact(self) -> bool:
        return self.support_bound is not None and self.tail_value == 0.0

    def breakpoints(self, upper: float | None = None) -> np.ndarray:
        """0, the kinks and the support bound, clipped to [0, upper]."""
        pts = [0.0, *self.kinks]
        if self.support_bound is not None:
            pts.append(self.support_bound)
        if upper is not None:
            pts = [p for p in pts if p < upper] + [upper]
        return np.unique(np.asarray([p for p in pts if np.isfinite(p)], dtype=float))

    # -- algebra -----------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Profile):
            return add_profiles(self, other)
        return self.shift(float(other))

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1.0)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Profile):
            return multiply_profiles(self, other)
        return self.scale(float(other))

    __rmul__ = __mul__

    def scale(self, c: float) -> "Profile":
        return AnalyticProfile(
            lambda r: c * self.value(r),
            lambda r: c * self.slope(r),
            kinks=self.kinks,
            support_bound=self.support_bound,
            tail_value=c * self.tail_value,
        )

    def shift(self, c: float) -> "Profile":
        return AnalyticProfile(
            lambda r: self.value(r) + c,
            self.slope,
            kinks=self.kinks,
            support_bound=self.support_bound,
            tail_value=self.tail_value + c,
        )

    def dilate(self, s: float) -> "Profile":
        """rho -> u(s rho)."""
        if not s > 0:
            raise ValueError("dilation factor must be positive")
        return AnalyticProfile(
            lambda r: self.value(s * np.asarray(r, dtype=float)),
            lambda r: s * self.slope(s * np.asarray(r, dtype=float)),
            kinks=tuple(k / s for k in self.kinks),
            support_bound=None if self.support_bound is None else self.support_bound / s,
            tail_value=self.tail_value,
        )

    # -- persistence -------------------------------------------------------

    def sample_grid(self) -> np.ndarray:
        support = self.support_bound if self.support_bound else 100.0
        return np.unique(np.concatenate([default_grid(support), self.breakpoints()]))

    def to_csv(self, path, grid: Iterable[float] | None = None) -> None:
        r = np.asarray(grid if grid is not None else self.sample_grid(), dtype=float)
        v = np.asarray(self.value(r), dtype=float)
        s = np.asarray(self.slope(r), dtype=float)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["r", "value", "slope"])
            for row in zip(r, v, s):
                w.writerow([repr(float(x)) for x in row])


class AnalyticProfile(Profile):
    kind = "analytic"

    def __init__(self, value_fn: ArrayFn, slope_fn: ArrayFn, kinks: Iterable[float] = (),
                 support_bound: float | None = None, tail_value: float = 0.0,
                 name: str = ""):
        self._value_fn = value_fn
        self._slope_fn = slope_fn
        self.kinks = tuple(sorted(float(k) for k in kinks if np.isfinite(k) and k > 0))
        self.support_bound = None if support_bound is None else float(support_bound)
        self.tail_value = float(tail_value)
        self.name = name

    def _split(self, r):
        scalar = np.ndim(r) == 0
        r = np.asarray(r, dtype=float)
        if self.support_bound is None:
            return scalar, r, None
        inside = r <= self.support_bound
        return scalar, np.where(inside, r, self.support_bound), inside

    def value(self, r):
        scalar, rc, inside = self._split(r)
        out = np.asarray(self._value_fn(rc), dtype=float)
        out = np.broadcast_to(out, rc.shape)
        if inside is not None:
            out = np.where(inside, out, self.tail_value)
        return float(out) if scalar else out

    def slope(self, r):
        scalar, rc, inside = self._split(r)
        out = np.asarray(self._slope_fn(rc), dtype=float)
        out = np.broadcast_to(out, rc.shape)
        if inside is not None:
            out = np.where(inside, out, 0.0)
        return float(out) if scalar else out

    def __repr__(self):
        return (f"AnalyticProfile({self.name or '<fn>'}, support={self.support_bound}, "
                f"tail={self.tail_value})")


class SampledProfile(Profile):
    """Piecewise-linear interpolant of ``values`` at ``nodes``.

    ``tail="zero"`` requires the last value to be 0 and continues with 0;
    ``tail="constant"`` continues with the last value.
    """

    kind = "sampled"

    def __init__(self, nodes, values, tail: str = "zero", resample_error: float = 0.0):
        nodes = np.asarray(nodes, dtype=float)
        values = np.asarray(values, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2 or nodes.shape != values.shape:
            raise ValueError("need at least 2 nodes and one value per node")
        if nodes[0] != 0.0 or np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must start at 0 and be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        if tail not in ("zero", "constant"):
            raise ValueError(f"tail must be 'zero' or 'constant', got {tail!r}")
        if tail == "zero" and values[-1] != 0.0:
            raise ValueError("tail='zero' needs the last value to be 0")
        self.nodes = nodes
        self.values = values
        self.tail = tail
        self.resample_error = float(resample_error)
        self.slopes = np.diff(values) / np.diff(nodes)
        self.kinks = tuple(nodes[1:].tolist())
        self.support_bound = float(nodes[-1])
        self.tail_value = 0.0 if tail == "zero" else float(values[-1])

    def value(self, r):
        scalar = np.ndim(r) == 0
        out = np.interp(np.asarray(r, dtype=float), self.nodes, self.values,
                        right=self.tail_value)
        return float(out) if scalar else out

    def slope(self, r):
        scalar = np.ndim(r) == 0
        r = np.asarray(r, dtype=float)
        # right derivative at nodes
        idx = np.searchsorted(self.nodes, r, side="right") - 1
        inside = (idx >= 0) & (idx < self.slopes.size)
        out = np.where(inside, self.slopes[np.clip(idx, 0, self.slopes.size - 1)], 0.0)
        return float(out) if scalar else out

    def scale(self, c: float) -> "SampledProfile":
        return SampledProfile(self.nodes, c * self.values, self.tail, abs(c) * self.resample_error)

    def shift(self, c: float) -> "SampledProfile":
        if c == 0:
            return self
        return SampledProfile(self.nodes, self.values + c, "constant", self.resample_error)

    def dilate(self, s: float) -> "SampledProfile":
        if not s > 0:
            raise ValueError("dilation factor must be positive")
        return SampledProfile(self.nodes / s, self.values, self.tail, self.resample_error)

    def sample_grid(self) -> np.ndarray:
        return self.nodes

    def __repr__(self):
        return f"SampledProfile({self.nodes.size} nodes, tail={self.tail})"


# -- combinators --------------------------------------------------------------


def _max_support(u: Profile, v: Profile) -> float | None:
    if u.support_bound is None or v.support_bound is None:
        return None
    return max(u.support_bound, v.support_bound)


def add_profiles(u: Profile, v: Profile) -> Profile:
    if isinstance(u, SampledProfile) and isinstance(v, SampledProfile):
        nodes = np.union1d(u.nodes, v.nodes)
        values = u.value(nodes) + v.value(nodes)
        tail = "zero" if (u.tail == "zero" and v.tail == "zero") else "constant"
        return SampledProfile(nodes, values, tail, u.resample_error + v.resample_error)
    return AnalyticProfile(
        lambda r: u.value(r) + v.value(r),
        lambda r: u.slope(r) + v.slope(r),
        kinks=set(u.kinks) | set(v.kinks),
        support_bound=_max_support(u, v),
        tail_value=u.tail_value + v.tail_value,
    )


def _product_support(u: Profile, v: Profile) -> float | None:
    zero_bounds = [p.support_bound for p in (u, v) if p.compact]
    if zero_bounds:
        return min(zero_bounds)
    return _max_support(u, v)


def multiply_profiles(u: Profile, v: Profile) -> Profile:
    """Pointwise product.

    Analytic times analytic stays analytic (product rule for the slope).
    If either factor is sampled the exact product is resampled on the union
    of both grids; ``resample_error`` records the largest deviation between
    the exact product and the interpolant at element midpoints, a
    posteriori.
    """
    support = _product_support(u, v)
    tail = u.tail_value * v.tail_value
    if u.kind == "analytic" and v.kind == "analytic":
        return AnalyticProfile(
            lambda r: u.value(r) * v.value(r),
            lambda r: u.slope(r) * v.value(r) + u.value(r) * v.slope(r),
            kinks=set(u.kinks) | set(v.kinks),
            support_bound=support,
            tail_value=tail,
        )
    if support is None:
        raise ValueError("cannot resample a product without bounded support")
    grids = [p.nodes if isinstance(p, SampledProfile) else default_grid(support)
             for p in (u, v)]
    nodes = np.union1d(*grids)
    nodes = np.union1d(nodes[nodes <= support], [support])
    values = u.value(nodes) * v.value(nodes)
    mids = 0.5 * (nodes[1:] + nodes[:-1])
    exact = u.value(mids) * v.value(mids)
    interp = 0.5 * (values[1:] + values[:-1])
    err = float(np.max(np.abs(exact - interp))) if mids.size else 0.0
    kind = "zero" if tail == 0.0 and values[-1] == 0.0 else "constant"
    if kind == "zero" or values[-1] == tail:
        return SampledProfile(nodes, values, kind, err)
    raise ValueError("product tail does not match its last sampled value")


def constant(c: float) -> AnalyticProfile:
    return AnalyticProfile(
        lambda r: np.full(np.shape(r), c, dtype=float),
        lambda r: np.zeros(np.shape(r)),
        support_bound=0.0,
        tail_value=c,
        name=f"constant({c})",
    )


def zero() -> AnalyticProfile:
    return constant(0.0)


def sample(u: Profile, nodes) -> SampledProfile:
    nodes = np.asarray(nodes, dtype=float)
    values = u.value(nodes)
    tail = "zero" if u.tail_value == 0.0 and values[-1] == 0.0 else "constant"
    return SampledProfile(nodes, values, tail)


def hat(height: float, support: float = 1.0, peak: float = 0.0) -> SampledProfile:
    """Piecewise-linear hat: ``height`` at ``peak``, 0 at ``support``."""
    if not 0 <= peak < support:
        raise ValueError("need 0 <= peak < support")
    if peak == 0:
        return SampledProfile([0.0, support], [height, 0.0])
    return SampledProfile([0.0, peak, support], [0.0, height, 0.0])


def read_csv(path, tail: str = "zero") -> SampledProfile:
    rows = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            rows.append((float(row["r"]), float(row["value"])))
    r, v = (np.array(c) for c in zip(*rows))
    return SampledProfile(r, v, tail)


# -- constructions ------------------------------------------------------------


def _phi(t):
    t = np.asarray(t, dtype=float)
    pos = t > 0
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(pos, np.exp(-1.0 / np.where(pos, t, 1.0)), 0.0)


def _dphi(t):
    t = np.asarray(t, dtype=float)
    pos = t > 0
    safe = np.where(pos, t, 1.0)
    return np.where(pos, _phi(safe) / (safe * safe), 0.0)


def _psi_unit(s):
    a = _phi(2.0 - 2.0 * s)
    b = _phi(2.0 * s - 1.0)
    return a / (a + b)


def _dpsi_unit(s):
    a = _phi(2.0 - 2.0 * s)
    b = _phi(2.0 * s - 1.0)
    da = -2.0 * _dphi(2.0 - 2.0 * s)
    db = 2.0 * _dphi(2.0 * s - 1.0)
    return (da * b - a * db) / (a + b) ** 2


def cutoff_psi(r_scale: float) -> AnalyticProfile:
    """Smooth cutoff: 1 on [0, r/2], 0 on [r, inf), C-infinity in between."""
    if not r_scale > 0:
        raise ValueError("r_scale must be positive")
    r0 = float(r_scale)
    return AnalyticProfile(
        lambda r: _psi_unit(np.asarray(r) / r0),
        lambda r: _dpsi_unit(np.asarray(r) / r0) / r0,
        kinks=(0.5 * r0, r0),
        support_bound=r0,
        name=f"cutoff({r0})",
    )


def truncation_crossings(u: Profile, lam: float) -> list[float]:
    """Radii where u crosses +-lam, located on a scan grid and refined."""
    upper = u.support_bound if u.support_bound is not None else SCAN_LIMIT
    grid = np.unique(np.concatenate([default_grid(upper), u.breakpoints(upper)]))
    vals = u.value(grid)
    roots = []
    for level in (lam, -lam):
        d = vals - level
        idx = np.flatnonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0)
        for i in idx:
            roots.append(brentq(lambda x: u.value(x) - level, grid[i], grid[i + 1],
                                xtol=1e-15 * max(1.0, grid[i + 1])))
    return sorted(roots)


def truncate(u: Profile, lam: float) -> Profile:
    """max(-lam, min(u, lam)); slope 0 where the profile is clipped."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    if isinstance(u, SampledProfile):
        extra = truncation_crossings(u, lam)
        nodes = np.union1d(u.nodes, extra)
        values = np.clip(u.value(nodes), -lam, lam)
        tail = "zero" if u.tail == "zero" else "constant"
        return SampledProfile(nodes, values, tail)
    crossings = truncation_crossings(u, lam)

    def value(r):
        return np.clip(u.value(r), -lam, lam)

    def slope(r):
        v = u.value(r)
        return np.where(np.abs(v) < lam, u.slope(r), 0.0)

    return AnalyticProfile(
        value, slope,
        kinks=set(u.kinks) | set(crossings),
        support_bound=u.support_bound,
        tail_value=float(np.clip(u.tail_value, -lam, lam)),
        name=f"truncate({lam})",
    )


def eta_k(k: int) -> tuple[AnalyticProfile, float]:
    """The compactly supported damping profile and its support radius k*.

    eta_k = k^(-1/k) on [0, 1], rho^(-1/k) + k^(-1/k) - 1 on (1, k*], 0 beyond,
    with k* = (1 - k^(-1/k))^(-k). When k* exceeds double range it is
    returned as ``inf`` and the profile has no finite support bound.
    """
    if int(k) != k or k < 2:
        raise ValueError("k must be an integer >= 2")
    k = int(k)
    base = math.exp(-math.log(k) / k)
    log_kstar = -k * math.log(-math.expm1(-math.log(k) / k))
    k_star = math.exp(log_kstar) if log_kstar < 700 else math.inf

    def value(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            outer = np.exp(-np.log(np.maximum(r, 1.0)) / k) + base - 1.0
        out = np.where(r <= 1.0, base, np.maximum(outer, 0.0))
        return np.where(r > k_star, 0.0, out)

    def slope(r):
        r = np.asarray(r, dtype=float)
        rr = np.maximum(r, 1.0)
        out = -(1.0 / k) * np.exp(-(1.0 / k + 1.0) * np.log(rr))
        return np.where((r > 1.0) & (r < k_star), out, 0.0)

    prof = AnalyticProfile(
        value, slope,
        kinks=(1.0, k_star),
        support_bound=None if math.isinf(k_star) else k_star,
        name=f"eta_{k}",
    )
    return prof, k_star


def _check_vanishes_at_one(u: Profile, atol: float = 1e-12):
    if u.support_bound is None or u.support_bound > 1.0 + 1e-12 or u.tail_value != 0.0:
        raise ValueError("profile must be supported in [0, 1]")
    if abs(u.value(1.0)) > atol:
        raise ValueError(f"profile must vanish at rho = 1, got u(1) = {u.value(1.0)!r}")


def lift_to_space(u: Profile, r: float, dim) -> AnalyticProfile:
    """u_r(rho) = u(rho/r) - v_N(rho) + v_N(r) on [0, r], 0 beyond."""
    n = geometry.as_n(dim)
    if not r > 0:
        raise ValueError("r must be positive")
    _check_vanishes_at_one(u)
    v_r = geometry.v_potential(n, r)

    def value(x):
        x = np.asarray(x, dtype=float)
        return u.value(x / r) - geometry.v_potential(n, x) + v_r

    def slope(x):
        x = np.asarray(x, dtype=float)
        return u.slope(x / r) / r + geometry.grad_v_magnitude(n, x)

    return AnalyticProfile(
        value, slope,
        kinks=[k * r for k in u.kinks] + [r],
        support_bound=r,
        name=f"lift(r={r})",
    )


def project_to_ball(u: Profile, r: float, dim) -> AnalyticProfile:
    """W(rho) = u(r rho) Psi(rho) + v_N(r rho) - v_N(r) on [0, 1], 0 beyond.

    Psi is the unit cutoff, so Psi_r(r rho) = Psi(rho). W(1) = 0.
    """
    n = geometry.as_n(dim)
    if not r > 0:
        raise ValueError("r must be positive")
    v_r = geometry.v_potential(n, r)

    def value(x):
        x = np.asarray(x, dtype=float)
        return u.value(r * x) * _psi_unit(x) + geometry.v_potential(n, r * x) - v_r

    def slope(x):
        x = np.asarray(x, dtype=float)
        return (
            r * u.slope(r * x) * _psi_unit(x)
            + u.value(r * x) * _dpsi_unit(x)
            - r * geometry.grad_v_magnitude(n, r * x)
        )

    return AnalyticProfile(
        value, slope,
        kinks=[k / r for k in u.kinks if k / r < 1.0] + [0.5, 1.0],
        support_bound=1.0,
        name=f"project(r={r})",
    )


def minimizing_family(dim, r: float) -> AnalyticProfile:
    """W_r(rho) = N ln[(1 + r^p) / (1 + (r rho)^p)], p = N/(N-1)."""
    return project_to_ball(zero(), r, dim)


def counterexample_profile(K: int) -> SampledProfile:
    """Partial sum over k = 2..K of bumps of height 1/(k sqrt(ln k)).

    Bump k is the tent of half-width 1/2 centred at rho = k.
    """
    if int(K) != K or K < 2:
        raise ValueError("K must be an integer >= 2")
    k = np.arange(2, int(K) + 1, dtype=float)
    heights = 1.0 / (k * np.sqrt(np.log(k)))
    nodes = np.concatenate([[0.0], np.column_stack([k - 0.5, k]).ravel(), [K + 0.5]])
    values = np.concatenate([[0.0], np.column_stack([np.zeros_like(k), heights]).ravel(), [0.0]])
    return SampledProfile(nodes, values)
