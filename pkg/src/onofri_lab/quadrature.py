"""Adaptive Gauss-Kronrod integration on finite and semi-infinite intervals.

The integrator is a globally adaptive 7/15-point Gauss-Kronrod scheme in
the spirit of QUADPACK's QAG, vectorized over the active intervals: every
round evaluates the 15-point rule on all newly created subintervals in one
integrand call, then bisects the intervals that carry more than their
equal share of the error budget.

Integrands must accept a 1-D numpy array and return an array of the same
shape.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .geometry import as_n, constants

# 15-point Kronrod abscissae (positive half, descending) and weights.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
# 7-point Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KWEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GWEIGHTS = np.zeros(15)
_GWEIGHTS[[1, 3, 5]] = _WG[:3]
_GWEIGHTS[[9, 11, 13]] = _WG[2::-1]
_GWEIGHTS[7] = _WG[3]

_EPS = np.finfo(float).eps
_UFLOW = np.finfo(float).tiny

# ln of the largest radius the log transform reaches; beyond it every
# integrand in this package is below double precision resolution.
LOG_RADIUS_CAP = 700.0


class QuadratureError(ValueError):
    """Raised when the integrand returns a non-finite value."""

    def __init__(self, message: str, location: float | None = None):
        super().__init__(message)
        self.location = location


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000
    # "rational" (rho = t/(1-t)), "split" (finite part up to split_at, then
    # rho = split_at/t) or "log" (rho = a + expm1(s))
    infinite_transform: str = "rational"
    split_at: float = 100.0

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if self.infinite_transform not in ("rational", "split", "log"):
            raise ValueError(f"unknown infinite transform {self.infinite_transform!r}")
        if self.infinite_transform == "split" and not self.split_at > 0:
            raise ValueError("split_at must be positive")

    def tolerance(self, value: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT_CONFIG = QuadratureConfig()


@dataclass
class IntegralResult:
    value: float
    error_estimate: float
    subdivisions_used: int
    converged: bool
    label: str = ""
    meta: dict = field(default_factory=dict)

    def __add__(self, other: "IntegralResult") -> "IntegralResult":
        return IntegralResult(
            value=self.value + other.value,
            error_estimate=self.error_estimate + other.error_estimate,
            subdivisions_used=self.subdivisions_used + other.subdivisions_used,
            converged=self.converged and other.converged,
            label=self.label or other.label,
        )

    def scaled(self, factor: float) -> "IntegralResult":
        return IntegralResult(
            value=self.value * factor,
            error_estimate=self.error_estimate * abs(factor),
            subdivisions_used=self.subdivisions_used,
            converged=self.converged,
            label=self.label,
            meta=dict(self.meta),
        )

    def as_dict(self) -> dict:
        out = {
            "value": self.value,
            "error_estimate": self.error_estimate,
            "subdivisions_used": self.subdivisions_used,
            "converged": self.converged,
        }
        if self.label:
            out["label"] = self.label
        return out


def zero_result(label: str = "") -> IntegralResult:
    return IntegralResult(0.0, 0.0, 0, True, label)


def _gk15(f, a: np.ndarray, b: np.ndarray):
    centre = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = centre[:, None] + half[:, None] * _NODES[None, :]
    fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    bad = ~np.isfinite(fx)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        loc = float(x[i, j])
        raise QuadratureError(f"integrand is not finite at x = {loc!r}", loc)
    resk = fx @ _KWEIGHTS
    resg = fx @ _GWEIGHTS
    reskh = 0.5 * resk
    resabs = np.abs(fx) @ _KWEIGHTS
    resasc = np.abs(fx - reskh[:, None]) @ _KWEIGHTS
    err = np.abs((resk - resg) * half)
    resasc = resasc * np.abs(half)
    resabs = resabs * np.abs(half)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where((resasc != 0) & (err != 0), scaled, err)
    floor = 50.0 * _EPS * resabs
    err = np.where(resabs > _UFLOW / (50.0 * _EPS), np.maximum(err, floor), err)
    return resk * half, err


def _adaptive(f, points: np.ndarray, cfg: QuadratureConfig) -> IntegralResult:
    points = np.asarray(points, dtype=float)
    return _adaptive_intervals(f, points[:-1], points[1:], cfg)


def _adaptive_intervals(f, a: np.ndarray, b: np.ndarray, cfg) -> IntegralResult:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    keep = b > a
    a, b = a[keep], b[keep]
    if a.size == 0:
        return zero_result()
    val, err = _gk15(f, a, b)
    subdivisions = 0
    while True:
        total = float(np.sum(val))
        total_err = float(np.sum(err))
        tol = cfg.tolerance(total)
        if total_err <= tol:
            return IntegralResult(total, total_err, subdivisions, True)
        budget = cfg.max_subdivisions - subdivisions
        if budget <= 0:
            return IntegralResult(total, total_err, subdivisions, False)
        share = tol / a.size
        width = b - a
        splittable = width > 8 * _EPS * np.maximum(np.abs(a), np.abs(b))
        cand = np.flatnonzero((err > share) & splittable)
        if cand.size == 0:
            return IntegralResult(total, total_err, subdivisions, False)
        if cand.size > budget:
            cand = cand[np.argsort(-err[cand], kind="stable")[:budget]]
            cand.sort()
        mid = 0.5 * (a[cand] + b[cand])
        new_a = np.concatenate([a[cand], mid])
        new_b = np.concatenate([mid, b[cand]])
        nv, ne = _gk15(f, new_a, new_b)
        rest = np.ones(a.size, dtype=bool)
        rest[cand] = False
        a = np.concatenate([a[rest], new_a])
        b = np.concatenate([b[rest], new_b])
        val = np.concatenate([val[rest], nv])
        err = np.concatenate([err[rest], ne])
        # fixed summation order for determinism
        order = np.argsort(a, kind="stable")
        a, b, val, err = a[order], b[order], val[order], err[order]
        subdivisions += cand.size


def _rational_tail(f, a: float):
    def g(t):
        one_minus = 1.0 - t
        rho = a + t / one_minus
        out = f(rho) / (one_minus * one_minus)
        return np.where(np.isfinite(rho), out, 0.0)

    return g


def _inverse_tail(f, a: float):
    # rho = a / t on (0, 1]
    def g(t):
        rho = a / t
        return f(rho) * a / (t * t)

    return g


def _log_tail(f, a: float):
    # rho = a + expm1(s), s in [0, LOG_RADIUS_CAP]
    def g(s):
        # denominators such as 1 + rho^2 may overflow to inf out here,
        # which correctly sends the integrand to 0
        with np.errstate(over="ignore"):
            return f(a + np.expm1(s)) * np.exp(s)

    return g


def integrate(f, a: float, b: float, cfg: QuadratureConfig | None = None,
              points=None) -> IntegralResult:
    """Integrate ``f`` over [a, b]; ``b`` may be ``math.inf``.

    ``points`` are optional interior breakpoints (kinks) where the interval
    is pre-split before adaptation; only used on finite intervals.
    """
    cfg = cfg or DEFAULT_CONFIG
    if not a < b:
        if a == b:
            return zero_result()
        raise ValueError(f"need a < b, got [{a}, {b}]")
    if math.isinf(a):
        raise ValueError("lower limit must be finite")
    if math.isinf(b):
        return _integrate_to_infinity(f, a, cfg)
    pts = [a, b]
    if points is not None:
        pts.extend(p for p in points if a < p < b)
    return _adaptive(f, np.unique(np.asarray(pts, dtype=float)), cfg)


def _integrate_to_infinity(f, a: float, cfg: QuadratureConfig) -> IntegralResult:
    kind = cfg.infinite_transform
    if kind == "rational":
        return _adaptive(_rational_tail(f, a), np.array([0.0, 1.0]), cfg)
    if kind == "log":
        return _adaptive(_log_tail(f, a), _log_grid(0.0, LOG_RADIUS_CAP), cfg)
    s = cfg.split_at
    if a < s:
        head = _adaptive(f, np.array([a, s]), cfg)
        return head + _adaptive(_inverse_tail(f, s), np.array([0.0, 1.0]), cfg)
    if a == 0:
        raise ValueError("split transform needs a positive split point")
    return _adaptive(_inverse_tail(f, a), np.array([0.0, 1.0]), cfg)


def integrate_radial(dim, g, cfg: QuadratureConfig | None = None,
                     a: float = 0.0, b: float = math.inf) -> IntegralResult:
    """omega_{N-1} times the integral of g(rho) rho^(N-1) over [a, b].

    For g = g(|x|) and the full range this is the integral over R^N.
    """
    n = as_n(dim)
    omega = constants(n).sphere_measure

    def h(rho):
        gv = np.asarray(g(rho), dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            out = gv * rho ** (n - 1)
        # far-field underflow of g against overflow of rho^(N-1)
        return np.where(gv == 0, 0.0, out)

    res = integrate(h, a, b, cfg)
    return res.scaled(omega)


def integrate_pieces(f, breaks, cfg: QuadratureConfig | None = None,
                     wide_ratio: float = 1e3) -> IntegralResult:
    """Integrate over consecutive ``breaks`` (last may be inf), kink-aware.

    Ordinary pieces are integrated together in one vectorized adaptive run.
    Pieces [a, b] with a > 0 and b/a > ``wide_ratio`` (including the final
    unbounded piece) are integrated in log variables, which keeps
    polynomially decaying integrands regular over many decades.
    """
    cfg = cfg or DEFAULT_CONFIG
    br = np.unique(np.asarray(breaks, dtype=float))
    if br.size < 2:
        return zero_result()
    normal = []
    result = zero_result()
    for lo, hi in zip(br[:-1], br[1:]):
        if lo > 0 and (math.isinf(hi) or hi / lo > wide_ratio):
            result = result + _log_piece(f, lo, hi, cfg)
        elif math.isinf(hi):
            # lo == 0 here; split at 1 so the tail runs in log variables
            result = result + _adaptive(f, np.array([0.0, 1.0]), cfg)
            result = result + _log_piece(f, 1.0, hi, cfg)
        else:
            normal.append((lo, hi))
    if normal:
        lo, hi = np.asarray(normal).T
        result = result + _adaptive_intervals(f, lo, hi, cfg)
    return result


def _log_piece(f, lo: float, hi: float, cfg) -> IntegralResult:
    # rho = exp(s): d rho = rho ds
    s_hi = min(math.log(hi), LOG_RADIUS_CAP) if not math.isinf(hi) else LOG_RADIUS_CAP
    s_lo = math.log(lo)
    if s_hi <= s_lo:
        return zero_result()

    def g(s):
        rho = np.exp(s)
        with np.errstate(over="ignore"):
            return f(rho) * rho

    return _adaptive(g, _log_grid(s_lo, s_hi), cfg)


def _log_grid(s_lo: float, s_hi: float) -> np.ndarray:
    """Initial breakpoints s_lo + (2^j - 1) so no decade goes unsampled."""
    offsets = 2.0 ** np.arange(0, 11) - 1.0
    pts = s_lo + offsets
    return np.unique(np.concatenate([pts[pts < s_hi], [s_hi]]))


def divergence_probe(f, radii, cfg: QuadratureConfig | None = None, a: float = 0.0):
    """Integrals of f over [a, R] for increasing R, with their increments.

    A divergent integral shows increments that do not shrink; the probe
    only reports the trend and does not prove anything.
    """
    radii = sorted(float(r) for r in radii)
    values = []
    prev = a
    total = zero_result()
    for r in radii:
        total = total + integrate(f, prev, r, cfg)
        values.append(total.value)
        prev = r
    increments = np.diff([0.0] + values).tolist()
    growing = all(d > 0 for d in increments[1:])
    return {"radii": radii, "values": values, "increments": increments,
            "monotone_growth": growing}
