"""The convexity remainder R_N(X, Y) of Z -> |Z|^N and its two-sided bounds.

R_N(X, Y) = |X + Y|^N - |X|^N - N |X|^(N-2) X.Y

``remainder_vec`` is vectorized over leading axes: X and Y may have shape
``(..., N)``. The ``fuzz_*`` helpers run the randomized checks in batches.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import as_n

# Relative rounding allowance for floating-point evaluation of the bounds.
# The scale is the size of the terms that cancel inside R_N.
ROUNDING_SLACK = 64 * np.finfo(float).eps


@dataclass(frozen=True)
class RadialGradientPair:
    """Signed radial components: a of grad v_N (a <= 0), b of grad u."""

    a: float
    b: float

    def __post_init__(self):
        if self.a > 0:
            raise ValueError("radial component of grad v_N must be <= 0")


@dataclass
class BoundReport:
    name: str
    passed: bool
    lhs: float
    rhs: float
    margin: float
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "pass": self.passed,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            **self.details,
        }


def _norm_pow(x: np.ndarray, p: int) -> np.ndarray:
    """|x|^p along the last axis; 0^0 = 1."""
    sq = np.sum(x * x, axis=-1)
    if p % 2 == 0:
        return sq ** (p // 2)
    return np.sqrt(sq) ** p


def _as_vectors(n: int, X, Y):
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.shape[-1:] != (n,) or Y.shape[-1:] != (n,):
        raise ValueError(
            f"vectors must have trailing length {n}, got {X.shape} and {Y.shape}"
        )
    return X, Y


def remainder_vec(dim, X, Y):
    n = as_n(dim)
    X, Y = _as_vectors(n, X, Y)
    scalar = X.ndim == 1 and Y.ndim == 1
    dot = np.sum(X * Y, axis=-1)
    # |X|^(N-2) is identically 1 for N = 2 and vanishes at X = 0 otherwise.
    out = _norm_pow(X + Y, n) - _norm_pow(X, n) - n * _norm_pow(X, n - 2) * dot
    return float(out) if scalar else out


def remainder_radial(dim, a, b=None):
    """Collinear specialization |a+b|^N - |a|^N - N |a|^(N-2) a b.

    Accepts a :class:`RadialGradientPair` or two (array) arguments.
    """
    n = as_n(dim)
    if isinstance(a, RadialGradientPair):
        a, b = a.a, a.b
    scalar = np.ndim(a) == 0 and np.ndim(b) == 0
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    s = a + b
    # same evaluation order as remainder_vec on (a e1, b e1)
    out = _norm_pow(s[..., None], n) - _norm_pow(a[..., None], n) - n * _norm_pow(
        a[..., None], n - 2
    ) * (a * b)
    return float(out) if scalar else out


def _rounding_scale(n: int, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    nx = np.sqrt(np.sum(X * X, axis=-1))
    ny = np.sqrt(np.sum(Y * Y, axis=-1))
    return (nx + ny) ** n + nx**n + n * nx ** (n - 1) * ny


def upper_bound_constant(dim) -> float:
    """c_N = N(N-1) 2^(N-4) for N >= 3; 1 for N = 2 where R_2 = |Y|^2."""
    n = as_n(dim)
    if n == 2:
        return 1.0
    return n * (n - 1) * 2.0 ** (n - 4)


def two_sided_terms(dim, X, Y):
    """Return (R_N, upper bound, rounding slack) arrays for the bound check."""
    n = as_n(dim)
    X, Y = _as_vectors(n, X, Y)
    r = remainder_vec(n, X, Y)
    ny2 = np.sum(Y * Y, axis=-1)
    upper = upper_bound_constant(n) * (_norm_pow(Y, n) + ny2 * _norm_pow(X, n - 2))
    slack = ROUNDING_SLACK * _rounding_scale(n, X, Y)
    return r, upper, slack


def check_two_sided_bound(dim, X, Y) -> BoundReport:
    """0 <= R_N(X,Y) <= c_N (|Y|^N + |Y|^2 |X|^(N-2))."""
    n = as_n(dim)
    r, upper, slack = two_sided_terms(n, X, Y)
    r, upper, slack = float(r), float(upper), float(slack)
    passed = (r >= -slack) and (r <= upper + slack)
    return BoundReport(
        name="two_sided",
        passed=passed,
        lhs=r,
        rhs=upper,
        margin=min(r, upper - r),
        details={"n": n, "c_n": upper_bound_constant(n), "lower": 0.0},
    )


def _require_even(n: int):
    if n % 2 or n < 4:
        raise ValueError(f"the even lower bound needs even N >= 4, got {n}")


def even_lower_terms(dim, X, Y):
    n = as_n(dim)
    _require_even(n)
    X, Y = _as_vectors(n, X, Y)
    r = remainder_vec(n, X, Y)
    lower = 0.5 * n * _norm_pow(X, n - 2) * np.sum(Y * Y, axis=-1)
    slack = ROUNDING_SLACK * _rounding_scale(n, X, Y)
    return r, lower, slack


def check_even_lower_bound(dim, X, Y) -> BoundReport:
    """R_N(X,Y) >= (N/2) |X|^(N-2) |Y|^2 for even N >= 4."""
    n = as_n(dim)
    r, lower, slack = (float(v) for v in even_lower_terms(n, X, Y))
    return BoundReport(
        name="even_lower",
        passed=r >= lower - slack,
        lhs=r,
        rhs=lower,
        margin=r - lower,
        details={"n": n},
    )


def _binomial_check_args(k, a, b):
    if int(k) != k or k < 2:
        raise ValueError(f"k must be an integer >= 2, got {k}")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a < 0) or np.any(a + b < 0):
        raise ValueError("need a >= 0 and a + b >= 0")
    return int(k), a, b


def binomial_terms(k, a, b):
    """Left side, the two right sides (second is NaN for k < 3), and slack."""
    k, a, b = _binomial_check_args(k, a, b)
    lhs = (a + b) ** k
    rhs1 = a**k + k * a ** (k - 1) * b + b**k
    if k >= 3:
        rhs2 = rhs1 + k * a * b ** (k - 1)
    else:
        rhs2 = np.full_like(lhs, np.nan)
    scale = (a + np.abs(b)) ** k
    return lhs, rhs1, rhs2, ROUNDING_SLACK * scale


def check_binomial_inequalities(k, a, b) -> BoundReport:
    """(a+b)^k >= a^k + k a^(k-1) b + b^k, plus the k a b^(k-1) term for k >= 3."""
    lhs, rhs1, rhs2, slack = (float(v) for v in binomial_terms(k, a, b))
    ok1 = lhs >= rhs1 - slack
    ok2 = True if k < 3 else lhs >= rhs2 - slack
    rhs = rhs1 if k < 3 else max(rhs1, rhs2)
    return BoundReport(
        name="binomial",
        passed=bool(ok1 and ok2),
        lhs=lhs,
        rhs=rhs,
        margin=lhs - rhs,
        details={"k": int(k), "a": float(a), "b": float(b), "first": rhs1,
                 "second": None if k < 3 else rhs2},
    )


# -- batched fuzzing ---------------------------------------------------------


@dataclass
class FuzzSummary:
    name: str
    n: int | None
    samples: int
    violations: int
    min_margin: float
    witness: dict | None = None

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "samples": self.samples,
            "violations": self.violations,
            "min_margin": self.min_margin,
            "witness": self.witness,
            "pass": self.passed,
        }


def fuzz_two_sided(dim, samples: int, rng: np.random.Generator, box: float = 10.0):
    n = as_n(dim)
    X = rng.uniform(-box, box, size=(samples, n))
    Y = rng.uniform(-box, box, size=(samples, n))
    r, upper, slack = two_sided_terms(n, X, Y)
    bad = (r < -slack) | (r > upper + slack)
    margin = np.minimum(r, upper - r)
    return _summary("two_sided", n, X, Y, bad, margin)


def fuzz_even_lower(dim, samples: int, rng: np.random.Generator, box: float = 10.0):
    n = as_n(dim)
    X = rng.uniform(-box, box, size=(samples, n))
    Y = rng.uniform(-box, box, size=(samples, n))
    r, lower, slack = even_lower_terms(n, X, Y)
    bad = r < lower - slack
    return _summary("even_lower", n, X, Y, bad, r - lower)


def fuzz_binomial(samples: int, rng: np.random.Generator, k_max: int = 12, box: float = 10.0):
    k = rng.integers(2, k_max + 1, size=samples)
    a = rng.uniform(0, box, size=samples)
    b = rng.uniform(-1, 1, size=samples) * box
    b = np.maximum(b, -a)
    violations = 0
    min_margin = np.inf
    witness = None
    for kk in np.unique(k):
        sel = k == kk
        lhs, rhs1, rhs2, slack = binomial_terms(int(kk), a[sel], b[sel])
        bad = lhs < rhs1 - slack
        margin = lhs - rhs1
        if kk >= 3:
            bad |= lhs < rhs2 - slack
            margin = np.minimum(margin, lhs - rhs2)
        violations += int(bad.sum())
        if bad.any() and witness is None:
            i = int(np.flatnonzero(bad)[0])
            witness = {"k": int(kk), "a": float(a[sel][i]), "b": float(b[sel][i])}
        min_margin = min(min_margin, float(margin.min()))
    return FuzzSummary("binomial", None, samples, violations, min_margin, witness)


def _summary(name, n, X, Y, bad, margin) -> FuzzSummary:
    witness = None
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        witness = {"X": X[i].tolist(), "Y": Y[i].tolist()}
    return FuzzSummary(name, n, len(X), int(bad.sum()), float(margin.min()), witness)
