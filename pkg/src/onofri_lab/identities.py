"""Exact checks of the Beta-integral identities behind the harmonic constant.

For 0 <= k <= n-2,

    int_0^inf t^k / (1+t)^n dt = k! (n-k-2)! / (n-1)!

so binom(n-1, k) times that integral is 1/(n-k-1), and summing over k
gives the harmonic number H_{n-1}. Everything here uses ``Fraction``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction

from .geometry import harmonic_number

Rational = Fraction


@dataclass(frozen=True)
class IdentityRecord:
    n: int
    k: int | None
    exact_value: Fraction
    claimed: Fraction

    @property
    def match(self) -> bool:
        return self.exact_value == self.claimed

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "exact_numerator": self.exact_value.numerator,
            "exact_denominator": self.exact_value.denominator,
            "claimed": str(self.claimed),
            "match": self.match,
        }


def _check_nk(n: int, k: int):
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if not 0 <= k <= n - 2:
        raise ValueError(f"need 0 <= k <= n-2, got k={k} for n={n}")


def beta_integral_exact(n: int, k: int) -> Fraction:
    _check_nk(n, k)
    return Fraction(math.factorial(k) * math.factorial(n - k - 2), math.factorial(n - 1))


def induction_identity(n: int, k: int) -> IdentityRecord:
    exact = math.comb(n - 1, k) * beta_integral_exact(n, k)
    return IdentityRecord(n, k, exact, Fraction(1, n - k - 1))


def harmonic_closure(n: int) -> IdentityRecord:
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    total = sum((Fraction(1, n - k - 1) for k in range(n - 1)), Fraction(0))
    return IdentityRecord(n, None, total, harmonic_number(n - 1))


def remainder_bound(n: int, k: int, R: float) -> float:
    """Upper bound R^(k+1-n)/(n-k-1) on int_R^inf t^k/(1+t)^n dt."""
    _check_nk(n, k)
    if not R > 1:
        raise ValueError("need R > 1")
    return R ** (k + 1 - n) / (n - k - 1)


def identity_table(n_max: int = 20) -> list[IdentityRecord]:
    rows = []
    for n in range(2, n_max + 1):
        rows.extend(induction_identity(n, k) for k in range(n - 1))
    return rows


def write_identity_csv(path, records) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "k", "exact_numerator", "exact_denominator", "claimed", "match"])
        for rec in records:
            d = rec.as_dict()
            w.writerow([d["n"], d["k"], d["exact_numerator"], d["exact_denominator"],
                        d["claimed"], d["match"]])
