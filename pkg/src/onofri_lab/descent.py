"""Discretized J on a fixed radial grid and projected gradient descent.

The unknown is a piecewise-linear profile on nodes 0 = rho_0 < ... < rho_M = 1
with u(rho_M) = 0 held fixed. The Dirichlet part is exact for piecewise
linear functions; the exponential part uses an 8-point Gauss-Legendre rule
on every element, and the gradient below is the exact gradient of that
discrete objective.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import as_n, constants
from .profile import SampledProfile

_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)
_LAM = 0.5 * (_GL_X + 1.0)
_GW = 0.5 * _GL_W


class DiscreteJ:
    def __init__(self, dim, nodes):
        self.n = as_n(dim)
        nodes = np.asarray(nodes, dtype=float)
        if nodes[0] != 0.0 or nodes[-1] != 1.0 or np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must increase from 0 to 1")
        g = constants(self.n)
        n = self.n
        self.nodes = nodes
        self.h = np.diff(nodes)
        # element weights of |s|^N in the Dirichlet term
        self.shell = g.sphere_measure / g.omega_tilde * np.diff(nodes**n) / n
        x = nodes[:-1, None] + _LAM[None, :] * self.h[:, None]
        self.quad_w = (g.sphere_measure / g.ball_volume) * _GW[None, :] * self.h[:, None] \
            * x ** (n - 1)

    def _full(self, free):
        return np.append(np.asarray(free, dtype=float), 0.0)

    def _exp_terms(self, u):
        vals = (1.0 - _LAM)[None, :] * u[:-1, None] + _LAM[None, :] * u[1:, None]
        return self.quad_w * np.exp(vals)

    def value(self, free) -> float:
        u = self._full(free)
        s = np.diff(u) / self.h
        dirichlet = float(np.sum(self.shell * np.abs(s) ** self.n))
        mean_exp = float(np.sum(self._exp_terms(u)))
        return dirichlet - math.log(mean_exp)

    def gradient(self, free) -> np.ndarray:
        n = self.n
        u = self._full(free)
        s = np.diff(u) / self.h
        ds = self.shell * n * np.abs(s) ** (n - 2) * s / self.h
        grad = np.zeros_like(u)
        grad[:-1] -= ds
        grad[1:] += ds
        terms = self._exp_terms(u)
        total = terms.sum()
        ge = np.zeros_like(u)
        ge[:-1] += terms @ (1.0 - _LAM)
        ge[1:] += terms @ _LAM
        grad -= ge / total
        return grad[:-1]

    def profile(self, free) -> SampledProfile:
        return SampledProfile(self.nodes, self._full(free))


def finite_difference_gradient(obj: DiscreteJ, free, step: float = 1e-6) -> np.ndarray:
    free = np.asarray(free, dtype=float)
    out = np.empty_like(free)
    for i in range(free.size):
        e = np.zeros_like(free)
        e[i] = step
        out[i] = (obj.value(free + e) - obj.value(free - e)) / (2 * step)
    return out


@dataclass
class DescentResult:
    best_value: float
    best_free: np.ndarray
    history: list = field(default_factory=list)
    steps: int = 0


def projected_descent(obj: DiscreteJ, start, steps: int = 200, step0: float = 1.0,
                      shrink: float = 0.5, armijo: float = 1e-4) -> DescentResult:
    """Gradient descent with backtracking; u(1) = 0 is kept by construction."""
    x = np.asarray(start, dtype=float).copy()
    fx = obj.value(x)
    best = DescentResult(fx, x.copy(), [fx])
    step = step0
    for it in range(steps):
        g = obj.gradient(x)
        gg = float(g @ g)
        if gg < 1e-28:
            break
        t = step
        while True:
            y = x - t * g
            fy = obj.value(y)
            if fy <= fx - armijo * t * gg or t < 1e-14:
                break
            t *= shrink
        if fy >= fx:
            break
        x, fx = y, fy
        step = min(4 * t, 1e6)
        best.history.append(fx)
        best.steps = it + 1
        if fx < best.best_value:
            best.best_value = fx
            best.best_free = x.copy()
    return best
