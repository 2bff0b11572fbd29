"""Quadrature rules and Nystrom discretisation of Fredholm determinants."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import linalg


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    domain: tuple[float, float]

    def __post_init__(self):
        a, b = self.domain
        if not a < b:
            raise ValueError("domain must satisfy a < b")
        if len(self.nodes) != len(self.weights):
            raise ValueError("nodes and weights differ in length")

    def __len__(self):
        return len(self.nodes)

    def integrate(self, values) -> float:
        """sum_i w_i f(x_i) for ``values`` already sampled on the nodes."""
        return float(np.dot(self.weights, values))

    def __call__(self, f: Callable) -> float:
        return self.integrate(f(self.nodes))


def _legendre_pair(n, x):
    # P_n(x) and P_n'(x) by the three-term recurrence
    p0, p1 = np.ones_like(x), x.copy()
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    return p1, n * (x * p1 - p0) / (x * x - 1)


@lru_cache(maxsize=64)
def _leggauss(n):
    # numpy's nodes, polished by Newton; weights 2 / ((1 - x^2) P_n'(x)^2)
    # are then accurate to a few ulps even next to the endpoints
    x, w = np.polynomial.legendre.leggauss(n)
    if n > 1:
        for _ in range(2):
            p, dp = _legendre_pair(n, x)
            x = x - p / dp
        _, dp = _legendre_pair(n, x)
        w = 2.0 / ((1.0 - x * x) * dp * dp)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n: int, a: float, b: float) -> QuadratureRule:
    """n-point Gauss-Legendre rule on (a, b)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not (np.isfinite(a) and np.isfinite(b)) or not a < b:
        raise ValueError("need finite a < b")
    x, w = _leggauss(int(n))
    half = 0.5 * (b - a)
    return QuadratureRule(half * x + 0.5 * (a + b), half * w, (float(a), float(b)))


def map_semi_infinite(rule: QuadratureRule, cutoff: float, side: str, m: float) -> QuadratureRule:
    """Move ``rule`` onto (m - cutoff, m) (side="left") or (m, m + cutoff) (side="right").

    The semi-infinite domain is truncated at distance ``cutoff``; the
    integrands here decay fast enough that the tail is below rounding.
    """
    if cutoff <= 0:
        raise ValueError("cutoff must be positive")
    if side == "left":
        lo, hi = m - cutoff, m
    elif side == "right":
        lo, hi = m, m + cutoff
    else:
        raise ValueError("side must be 'left' or 'right'")
    a, b = rule.domain
    scale = (hi - lo) / (b - a)
    return QuadratureRule(lo + (rule.nodes - a) * scale, rule.weights * scale, (lo, hi))


def det_lu(matrix) -> float:
    """Determinant by LU with partial pivoting (LAPACK getrf)."""
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if a.shape[0] == 0:
        return 1.0
    with warnings.catch_warnings():
        # an exactly singular matrix is reported as determinant 0 below
        warnings.simplefilter("ignore", linalg.LinAlgWarning)
        lu, piv = linalg.lu_factor(a, check_finite=True)
    diag = np.diag(lu)
    if np.any(diag == 0):
        return 0.0
    swaps = np.count_nonzero(piv != np.arange(len(piv)))
    sign = -1.0 if swaps % 2 else 1.0
    return float(sign * np.prod(diag))


def discretize(kernel: Callable, rule: QuadratureRule) -> np.ndarray:
    """The Nystrom matrix sqrt(w_i) K(x_i, x_j) sqrt(w_j)."""
    x = rule.nodes
    k = np.asarray(kernel(x[:, None], x[None, :]), dtype=float)
    if k.shape != (len(x), len(x)):
        k = np.broadcast_to(k, (len(x), len(x)))
    if not np.all(np.isfinite(k)):
        raise FloatingPointError("kernel returned a non-finite value on the grid")
    sw = np.sqrt(rule.weights)
    return sw[:, None] * k * sw[None, :]


def fredholm_det(kernel: Callable, rule: QuadratureRule) -> float:
    """Nystrom approximation of det(I + K) on L^2 of the rule's domain.

    ``kernel(x, y)`` must broadcast over arrays.
    """
    m = discretize(kernel, rule)
    return det_lu(np.eye(len(rule)) + m)
