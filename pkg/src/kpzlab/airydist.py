"""Airy-kernel Fredholm determinants: F_GUE, F_GOE and the curved-to-flat crossover.

All determinants with a reflection are taken in the lambda (Airy-transform)
variable on (-L, 0].  There the composition K_Ai rho_r K_Ai becomes

    int Ai(x - l1) Ai(2r - x - l2) dx = 2^{-1/3} Ai(2^{-1/3}(2r - l1 - l2)),

an instance of the full-line convolution

    int Ai(a + s) Ai(b - s) e^{cs} ds = 2^{-1/3} e^{c(b-a)/2} Ai(2^{-1/3}(a + b - c^2/2)).
"""

from __future__ import annotations

import numpy as np

from . import quad, specfun

CUTOFF = 14.0
N_NODES = 160
_C = 2.0 ** (-1.0 / 3.0)


def airy_kernel(x, y):
    """K_Ai(x, y) = int_0^inf Ai(x + l) Ai(y + l) dl, by the closed form."""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    ax, apx = specfun.airy_ai_both(x)
    ay, apy = specfun.airy_ai_both(y)
    diff = x - y
    near = np.abs(diff) < 1e-6
    with np.errstate(divide="ignore", invalid="ignore"):
        off = (ax * apy - apx * ay) / diff
    if np.any(near):
        mid = 0.5 * (x + y)
        am, apm = specfun.airy_ai_both(mid)
        off = np.where(near, apm * apm - mid * am * am, off)
    return off if off.ndim else float(off)


def airy_convolution(a, b, c=0.0):
    """int_R Ai(a + s) Ai(b - s) e^{cs} ds in closed form."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return _C * np.exp(0.5 * c * (b - a)) * specfun.airy_ai(_C * (a + b - 0.5 * c * c))


def reflect(r: float, x):
    """The reflection x -> 2r - x."""
    return 2.0 * r - np.asarray(x, dtype=float)


def projection_mask(m: float, side: str, x):
    """Indicator of x > m (side="above") or x <= m (side="below")."""
    x = np.asarray(x, dtype=float)
    if side == "above":
        return (x > m).astype(float)
    if side == "below":
        return (x <= m).astype(float)
    raise ValueError("side must be 'above' or 'below'")


def lambda_rule(n: int = N_NODES, cutoff: float = CUTOFF) -> quad.QuadratureRule:
    """Gauss-Legendre rule on (-cutoff, 0), the truncated lambda half-line."""
    return quad.map_semi_infinite(quad.gauss_legendre(n, -1.0, 1.0), cutoff, "left", 0.0)


def f_gue_fd(r: float, n: int = N_NODES, cutoff: float = CUTOFF) -> float:
    """det(I - K_Ai) on L^2(r, r + cutoff)."""
    rule = quad.map_semi_infinite(quad.gauss_legendre(n, -1.0, 1.0), cutoff, "right", r)
    return quad.fredholm_det(lambda x, y: -airy_kernel(x, y), rule)


def f_goe_fd(r: float, n: int = N_NODES, cutoff: float = CUTOFF) -> float:
    """det(I - K_Ai rho_r K_Ai), which equals F_GOE(4^{1/3} r)."""
    rule = lambda_rule(n, cutoff)
    return quad.fredholm_det(lambda l1, l2: -airy_convolution(r - l1, r - l2), rule)


def _crossover_kernel(alpha, r, rule, inner):
    lam = rule.nodes
    l1, l2 = lam[:, None], lam[None, :]
    m = r + max(alpha, 0.0) ** 2
    s, ws = inner.nodes, inner.weights
    if alpha <= 0:
        # int_0^inf Ai(m + s - l1) e^{2 alpha s} Ai(m - s - l2) ds decays directly
        up = specfun.airy_ai(m + s[None, :] - lam[:, None]) * (ws * np.exp(2 * alpha * s))[None, :]
        down = specfun.airy_ai(m - s[None, :] - lam[:, None])
        tail = up @ down.T
        return airy_kernel(m - l1, m - l2) + tail
    # for alpha > 0 the half-line integral is the full line minus the
    # mirrored half, and the whole kernel is conjugated by e^{-alpha lambda}
    up = specfun.airy_ai(m - s[None, :] - lam[:, None]) * (ws * np.exp(-2 * alpha * s))[None, :]
    down = specfun.airy_ai(m + s[None, :] - lam[:, None])
    mirrored = up @ down.T
    tilt = np.exp(alpha * (l2 - l1))
    full = _C * specfun.airy_ai(_C * (2 * m - l1 - l2 - 2 * alpha * alpha))
    return tilt * (airy_kernel(m - l1, m - l2) - mirrored) + full


def f_curved_to_flat(alpha: float, r: float, n: int = N_NODES, cutoff: float = CUTOFF) -> float:
    """F^alpha_{curved->flat}(r).

    The crossover determinant

        det(I - K_Ai P_m K_Ai - K_Ai e^{a x} rho_m Pbar_m e^{-a x} K_Ai),  m = r + alpha^2,

    equals F^alpha(r + min(0, alpha)^2); this function returns F^alpha(r),
    i.e. the determinant with m = r + max(0, alpha)^2.  It tends to F_GUE(r)
    as alpha -> -inf and to F_GOE(4^{1/3} r) as alpha -> +inf.
    """
    if abs(alpha) > 5:
        raise ValueError("|alpha| > 5 is outside the supported range")
    rule = lambda_rule(n, cutoff)
    inner = quad.gauss_legendre(n, 0.0, cutoff + 2.0)
    kern = _crossover_kernel(float(alpha), float(r), rule, inner)
    sw = np.sqrt(rule.weights)
    return quad.det_lu(np.eye(len(rule)) - sw[:, None] * kern * sw[None, :])


def curved_to_flat_determinant(alpha: float, r: float, **kw) -> float:
    """The crossover determinant at level r itself, F^alpha(r + min(0, alpha)^2)."""
    return f_curved_to_flat(alpha, r + min(0.0, alpha) ** 2, **kw)


def airy_kernel_quadrature(x: float, y: float, depth: float = 30.0, n: int = 400) -> float:
    """K_Ai by direct Gauss-Legendre quadrature of its lambda-integral."""
    rule = quad.gauss_legendre(n, 0.0, depth)
    return rule(lambda l: specfun.airy_ai(x + l) * specfun.airy_ai(y + l))



def route_checks() -> list:
    """Fredholm determinants against the Painleve route."""
    from . import painleve
    from .report import Check

    out = []
    for r in (-4.0, -2.0, 0.0, 1.0, 2.0, 3.0):
        d = abs(f_gue_fd(r) - float(painleve.f_gue_p(r)))
        out.append(Check("gue fredholm=painleve", {"r": r}, d, 0.0, 1e-6))
    for r in (-2.0, 0.0, 1.0):
        d = abs(f_goe_fd(r) - float(painleve.f_goe_p(4 ** (1 / 3) * r)))
        out.append(Check("goe fredholm=painleve", {"r": r}, d, 0.0, 1e-5))
    return out
