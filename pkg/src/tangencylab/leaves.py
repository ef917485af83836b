"""Invariant leaves and the image arc family.

A seed arc ``alpha_0 = graph(y0)`` crosses the stable axis transversely at
(0, z0).  Its forward images under the saddle map are graphs again,

    y_n(x) = lam^n * y0(mu^-n * x),

and the window of interest is the slab where x = t + 1 stays inside
[(1+eps)^-3, (1+eps)^3].  The other two actors are the stable leaf through
q (graph x -> v(x), cubically tangent to the unstable axis) and the unstable
leaf through r (graph of the image of the unstable axis near r).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .model import ModelSystem, Point, _phi_parts, _poly, _poly_dx, _poly_dy, signed_power
from .numerics import solve_newton

__all__ = [
    "SeedArc",
    "ArcPoint",
    "t_window",
    "arc_height",
    "alpha",
    "stable_leaf_v",
    "unstable_leaf_w",
    "tangency_samples",
    "tangency_order",
]


@dataclass(frozen=True)
class SeedArc:
    """Polynomial seed arc y0 over a domain containing 0 and 1.

    ``coeffs`` are ascending polynomial coefficients; y0 must be positive on
    the whole domain so every image arc stays on one side of the unstable
    axis.
    """

    domain: tuple[float, float]
    coeffs: tuple[float, ...]

    def __post_init__(self):
        lo, hi = self.domain
        if not (lo < 0.0 < 1.0 < hi):
            raise DomainError("seed domain must contain 0 and 1 in its interior")
        if not self.coeffs:
            raise DomainError("seed polynomial needs at least one coefficient")
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if self.z0 <= 0.0:
            raise DomainError("seed must cross the stable axis at positive height")
        grid = np.linspace(lo, hi, 2001)
        if np.polyval(self.coeffs[::-1], grid).min() <= 0.0:
            raise DomainError("seed arc must be positive on its whole domain")

    @property
    def z0(self) -> float:
        return self.coeffs[0]

    @property
    def sigma(self) -> float:
        """max |y0'| over the domain (grid estimate, exact for affine seeds)."""
        if len(self.coeffs) < 2:
            return 0.0
        deriv = tuple(i * c for i, c in enumerate(self.coeffs))[1:]
        grid = np.linspace(self.domain[0], self.domain[1], 2001)
        return float(np.abs(np.polyval(deriv[::-1], grid)).max())

    def eval(self, x: float) -> float:
        return float(np.polyval(self.coeffs[::-1], x))

    def eval_d1(self, x: float) -> float:
        if len(self.coeffs) < 2:
            return 0.0
        deriv = tuple(i * c for i, c in enumerate(self.coeffs))[1:]
        return float(np.polyval(deriv[::-1], x))

    def eval_d2(self, x: float) -> float:
        if len(self.coeffs) < 3:
            return 0.0
        d2 = tuple(i * (i - 1) * c for i, c in enumerate(self.coeffs))[2:]
        return float(np.polyval(d2[::-1], x))

    def contains(self, x: float, tol: float = 1e-12) -> bool:
        return self.domain[0] - tol <= x <= self.domain[1] + tol


@dataclass(frozen=True)
class ArcPoint:
    """A point of the n-th image arc together with the graph derivative."""

    n: int
    t: float
    point: Point
    dy_dt: float


def t_window(sys: ModelSystem) -> tuple[float, float]:
    """Parameter window for the arcs: t + 1 in [(1+eps)^-3, (1+eps)^3]."""
    u = 1.0 + sys.epsilon
    return (u**-3 - 1.0, u**3 - 1.0)


def arc_height(sys: ModelSystem, n: int, t: float) -> float:
    """y-level of the n-th arc at parameter t (may underflow to 0 for deep n)."""
    x_seed = signed_power(sys.mu, -n) * (t + 1.0)
    return signed_power(sys.lam, n) * sys.seed.eval(x_seed)


def arc_height_d1(sys: ModelSystem, n: int, t: float) -> float:
    x_seed = signed_power(sys.mu, -n) * (t + 1.0)
    return signed_power(sys.lam, n) * signed_power(sys.mu, -n) * sys.seed.eval_d1(x_seed)


def arc_height_d2(sys: ModelSystem, n: int, t: float) -> float:
    x_seed = signed_power(sys.mu, -n) * (t + 1.0)
    return signed_power(sys.lam, n) * signed_power(sys.mu, -n) ** 2 * sys.seed.eval_d2(x_seed)


def alpha(sys: ModelSystem, n: int, t: float) -> ArcPoint:
    """Parametrization (t + 1, y_n(t + 1)) of the n-th arc over the window."""
    if n < 0:
        raise DomainError("arc index must be nonnegative")
    lo, hi = t_window(sys)
    if not (lo - 1e-12 <= t <= hi + 1e-12):
        raise DomainError(f"t={t:g} outside arc window [{lo:g}, {hi:g}]")
    x_seed = signed_power(sys.mu, -n) * (t + 1.0)
    if not sys.seed.contains(x_seed):
        raise DomainError(f"arc preimage {x_seed:g} outside the seed domain")
    return ArcPoint(n, t, (t + 1.0, arc_height(sys, n, t)), arc_height_d1(sys, n, t))


def stable_leaf_v(sys: ModelSystem, x: float) -> float:
    """Height v(x) of the stable leaf through q over 1 + x.

    Defined by pr_x(phi(1 + x, v(x))) = 0; the leaf is cubically tangent to
    the unstable axis, v(x) ~ -(c/a) x^3.
    """
    if abs(x) > sys.uq_half_width:
        raise DomainError(f"offset {x:g} outside U(q)")
    t = sys.transition
    if t.a == 0.0:
        raise DomainError("stable leaf needs a != 0")
    if x == 0.0:
        return 0.0
    seed = -(t.c / t.a) * x**3

    def f(y: float) -> float:
        return _phi_parts(sys, x, y)[0]

    def fprime(y: float) -> float:
        return t.a + t.b * x + _poly_dy(t.h1_terms, x, y)

    tol = 1e-14 * max(abs(t.c * x**3), 1e-300)
    half = max(8.0 * abs(seed), 1e-12)
    return solve_newton(f, fprime, seed, tol=tol, bracket=(seed - half, seed + half))


def unstable_leaf_w(sys: ModelSystem, y_offset: float) -> float:
    """x-coordinate w of the unstable leaf through r at height 1 + y_offset.

    The leaf is phi(unstable axis); w(s)/s^3 -> c/d^3 as the height offset
    s -> 0, the mirror image of the cubic tangency at q.
    """
    if abs(y_offset) > sys.ur_half_width:
        raise DomainError(f"offset {y_offset:g} outside U(r)")
    t = sys.transition
    if t.d == 0.0:
        raise DomainError("unstable leaf needs d != 0")
    if y_offset == 0.0:
        return 0.0

    def f(u: float) -> float:
        return t.d * u + _poly(t.h2_terms, u, 0.0) - y_offset

    def fprime(u: float) -> float:
        return t.d + _poly_dx(t.h2_terms, u, 0.0)

    seed = y_offset / t.d
    tol = 1e-14 * max(abs(y_offset), 1e-300)
    half = max(8.0 * abs(seed), 1e-12)
    u = solve_newton(f, fprime, seed, tol=tol, bracket=(seed - half, seed + half))
    if abs(u) > sys.uq_half_width:
        raise DomainError("leaf parameter left U(q)")
    return t.c * u**3 + _poly(t.h1_terms, u, 0.0)


def tangency_samples(sys: ModelSystem, xs) -> list[tuple[float, float]]:
    """(distance to q, distance to the unstable axis) pairs along the stable
    leaf through q, the raw data for the order estimate."""
    out = []
    for x in xs:
        v = stable_leaf_v(sys, float(x))
        out.append((math.hypot(x, v), abs(v)))
    return out


def tangency_order(samples) -> tuple[float, float]:
    """Contact order and limit coefficient from (d_point, d_leaf) samples.

    Fits log d_leaf against log d_point by least squares; the coefficient is
    the geometric mean of d_leaf / d_point**order.  Samples must be positive,
    at least 8 of them, spanning at least two decades in d_point.
    """
    pts = [(float(p), float(l)) for p, l in samples]
    if len(pts) < 8:
        raise DomainError("order estimate needs at least 8 samples")
    if any(p <= 0.0 or l <= 0.0 for p, l in pts):
        raise DomainError("degenerate sample: distances must be positive")
    dp = np.array([p for p, _ in pts])
    dl = np.array([l for _, l in pts])
    if dp.max() / dp.min() < 100.0:
        raise DomainError("samples must span at least two decades")
    lx = np.log(dp)
    ly = np.log(dl)
    order, _ = np.polyfit(lx, ly, 1)
    coefficient = float(np.exp(np.mean(ly - order * lx)))
    return float(order), coefficient
