"""Kendall convolution of point masses and the walk's transition kernel.

The kernel ``P_n(x, .)`` is the law of the walk ``n`` steps after sitting at
``x``; it is only ever needed through its cdf and truncated alpha-moment, so no
measure objects are built.
"""
from dataclasses import dataclass

import numpy as np

from .distributions import _inv_pow, _out, check_alpha
from .quadrature import left_limit, stieltjes_midpoint
from .williamson import _check_n, psi_ratio


@dataclass(frozen=True)
class PointConvolution:
    """``delta_x (Kendall) delta_y = T_M(rho^alpha pi_2alpha + (1 - rho^alpha) delta_1)``.

    ``M = max(x, y)``, ``rho = min/max``; mass ``weight_atom`` sits at ``M`` and
    ``weight_pareto`` is spread as ``M`` times a Pareto(2 alpha) variable.
    """

    M: float
    weight_atom: float
    weight_pareto: float
    alpha: float

    def cdf(self, t):
        """Right-continuous cdf of the convolution."""
        t = np.asarray(t, dtype=float)
        if self.M == 0:
            return _out(np.where(t >= 0, 1.0, 0.0))
        ratio = np.where(t > 0, self.M / np.where(t > 0, t, 1.0), np.inf)
        with np.errstate(over="ignore"):
            val = 1.0 - self.weight_pareto * np.minimum(ratio, 1.0) ** (2 * self.alpha)
        return _out(np.where(t >= self.M, val, 0.0))

    def sample(self, rng, size):
        xi = rng.random(size)
        theta = (1.0 - rng.random(size)) ** (-0.5 / self.alpha)
        return np.where(xi < self.weight_pareto, self.M * theta, self.M)


def point_mass_convolution(x, y, alpha):
    alpha = check_alpha(alpha)
    if x < 0 or y < 0:
        raise ValueError("point masses must sit on [0, inf)")
    M = max(x, y)
    if M == 0:
        return PointConvolution(0.0, 1.0, 0.0, alpha)
    w = (min(x, y) / M) ** alpha
    return PointConvolution(float(M), 1.0 - w, w, alpha)


def delta_conv_cdf(x, y, alpha, t):
    """``(delta_x Kendall delta_y)((0, t]) = (1 - x^a y^a / t^2a) 1{x < t, y < t}``.

    The indicator is strict, as in the closed form; at ``t = max(x, y)`` this
    is the left limit of the right-continuous :meth:`PointConvolution.cdf`.
    """
    x, y, t = (np.asarray(v, dtype=float) for v in (x, y, t))
    if np.any(t <= 0):
        raise ValueError("t must be positive")
    with np.errstate(over="ignore", invalid="ignore"):
        val = 1.0 - (x * y / (t * t)) ** alpha
    return _out(np.where((x < t) & (y < t), val, 0.0))


@dataclass(frozen=True)
class KernelQuery:
    x: float
    n: int
    t: float

    def __post_init__(self):
        if self.x < 0:
            raise ValueError("start point must be nonnegative")
        _check_n(self.n)
        if not self.t > 0:
            raise ValueError("threshold must be positive")


def _gh(d, t):
    t = np.asarray(t, dtype=float)
    g = np.asarray(d.williamson(t), dtype=float)
    h = np.asarray(d.trunc_moment(t), dtype=float)
    return g, h


def _kernel_cdf(d, x, n, t, closed=False):
    # n = 0 is the identity kernel delta_x; closed=True gives the
    # right-continuous version (indicator x <= t) used by the Stieltjes oracles
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    g, h = _gh(d, t)
    with np.errstate(invalid="ignore"):
        ht = np.where(t > 0, h * _inv_pow(t, d.alpha), 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(t > 0, x / np.where(t > 0, t, 1.0), np.inf)
    gn1 = g ** (n - 1) if n >= 1 else np.zeros_like(g)
    val = g ** n + n * ht * gn1 * psi_ratio(d.alpha, ratio)
    inside = (x <= t) if closed else (x < t)
    return np.where(inside, val, 0.0)


def kernel_cdf(d, x, n=None, t=None):
    """``P_n(x, (0, t]) = (G^n + n t^-a H G^(n-1) Psi(x/t)) 1{x < t}``.

    Accepts ``(d, KernelQuery)`` or ``(d, x, n, t)`` with broadcasting in
    ``x`` and ``t``.
    """
    if isinstance(x, KernelQuery):
        x, n, t = x.x, x.n, x.t
    n = _check_n(n)
    return _out(np.clip(_kernel_cdf(d, x, n, t), 0.0, 1.0))


def kernel_trunc_moment(d, x, n=None, t=None):
    """``int_0^t w^a P_n(x, dw) = (x^a G^n + n G^(n-1) H Psi(x/t)) 1{x < t}``."""
    if isinstance(x, KernelQuery):
        x, n, t = x.x, x.n, x.t
    n = _check_n(n)
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    g, h = _gh(d, t)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(t > 0, x / np.where(t > 0, t, 1.0), np.inf)
    val = x ** d.alpha * g ** n + n * g ** (n - 1) * h * psi_ratio(d.alpha, ratio)
    return _out(np.where(x < t, val, 0.0))


def kernel_breakpoints(d, x, t):
    """Jump locations of ``z -> P_n(x, (0, z])`` inside ``(0, t]``."""
    pts = {float(x)} | {float(b) for b in d.breakpoints}
    return tuple(sorted(p for p in pts if 0 < p < t))


def chapman_kolmogorov_gap(d, x, n, t, m=10_000):
    """``|int P_1(y, (0,t]) P_n(x, dy) - P_(n+1)(x, (0,t])|`` by Stieltjes sums.

    The sum is extrapolated from ``m`` and ``m/2`` cells. With ``alpha < 1``
    both the integrand and the measure can carry ``y^alpha`` singularities at
    the origin, which makes the plain midpoint sum only first order.
    """
    def f(y):
        return _kernel_cdf(d, y, 1, t)

    def right(z):
        return _kernel_cdf(d, x, n, z, closed=True)

    def left(z):
        return _kernel_cdf(d, x, n, left_limit(np.asarray(z, dtype=float)))

    br = kernel_breakpoints(d, x, t)
    fine = stieltjes_midpoint(f, 0.0, t, right, left, br, m=m)
    coarse = stieltjes_midpoint(f, 0.0, t, right, left, br, m=max(m // 2, 1))
    lhs = 2.0 * fine - coarse
    rhs = float(kernel_cdf(d, x, n + 1, t))
    return abs(lhs - rhs), lhs, rhs
