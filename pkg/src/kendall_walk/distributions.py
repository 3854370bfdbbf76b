"""Unit-step laws on [0, inf) and the functionals the walk formulas consume.

Every step law exposes its cdf ``F``, survival function ``1 - F``, truncated
alpha-moment ``H(t) = int_0^t y^alpha F(dy)``, Williamson transform ``G`` and
the alpha-moment ``m = lim H(t)``. Six families have closed forms; ``GenericCdf``
wraps any monotone cdf and gets ``G`` and ``H`` by adaptive quadrature.

All methods accept scalars or arrays and return the same shape.
"""
import csv
import json
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, ClassVar

import numpy as np

from .quadrature import integrate
from .special import gammainc_lower, gammainc_upper


class DistributionError(ValueError):
    """Invalid family parameters or an unusable cdf."""


def _out(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def _t(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(np.isnan(t)):
        raise DistributionError("evaluation point must be nonnegative")
    return t


def _inv_pow(t, alpha):
    """``t ** -alpha`` with the value ``inf`` at ``t = 0`` and no warnings."""
    with np.errstate(divide="ignore"):
        return np.where(t > 0, np.power(np.where(t > 0, t, 1.0), -alpha), np.inf)


def check_alpha(alpha):
    alpha = float(alpha)
    if not (alpha > 0 and math.isfinite(alpha)):
        raise DistributionError(f"alpha must be a positive real, got {alpha}")
    return alpha


@dataclass(frozen=True)
class StepDistribution(ABC):
    alpha: float

    family: ClassVar[str] = ""

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_alpha(self.alpha))

    # ---- closed-form pieces supplied by the family -------------------------

    @abstractmethod
    def _cdf(self, t): ...

    @abstractmethod
    def _sf(self, t): ...

    @abstractmethod
    def _trunc_moment(self, t): ...

    def _williamson(self, t):
        return self._cdf(t) - self._scaled_h(t)

    def _williamson_sf(self, t):
        return self._sf(t) + self._scaled_h(t)

    def _scaled_h(self, t):
        # t^-alpha H(t); zero at t = 0 since H(t) <= t^alpha F(t)
        h = self._trunc_moment(t)
        with np.errstate(invalid="ignore"):
            return np.where(t > 0, h * _inv_pow(t, self.alpha), 0.0)

    # ---- public surface ----------------------------------------------------

    def cdf(self, t):
        return _out(np.clip(self._cdf(_t(t)), 0.0, 1.0))

    def sf(self, t):
        """``1 - F(t)``, computed without cancellation where the family allows."""
        return _out(np.clip(self._sf(_t(t)), 0.0, 1.0))

    def trunc_moment(self, t):
        return _out(self._trunc_moment(_t(t)))

    def williamson(self, t):
        """Williamson transform ``G(t) = int Psi(x/t) nu(dx)``, with ``G(0) = 0``."""
        t = _t(t)
        return _out(np.where(t > 0, np.clip(self._williamson(t), 0.0, 1.0), 0.0))

    def williamson_sf(self, t):
        """``1 - G(t) = (1 - F(t)) + t^-alpha H(t)``."""
        t = _t(t)
        return _out(np.where(t > 0, np.clip(self._williamson_sf(t), 0.0, 1.0), 1.0))

    @cached_property
    def alpha_moment(self):
        return self._alpha_moment()

    @abstractmethod
    def _alpha_moment(self): ...

    @property
    def breakpoints(self):
        """Locations of atoms and kinks of ``F`` (quadrature and Stieltjes hints)."""
        return ()

    @property
    def atoms(self):
        return ()

    @property
    def regvar_theta(self):
        """``theta`` with ``1 - F`` regularly varying of index ``theta - alpha``, else None."""
        return None

    @property
    def tail_class(self):
        """Coarse tail metadata: 'regvar', 'finite_moment', 'light' or None (unknown)."""
        return None

    def quantile(self, u):
        """Left-most quantile ``inf{x : F(x) >= u}`` by bisection."""
        u = np.asarray(u, dtype=float)
        return _out(_bisect_quantile(self.cdf, u, hi0=2.0).reshape(u.shape))

    def sample(self, rng, size):
        return np.asarray(self.quantile(rng.random(size)), dtype=float)

    def to_dict(self):
        d = {"family": self.family, "alpha": self.alpha}
        d.update(self._params())
        return d

    def _params(self):
        return {}


def _bisect_quantile(cdf, u, hi0=1.0, tol=1e-12):
    u = np.atleast_1d(np.asarray(u, dtype=float))
    lo = np.zeros_like(u)
    hi = np.full_like(u, hi0)
    for _ in range(200):
        short = np.asarray(cdf(hi)) < u
        if not short.any():
            break
        lo = np.where(short, hi, lo)
        hi = np.where(short, hi * 2.0, hi)
    else:
        raise DistributionError("quantile bracket expansion failed")
    # invariant: F(lo) < u <= F(hi), except lo = 0 where F(0) may already be >= u
    while True:
        width = hi - lo
        if np.all(width <= tol * np.maximum(1.0, hi)):
            break
        mid = 0.5 * (lo + hi)
        below = np.asarray(cdf(mid)) < u
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    at_zero = np.asarray(cdf(np.zeros_like(u))) >= u
    return np.where(at_zero, 0.0, hi)


@dataclass(frozen=True)
class Dirac1(StepDistribution):
    """Point mass at 1."""

    family: ClassVar[str] = "dirac"

    def _cdf(self, t):
        return np.where(t >= 1.0, 1.0, 0.0)

    def _sf(self, t):
        return 1.0 - self._cdf(t)

    def _trunc_moment(self, t):
        return np.where(t >= 1.0, 1.0, 0.0)

    def _williamson(self, t):
        return np.where(t >= 1.0, 1.0 - _inv_pow(t, self.alpha), 0.0)

    def _alpha_moment(self):
        return 1.0

    breakpoints = property(lambda self: (1.0,))
    atoms = property(lambda self: (1.0,))
    tail_class = property(lambda self: "light")

    def quantile(self, u):
        return _out(np.ones_like(np.asarray(u, dtype=float)))

    def sample(self, rng, size):
        return np.ones(size)


def _expm1_ratio(z):
    """``expm1(z) / z`` with the limit 1 at ``z = 0``."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 1e-12
    zs = np.where(small, 1.0, z)
    return np.where(small, 1.0 + 0.5 * z, np.expm1(zs) / zs)


@dataclass(frozen=True)
class ParetoMix(StepDistribution):
    """``p * delta_1 + (1 - p) * Pareto(p)`` where the Pareto part has density
    ``p y^(-p-1)`` on ``[1, inf)``.

    The Pareto index is ``p`` itself, not tied to the walk's ``alpha``. The
    alpha-moment is finite iff ``p > alpha`` (or ``p = 1``, the point mass);
    ``p = alpha`` diverges logarithmically.
    """

    p: float = 0.5
    family: ClassVar[str] = "pareto_mix"

    def __post_init__(self):
        super().__post_init__()
        if not 0.0 < self.p <= 1.0:
            raise DistributionError(f"pareto_mix needs p in (0, 1], got {self.p}")

    def _cdf(self, t):
        ts = np.maximum(t, 1.0)
        return np.where(t >= 1.0, 1.0 - (1.0 - self.p) * ts ** -self.p, 0.0)

    def _sf(self, t):
        ts = np.maximum(t, 1.0)
        return np.where(t >= 1.0, (1.0 - self.p) * ts ** -self.p, 1.0)

    def _trunc_moment(self, t):
        # p + p(1-p) (t^(alpha-p) - 1)/(alpha-p), continuous through p = alpha
        p, a = self.p, self.alpha
        log_t = np.log(np.maximum(t, 1.0))
        h = p + p * (1.0 - p) * log_t * _expm1_ratio((a - p) * log_t)
        return np.where(t >= 1.0, h, 0.0)

    def _alpha_moment(self):
        if self.p == 1.0:
            return 1.0
        if self.p > self.alpha:
            return self.p * (1.0 - self.alpha) / (self.p - self.alpha)
        return math.inf

    breakpoints = property(lambda self: (1.0,))
    atoms = property(lambda self: (1.0,))

    @property
    def regvar_theta(self):
        if self.p < 1.0 and self.p <= self.alpha:
            return self.alpha - self.p
        return None

    @property
    def tail_class(self):
        if self.p == 1.0:
            return "light"
        if self.p <= self.alpha:
            return "regvar"
        return "finite_moment"

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        p = self.p
        with np.errstate(divide="ignore"):
            x = np.where(u <= p, 1.0, ((1.0 - p) / np.maximum(1.0 - u, 1e-300)) ** (1.0 / p))
        return _out(x)

    def sample(self, rng, size):
        u = rng.random(size)
        v = 1.0 - rng.random(size)
        return np.where(u < self.p, 1.0, v ** (-1.0 / self.p))

    def _params(self):
        return {"p": self.p}


@dataclass(frozen=True)
class LackOfMemory(StepDistribution):
    """``F(x) = 1 - (1 - x^alpha)_+``, i.e. ``x^alpha`` on ``[0, 1]``."""

    family: ClassVar[str] = "lack_of_memory"

    def _cdf(self, t):
        return np.minimum(t, 1.0) ** self.alpha

    def _sf(self, t):
        return np.where(t < 1.0, -np.expm1(self.alpha * np.log(np.maximum(t, 1e-300))), 0.0)

    def _trunc_moment(self, t):
        return 0.5 * np.minimum(t, 1.0) ** (2.0 * self.alpha)

    def _williamson(self, t):
        ts = np.maximum(t, 1.0)
        return np.where(t < 1.0, 0.5 * t ** self.alpha, 1.0 - 0.5 * ts ** -self.alpha)

    def _alpha_moment(self):
        return 0.5

    breakpoints = property(lambda self: (1.0,))
    tail_class = property(lambda self: "light")

    def quantile(self, u):
        return _out(np.asarray(u, dtype=float) ** (1.0 / self.alpha))

    def sample(self, rng, size):
        return rng.random(size) ** (1.0 / self.alpha)


@dataclass(frozen=True)
class StableLimit(StepDistribution):
    """``F(x) = (1 + m x^-alpha) exp(-m x^-alpha)``, the Kendall-stable law."""

    m: float = 1.0
    family: ClassVar[str] = "stable"

    def __post_init__(self):
        super().__post_init__()
        if not (self.m > 0 and math.isfinite(self.m)):
            raise DistributionError(f"stable needs m > 0, got {self.m}")

    def _y(self, t):
        return self.m * _inv_pow(t, self.alpha)

    def _cdf(self, t):
        y = self._y(t)
        with np.errstate(invalid="ignore"):
            return np.where(np.isinf(y), 0.0, (1.0 + y) * np.exp(-y))

    def _sf(self, t):
        # 1 - (1+y)e^-y is the regularized lower gamma P(2, y)
        return gammainc_lower(2.0, np.asarray(self._y(t)))

    def _trunc_moment(self, t):
        return self.m * np.exp(-self._y(t))

    def _williamson(self, t):
        return np.exp(-self._y(t))

    def _williamson_sf(self, t):
        return -np.expm1(-self._y(t))

    def _alpha_moment(self):
        return self.m

    tail_class = property(lambda self: "finite_moment")

    def quantile(self, u):
        # F(x) = Q(2, y) with y = m x^-alpha; invert on y by bisection
        u = np.asarray(u, dtype=float)
        y = _bisect_quantile(lambda s: 1.0 - gammainc_upper(2.0, np.asarray(s)), 1.0 - u, hi0=1.0)
        with np.errstate(divide="ignore"):
            x = np.where(y > 0, (self.m / np.maximum(y, 1e-300)) ** (1.0 / self.alpha), np.inf)
        return _out(x.reshape(u.shape))

    def sample(self, rng, size):
        return (self.m / rng.gamma(2.0, 1.0, size)) ** (1.0 / self.alpha)

    def _params(self):
        return {"m": self.m}


@dataclass(frozen=True)
class Uniform01(StepDistribution):
    """Uniform law on ``(0, 1)``."""

    family: ClassVar[str] = "uniform"

    def _cdf(self, t):
        return np.clip(t, 0.0, 1.0)

    def _sf(self, t):
        return 1.0 - np.clip(t, 0.0, 1.0)

    def _trunc_moment(self, t):
        a = self.alpha
        return np.minimum(t, 1.0) ** (a + 1.0) / (a + 1.0)

    def _williamson(self, t):
        a = self.alpha
        s = np.minimum(t, 1.0)
        with np.errstate(invalid="ignore"):
            return np.where(t > 0, s - s ** (a + 1.0) * _inv_pow(t, a) / (a + 1.0), 0.0)

    def _alpha_moment(self):
        return 1.0 / (self.alpha + 1.0)

    breakpoints = property(lambda self: (1.0,))
    tail_class = property(lambda self: "light")

    def quantile(self, u):
        return _out(np.asarray(u, dtype=float))

    def sample(self, rng, size):
        return rng.random(size)


@dataclass(frozen=True)
class GammaStep(StepDistribution):
    """Gamma law with shape ``a`` and rate ``b``."""

    a: float = 1.0
    b: float = 1.0
    family: ClassVar[str] = "gamma"

    def __post_init__(self):
        super().__post_init__()
        if not (self.a > 0 and self.b > 0):
            raise DistributionError(f"gamma needs a > 0 and b > 0, got a={self.a}, b={self.b}")

    @cached_property
    def _moment_const(self):
        # Gamma(a+alpha) / (Gamma(a) b^alpha)
        return math.exp(math.lgamma(self.a + self.alpha) - math.lgamma(self.a)
                        - self.alpha * math.log(self.b))

    def _cdf(self, t):
        return gammainc_lower(self.a, self.b * t)

    def _sf(self, t):
        return gammainc_upper(self.a, self.b * t)

    def _trunc_moment(self, t):
        return self._moment_const * gammainc_lower(self.a + self.alpha, self.b * t)

    def _alpha_moment(self):
        return self._moment_const

    tail_class = property(lambda self: "light")

    def sample(self, rng, size):
        return rng.gamma(self.a, 1.0 / self.b, size)

    def _params(self):
        return {"a": self.a, "b": self.b}


@dataclass(frozen=True)
class GenericCdf(StepDistribution):
    """Any cdf on ``[0, inf)`` given as a vectorized callable.

    ``G`` and ``H`` come from adaptive quadrature in the variable
    ``w = (x/t)^alpha``::

        G(t)     = int_0^1 F(t w^(1/alpha)) dw
        1 - G(t) = int_0^1 (1 - F(t w^(1/alpha))) dw
        H(t)     = t^alpha int_0^1 (F(t) - F(t w^(1/alpha))) dw

    which is integration by parts of ``int y^alpha F(dy)`` without the
    cancellation of ``t^alpha F(t) - alpha int x^(alpha-1) F(x) dx``.
    ``support_hint = (lo, hi)`` bounds where ``F`` moves; it drives the
    monotonicity check, quadrature breakpoints and quantile brackets.
    """

    cdf_fn: Callable = None
    support_hint: tuple = (0.0, 1.0)
    quad_tol: float = 1e-10
    kinks: tuple = ()
    point_masses: tuple = ()
    moment_probe: tuple = (1e5, 1e6)
    divergence_ratio: float = 1.01
    source: dict = field(default=None, compare=False, hash=False)
    family: ClassVar[str] = "generic"

    def __post_init__(self):
        super().__post_init__()
        if self.cdf_fn is None or not callable(self.cdf_fn):
            raise DistributionError("generic needs a callable cdf")
        lo, hi = map(float, self.support_hint)
        if not 0.0 <= lo < hi:
            raise DistributionError(f"support_hint must satisfy 0 <= lo < hi, got {self.support_hint}")
        object.__setattr__(self, "support_hint", (lo, hi))
        grid = np.concatenate([np.linspace(0.0, hi, 1001), np.asarray(self.kinks, float)])
        grid.sort()
        vals = np.asarray(self._raw(grid), dtype=float)
        if np.any(np.isnan(vals)):
            raise DistributionError("cdf returned nan on the support grid")
        if np.any(np.diff(vals) < -1e-12):
            raise DistributionError("cdf is not monotone on the support grid")
        if self._raw(np.array([-1.0]))[0] > 1e-12:
            raise DistributionError("cdf must vanish on the negative half-line")

    def _raw(self, t):
        t = np.asarray(t, dtype=float)
        try:
            out = np.asarray(self.cdf_fn(t), dtype=float)
            if out.shape != t.shape:
                raise TypeError
        except (TypeError, ValueError):
            out = np.vectorize(lambda s: float(self.cdf_fn(s)), otypes=[float])(t)
        return out

    def _cdf(self, t):
        return np.clip(self._raw(t), 0.0, 1.0)

    def _sf(self, t):
        return 1.0 - self._cdf(t)

    @property
    def breakpoints(self):
        lo, hi = self.support_hint
        pts = {*map(float, self.kinks), *map(float, self.point_masses), hi}
        if lo > 0:
            pts.add(lo)
        return tuple(sorted(pts))

    @property
    def atoms(self):
        return tuple(sorted(map(float, self.point_masses)))

    def _w_breaks(self, t):
        """Breakpoints mapped into ``w = (x/t)^alpha``, plus decades up to ``t``."""
        hi = self.support_hint[1]
        xs = [b for b in self.breakpoints if 0 < b < t]
        x = hi * 10.0
        while x < t:
            xs.append(x)
            x *= 10.0
        return [(b / t) ** self.alpha for b in xs]

    def _quad(self, integrand, t, scale=1.0):
        tol = self.quad_tol / max(scale, 1.0)
        val, _ = integrate(integrand, 0.0, 1.0, abs_tol=tol, rel_tol=1e-13,
                           breakpoints=self._w_breaks(t))
        return val

    def _each(self, fn, t):
        t = np.asarray(t, dtype=float)
        flat = np.atleast_1d(t).ravel()
        out = np.array([fn(float(s)) if s > 0 else 0.0 for s in flat])
        return out.reshape(t.shape)

    def _g_one(self, t):
        inv = 1.0 / self.alpha
        return self._quad(lambda w: self._cdf(t * w ** inv), t)

    def _gsf_one(self, t):
        inv = 1.0 / self.alpha
        return self._quad(lambda w: 1.0 - self._cdf(t * w ** inv), t)

    def _h_one(self, t):
        inv = 1.0 / self.alpha
        ft = float(self._cdf(np.array([t]))[0])
        ta = t ** self.alpha
        return ta * self._quad(lambda w: ft - self._cdf(t * w ** inv), t, scale=ta)

    def _williamson(self, t):
        return self._each(self._g_one, t)

    def _williamson_sf(self, t):
        out = self._each(self._gsf_one, t)
        return np.where(np.asarray(t) > 0, out, 1.0)

    def _trunc_moment(self, t):
        return self._each(self._h_one, t)

    def _alpha_moment(self):
        t1, t2 = self.moment_probe
        scale = max(1.0, 10.0 * self.support_hint[1] / t2)
        h1 = float(self._trunc_moment(np.array(t1 * scale)))
        h2 = float(self._trunc_moment(np.array(t2 * scale)))
        if h1 > 0 and h2 / h1 > self.divergence_ratio:
            return math.inf
        return h2

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        return _out(_bisect_quantile(self.cdf, u, hi0=self.support_hint[1]).reshape(u.shape))

    def _params(self):
        return dict(self.source or {})


def generic_from_table(xs, fs, alpha, quad_tol=1e-10, source=None):
    """Generic law from an ``(x, F(x))`` table, linearly interpolated.

    ``x`` must be strictly increasing; ``F`` values are clamped to ``[0, 1]``.
    Below the first abscissa ``F = 0`` and beyond the last ``F = 1``, so a table
    that does not start at 0 or end at 1 puts atoms at its endpoints.
    """
    xs = np.asarray(xs, dtype=float)
    fs = np.clip(np.asarray(fs, dtype=float), 0.0, 1.0)
    if xs.ndim != 1 or xs.shape != fs.shape or xs.size < 2:
        raise DistributionError("cdf table needs two equal-length columns with >= 2 rows")
    if np.any(np.diff(xs) <= 0):
        raise DistributionError("cdf table abscissae must be strictly increasing")
    if xs[0] < 0:
        raise DistributionError("cdf table must live on [0, inf)")
    if np.any(np.diff(fs) < 0):
        raise DistributionError("cdf table values must be nondecreasing")

    def table_cdf(t):
        return np.interp(t, xs, fs, left=0.0, right=1.0)

    masses = []
    if fs[0] > 0:
        masses.append(float(xs[0]))
    if fs[-1] < 1:
        masses.append(float(xs[-1]))
    lo = float(xs[0]) if xs[0] > 0 else 0.0
    return GenericCdf(alpha=alpha, cdf_fn=table_cdf, support_hint=(lo, float(xs[-1])),
                      quad_tol=quad_tol, kinks=tuple(map(float, xs)),
                      point_masses=tuple(masses), source=source)


def read_cdf_csv(path):
    """Read a two-column ``x, F(x)`` CSV; a non-numeric first row is a header."""
    rows = []
    with open(path, newline="") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except (ValueError, IndexError):
                if i == 0:
                    continue
                raise DistributionError(f"bad cdf table row {i + 1}: {row}")
    if not rows:
        raise DistributionError(f"no rows in cdf table {path}")
    xs, fs = zip(*rows)
    return np.array(xs), np.array(fs)


FAMILIES = {
    "dirac": Dirac1,
    "pareto_mix": ParetoMix,
    "lack_of_memory": LackOfMemory,
    "stable": StableLimit,
    "uniform": Uniform01,
    "gamma": GammaStep,
}

ALIASES = {
    "dirac1": "dirac",
    "delta": "dirac",
    "paretomix": "pareto_mix",
    "lackofmemory": "lack_of_memory",
    "stable_limit": "stable",
    "stablelimit": "stable",
    "uniform01": "uniform",
}


def make_family(spec, alpha=None, **params):
    """Build a step law from a family name or a JSON-style dict.

    ``make_family("pareto_mix", 1.0, p=0.5)`` and
    ``make_family({"family": "pareto_mix", "p": 0.5, "alpha": 1.0})`` agree.
    A generic law is given by ``{"family": "generic", "csv": path}`` or
    ``{"family": "generic", "table": [[x, F], ...]}``.
    """
    if isinstance(spec, dict):
        params = {**{k: v for k, v in spec.items() if k not in ("family", "alpha")}, **params}
        alpha = spec.get("alpha", alpha)
        spec = spec.get("family")
    if alpha is None:
        raise DistributionError("alpha is required")
    if not isinstance(spec, str):
        raise DistributionError(f"family name must be a string, got {spec!r}")
    name = spec.lower()
    name = ALIASES.get(name, name)
    if name == "generic":
        quad_tol = float(params.pop("quad_tol", 1e-10))
        if "csv" in params:
            xs, fs = read_cdf_csv(params["csv"])
            source = {"csv": str(params["csv"]), "quad_tol": quad_tol}
        elif "table" in params:
            xs, fs = np.asarray(params["table"], dtype=float).T
            source = {"table": [[float(x), float(f)] for x, f in zip(xs, fs)],
                      "quad_tol": quad_tol}
        else:
            raise DistributionError("generic family needs 'csv' or 'table'")
        return generic_from_table(xs, fs, alpha, quad_tol=quad_tol, source=source)
    if name not in FAMILIES:
        raise DistributionError(f"unknown family {spec!r}; choose from {sorted(FAMILIES)} or 'generic'")
    cls = FAMILIES[name]
    try:
        return cls(alpha=float(alpha), **{k: float(v) for k, v in params.items()})
    except TypeError as exc:
        raise DistributionError(f"bad parameters for {name}: {exc}") from None


def load_distribution(path):
    with open(path) as fh:
        return make_family(json.load(fh))


def cdf(d, t):
    return d.cdf(t)


def trunc_moment(d, t):
    return d.trunc_moment(t)


def alpha_moment(d):
    return d.alpha_moment
