"""Tail expansions, the two Kendall-stable limit laws, norming constants and
convergence diagnostics.

Limit laws have the form ``F(x) = (1 + s y) exp(-r y)`` with ``y = x^-g`` on
``x > 0``:

* finite alpha-moment ``m``: ``s = r = m``, ``g = alpha``;
* ``1 - F`` regularly varying with index ``theta - alpha``: ``g = alpha - theta``,
  ``s = 1`` and either ``r = 1`` (:func:`RegVar`) or
  ``r = alpha / (alpha - theta)`` (:func:`RegVarWalk`).

Under the norming ``H(a_n) / a_n^alpha = 1/n`` the walk converges to the
second of these: the step law's own tail contributes
``n (1 - F(a_n x)) -> theta / (alpha - theta) x^(theta - alpha)`` to
``n (1 - G(a_n x))`` besides the ``x^(theta - alpha)`` coming from ``H``. The
two coincide at ``theta = 0``. Densities are the derivatives of the cdfs.
"""
import io
import math
from dataclasses import dataclass

import numpy as np

from .distributions import _inv_pow, _out, check_alpha
from .williamson import _check_n, cdf_n


class ClassificationError(ValueError):
    """Tail regime could not be decided from metadata or a numeric probe."""


class NormingError(ArithmeticError):
    """The defining equation of the norming constant has no bracketed root."""


@dataclass(frozen=True)
class LimitLaw:
    kind: str
    alpha: float
    m: float = 1.0
    theta: float = 0.0
    include_tail: bool = False

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_alpha(self.alpha))
        if self.kind == "finite_moment":
            if not (self.m > 0 and math.isfinite(self.m)):
                raise ValueError(f"finite-moment law needs m > 0, got {self.m}")
        elif self.kind == "regvar":
            if not 0 <= self.theta < self.alpha:
                raise ValueError(f"regvar law needs 0 <= theta < alpha, got {self.theta}")
        else:
            raise ValueError(f"unknown limit kind {self.kind!r}")

    @property
    def scale(self):
        """Coefficient ``s`` of ``y`` in the polynomial factor."""
        return self.m if self.kind == "finite_moment" else 1.0

    @property
    def rate(self):
        """Coefficient ``r`` of ``y`` in the exponent."""
        if self.kind == "regvar" and self.include_tail:
            return self.alpha / (self.alpha - self.theta)
        return self.scale

    @property
    def exponent(self):
        return self.alpha if self.kind == "finite_moment" else self.alpha - self.theta

    def to_dict(self):
        d = {"kind": self.kind, "alpha": self.alpha}
        if self.kind == "finite_moment":
            d["m"] = self.m
        else:
            d.update(theta=self.theta, include_tail=self.include_tail)
        return d


def FiniteMoment(m, alpha):
    return LimitLaw("finite_moment", alpha, m=float(m))


def RegVar(theta, alpha):
    """Rate-1 regularly varying law ``(1 + x^(theta-alpha)) exp(-x^(theta-alpha))``."""
    return LimitLaw("regvar", alpha, theta=float(theta))


def RegVarWalk(theta, alpha):
    """Limit of ``X_n / a_n`` for a regularly varying step law under the ``H``-norming."""
    return LimitLaw("regvar", alpha, theta=float(theta), include_tail=True)


def limit_cdf(law, x):
    """``(1 + s y) exp(-r y)`` with ``y = x^-g``; 0 for ``x <= 0``."""
    x = np.asarray(x, dtype=float)
    y = _inv_pow(np.maximum(x, 0.0), law.exponent)
    with np.errstate(invalid="ignore", over="ignore"):
        val = np.where(np.isinf(y), 0.0, (1.0 + law.scale * y) * np.exp(-law.rate * y))
    return _out(np.where(x > 0, val, 0.0))


def limit_pdf(law, x):
    """``(g y / x) exp(-r y) (r - s + r s y)``, the derivative of :func:`limit_cdf`.

    For the finite-moment law this is ``alpha m^2 x^(-2 alpha - 1) exp(-m x^-alpha)``.
    """
    x = np.asarray(x, dtype=float)
    s, r, g = law.scale, law.rate, law.exponent
    pos = x > 0
    xs = np.where(pos, x, 1.0)
    y = xs ** -g
    with np.errstate(over="ignore", invalid="ignore"):
        val = np.where(np.isinf(y), 0.0, g * y / xs * np.exp(-r * y) * (r - s + r * s * y))
    return _out(np.where(pos, val, 0.0))


def tail_expansion(d, n, x):
    """Two-term tail ``n (1 - F(x)) + n (n-1)/2 (H(x) x^-alpha)^2``."""
    n = _check_n(n)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("tail expansion needs x > 0")
    ht = np.asarray(d.trunc_moment(x), dtype=float) * x ** -d.alpha
    return _out(n * np.asarray(d.sf(x)) + 0.5 * n * (n - 1) * ht ** 2)


# ---- tail regimes -------------------------------------------------------------


@dataclass(frozen=True)
class RegVarDominates:
    """``1 - F`` regularly varying with index ``theta - alpha``: ``1 - F_n ~ n (1 - F)``."""

    theta: float
    name = "regvar_dominates"


@dataclass(frozen=True)
class FiniteMomentMixed:
    """Finite alpha-moment with ``1 - F`` not negligible against ``x^(-2 alpha)``."""

    name = "finite_moment_mixed"


@dataclass(frozen=True)
class SecondTermDominates:
    """``1 - F = o(x^(-2 alpha))``: ``1 - F_n ~ n(n-1)/2 m^2 x^(-2 alpha)``."""

    name = "second_term_dominates"


def _probe_slopes(d, start, decades=2):
    xs = start * 10.0 ** np.arange(decades + 1)
    sf = np.asarray(d.sf(xs), dtype=float)
    if np.any(sf <= 0):
        return None
    return np.diff(np.log(sf)) / np.log(10.0)


def corollary_regime(d, probe_start=None, tol=0.05):
    """Which term of the two-term tail expansion governs ``1 - F_n``.

    Uses the law's tail metadata when present. Otherwise ``log(1 - F)`` is
    fitted against ``log x`` over two decades: a slope ``-beta`` stable within
    ``tol`` gives regular variation with ``theta = alpha - beta`` when
    ``beta <= alpha``, the mixed case when ``alpha < beta <= 2 alpha`` and the
    second-term case beyond; a tail vanishing or steepening past ``2 alpha``
    is the second-term case.
    """
    a = d.alpha
    theta = d.regvar_theta
    if theta is not None:
        return RegVarDominates(theta)
    cls = d.tail_class
    if cls == "light":
        return SecondTermDominates()
    if cls == "finite_moment":
        beta = getattr(d, "p", None)
        if beta is None:
            return FiniteMomentMixed()
        return FiniteMomentMixed() if beta <= 2 * a else SecondTermDominates()
    if cls == "regvar":
        raise ClassificationError("regularly varying tail without a tail index")
    start = probe_start
    if start is None:
        hint = getattr(d, "support_hint", (0.0, 1.0))
        start = 10.0 * max(1.0, hint[1])
    slopes = _probe_slopes(d, start)
    if slopes is None:
        return SecondTermDominates()
    if np.all(slopes < -2 * a - tol):
        return SecondTermDominates()
    if abs(slopes[1] - slopes[0]) > tol:
        raise ClassificationError(f"tail log-slope did not stabilize: {slopes.tolist()}")
    beta = -slopes[-1]
    if beta < a - tol:
        return RegVarDominates(a - beta)
    if a + tol < beta <= 2 * a + tol:
        return FiniteMomentMixed()
    if beta > 2 * a + tol:
        return SecondTermDominates()
    raise ClassificationError(f"tail slope {-beta:.3f} too close to -alpha to classify")


# ---- norming sequence ---------------------------------------------------------


def _w(d, a):
    h = float(d.trunc_moment(a))
    return math.inf if h <= 0 else a ** d.alpha / h


def norming_sequence(d, n, method="auto", x_min=None, rtol=1e-10, max_scale=1e30):
    """Norming constant ``a_n``.

    ``closed_form`` returns ``n^(1/alpha)`` (pair it with the finite-moment
    limit law of parameter ``m``). ``numeric`` solves ``a^alpha / H(a) = n``:
    a geometric scan from ``x_min`` (default: the 0.99 quantile of the step
    law) brackets the first crossing, then bisection refines it to relative
    ``rtol``. ``auto`` picks ``closed_form`` when the alpha-moment is finite.
    """
    n = _check_n(n)
    if method == "auto":
        method = "closed_form" if math.isfinite(d.alpha_moment) else "numeric"
    if method == "closed_form":
        return float(n) ** (1.0 / d.alpha)
    if method != "numeric":
        raise ValueError(f"unknown norming method {method!r}")
    lo = float(d.quantile(0.99)) if x_min is None else float(x_min)
    if not lo > 0:
        lo = 1.0
    if _w(d, lo) >= n:
        raise NormingError(f"a^alpha/H(a) already exceeds n={n} at x_min={lo}; lower x_min")
    hi = lo
    while True:
        hi *= 2.0
        if hi > max_scale:
            raise NormingError(f"no root of a^alpha/H(a) = {n} below {max_scale:g}")
        if _w(d, hi) >= n:
            break
        lo = hi
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if _w(d, mid) >= n:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def norming_residual(d, n, a_n):
    """``|n H(a_n) / a_n^alpha - 1|``."""
    return abs(n * float(d.trunc_moment(a_n)) / a_n ** d.alpha - 1.0)


# ---- convergence diagnostics --------------------------------------------------


DEFAULT_GRID = np.geomspace(1e-2, 1e2, 801)


def default_law(d):
    """Limit law of ``X_n / a_n`` under the norming :func:`norming_sequence` picks by default."""
    m = d.alpha_moment
    if math.isfinite(m):
        return FiniteMoment(m, d.alpha)
    theta = d.regvar_theta
    if theta is None:
        raise ClassificationError("infinite alpha-moment without a regular-variation index")
    return RegVarWalk(theta, d.alpha)


@dataclass(frozen=True)
class ConvergenceTable:
    n: tuple
    a_n: tuple
    sup_distance: tuple

    def nonincreasing(self, slack=0.1, atol=1e-10):
        """Each distance at most ``1 + slack`` times the previous, or below ``atol``.

        ``atol`` absorbs rounding noise for laws that are already at their limit.
        """
        s = self.sup_distance
        return all(b <= a * (1.0 + slack) or b <= atol for a, b in zip(s[:-1], s[1:]))

    def strictly_decreasing(self):
        s = self.sup_distance
        return all(b < a for a, b in zip(s[:-1], s[1:]))

    def to_csv(self):
        buf = io.StringIO()
        buf.write("n,a_n,sup_distance\n")
        for row in zip(self.n, self.a_n, self.sup_distance):
            buf.write(f"{row[0]},{row[1]!r},{row[2]!r}\n")
        return buf.getvalue()


def convergence_diagnostic(d, n_list, law=None, grid=None, method="auto"):
    """``sup_x |F_n(a_n x) - F_limit(x)|`` over ``grid`` for each ``n``."""
    law = default_law(d) if law is None else law
    grid = DEFAULT_GRID if grid is None else np.asarray(grid, dtype=float)
    target = np.asarray(limit_cdf(law, grid))
    ns, an, dist = [], [], []
    for n in n_list:
        a = norming_sequence(d, n, method=method)
        diff = np.abs(np.asarray(cdf_n(d, n, a * grid)) - target)
        ns.append(int(n))
        an.append(float(a))
        dist.append(float(diff.max()))
    return ConvergenceTable(tuple(ns), tuple(an), tuple(dist))
