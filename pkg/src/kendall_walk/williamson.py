"""Williamson transform, its inversion, and the exact n-step law of the walk."""
import numpy as np

from .distributions import _inv_pow, _out
from .quadrature import integrate


class InversionError(ArithmeticError):
    """``G + (t/alpha) G'`` left ``[0, 1]``: the input was not a Williamson transform."""


def _check_n(n):
    if int(n) != n or n < 1:
        raise ValueError(f"number of steps must be a positive integer, got {n}")
    return int(n)


def psi(alpha, x, t):
    """``Psi(x/t) = (1 - (x/t)^alpha)_+``; the Williamson transform of ``delta_x`` at ``1/t``."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("psi needs t > 0")
    if np.any(x < 0):
        raise ValueError("psi needs x >= 0")
    return _out(np.maximum(1.0 - (x / t) ** alpha, 0.0))


def psi_ratio(alpha, r):
    """``Psi`` at a precomputed ratio ``r = x/t >= 0``; ``inf`` ratios give 0."""
    r = np.asarray(r, dtype=float)
    with np.errstate(invalid="ignore", over="ignore"):
        return np.where(r < 1.0, 1.0 - np.minimum(r, 1.0) ** alpha, 0.0)


def williamson_G(d, t):
    return d.williamson(t)


def williamson_from_cdf(cdf, alpha, t, breakpoints=(), abs_tol=1e-12):
    """``G(t) = alpha t^-alpha int_0^t x^(alpha-1) F(x) dx`` by adaptive quadrature.

    Substituting ``w = (x/t)^alpha`` turns this into ``int_0^1 F(t w^(1/alpha)) dw``,
    which removes the ``x^(alpha-1)`` singularity at the origin for ``alpha < 1``.
    ``cdf`` is any vectorized cdf; ``breakpoints`` are its jumps/kinks in ``x``.
    """
    t = np.asarray(t, dtype=float)
    inv = 1.0 / alpha

    def one(s):
        if s <= 0:
            return 0.0
        wb = [(b / s) ** alpha for b in breakpoints if 0 < b < s]
        val, _ = integrate(lambda w: cdf(s * w ** inv), 0.0, 1.0, abs_tol=abs_tol,
                           rel_tol=1e-14, breakpoints=wb)
        return val

    out = np.array([one(float(s)) for s in np.atleast_1d(t).ravel()]).reshape(t.shape)
    return _out(out)


def invert_to_cdf(G, alpha, t, dG=None, tol=1e-8, kink_rtol=1e-3):
    """Recover ``F(t) = G(t) + (t/alpha) G'(t)`` from a Williamson transform.

    ``G'`` comes from ``dG`` when given, else a central difference with step
    ``h = max(1e-6 t, 1e-9)``. Where the one-sided slopes disagree by more than
    ``kink_rtol`` (an atom of the underlying law) a second-order forward
    difference is used, matching the right-continuity of ``F``.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("invert_to_cdf needs t > 0")
    flat = np.atleast_1d(t).ravel()
    g0 = np.asarray(G(flat), dtype=float)
    if dG is not None:
        deriv = np.asarray(dG(flat), dtype=float)
    else:
        h = np.maximum(1e-6 * flat, 1e-9)
        lo = np.maximum(flat - h, 0.0)
        hb = flat - lo
        gp = np.asarray(G(flat + h), dtype=float)
        gm = np.asarray(G(lo), dtype=float)
        fwd = (gp - g0) / h
        bwd = (g0 - gm) / hb
        central = (gp - gm) / (h + hb)
        kink = np.abs(fwd - bwd) > kink_rtol * np.maximum(1.0, np.maximum(np.abs(fwd), np.abs(bwd)))
        if kink.any():
            gp2 = np.asarray(G(flat + 2 * h), dtype=float)
            forward2 = (-3.0 * g0 + 4.0 * gp - gp2) / (2.0 * h)
            deriv = np.where(kink, forward2, central)
        else:
            deriv = central
    f = g0 + flat / alpha * deriv
    if np.any(f < -tol) or np.any(f > 1.0 + tol):
        bad = flat[(f < -tol) | (f > 1.0 + tol)][0]
        raise InversionError(f"inverted value outside [0, 1] at t={bad}; not a Williamson transform?")
    return _out(np.clip(f, 0.0, 1.0).reshape(t.shape))


def scaled_trunc_moment(d, t):
    """``t^-alpha H(t)`` with the value 0 at ``t = 0``."""
    t = np.asarray(t, dtype=float)
    h = np.asarray(d.trunc_moment(t), dtype=float)
    with np.errstate(invalid="ignore"):
        return np.where(t > 0, h * _inv_pow(t, d.alpha), 0.0)


def cdf_n(d, n, t):
    """Cdf of ``X_n``: ``F_n(t) = G(t)^(n-1) [n t^-alpha H(t) + G(t)]``."""
    n = _check_n(n)
    t = np.asarray(t, dtype=float)
    if n == 1:
        return d.cdf(t)
    g = np.asarray(d.williamson(t), dtype=float)
    a = scaled_trunc_moment(d, t)
    return _out(np.clip(g ** (n - 1) * (n * a + g), 0.0, 1.0))


def binomial_tail2(n, q):
    """``P(Bin(n, q) >= 2) = 1 - (1-q)^(n-1) (1 + (n-1) q)``, accurate for small ``q``."""
    q = np.asarray(q, dtype=float)
    direct = 1.0 - (1.0 - q) ** (n - 1) * (1.0 + (n - 1) * q)
    small = n * q < 0.5
    if not small.any():
        return direct
    qs = np.where(small, q, 0.0)
    r = qs / (1.0 - qs)
    term = 0.5 * n * (n - 1) * qs ** 2 * np.exp((n - 2) * np.log1p(-qs))
    total = term.copy()
    for j in range(2, n):
        term = term * (n - j) / (j + 1) * r
        total = total + term
        if np.all(term <= 1e-18 * total):
            break
    return np.where(small, total, direct)


def tail_n(d, n, t):
    """``1 - F_n(t)``, free of cancellation for large ``t``.

    Wherever ``F(t) > 0`` the product is expanded instead of subtracted: with
    ``s = 1 - F`` and ``q = t^-alpha H / F``,

        1 - F_n = (1 - F^n) + F^n P(Bin(n, q) >= 2)

    and both terms are nonnegative and computed directly.
    """
    n = _check_n(n)
    t = np.asarray(t, dtype=float)
    if n == 1:
        return d.sf(t)
    flat = np.atleast_1d(t).ravel()
    out = np.ones_like(flat)
    s = np.atleast_1d(np.asarray(d.sf(flat), dtype=float))
    pos = s < 1.0
    if pos.any():
        tn, sn = flat[pos], s[pos]
        f = 1.0 - sn
        q = np.minimum(scaled_trunc_moment(d, tn) / f, 1.0)
        log_f = np.log1p(-sn)
        out[pos] = -np.expm1(n * log_f) + np.exp(n * log_f) * binomial_tail2(n, q)
    return _out(np.clip(out, 0.0, 1.0).reshape(t.shape))
