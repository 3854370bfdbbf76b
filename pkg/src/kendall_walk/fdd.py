"""Joint distribution functions of the walk at finitely many epochs.

For ordered epochs ``n_1 <= ... <= n_k`` and ordered thresholds
``x_1 <= ... <= x_k``

    P(X_n1 <= x_1, ..., X_nk <= x_k)
        = sum over eps in {0,1}^k of  chain(eps) * prod_j w_j(eps_j)

with ``w_j(0) = G(x_j)^dn_j``, ``w_j(1) = dn_j H(x_j) x_j^-alpha G(x_j)^(dn_j - 1)``
and ``chain(eps)`` the product of ``Psi(x_i / x_j)`` over consecutive ones
``i < j`` of ``eps``. The weighted kernel chain generalizes this with a start
point ``y0`` (position 0) and a terminal level ``x_(k+1)``: the first one picks
up ``Psi(y0 / x_first)``, the last one ``Psi(x_last / x_(k+1))``, and the
all-zeros vector ``Psi(y0 / x_(k+1))``.

Two evaluators are provided: plain enumeration of all ``2^k`` vectors and an
``O(k^2)`` dynamic program over the position of the last one.
"""
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import _inv_pow
from .kernel import _kernel_cdf
from .quadrature import left_limit
from .williamson import psi_ratio

ENUM_MAX_K = 24
_BLOCK_BITS = 14


class FddError(ValueError):
    """Malformed fdd query (unordered inputs, bad sizes)."""


def _nondecreasing(v):
    return all(a <= b for a, b in zip(v[:-1], v[1:]))


@dataclass(frozen=True)
class FddQuery:
    epochs: tuple
    thresholds: tuple

    def __post_init__(self):
        epochs = tuple(int(n) for n in self.epochs)
        if any(n != e for n, e in zip(epochs, self.epochs)):
            raise FddError("epochs must be integers")
        xs = tuple(float(x) for x in self.thresholds)
        if not epochs or len(epochs) != len(xs):
            raise FddError("need k >= 1 epochs and as many thresholds")
        if epochs[0] < 1:
            raise FddError("epochs must be positive")
        if not _nondecreasing(epochs):
            raise FddError("epochs must be nondecreasing")
        if not all(x > 0 and not math.isnan(x) for x in xs):
            raise FddError("thresholds must be positive")
        if not _nondecreasing(xs):
            raise FddError("thresholds must be nondecreasing; unordered rectangles are "
                           "not covered by the closed form (use Monte Carlo)")
        object.__setattr__(self, "epochs", epochs)
        object.__setattr__(self, "thresholds", xs)

    @property
    def k(self):
        return len(self.epochs)

    @property
    def increments(self):
        return np.diff((0,) + self.epochs)


@dataclass(frozen=True)
class EpsilonStructure:
    """A binary vector ``eps`` with the positions of its ones (1-based)."""

    eps: tuple
    ones: tuple = field(init=False)

    def __post_init__(self):
        eps = tuple(int(e) for e in self.eps)
        if any(e not in (0, 1) for e in eps):
            raise FddError("epsilon entries must be 0 or 1")
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "ones", tuple(i + 1 for i, e in enumerate(eps) if e))

    @property
    def s(self):
        return len(self.ones)

    @classmethod
    def from_mask(cls, mask, k):
        return cls(tuple((mask >> j) & 1 for j in range(k)))


@dataclass(frozen=True)
class FddResult:
    value: float
    k: int
    terms_evaluated: int

    def to_json(self):
        return json.dumps({"value": self.value, "k": self.k,
                           "terms_evaluated": self.terms_evaluated}, sort_keys=True)


def _weights(d, q):
    """Per-coordinate weights ``(w0, w1)`` of the expansion."""
    x = np.asarray(q.thresholds)
    dn = q.increments.astype(float)
    # an infinite threshold leaves its coordinate unconstrained: G = 1, H x^-alpha = 0
    fin = np.isfinite(x)
    xf = np.where(fin, x, 1.0)
    g = np.where(fin, np.asarray(d.williamson(xf), dtype=float), 1.0)
    with np.errstate(invalid="ignore"):
        ht = np.where(fin, np.asarray(d.trunc_moment(xf), dtype=float) * _inv_pow(xf, d.alpha), 0.0)
    w0 = g ** dn
    with np.errstate(divide="ignore", invalid="ignore"):
        w1 = np.where(dn > 0, dn * ht * g ** np.maximum(dn - 1.0, 0.0), 0.0)
    return w0, w1


def _psi_table(alpha, x, y0, x_next):
    """``P[i, j] = Psi(a_i / b_j)`` with ``a = (y0, x_1..x_k)``, ``b = (x_1..x_k, x_next)``."""
    a = np.concatenate([[y0], x])
    b = np.concatenate([x, [x_next]])
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(np.isinf(b)[None, :], 0.0, a[:, None] / b[None, :])
    return psi_ratio(alpha, ratio)


def _chain_enum(w0, w1, P):
    k = w0.size
    if k > ENUM_MAX_K:
        raise FddError(f"enumeration over 2^{k} terms refused (k > {ENUM_MAX_K}); use fdd_cdf_dp")
    total_masks = 1 << k
    block = min(total_masks, 1 << _BLOCK_BITS)
    idx = np.arange(1, k + 1)
    bit = 1 << np.arange(k)
    partial = []
    for start in range(0, total_masks, block):
        masks = np.arange(start, start + block, dtype=np.int64)
        ones = (masks[:, None] & bit[None, :]) != 0
        factor = np.prod(np.where(ones, w1, w0), axis=1)
        last = np.maximum.accumulate(np.where(ones, idx, 0), axis=1)
        prev = np.concatenate([np.zeros((block, 1), dtype=last.dtype), last[:, :-1]], axis=1)
        links = np.where(ones, P[prev, idx - 1], 1.0)
        chain = np.prod(links, axis=1) * P[last[:, -1], k]
        partial.append(np.sum(factor * chain))
    return float(np.sum(partial)), total_masks


def _chain_dp(w0, w1, P):
    """Dynamic program over the position of the last one.

    ``T[i]`` holds the weight of all prefixes whose last one sits at ``i``
    (``i = 0``: no one yet). The state vector is kept rescaled by its maximum
    and the scale carried in log form, so long chains do not underflow.
    """
    k = w0.size
    T = np.zeros(k + 1)
    T[0] = 1.0
    log_scale = 0.0
    for j in range(1, k + 1):
        new_one = w1[j - 1] * np.dot(T[:j], P[:j, j - 1])
        T[:j] *= w0[j - 1]
        T[j] = new_one
        top = T[: j + 1].max()
        if top == 0.0:
            return 0.0
        T[: j + 1] /= top
        log_scale += math.log(top)
    return math.exp(log_scale) * float(np.dot(T, P[:, k]))


def _as_query(q, epochs=None, thresholds=None):
    if isinstance(q, FddQuery):
        return q
    return FddQuery(tuple(epochs if epochs is not None else q[0]),
                    tuple(thresholds if thresholds is not None else q[1]))


def fdd_cdf_enum_result(d, q):
    q = _as_query(q)
    w0, w1 = _weights(d, q)
    P = _psi_table(d.alpha, np.asarray(q.thresholds), 0.0, math.inf)
    value, terms = _chain_enum(w0, w1, P)
    return FddResult(min(max(value, 0.0), 1.0), q.k, terms)


def fdd_cdf_enum(d, q):
    """Joint cdf by summing all ``2^k`` terms (``k <= 24``)."""
    return fdd_cdf_enum_result(d, q).value


def fdd_cdf_dp_result(d, q):
    q = _as_query(q)
    w0, w1 = _weights(d, q)
    P = _psi_table(d.alpha, np.asarray(q.thresholds), 0.0, math.inf)
    value = _chain_dp(w0, w1, P)
    return FddResult(min(max(value, 0.0), 1.0), q.k, q.k * (q.k + 1) // 2)


def fdd_cdf_dp(d, q):
    """Joint cdf by the ``O(k^2)`` dynamic program; agrees with enumeration."""
    return fdd_cdf_dp_result(d, q).value


def weighted_chain(d, q, y0=0.0, x_next=math.inf, method="dp"):
    """Closed form of ``int ... int Psi(y_k / x_next) prod_j P_dn_j(y_(j-1), dy_j)``
    over ``y_j in (0, x_j]``, started at ``y0``.

    With ``y0 = 0`` and ``x_next = inf`` this is the joint cdf. A start at or
    above ``x_1`` leaves no mass below ``x_1``, so the value is 0 there.
    """
    q = _as_query(q)
    y0 = float(y0)
    x_next = float(x_next)
    if y0 < 0 or y0 > q.thresholds[0]:
        raise FddError("start point must satisfy 0 <= y0 <= x_1")
    if x_next < q.thresholds[-1]:
        raise FddError("terminal level must satisfy x_next >= x_k")
    if y0 >= q.thresholds[0]:
        return 0.0
    w0, w1 = _weights(d, q)
    P = _psi_table(d.alpha, np.asarray(q.thresholds), y0, x_next)
    if method == "enum":
        return _chain_enum(w0, w1, P)[0]
    return _chain_dp(w0, w1, P)


# ---- scaled process and its limits -------------------------------------------


def _epoch(n, t):
    """``[n t]``, snapping products that sit within rounding of an integer."""
    v = n * t
    r = round(v)
    if abs(v - r) <= 1e-9 * max(1.0, abs(v)):
        return int(r)
    return int(math.floor(v))


@dataclass(frozen=True)
class ScaledFddQuery:
    """Query for ``P(Z_n(t_1) <= z_1, ..., Z_n(t_k) <= z_k)``, ``Z_n(t) = X_[nt] / a_n``."""

    times: tuple
    levels: tuple
    n: int
    a_n: float

    def __post_init__(self):
        ts = tuple(float(t) for t in self.times)
        zs = tuple(float(z) for z in self.levels)
        if not ts or len(ts) != len(zs):
            raise FddError("need k >= 1 times and as many levels")
        if ts[0] < 0 or not _nondecreasing(ts):
            raise FddError("times must be nonnegative and nondecreasing")
        if not all(z > 0 for z in zs) or not _nondecreasing(zs):
            raise FddError("levels must be positive and nondecreasing")
        if int(self.n) != self.n or self.n < 1:
            raise FddError("scale n must be a positive integer")
        if not self.a_n > 0:
            raise FddError("norming constant must be positive")
        object.__setattr__(self, "times", ts)
        object.__setattr__(self, "levels", zs)
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "a_n", float(self.a_n))

    def to_query(self):
        """The unscaled query, with epoch-0 coordinates dropped (``X_0 = 0``); None if all drop."""
        pairs = [(_epoch(self.n, t), self.a_n * z) for t, z in zip(self.times, self.levels)]
        pairs = [(e, x) for e, x in pairs if e > 0]
        if not pairs:
            return None
        epochs, xs = zip(*pairs)
        return FddQuery(epochs, xs)


def fdd_zn(d, sq):
    q = sq.to_query()
    if q is None:
        return 1.0
    return fdd_cdf_dp(d, q)


def _limit_value(alpha, times, levels, intensity, rate=1.0):
    ts = np.asarray(times, dtype=float)
    zs = np.asarray(levels, dtype=float)
    if ts.size == 0 or ts.size != zs.size:
        raise FddError("need k >= 1 times and as many levels")
    if ts[0] < 0 or not _nondecreasing(list(ts)):
        raise FddError("times must be nonnegative and nondecreasing")
    if np.any(zs <= 0) or not _nondecreasing(list(zs)):
        raise FddError("levels must be positive and nondecreasing")
    dt = np.diff(np.concatenate([[0.0], ts]))
    r = dt * intensity(zs)
    w0 = np.exp(-rate * r)
    w1 = r * w0
    P = _psi_table(alpha, zs, 0.0, math.inf)
    return min(max(_chain_dp(w0, w1, P), 0.0), 1.0)


def fdd_limit_finite_moment(times, levels, m, alpha):
    """Limit of the fdds of ``n^(-1/alpha) X_[nt]`` when the alpha-moment ``m`` is finite."""
    if not m > 0:
        raise FddError("alpha-moment must be positive")
    return _limit_value(alpha, times, levels, lambda z: m * z ** -alpha)


def fdd_limit_regvar(times, levels, alpha, theta, include_tail=False):
    """Limit fdds in the regularly varying case, tail index ``theta - alpha``.

    The default is the rate-1 form, with ``exp(-dt z^(theta-alpha))`` per
    coordinate. ``include_tail=True`` adds the step law's own tail mass, which
    multiplies that exponent by ``alpha / (alpha - theta)``; this is the limit of
    ``X_[nt] / a_n`` under ``H(a_n) / a_n^alpha = 1/n``.
    """
    if not 0 <= theta < alpha:
        raise FddError(f"theta must lie in [0, alpha), got {theta}")
    r = alpha / (alpha - theta) if include_tail else 1.0
    return _limit_value(alpha, times, levels, lambda z: z ** (theta - alpha), rate=r)


# ---- nested Stieltjes oracle --------------------------------------------------


def _oracle_grid(d, q, cells):
    """Cell boundaries on ``[0, x_k]`` refining thresholds and the step law's breakpoints."""
    xk = q.thresholds[-1]
    marks = sorted({0.0, *q.thresholds, *(b for b in d.breakpoints if 0 < b < xk)})
    pieces = []
    for lo, hi in zip(marks[:-1], marks[1:]):
        m = max(4, int(math.ceil(cells * (hi - lo) / xk)))
        pieces.append(np.linspace(lo, hi, m + 1)[:-1])
    bounds = np.concatenate(pieces + [np.array([xk])])
    return bounds, np.asarray(marks)


def _level(d, dn, bounds, nodes, phi, ys, rows=256):
    """``int_(0, x] phi(z) P_dn(y, dz)`` for every ``y`` in ``ys``.

    ``bounds`` are the cell boundaries of ``(0, x]``; ``nodes`` interleave
    boundaries and cell midpoints, and ``phi`` holds the integrand there.
    The kernel from ``y`` is an atom ``G(y)^dn`` at ``y`` plus the measure with
    cdf ``L_y(z) = G(z)^dn + dn z^-a H(z) G(z)^(dn-1) Psi(y/z)`` on ``z > y``.
    The cell containing ``y`` is cut at ``y`` and charged ``phi(y)``.
    """
    lo_b, hi_b = bounds[:-1], bounds[1:]
    phi_b = phi[0::2]
    phi_mid = phi[1::2]
    a = d.alpha
    g = np.asarray(d.williamson(bounds), dtype=float)
    with np.errstate(invalid="ignore"):
        ht_r = np.where(bounds > 0, np.asarray(d.trunc_moment(bounds)) * _inv_pow(bounds, a), 0.0)
        left = left_limit(bounds)
        ht_l = np.where(bounds > 0, np.asarray(d.trunc_moment(np.maximum(left, 0.0)))
                        * _inv_pow(bounds, a), 0.0)
    base = g ** dn
    slope_r = dn * ht_r * g ** (dn - 1)
    slope_l = dn * ht_l * g ** (dn - 1)
    out = np.empty(len(ys))
    ys = np.asarray(ys, dtype=float)
    phi_y = np.interp(ys, nodes, phi)
    gy = np.asarray(d.williamson(ys), dtype=float) ** dn
    for r0 in range(0, len(ys), rows):
        y = ys[r0:r0 + rows, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            psi = lambda b: psi_ratio(a, np.where(b > 0, y / np.where(b > 0, b, 1.0), np.inf))
            L_right = base[None, :] + slope_r[None, :] * psi(bounds[None, :])
            L_left = base[None, :] + slope_l[None, :] * psi(bounds[None, :])
        start = np.where(lo_b[None, :] > y, L_right[:, :-1], gy[r0:r0 + rows, None])
        active = hi_b[None, :] > y
        mass = np.where(active, L_left[:, 1:] - start, 0.0)
        rep = np.where(lo_b[None, :] >= y, phi_mid[None, :], phi_y[r0:r0 + rows, None])
        jumps = np.where(active, L_right[:, 1:] - L_left[:, 1:], 0.0) * phi_b[None, 1:]
        out[r0:r0 + rows] = (gy[r0:r0 + rows] * phi_y[r0:r0 + rows]
                             + np.sum(mass * rep, axis=1) + np.sum(jumps, axis=1))
    return out


def fdd_cdf_stieltjes(d, q, cells=2000, extrapolate=True):
    """Independent check of the joint cdf: the kernel chain integrated numerically.

    ``P(X_n1 <= x_1, ...) = int P_n1(0, dy_1) int P_dn2(y_1, dy_2) ... P_dnk(y_(k-1), (0, x_k])``
    evaluated level by level with Stieltjes sums against the transition kernel
    on a common grid; the innermost factor is the kernel cdf itself. Cost is
    ``O(k cells^2)``; intended for small ``k``.

    For ``alpha < 1`` the ``y^alpha`` behaviour of ``Psi`` and of the kernel
    near the origin leaves the sums first order in the cell width, so by
    default the result is extrapolated from ``cells`` and ``cells/2``.
    """
    q = _as_query(q)
    fine = _stieltjes_once(d, q, cells)
    if not extrapolate or q.k == 1:
        return fine
    coarse = _stieltjes_once(d, q, max(cells // 2, 4))
    return float(np.clip(2.0 * fine - coarse, 0.0, 1.0))


def _stieltjes_once(d, q, cells):
    dn = [int(v) for v in q.increments]
    xs = q.thresholds
    bounds, _ = _oracle_grid(d, q, cells)
    mids = 0.5 * (bounds[:-1] + bounds[1:])
    nodes = np.empty(2 * bounds.size - 1)
    nodes[0::2] = bounds
    nodes[1::2] = mids
    k = q.k
    # phi_(k-1)(y) = P(X_nk <= x_k | X_n(k-1) = y), closed form, on all nodes <= x_(k-1)
    if k == 1:
        return float(np.clip(_kernel_cdf(d, 0.0, dn[0], xs[0], closed=True), 0.0, 1.0))
    phi = np.asarray(_kernel_cdf(d, nodes, dn[-1], xs[-1], closed=True), dtype=float)
    for j in range(k - 1, 0, -1):
        # integrate phi_j over (0, x_j] against P_dn_j(y, .) for y = nodes <= x_(j-1)
        inside = bounds <= xs[j - 1] * (1 + 1e-15)
        b_j = bounds[inside]
        nodes_j = nodes[: 2 * b_j.size - 1]
        phi_j = phi[: 2 * b_j.size - 1]
        if j == 1:
            ys = np.array([0.0])
        else:
            ys = nodes[: 2 * int(np.sum(bounds <= xs[j - 2] * (1 + 1e-15))) - 1]
        if dn[j - 1] == 0:
            vals = np.interp(ys, nodes_j, phi_j)
        else:
            vals = _level(d, dn[j - 1], b_j, nodes_j, phi_j, ys)
        phi = vals
    return float(np.clip(phi[0], 0.0, 1.0))
