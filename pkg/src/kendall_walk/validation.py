"""Self-validation: every invariant of every module as one registered case.

A case returns a :class:`CaseResult` with the worst statistic over its
sub-checks and the threshold it was held to. Suites group cases by module;
``all`` runs everything. The registry is checked against ``MANIFEST`` on
import, so a missing or doubly-registered invariant fails loudly.
"""
import io
import json
import math
from contextlib import redirect_stdout
from dataclasses import asdict, dataclass, field

import numpy as np

from . import constants as C
from .asymptotics import (FiniteMoment, RegVar, RegVarWalk, convergence_diagnostic, limit_cdf,
                          norming_residual, norming_sequence, tail_expansion)
from .distributions import (Dirac1, GammaStep, GenericCdf, LackOfMemory, ParetoMix,
                            StableLimit, Uniform01, generic_from_table)
from .fdd import (FddQuery, fdd_cdf_dp, fdd_cdf_enum, fdd_cdf_stieltjes,
                  fdd_limit_finite_moment, fdd_limit_regvar)
from .kernel import chapman_kolmogorov_gap, kernel_cdf, kernel_trunc_moment
from .simulator import SimConfig, WalkEnsemble, sample_ensemble, step
from .williamson import cdf_n, invert_to_cdf, williamson_from_cdf

ALPHAS = (0.5, 1.0, 2.0)
EPOCHS = (1, 2, 5, 10)


class RegistryError(RuntimeError):
    pass


def named_families(alpha):
    return (Dirac1(alpha), ParetoMix(alpha, p=0.5), LackOfMemory(alpha),
            StableLimit(alpha, m=1.0), Uniform01(alpha), GammaStep(alpha, a=2.0, b=1.0))


def _label(d):
    params = {k: v for k, v in d.to_dict().items() if k not in ("family", "alpha")}
    extra = "".join(f",{k}={v:g}" for k, v in sorted(params.items()) if isinstance(v, float))
    return f"{d.family}(alpha={d.alpha:g}{extra})"


def ks_statistic(e, exact_cdf, epoch=None):
    """``sup_t |F_emp(t) - F(t)|`` including left limits at every sample value.

    ``e`` is a :class:`WalkEnsemble` or an array of sample values. Checking
    both ``t`` and ``t-`` at each distinct value keeps the statistic exact for
    laws with atoms.
    """
    s = e.sorted_values(epoch) if isinstance(e, WalkEnsemble) else np.sort(np.asarray(e, float))
    if s.size < 100:
        raise ValueError(f"KS statistic needs at least 100 samples, got {s.size}")
    u = np.unique(s)
    right = np.searchsorted(s, u, side="right") / s.size
    left = np.searchsorted(s, u, side="left") / s.size
    f_right = np.asarray(exact_cdf(u), dtype=float)
    f_left = np.asarray(exact_cdf(np.nextafter(u, -np.inf)), dtype=float)
    return float(max(np.max(np.abs(right - f_right)), np.max(np.abs(left - f_left))))


def ks_threshold(n):
    return max(C.KS_MAX, C.KS_COEF / math.sqrt(n))


@dataclass(frozen=True)
class CaseResult:
    name: str
    statistic: float
    threshold: float
    passed: bool
    N: int = 0
    seed: int = None
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    suite: str
    seed: int
    quick: bool
    cases: tuple
    passed: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "passed", all(c.passed for c in self.cases))

    def to_dict(self):
        return {"suite": self.suite, "seed": self.seed, "quick": self.quick,
                "constants_version": C.VERSION, "passed": self.passed,
                "cases": [asdict(c) for c in self.cases]}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


@dataclass(frozen=True)
class Context:
    seed: int = 0
    quick: bool = False
    mc_samples: int = None

    @property
    def N(self):
        if self.mc_samples is not None:
            return int(self.mc_samples)
        return C.MC_SAMPLES_QUICK if self.quick else C.MC_SAMPLES

    def case_seed(self, offset):
        return (int(self.seed) * 1_000_003 + offset) % 2 ** 64


MANIFEST = (
    ("transforms", "distributions.monotone_bounds"),
    ("transforms", "distributions.generic_reproduces_H"),
    ("transforms", "distributions.moment_is_limit"),
    ("transforms", "williamson.multiplicativity"),
    ("transforms", "williamson.round_trip"),
    ("transforms", "williamson.n1_identity"),
    ("transforms", "williamson.monotone_in_t_and_n"),
    ("transforms", "williamson.stable_fixed_point"),
    ("kernels", "kernel.origin_collapse"),
    ("kernels", "kernel.monotone_in_x_and_t"),
    ("kernels", "kernel.chapman_kolmogorov"),
    ("kernels", "kernel.moment_decay"),
    ("simulator", "simulator.ks_vs_exact"),
    ("simulator", "simulator.joint_mc_3sigma"),
    ("simulator", "simulator.determinism"),
    ("simulator", "simulator.step_floor"),
    ("fdd", "fdd.enum_equals_dp"),
    ("fdd", "fdd.marginal_consistency"),
    ("fdd", "fdd.k1_collapse"),
    ("fdd", "fdd.kernel_chain_oracle"),
    ("fdd", "fdd.mc_4sigma"),
    ("fdd", "fdd.limits_are_cdfs"),
    ("asymptotics", "asymptotics.tail_expansion_trend"),
    ("asymptotics", "asymptotics.limit_cdf_valid"),
    ("asymptotics", "asymptotics.norming_residual"),
    ("asymptotics", "asymptotics.convergence_consistency"),
    ("harness", "harness.registry_complete"),
    ("harness", "harness.cli_bit_stable"),
)

SUITES = ("transforms", "kernels", "fdd", "simulator", "asymptotics", "all")

REGISTRY = {}


def case(suite, name):
    def wrap(fn):
        if name in REGISTRY:
            raise RegistryError(f"case {name!r} registered twice")
        REGISTRY[name] = (suite, fn)
        return fn
    return wrap


def _result(name, stat, thr, N=0, seed=None, detail="", passed=None):
    stat = float(stat) + 0.0  # no negative zero in reports
    ok = stat <= thr if passed is None else bool(passed)
    return CaseResult(name, stat, float(thr), ok, int(N), seed, detail)


def _worst(pairs):
    """``(statistic, label)`` with the largest statistic."""
    return max(pairs, key=lambda p: p[0])


# ---- transforms -----------------------------------------------------------------


@case("transforms", "distributions.monotone_bounds")
def _c_monotone_bounds(ctx):
    t = np.linspace(0.0, 20.0, 801)
    pairs = []
    for a in ALPHAS:
        for d in named_families(a):
            F, H = np.asarray(d.cdf(t)), np.asarray(d.trunc_moment(t))
            viol = max(np.max(-np.diff(F), initial=0), np.max(-np.diff(H), initial=0),
                       np.max(H - t ** a * F), abs(H[0]), np.max(-F), np.max(F - 1))
            pairs.append((viol, _label(d)))
    s, lab = _worst(pairs)
    return _result("distributions.monotone_bounds", max(s, 0.0), C.TOL_MONOTONE, detail=lab)


def generic_twin(d, quad_tol=C.QUAD_TOL):
    """Quadrature-backed copy of a named family built from its cdf alone."""
    hi = 1.0 if d.family in ("dirac", "pareto_mix", "lack_of_memory", "uniform") else 10.0
    def cdf(t):
        t = np.asarray(t, dtype=float)
        return np.where(t >= 0, d.cdf(np.maximum(t, 0.0)), 0.0)

    return GenericCdf(alpha=d.alpha, cdf_fn=cdf, support_hint=(0.0, hi), quad_tol=quad_tol,
                      kinks=d.breakpoints, point_masses=d.atoms)


@case("transforms", "distributions.generic_reproduces_H")
def _c_generic_H(ctx):
    t = np.geomspace(0.05, 10.0, 50)
    pairs = []
    for a in ALPHAS:
        for d in named_families(a):
            g = generic_twin(d)
            pairs.append((np.max(np.abs(np.asarray(g.trunc_moment(t)) - d.trunc_moment(t))),
                          _label(d)))
    s, lab = _worst(pairs)
    return _result("distributions.generic_reproduces_H", s,
                   C.GENERIC_H_FACTOR * C.QUAD_TOL, detail=lab)


@case("transforms", "distributions.moment_is_limit")
def _c_moment_limit(ctx):
    pairs = []
    for a in ALPHAS:
        for d in (Dirac1(a), LackOfMemory(a), Uniform01(a), GammaStep(a, a=2.0, b=1.0),
                  ParetoMix(a, p=1.0)):
            pairs.append((abs(d.trunc_moment(1e6) / d.alpha_moment - 1.0), _label(d)))
    s, lab = _worst(pairs)
    return _result("distributions.moment_is_limit", s, C.TOL_MOMENT_LIMIT, detail=lab)


@case("transforms", "williamson.multiplicativity")
def _c_multiplicativity(ctx):
    t = np.array([0.3, 0.8, 1.5, 2.5, 4.0, 7.0])
    pairs = []
    for a in ALPHAS:
        for d in named_families(a):
            for n in (1, 2, 5, 10):
                got = williamson_from_cdf(lambda s: cdf_n(d, n, s), a, t,
                                          breakpoints=d.breakpoints, abs_tol=1e-12)
                pairs.append((np.max(np.abs(got - np.asarray(d.williamson(t)) ** n)),
                              f"{_label(d)},n={n}"))
    s, lab = _worst(pairs)
    return _result("williamson.multiplicativity", s, C.TOL_MULTIPLICATIVE, detail=lab)


@case("transforms", "williamson.round_trip")
def _c_round_trip(ctx):
    # grid avoids the breakpoint 1 where G has a kink
    t = np.geomspace(0.05, 20.0, 100) * (1 + 1e-3)
    pairs = []
    for a in ALPHAS:
        for d in named_families(a):
            got = invert_to_cdf(d.williamson, a, t)
            pairs.append((np.max(np.abs(got - np.asarray(d.cdf(t)))), _label(d)))
    s, lab = _worst(pairs)
    return _result("williamson.round_trip", s, C.TOL_ROUND_TRIP, detail=lab)


@case("transforms", "williamson.n1_identity")
def _c_n1(ctx):
    t = np.linspace(0.0, 20.0, 401)
    s = max(np.max(np.abs(np.asarray(cdf_n(d, 1, t)) - d.cdf(t)))
            for a in ALPHAS for d in named_families(a))
    return _result("williamson.n1_identity", s, 0.0)


@case("transforms", "williamson.monotone_in_t_and_n")
def _c_monotone_n(ctx):
    t = np.linspace(0.01, 30.0, 600)
    pairs = []
    for a in ALPHAS:
        for d in named_families(a):
            Fs = np.array([cdf_n(d, n, t) for n in range(1, 11)])
            dt = np.max(-np.diff(Fs, axis=1), initial=0.0)
            g = np.asarray(d.williamson(t))
            dn = np.max(np.where(g < 1, np.diff(Fs, axis=0), 0.0), initial=0.0)
            pairs.append((max(dt, dn), _label(d)))
    s, lab = _worst(pairs)
    return _result("williamson.monotone_in_t_and_n", max(s, 0.0), C.TOL_MONOTONE, detail=lab)


@case("transforms", "williamson.stable_fixed_point")
def _c_stable(ctx):
    t = np.geomspace(0.01, 100.0, 200)
    s = 0.0
    for a in ALPHAS:
        for m in (0.5, 1.0, 3.0):
            for n in (1, 2, 10, 1000):
                one = StableLimit(a, m=n * m).cdf(t)
                s = max(s, np.max(np.abs(np.asarray(cdf_n(StableLimit(a, m=m), n, t)) - one)))
    return _result("williamson.stable_fixed_point", s, C.TOL_ALGEBRAIC)


# ---- kernels --------------------------------------------------------------------


@case("kernels", "kernel.origin_collapse")
def _c_origin(ctx):
    t = np.geomspace(0.05, 50.0, 120)
    s = max(np.max(np.abs(np.asarray(kernel_cdf(d, 0.0, n, t)) - cdf_n(d, n, t)))
            for a in ALPHAS for d in named_families(a) for n in range(1, 11))
    return _result("kernel.origin_collapse", s, C.TOL_ALGEBRAIC)


@case("kernels", "kernel.monotone_in_x_and_t")
def _c_kernel_monotone(ctx):
    xs = np.linspace(0.0, 5.0, 81)[:, None]
    ts = np.linspace(0.05, 10.0, 120)[None, :]
    s = 0.0
    for a in ALPHAS:
        for d in named_families(a):
            for n in (1, 3):
                K = np.asarray(kernel_cdf(d, xs, n, ts))
                s = max(s, np.max(np.diff(K, axis=0)), np.max(-np.diff(K, axis=1)))
    return _result("kernel.monotone_in_x_and_t", max(s, 0.0), C.TOL_MONOTONE)


@case("kernels", "kernel.chapman_kolmogorov")
def _c_ck(ctx):
    pairs = []
    for a in ALPHAS:
        for d in named_families(a):
            for n in (1, 2, 3):
                for x, t in ((0.0, 1.7), (0.7, 2.5)):
                    gap, _, _ = chapman_kolmogorov_gap(d, x, n, t, m=10_000)
                    pairs.append((gap, f"{_label(d)},n={n},x={x},t={t}"))
    s, lab = _worst(pairs)
    return _result("kernel.chapman_kolmogorov", s, C.TOL_CHAPMAN_KOLMOGOROV, detail=lab)


@case("kernels", "kernel.moment_decay")
def _c_moment_decay(ctx):
    # t^-a times the kernel truncated moment falls to 0 once t is past the bulk,
    # taken as the first grid point where the kernel cdf reaches 0.99
    grid = np.geomspace(1.0, 1e6, 121)
    worst_rise, worst_end = 0.0, 0.0
    for a in ALPHAS:
        for d in named_families(a):
            for x, n in ((0.0, 1), (0.5, 2), (1.5, 5)):
                K = np.asarray(kernel_cdf(d, x, n, grid))
                t0 = grid[np.argmax(K >= 0.99)] if K[-1] >= 0.99 else grid[-1]
                t = np.geomspace(t0, t0 * 1e6, 60)
                r = np.asarray(kernel_trunc_moment(d, x, n, t)) * t ** -a
                worst_rise = max(worst_rise, np.max(np.diff(r)))
                worst_end = max(worst_end, r[-1] / r[0])
    ok = worst_rise <= 0 and worst_end < 0.1
    return _result("kernel.moment_decay", max(worst_rise, 0.0), 0.0, passed=ok,
                   detail=f"max end/start ratio {worst_end:.3e}")


# ---- simulator ------------------------------------------------------------------


@case("simulator", "simulator.ks_vs_exact")
def _c_ks(ctx):
    N = ctx.N
    pairs = []
    offset = 0
    for a in ALPHAS:
        for d in named_families(a):
            offset += 1
            cfg = SimConfig(d, horizon=max(EPOCHS), paths=N, seed=ctx.case_seed(offset),
                            streams=4, record=EPOCHS)
            e = sample_ensemble(cfg)
            for n in EPOCHS:
                pairs.append((ks_statistic(e, lambda s: cdf_n(d, n, s), epoch=n),
                              f"{_label(d)},n={n}"))
    s, lab = _worst(pairs)
    return _result("simulator.ks_vs_exact", s, ks_threshold(N), N=N,
                   seed=ctx.case_seed(0), detail=lab)


def _band_z(freq, p, N):
    sd = math.sqrt(max(p * (1 - p), 1e-300) / N)
    return abs(freq - p) / sd if p * (1 - p) > 0 else (0.0 if freq == p else math.inf)


@case("simulator", "simulator.joint_mc_3sigma")
def _c_joint(ctx):
    N = ctx.N
    seed = ctx.case_seed(101)
    pairs = []
    for i, d in enumerate((Uniform01(1.0), GammaStep(0.5, a=2.0, b=1.0), ParetoMix(2.0, p=0.5))):
        e = sample_ensemble(SimConfig(d, horizon=2, paths=N, seed=seed + i, streams=4, record=(1, 2)))
        for x1, x2 in ((0.8, 1.4), (1.5, 2.5)):
            p = fdd_cdf_dp(d, FddQuery((1, 2), (x1, x2)))
            pairs.append((_band_z(e.joint_frequency((1, 2), (x1, x2)), p, N),
                          f"{_label(d)},x=({x1},{x2})"))
    s, lab = _worst(pairs)
    return _result("simulator.joint_mc_3sigma", s, C.BAND_JOINT_SIGMA, N=N, seed=seed, detail=lab)


@case("simulator", "simulator.determinism")
def _c_determinism(ctx):
    seed = ctx.case_seed(201)
    cfg = SimConfig(GammaStep(1.0, a=2.0, b=1.0), horizon=6, paths=20_001, seed=seed,
                    streams=7, record=(2, 4))
    base = sample_ensemble(cfg, workers=1).values
    mismatches = sum(int(not np.array_equal(base, sample_ensemble(cfg, workers=w).values))
                     for w in (1, 2, 4))
    return _result("simulator.determinism", mismatches, 0, N=cfg.paths, seed=seed)


@case("simulator", "simulator.step_floor")
def _c_step_floor(ctx):
    seed = ctx.case_seed(301)
    rng = np.random.default_rng(seed)
    n = 200_000
    x, y = rng.exponential(size=n), rng.exponential(size=n)
    xi = rng.random(n)
    theta = (1 - rng.random(n)) ** -0.5
    viol = 0
    for a in ALPHAS:
        viol += int(np.sum(step(x, y, xi, theta, a) < np.maximum(x, y)))
    return _result("simulator.step_floor", viol, 0, N=n, seed=seed)


# ---- fdd ------------------------------------------------------------------------


def _random_query(rng, k, max_step=6, hi=6.0):
    epochs = np.cumsum(rng.integers(0, max_step, k))
    epochs = epochs - epochs[0] + rng.integers(1, max_step)
    xs = np.sort(rng.uniform(0.2, hi, k))
    return FddQuery(tuple(int(e) for e in epochs), tuple(float(x) for x in xs))


@case("fdd", "fdd.enum_equals_dp")
def _c_enum_dp(ctx):
    seed = ctx.case_seed(401)
    rng = np.random.default_rng(seed)
    s = 0.0
    for a in ALPHAS:
        for d in named_families(a):
            for k in range(1, 13):
                q = _random_query(rng, k)
                s = max(s, abs(fdd_cdf_enum(d, q) - fdd_cdf_dp(d, q)))
    return _result("fdd.enum_equals_dp", s, C.TOL_ALGEBRAIC, seed=seed)


@case("fdd", "fdd.marginal_consistency")
def _c_marginal(ctx):
    # Dropping X_k <= 1e12 can move the value by at most P(X_k > 1e12), which is
    # far above 1e-8 for the heavy ParetoMix tails; that mass is allowed for,
    # and an infinite last threshold must reproduce the shorter query exactly.
    seed = ctx.case_seed(402)
    rng = np.random.default_rng(seed)
    s = 0.0
    for a in ALPHAS:
        for d in named_families(a):
            for k in range(2, 8):
                q = _random_query(rng, k)
                less = fdd_cdf_dp(d, FddQuery(q.epochs[:-1], q.thresholds[:-1]))
                big = fdd_cdf_dp(d, FddQuery(q.epochs, q.thresholds[:-1] + (1e12,)))
                inf = fdd_cdf_dp(d, FddQuery(q.epochs, q.thresholds[:-1] + (math.inf,)))
                escape = 1.0 - float(cdf_n(d, q.epochs[-1], 1e12))
                s = max(s, max(less - big - escape, big - less, 0.0), abs(inf - less))
    return _result("fdd.marginal_consistency", s, C.TOL_MARGINAL, seed=seed)


@case("fdd", "fdd.k1_collapse")
def _c_k1(ctx):
    xs = np.geomspace(0.05, 50.0, 60)
    s = max(abs(fdd_cdf_enum(d, FddQuery((n,), (x,))) - float(cdf_n(d, n, x)))
            for a in ALPHAS for d in named_families(a) for n in (1, 2, 5, 10) for x in xs)
    return _result("fdd.k1_collapse", s, C.TOL_ROUNDING)


ORACLE_QUERIES = (
    FddQuery((1,), (1.7,)),
    FddQuery((1, 3), (0.8, 2.2)),
    FddQuery((2, 3), (1.3, 2.9)),
    FddQuery((1, 1, 3), (0.9, 1.6, 2.4)),
    FddQuery((1, 2, 3), (1.5, 2.5, 3.5)),
    FddQuery((2, 2, 3), (0.7, 1.3, 2.9)),
)


@case("fdd", "fdd.kernel_chain_oracle")
def _c_oracle(ctx):
    pairs = []
    for a in ALPHAS:
        for d in named_families(a):
            for q in ORACLE_QUERIES:
                pairs.append((abs(fdd_cdf_stieltjes(d, q, cells=2000) - fdd_cdf_enum(d, q)),
                              f"{_label(d)},{q.epochs},{q.thresholds}"))
    s, lab = _worst(pairs)
    return _result("fdd.kernel_chain_oracle", s, C.TOL_KERNEL_CHAIN, detail=lab)


MC_QUERIES = (
    FddQuery((1, 3), (1.2, 2.0)),
    FddQuery((2, 4), (1.0, 3.0)),
    FddQuery((1, 2, 4), (0.9, 1.5, 2.6)),
    FddQuery((2, 2, 5), (1.1, 1.4, 3.2)),
)


@case("fdd", "fdd.mc_4sigma")
def _c_fdd_mc(ctx):
    N = ctx.N
    seed = ctx.case_seed(501)
    pairs = []
    for i, d in enumerate(named_families(1.0)):
        e = sample_ensemble(SimConfig(d, horizon=5, paths=N, seed=seed + i, streams=4,
                                      record=(1, 2, 3, 4)))
        for q in MC_QUERIES:
            p = fdd_cdf_enum(d, q)
            pairs.append((_band_z(e.joint_frequency(q.epochs, q.thresholds), p, N),
                          f"{_label(d)},{q.epochs},{q.thresholds}"))
    s, lab = _worst(pairs)
    return _result("fdd.mc_4sigma", s, C.BAND_FDD_SIGMA, N=N, seed=seed, detail=lab)


# levels are laid out in y = z^-g, from deep in the lower tail to deep in the upper
_Y_GRID = np.geomspace(1e2, 1e-6, 400)


@case("fdd", "fdd.limits_are_cdfs")
def _c_limits(ctx):
    # The rate-1 regularly varying form with theta > 0 is not monotone in the
    # earlier level, so only theta = 0 (where both forms agree) and the
    # tail-corrected form are held to being joint cdfs.
    worst_drop, worst_end = 0.0, 0.0
    for a in ALPHAS:
        laws = [(a, lambda t, zz: fdd_limit_finite_moment(t, zz, 1.3, a)),
                (a, lambda t, zz: fdd_limit_regvar(t, zz, a, 0.0))]
        laws += [(a - th, lambda t, zz, th=th: fdd_limit_regvar(t, zz, a, th, include_tail=True))
                 for th in (0.25 * a, 0.5 * a, 0.9 * a)]
        for g, f in laws:
            z = _Y_GRID ** (-1.0 / g)
            for fixed in (0.7, 2.0):
                # vary the first coordinate below the fixed second, then the second above it
                v1 = [f((0.5, 1.2), (zz, fixed)) for zz in z if zz <= fixed]
                v2 = [f((0.5, 1.2), (fixed, zz)) for zz in z if zz >= fixed]
                worst_drop = max(worst_drop, np.max(-np.diff(v1)), np.max(-np.diff(v2)))
            one = [f((1.0,), (zz,)) for zz in z]
            worst_drop = max(worst_drop, np.max(-np.diff(one)))
            worst_end = max(worst_end, one[0], 1 - one[-1])
    ok = worst_drop <= C.TOL_MONOTONE and worst_end < 1e-3
    return _result("fdd.limits_are_cdfs", max(worst_drop, 0.0), C.TOL_MONOTONE, passed=ok,
                   detail=f"worst distance to 0/1 at grid ends {worst_end:.2e}")


# ---- asymptotics ----------------------------------------------------------------


@case("asymptotics", "asymptotics.tail_expansion_trend")
def _c_tail(ctx):
    from .williamson import tail_n
    xs = (10.0, 1e2, 1e3, 1e4)
    fails = []
    worst = 0.0
    for d in (Uniform01(1.0), GammaStep(1.0, a=2.0, b=1.0), Uniform01(2.0), Dirac1(1.0)):
        for n in (2, 3, 5):
            err = [abs(float(tail_n(d, n, x)) / float(tail_expansion(d, n, x)) - 1) for x in xs]
            if any(b > a for a, b in zip(err[:-1], err[1:])):
                fails.append(f"{_label(d)},n={n}")
            worst = max(worst, err[2])
    ok = not fails and worst <= 0.1
    return _result("asymptotics.tail_expansion_trend", worst, 0.1, passed=ok,
                   detail="non-monotone: " + ";".join(fails) if fails else "")


@case("asymptotics", "asymptotics.limit_cdf_valid")
def _c_limit_valid(ctx):
    worst_drop, worst_end = 0.0, 0.0
    for a in ALPHAS:
        for law in (FiniteMoment(1.0, a), FiniteMoment(2.5, a), RegVar(0.0, a), RegVar(0.5 * a, a),
                    RegVarWalk(0.5 * a, a), RegVarWalk(0.9 * a, a)):
            F = np.asarray(limit_cdf(law, _Y_GRID ** (-1.0 / law.exponent)))
            worst_drop = max(worst_drop, np.max(-np.diff(F)))
            worst_end = max(worst_end, F[0], 1 - F[-1])
    ok = worst_drop <= C.TOL_MONOTONE and worst_end < 1e-3
    return _result("asymptotics.limit_cdf_valid", max(worst_drop, 0.0), C.TOL_MONOTONE,
                   passed=ok, detail=f"worst distance to 0/1 at grid ends {worst_end:.2e}")


@case("asymptotics", "asymptotics.norming_residual")
def _c_norming(ctx):
    pairs = []
    for d in (ParetoMix(1.0, p=0.5), ParetoMix(2.0, p=0.7), ParetoMix(1.0, p=1.0),
              StableLimit(1.0, m=2.0), Dirac1(0.5), GammaStep(1.5, a=2.0, b=1.0)):
        for n in (10 ** 3, 10 ** 4, 10 ** 6):
            a_n = norming_sequence(d, n, method="numeric")
            pairs.append((norming_residual(d, n, a_n), f"{_label(d)},n={n}"))
    s, lab = _worst(pairs)
    return _result("asymptotics.norming_residual", s, C.TOL_NORMING, detail=lab)


@case("asymptotics", "asymptotics.convergence_consistency")
def _c_convergence(ctx):
    bad = []
    worst = 0.0
    for a in ALPHAS:
        for d in (Dirac1(a), Uniform01(a), GammaStep(a, a=2.0, b=1.0), LackOfMemory(a),
                  StableLimit(a, m=1.5)):
            tab = convergence_diagnostic(d, (100, 1000, 10_000),
                                         law=FiniteMoment(d.alpha_moment, a))
            if not tab.nonincreasing(C.CONVERGENCE_SLACK):
                bad.append(_label(d))
            worst = max(worst, tab.sup_distance[-1])
    return _result("asymptotics.convergence_consistency", worst, 0.01, passed=not bad and worst < 0.01,
                   detail="increasing: " + ";".join(bad) if bad else "")


# ---- harness --------------------------------------------------------------------


def registry_problems():
    names = [n for _, n in MANIFEST]
    problems = [f"duplicate manifest entry {n}" for n in set(names) if names.count(n) > 1]
    problems += [f"unregistered {n}" for n in names if n not in REGISTRY]
    problems += [f"not in manifest {n}" for n in REGISTRY if n not in names]
    problems += [f"suite mismatch {n}" for s, n in MANIFEST
                 if n in REGISTRY and REGISTRY[n][0] != s]
    return problems


@case("harness", "harness.registry_complete")
def _c_registry(ctx):
    problems = registry_problems()
    return _result("harness.registry_complete", len(problems), 0, detail="; ".join(problems))


@case("harness", "harness.cli_bit_stable")
def _c_cli(ctx):
    from .cli import run_command
    commands = (
        ["cdf", "--dist", "dirac", "--alpha", "1", "--n", "2", "--t", "2", "--json"],
        ["fdd", "--dist", "dirac", "--alpha", "1", "--epochs", "1,2", "--thresholds", "2,3"],
        ["sample", "--dist", "uniform", "--alpha", "1", "--n", "5", "--paths", "3",
         "--seed", str(ctx.seed)],
        ["norming", "--dist", "pareto_mix", "--p", "0.5", "--alpha", "1", "--n", "1000",
         "--method", "numeric", "--json"],
    )
    mismatches = 0
    for argv in commands:
        outs = []
        for _ in range(2):
            buf = io.StringIO()
            with redirect_stdout(buf):
                code = run_command(argv)
            outs.append((code, buf.getvalue()))
        mismatches += int(outs[0] != outs[1] or outs[0][0] != 0)
    return _result("harness.cli_bit_stable", mismatches, 0, seed=ctx.seed)


def check_registry():
    problems = registry_problems()
    if problems:
        raise RegistryError("validation registry incomplete: " + "; ".join(problems))


check_registry()


def suite_cases(name):
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {SUITES}")
    return [n for s, n in MANIFEST if name == "all" or s == name]


def validate_suite(name, seed=0, quick=False, mc_samples=None):
    """Run every case of suite ``name`` and collect a :class:`ValidationReport`."""
    ctx = Context(seed=int(seed), quick=bool(quick), mc_samples=mc_samples)
    results = []
    for n in suite_cases(name):
        try:
            results.append(REGISTRY[n][1](ctx))
        except (ArithmeticError, ValueError) as exc:
            results.append(CaseResult(n, math.inf, math.nan, False, detail=f"error: {exc}"))
    return ValidationReport(name, int(seed), bool(quick), tuple(results))
