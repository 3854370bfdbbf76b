"""Monte Carlo paths of the Kendall random walk.

The walk starts at ``X_1 = Y_1 ~ nu`` and moves by

    X_(n+1) = M          if xi >= rho
              M * theta  if xi <  rho

with ``M = max(X_n, Y_(n+1))``, ``rho = (min / M)^alpha`` (0 when ``M = 0``),
``xi`` uniform and ``theta`` Pareto with density ``2 alpha y^(-2 alpha - 1)``
on ``[1, inf)``.

Paths are split into contiguous blocks, one per stream; stream ``s`` draws from
a Philox generator keyed by ``SeedSequence(seed, spawn_key=(s,))``. Ensembles
are therefore a function of ``(seed, streams)`` only, whatever the number of
worker threads.
"""
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .distributions import StepDistribution, check_alpha


def stream_rng(seed, stream):
    """Independent generator for ``stream`` under the master ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.Philox(ss))


def sample_pareto(u, alpha):
    """Inverse-cdf draw ``u^(-1/(2 alpha))`` from the Pareto law on ``[1, inf)``."""
    alpha = check_alpha(alpha)
    u = np.asarray(u, dtype=float)
    if np.any((u <= 0) | (u >= 1)):
        raise ValueError("pareto sampling needs u in (0, 1)")
    out = u ** (-0.5 / alpha)
    return float(out) if out.ndim == 0 else out


def step(x_prev, y, xi, theta, alpha):
    """One transition of the walk; vectorized over all arguments.

    A tie ``xi == rho`` keeps ``M``.
    """
    x_prev = np.asarray(x_prev, dtype=float)
    y = np.asarray(y, dtype=float)
    big = np.maximum(x_prev, y)
    small = np.minimum(x_prev, y)
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = np.where(big > 0, (small / np.where(big > 0, big, 1.0)) ** alpha, 0.0)
    out = np.where(np.asarray(xi) < rho, big * np.asarray(theta), big)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SimConfig:
    dist: StepDistribution
    horizon: int
    paths: int
    seed: int = 0
    streams: int = 1
    record: tuple = ()
    keep_paths: bool = False

    def __post_init__(self):
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise ValueError("horizon must be a positive integer")
        if int(self.paths) != self.paths or self.paths < 1:
            raise ValueError("number of paths must be a positive integer")
        if int(self.streams) != self.streams or self.streams < 1:
            raise ValueError("streams must be a positive integer")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must fit in 64 unsigned bits")
        record = tuple(sorted({int(e) for e in self.record} | {int(self.horizon)}))
        if record[0] < 1 or record[-1] > self.horizon:
            raise ValueError(f"recorded epochs must lie in 1..{self.horizon}")
        object.__setattr__(self, "horizon", int(self.horizon))
        object.__setattr__(self, "paths", int(self.paths))
        object.__setattr__(self, "streams", int(self.streams))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "record", record)

    def block(self, stream):
        """Half-open path range ``[lo, hi)`` owned by ``stream``."""
        if not 0 <= stream < self.streams:
            raise ValueError(f"stream {stream} out of range 0..{self.streams - 1}")
        lo = stream * self.paths // self.streams
        hi = (stream + 1) * self.paths // self.streams
        return lo, hi

    def echo(self):
        return {"dist": self.dist.to_dict(), "horizon": self.horizon, "paths": self.paths,
                "seed": self.seed, "streams": self.streams, "record": list(self.record)}


def _simulate(d, size, horizon, record, rng, keep_paths):
    """Advance ``size`` independent walks; returns (recorded values, full paths or None).

    Per step the draws are, in order: ``Y``, then ``xi``, then the Pareto
    uniform; the first step draws ``Y`` only.
    """
    rec = np.empty((size, len(record)))
    paths = np.empty((size, horizon)) if keep_paths else None
    slot = {e: i for i, e in enumerate(record)}
    x = np.asarray(d.sample(rng, size), dtype=float)
    for n in range(1, horizon + 1):
        if n > 1:
            y = np.asarray(d.sample(rng, size), dtype=float)
            xi = rng.random(size)
            theta = (1.0 - rng.random(size)) ** (-0.5 / d.alpha)
            x = step(x, y, xi, theta, d.alpha)
            x = np.atleast_1d(x)
        if n in slot:
            rec[:, slot[n]] = x
        if keep_paths:
            paths[:, n - 1] = x
    return rec, paths


def sample_path(cfg, stream):
    """A single path ``(X_1, ..., X_horizon)`` from the generator of ``stream``.

    Equals the first path of :func:`sample_ensemble` whenever that stream's
    block holds exactly one path.
    """
    if not 0 <= stream < cfg.streams:
        raise ValueError(f"stream {stream} out of range 0..{cfg.streams - 1}")
    _, paths = _simulate(cfg.dist, 1, cfg.horizon, cfg.record, stream_rng(cfg.seed, stream), True)
    return paths[0]


@dataclass(frozen=True)
class WalkEnsemble:
    """Simulated values of the walk at ``epochs`` (columns), one row per path."""

    values: np.ndarray = field(repr=False)
    epochs: tuple
    config: dict
    paths: np.ndarray = field(default=None, repr=False)

    @property
    def size(self):
        return self.values.shape[0]

    @property
    def terminal(self):
        return self.values[:, -1]

    def at(self, epoch):
        try:
            return self.values[:, self.epochs.index(int(epoch))]
        except ValueError:
            raise KeyError(f"epoch {epoch} was not recorded; have {self.epochs}") from None

    @cached_property
    def _sorted(self):
        return {e: np.sort(self.values[:, i]) for i, e in enumerate(self.epochs)}

    def sorted_values(self, epoch=None):
        return self._sorted[self.epochs[-1] if epoch is None else int(epoch)]

    def empirical_cdf(self, t, epoch=None):
        """Fraction of values ``<= t`` at ``epoch`` (default: the horizon)."""
        s = self.sorted_values(epoch)
        out = np.searchsorted(s, np.asarray(t, dtype=float), side="right") / s.size
        return float(out) if np.ndim(out) == 0 else out

    def joint_frequency(self, epochs, thresholds):
        """Empirical ``P(X_e1 <= x1, ..., X_ek <= xk)``."""
        hit = np.ones(self.size, dtype=bool)
        for e, x in zip(epochs, thresholds):
            hit &= self.at(e) <= x
        return float(hit.mean())

    def to_csv(self, out=None, full=False):
        """CSV with a ``# {config json}`` first line; returns the text if ``out`` is None.

        ``full=True`` writes every recorded epoch (or the full paths when kept).
        """
        if full and self.paths is not None:
            data, cols = self.paths, [f"X_{n}" for n in range(1, self.paths.shape[1] + 1)]
        elif full:
            data, cols = self.values, [f"X_{e}" for e in self.epochs]
        else:
            data, cols = self.values[:, -1:], [f"X_{self.epochs[-1]}"]
        buf = io.StringIO()
        buf.write("# " + json.dumps(self.config, sort_keys=True) + "\n")
        buf.write(",".join(cols) + "\n")
        for row in data:
            buf.write(",".join(repr(float(v)) for v in row) + "\n")
        text = buf.getvalue()
        if out is None:
            return text
        with open(out, "w", newline="") as fh:
            fh.write(text)
        return text


def sample_ensemble(cfg, workers=1):
    """Simulate ``cfg.paths`` walks split over ``cfg.streams`` streams.

    ``workers`` threads run streams concurrently; each stream writes only its
    own row block, so the result does not depend on ``workers``.
    """
    values = np.empty((cfg.paths, len(cfg.record)))
    paths = np.empty((cfg.paths, cfg.horizon)) if cfg.keep_paths else None

    def run(stream):
        lo, hi = cfg.block(stream)
        if hi == lo:
            return
        rec, full = _simulate(cfg.dist, hi - lo, cfg.horizon, cfg.record,
                              stream_rng(cfg.seed, stream), cfg.keep_paths)
        values[lo:hi] = rec
        if cfg.keep_paths:
            paths[lo:hi] = full

    if workers <= 1 or cfg.streams == 1:
        for s in range(cfg.streams):
            run(s)
    else:
        with ThreadPoolExecutor(max_workers=int(workers)) as pool:
            list(pool.map(run, range(cfg.streams)))
    return WalkEnsemble(values=values, epochs=cfg.record, config=cfg.echo(), paths=paths)


def empirical_cdf(e, t, epoch=None):
    return e.empirical_cdf(t, epoch)
