"""Quality measures for channel estimates.

Average distances are Monte-Carlo means of ``|a(r) - b(r)|`` (the qubit
trace distance) over random input states. Samples are generated in
fixed-size shards, each with its own generator spawned from the seed, and
shard statistics are merged in shard order, so a result depends only on
``(samples, measure, seed)`` and never on the number of workers.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .core import EPS_NUM, AffineChannel, apply, singular_decompose
from .errors import NotUnitalError

SHARD_SIZE = 1 << 16
DEFAULT_SAMPLES = 1_000_000


class Measure(str, Enum):
    UNIFORM_BALL = "uniform_ball"
    UNIFORM_SPHERE = "uniform_sphere"

    @classmethod
    def parse(cls, value) -> "Measure":
        if isinstance(value, cls):
            return value
        aliases = {"ball": cls.UNIFORM_BALL, "sphere": cls.UNIFORM_SPHERE}
        key = str(value).lower()
        if key in aliases:
            return aliases[key]
        return cls(key)


@dataclass(frozen=True)
class DistanceEstimate:
    mean: float
    std_error: float
    samples: int
    measure: Measure
    seed: int

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "std_error": self.std_error,
            "samples": self.samples,
            "measure": self.measure.value,
            "seed": self.seed,
        }


# ----------------------------------------------------------------------------
# capacity


def binary_entropy(p: float) -> float:
    """Shannon entropy in bits of the distribution ``(p, 1 - p)``."""
    total = 0.0
    for q in (p, 1.0 - p):
        if q > 0.0:
            total -= q * np.log2(q)
    return float(total)


def unital_capacity(ch: AffineChannel) -> float:
    """``1 - H((1 + mu) / 2)`` with ``mu`` the largest |singular value| of ``E``."""
    shift = float(np.linalg.norm(ch.t))
    if shift >= EPS_NUM:
        raise NotUnitalError(f"capacity formula needs a unital channel, |t| = {shift:.3g}")
    return 1.0 - binary_entropy(0.5 * (1.0 + capacity_mu(ch)))


def capacity_mu(ch: AffineChannel) -> float:
    mu = float(np.max(np.abs(singular_decompose(ch).lambdas)))
    return min(mu, 1.0)


# ----------------------------------------------------------------------------
# sampling


def sample_states(n: int, measure: Measure | str, rng: np.random.Generator) -> np.ndarray:
    """``n`` Bloch vectors, uniform in the ball (volume) or on the sphere."""
    measure = Measure.parse(measure)
    g = rng.standard_normal((n, 3))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    if measure is Measure.UNIFORM_BALL:
        g *= np.cbrt(rng.random(n))[:, None]
    return g


def _shard_sizes(samples: int) -> list[int]:
    full, rest = divmod(samples, SHARD_SIZE)
    return [SHARD_SIZE] * full + ([rest] if rest else [])


def _shard_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


@dataclass
class _Moments:
    """Count, mean and sum of squared deviations of several columns."""

    n: int
    mean: np.ndarray
    m2: np.ndarray

    @classmethod
    def of(cls, values: np.ndarray) -> "_Moments":
        mean = values.mean(axis=0)
        return cls(len(values), mean, ((values - mean) ** 2).sum(axis=0))

    def merge(self, other: "_Moments") -> "_Moments":
        n = self.n + other.n
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.n / n)
        m2 = self.m2 + other.m2 + delta**2 * (self.n * other.n / n)
        return _Moments(n, mean, m2)

    @property
    def std_error(self) -> np.ndarray:
        if self.n < 2:
            return np.zeros_like(self.mean)
        return np.sqrt(self.m2 / (self.n - 1) / self.n)


def _moments(column_fn, samples: int, measure: Measure, seed: int, workers: int) -> _Moments:
    """Merge per-shard moments of ``column_fn(states)`` (shape ``(n, k)``) in shard order."""
    if samples < 1:
        raise ValueError("samples must be at least 1")
    sizes = _shard_sizes(samples)

    def shard(i):
        return _Moments.of(column_fn(sample_states(sizes[i], measure, _shard_rng(seed, i))))

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(shard, range(len(sizes))))
    else:
        parts = [shard(i) for i in range(len(sizes))]
    total = parts[0]
    for p in parts[1:]:
        total = total.merge(p)
    return total


def _distances(channels: Sequence[AffineChannel], truth: AffineChannel, states: np.ndarray) -> np.ndarray:
    ref = apply(truth, states)
    return np.stack([np.linalg.norm(apply(c, states) - ref, axis=1) for c in channels], axis=1)


def average_distance(
    a: AffineChannel,
    b: AffineChannel,
    samples: int = DEFAULT_SAMPLES,
    measure: Measure | str = Measure.UNIFORM_BALL,
    seed: int = 0,
    workers: int = 1,
) -> DistanceEstimate:
    measure = Measure.parse(measure)
    mom = _moments(lambda s: _distances([a], b, s), samples, measure, seed, workers)
    return DistanceEstimate(float(mom.mean[0]), float(mom.std_error[0]), samples, measure, seed)


def image_mean_distance(
    ch: AffineChannel,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    workers: int = 1,
) -> DistanceEstimate:
    """Integral of ``|r|`` over the image of the ball, divided by the ball volume.

    Substituting ``r = E s + t`` turns it into ``|det E|`` times the
    input-measure mean of ``|E s + t|``, so it vanishes for maps that
    squash the ball to a plane, line or point.
    """
    det = abs(float(np.linalg.det(ch.E)))
    base = average_distance(ch, AffineChannel.total_contraction(), samples, Measure.UNIFORM_BALL, seed, workers)
    return DistanceEstimate(det * base.mean, det * base.std_error, samples, Measure.UNIFORM_BALL, seed)


@dataclass(frozen=True)
class HierarchyResult:
    """Distances of successive estimates to a reference, on one shared sample set.

    ``step_std_errors[j]`` is the standard error of the paired difference
    ``d_j - d_{j+1}``; :meth:`combined_std_error` gives the unpaired
    ``sqrt(se_j^2 + se_{j+1}^2)``.
    """

    distances: tuple[DistanceEstimate, ...]
    step_std_errors: tuple[float, ...]
    monotone: bool

    @property
    def means(self) -> tuple[float, ...]:
        return tuple(d.mean for d in self.distances)

    def combined_std_error(self, j: int) -> float:
        a, b = self.distances[j], self.distances[j + 1]
        return float(np.hypot(a.std_error, b.std_error))

    def strictly_decreasing(self, n_sigma: float = 3.0) -> bool:
        return all(
            self.distances[j].mean - self.distances[j + 1].mean > n_sigma * self.combined_std_error(j)
            for j in range(len(self.distances) - 1)
        )

    def to_dict(self) -> dict:
        return {
            "distances": [d.to_dict() for d in self.distances],
            "step_std_errors": list(self.step_std_errors),
            "monotone": self.monotone,
        }


def hierarchy_check(
    estimates: Sequence[AffineChannel],
    truth: AffineChannel,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    measure: Measure | str = Measure.UNIFORM_BALL,
    workers: int = 1,
) -> HierarchyResult:
    """Common-random-number distances ``d(E_j, truth)``; monotone allows 3 combined std errors of slack."""
    estimates = list(estimates)
    if not estimates:
        raise ValueError("need at least one estimate")
    measure = Measure.parse(measure)

    def columns(states):
        d = _distances(estimates, truth, states)
        return np.concatenate([d, d[:, :-1] - d[:, 1:]], axis=1)

    mom = _moments(columns, samples, measure, seed, workers)
    k = len(estimates)
    se = mom.std_error
    dists = tuple(DistanceEstimate(float(mom.mean[j]), float(se[j]), samples, measure, seed) for j in range(k))
    steps = tuple(float(v) for v in se[k:])
    result = HierarchyResult(dists, steps, True)
    monotone = all(
        dists[j + 1].mean <= dists[j].mean + 3.0 * result.combined_std_error(j) for j in range(k - 1)
    )
    return HierarchyResult(dists, steps, monotone)


# ----------------------------------------------------------------------------
# plot data


def fibonacci_sphere(n: int) -> np.ndarray:
    """``n`` near-uniform points on the unit sphere (golden-angle spiral)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    i = np.arange(n)
    z = 1.0 - (2.0 * i + 1.0) / n
    rho = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = i * (np.pi * (3.0 - np.sqrt(5.0)))
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])


def image_cloud(ch: AffineChannel, n: int = 1000) -> np.ndarray:
    """Image of the pure-state shell under ``ch``, sampled on a Fibonacci lattice."""
    return apply(ch, fibonacci_sphere(n))
