"""Path distribution, drift and diffusion, and Monte Carlo checks of the
Brownian limit of ``ln T**n(x)``.

Path events are periodic sets, so their density is computed exactly. Statistics
of whole trajectories are estimated by sampling uniformly from a window of the
domain. The window should be far larger than ``dg * d**K`` for the path sums
``K`` that occur, otherwise the sample does not see the density: trajectories
started near 1e9 under 3x+1 reach the cycle at 1 within about 70 steps.
:meth:`DensitySpec.for_steps` builds such a window.

Randomness comes from :class:`random.Random` (MT19937) seeded with the caller's
seed; the sample is drawn in the calling process and only the deterministic
per-trajectory work is farmed out, so results do not depend on ``threads``.
"""
from __future__ import annotations

import csv
import io
import math
import os
import random
import sys
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .core import MapParams, residue_set_E
from .errors import DegenerateDrift, EmptySample, WindowTooSmall

__all__ = [
    "DensitySpec",
    "PartitionSpec",
    "DriftStats",
    "IncrementSample",
    "path_probability",
    "k_sum_moments",
    "drift_stats",
    "sample_domain",
    "empirical_k_distribution",
    "sample_k_sums",
    "sample_increments",
    "normal_cdf",
    "ks_statistic",
    "ks_critical",
    "empirical_drift",
    "stopping_counts",
    "stopping_density",
    "format_float",
    "increments_csv",
    "histogram_csv",
    "drift_csv",
    "stopping_csv",
    "default_threads",
]

THREADS_ENV = "DGH_THREADS"


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _pmap(func: Callable, items: Sequence, threads: Optional[int], chunksize: int = 64) -> list:
    threads = default_threads() if threads is None else threads
    if threads <= 1 or len(items) < 2:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items, chunksize=chunksize))


# ---------------------------------------------------------------- windows


@dataclass(frozen=True)
class DensitySpec:
    """Inclusive sampling window ``[window_low, window_high]``.

    The window size must be a multiple of dg so every residue class mod dg is
    equally represented; that is checked against a map in :meth:`check`.
    """

    window_low: int
    window_high: int

    def __post_init__(self):
        if self.window_low < 1 or self.window_low >= self.window_high:
            raise ValueError(f"bad window [{self.window_low}, {self.window_high}]")

    @property
    def size(self) -> int:
        return self.window_high - self.window_low + 1

    def check(self, params: MapParams) -> None:
        if self.size % params.dg:
            raise ValueError(f"window size {self.size} is not a multiple of dg={params.dg}")

    def member_count(self, params: MapParams) -> int:
        self.check(params)
        return self.size // params.dg * (params.d - 1) * (params.g - 1)

    @classmethod
    def default(cls, params: MapParams) -> "DensitySpec":
        """Start at 1e9, size 1e6 * dg."""
        low = 10**9
        return cls(low, low + 10**6 * params.dg - 1)

    @classmethod
    def for_steps(cls, params: MapParams, m: int, margin: int = 64) -> "DensitySpec":
        """A window ``[L, 2L)`` with ``L = dg * d**K`` and K well above the
        typical path sum of m steps (mean + 8 sd + ``margin``).

        Sampling uniformly from it reproduces the exact m-path distribution
        unless the sampled path sum exceeds K.
        """
        d = params.d
        mean = m * d / (d - 1)
        sd = math.sqrt(m * d) / (d - 1)
        K = math.ceil(mean + 8 * sd) + margin
        low = params.dg * d**K
        return cls(low, 2 * low - 1)


@dataclass(frozen=True)
class PartitionSpec:
    t_values: tuple[Fraction, ...]
    m: int
    m_values: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        ts = tuple(Fraction(str(t)) if isinstance(t, float) else Fraction(t) for t in self.t_values)
        object.__setattr__(self, "t_values", ts)
        if len(ts) < 2 or ts[0] != 0 or ts[-1] != 1:
            raise ValueError("partition must run from 0 to 1")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("partition must be strictly increasing")
        ms = tuple(math.floor(t * self.m) for t in ts)
        if any(b <= a for a, b in zip(ms, ms[1:])):
            raise ValueError(f"m={self.m} too small for the partition: step counts {ms}")
        object.__setattr__(self, "m_values", ms)

    @classmethod
    def parse(cls, text: str, m: int) -> "PartitionSpec":
        return cls(tuple(Fraction(s.strip()) for s in text.split(",")), m)

    @property
    def r(self) -> int:
        return len(self.t_values) - 1


# ---------------------------------------------------------------- exact laws


def path_probability(params: MapParams, path: Sequence[int]) -> Fraction:
    """Density of the integers with m-path ``path``: (d-1)**m / d**K."""
    d = params.d
    return Fraction((d - 1) ** len(path), d ** sum(path))


def k_sum_moments(params: MapParams, m: int) -> tuple[Fraction, Fraction]:
    """Mean and variance of k_1 + ... + k_m."""
    if m < 1:
        raise ValueError("m must be >= 1")
    d = params.d
    return Fraction(d * m, d - 1), Fraction(d * m, (d - 1) ** 2)


@dataclass(frozen=True)
class DriftStats:
    drift: float
    per_step_variance: float
    k_mean: Fraction
    k_variance: Fraction

    @property
    def sign(self) -> str:
        return "negative" if self.drift < 0 else "positive"


def drift_stats(params: MapParams) -> DriftStats:
    d, g = params.d, params.g
    drift = math.log(g) - d / (d - 1) * math.log(d)
    if abs(drift) <= 1e-12:
        raise DegenerateDrift(f"drift {drift} vanishes for {params}")
    return DriftStats(
        drift=drift,
        per_step_variance=d / (d - 1) ** 2 * math.log(d) ** 2,
        k_mean=Fraction(d, d - 1),
        k_variance=Fraction(d, (d - 1) ** 2),
    )


# ---------------------------------------------------------------- sampling


def _member_at(params: MapParams, spec: DensitySpec, E: list[int], j: int) -> int:
    block, slot = divmod(j, len(E))
    dg = params.dg
    low = spec.window_low
    return low + (E[slot] - low) % dg + dg * block


def sample_domain(params: MapParams, spec: DensitySpec, n: int, seed: int) -> list[int]:
    """n distinct domain members drawn uniformly from the window."""
    total = spec.member_count(params)
    if n > total:
        raise WindowTooSmall(f"window holds {total} domain members, {n} requested")
    rng = random.Random(seed)
    E = residue_set_E(params)
    if total <= sys.maxsize:
        idx = rng.sample(range(total), n)
    else:
        seen: set[int] = set()
        idx = []
        while len(idx) < n:
            j = rng.randrange(total)
            if j not in seen:
                seen.add(j)
                idx.append(j)
    return [_member_at(params, spec, E, j) for j in idx]


def _orbit(params: MapParams, marks: Sequence[int], x: int) -> tuple[list[float], list[int]]:
    """ln T**n(x) at each n in ``marks`` and the k sums between marks.

    ``marks`` starts at 0 and increases.
    """
    d, g = params.d, params.g
    logs = [math.log(x)]
    ksums = []
    n = 0
    if d == 2:
        h0 = params.h[0]
        for target in marks[1:]:
            s = 0
            for _ in range(target - n):
                y = g * x + h0
                k = (y & -y).bit_length() - 1
                x = y >> k
                s += k
            n = target
            ksums.append(s)
            logs.append(math.log(x))
        return logs, ksums
    h = params.h
    for target in marks[1:]:
        s = 0
        for _ in range(target - n):
            y = g * x
            y += h[y % d - 1]
            while True:
                q, rem = divmod(y, d)
                if rem:
                    break
                y = q
                s += 1
            x = y
        n = target
        ksums.append(s)
        logs.append(math.log(x))
    return logs, ksums


def _k_counts(params: MapParams, m: int, x: int) -> Counter:
    d, g, h = params.d, params.g, params.h
    counts: Counter = Counter()
    for _ in range(m):
        y = g * x
        y += h[y % d - 1]
        k = 0
        while y % d == 0:
            y //= d
            k += 1
        counts[k] += 1
        x = y
    return counts


def empirical_k_distribution(
    params: MapParams, m: int, sample: Sequence[int], threads: Optional[int] = None
) -> dict[int, int]:
    """Pooled counts of every k seen over m steps from each sample point."""
    total: Counter = Counter()
    for c in _pmap(partial(_k_counts, params, m), list(sample), threads):
        total.update(c)
    return dict(sorted(total.items()))


def sample_k_sums(
    params: MapParams,
    m: int,
    spec: DensitySpec,
    n: int,
    seed: int,
    threads: Optional[int] = None,
) -> list[int]:
    """k_1 + ... + k_m for n sampled starting points."""
    xs = sample_domain(params, spec, n, seed)
    runs = _pmap(partial(_orbit, params, (0, m)), xs, threads)
    return [ks[0] for _logs, ks in runs]


@dataclass
class IncrementSample:
    """Normalized increments of ``ln T**m_i(x)`` over a partition.

    ``u[s, i]`` is the log form for sample s and increment i; ``u_ksum`` is
    the same quantity computed from the k sums alone. With
    ``normalization="increment"`` each coordinate is scaled by its own step
    count and is asymptotically standard normal; ``"total"`` scales every
    coordinate by the full m, so coordinate i has variance (m_{i+1}-m_i)/m.
    """

    u: np.ndarray
    u_ksum: np.ndarray
    partition: PartitionSpec
    rng_seed: int
    normalization: str
    start_points: list[int] = field(repr=False, default_factory=list)

    @property
    def sample_count(self) -> int:
        return self.u.shape[0]

    @property
    def max_form_gap(self) -> float:
        return float(np.max(np.abs(self.u - self.u_ksum)))

    def ks(self) -> list[float]:
        return [ks_statistic(self.u[:, i]) for i in range(self.u.shape[1])]

    def correlations(self) -> np.ndarray:
        return np.corrcoef(self.u, rowvar=False)


def sample_increments(
    params: MapParams,
    partition: PartitionSpec,
    spec: DensitySpec,
    n: int,
    seed: int,
    threads: Optional[int] = None,
    normalization: str = "increment",
) -> IncrementSample:
    if normalization not in ("increment", "total"):
        raise ValueError(f"unknown normalization {normalization!r}")
    d = params.d
    stats = drift_stats(params)
    xs = sample_domain(params, spec, n, seed)
    runs = _pmap(partial(_orbit, params, partition.m_values), xs, threads)
    logs = np.array([r[0] for r in runs])
    ksums = np.array([r[1] for r in runs], dtype=float)
    steps = np.diff(np.array(partition.m_values, dtype=float))
    scale_steps = steps if normalization == "increment" else np.full_like(steps, partition.m)
    unit = d / (d - 1) ** 2
    ln_d = math.log(d)
    denom = np.sqrt(unit * scale_steps) * ln_d
    u = (np.diff(logs, axis=1) - steps * stats.drift) / denom
    u_ksum = (steps * d / (d - 1) - ksums) * ln_d / denom
    return IncrementSample(u, u_ksum, partition, seed, normalization, xs)


_SQRT2 = math.sqrt(2.0)


def normal_cdf(x: float) -> float:
    """Standard normal CDF via the libm complementary error function."""
    return 0.5 * math.erfc(-x / _SQRT2)


def ks_statistic(samples: Iterable[float]) -> float:
    """Kolmogorov-Smirnov distance between the sample and N(0, 1)."""
    xs = np.sort(np.asarray(list(samples), dtype=float))
    n = xs.size
    if n == 0:
        raise EmptySample("ks_statistic needs at least one sample")
    cdf = np.array([normal_cdf(v) for v in xs])
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - cdf), np.max(cdf - (i - 1) / n)))


def ks_critical(n: int, alpha: float = 0.01) -> float:
    """Asymptotic KS critical value; only alpha in {0.05, 0.01} tabulated."""
    c = {0.05: 1.36, 0.01: 1.63}[alpha]
    return c / math.sqrt(n)


def empirical_drift(
    params: MapParams,
    m: int,
    spec: DensitySpec,
    n: int,
    seed: int,
    threads: Optional[int] = None,
) -> float:
    """Mean of (ln T**m(x) - ln x) / m over n sampled x."""
    xs = sample_domain(params, spec, n, seed)
    runs = _pmap(partial(_orbit, params, (0, m)), xs, threads)
    return math.fsum((logs[1] - logs[0]) / m for logs, _ks in runs) / n


# ---------------------------------------------------------------- stopping times


def _count_stops(params: MapParams, cap: int, block: tuple[int, int]) -> tuple[int, int]:
    lo, hi = block
    d, g, h = params.d, params.g, params.h
    stopped = total = 0
    for x in range(lo, hi + 1):
        if x % d == 0 or x % g == 0:
            continue
        total += 1
        y = x
        if d == 2:
            h0 = h[0]
            for _ in range(cap):
                y = g * y + h0
                y >>= (y & -y).bit_length() - 1
                if y < x:
                    stopped += 1
                    break
        else:
            for _ in range(cap):
                y = g * y
                y += h[y % d - 1]
                while y % d == 0:
                    y //= d
                if y < x:
                    stopped += 1
                    break
    return stopped, total


def stopping_counts(
    params: MapParams, bound: int, cap: int, threads: Optional[int] = None, block: int = 20000
) -> tuple[int, int]:
    """(members of [1, bound] stopping within cap steps, all members)."""
    blocks = [(lo, min(bound, lo + block - 1)) for lo in range(1, bound + 1, block)]
    parts = _pmap(partial(_count_stops, params, cap), blocks, threads, chunksize=1)
    return sum(p[0] for p in parts), sum(p[1] for p in parts)


def stopping_density(params: MapParams, bound: int, cap: int, threads: Optional[int] = None) -> float:
    if bound < params.dg:
        raise ValueError(f"bound must be at least dg={params.dg}")
    stopped, total = stopping_counts(params, bound, cap, threads)
    return stopped / total


# ---------------------------------------------------------------- CSV


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def _csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_float(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def increments_csv(sample: IncrementSample) -> str:
    rows = ((s, i, float(sample.u[s, i])) for s in range(sample.u.shape[0]) for i in range(sample.u.shape[1]))
    return _csv(("sample_id", "i", "u_i"), rows)


def histogram_csv(params: MapParams, counts: dict[int, int]) -> str:
    total = sum(counts.values())
    d = params.d
    rows = ((k, c, float(Fraction(total * (d - 1), d**k))) for k, c in sorted(counts.items()))
    return _csv(("k", "count", "expected"), rows)


def drift_csv(rows: Iterable[tuple[int, int, float, float]]) -> str:
    return _csv(
        ("m", "n", "empirical", "theoretical", "abs_err"),
        ((m, n, emp, theo, abs(emp - theo)) for m, n, emp, theo in rows),
    )


def stopping_csv(rows: Iterable[tuple[int, int, float]]) -> str:
    return _csv(("bound", "cap", "fraction"), rows)
