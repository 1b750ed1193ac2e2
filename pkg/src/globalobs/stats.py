"""Empirical-distribution tools for the occupation-time and walk experiments."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Sequence, Tuple

import numpy as np

from . import birkhoff
from .maps import BooleLine
from .observables import HalfLineIndicator

__all__ = [
    "EmpiricalDistribution",
    "arcsine_cdf",
    "ks_distance",
    "ks_distance_two_sample",
    "UniformIntervalSampler",
    "occupation_experiment",
    "OccupationReport",
    "extrema_tracker",
    "nondegeneracy",
]


@dataclass(frozen=True)
class EmpiricalDistribution:
    """A sorted real sample; sufficient for sup-distance work."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size < 1:
            raise ValueError("need a non-empty 1-d sample")
        object.__setattr__(self, "values", np.sort(v))

    @property
    def size(self) -> int:
        return int(self.values.size)

    def cdf(self, x: float) -> float:
        return float(np.searchsorted(self.values, x, side="right")) / self.size


def arcsine_cdf(t):
    """(2/pi) arcsin sqrt(t) on [0, 1] -- the occupation-fraction limit law."""
    arr = np.asarray(t, dtype=np.float64)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError("arcsine CDF argument must lie in [0, 1]")
    out = (2.0 / math.pi) * np.arcsin(np.sqrt(arr))
    return float(out) if np.isscalar(t) or arr.ndim == 0 else out


def ks_distance(emp: EmpiricalDistribution, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """sup_x |F_emp(x) - F(x)| via the two-sided step evaluation at samples."""
    v = emp.values
    m = emp.size
    ref = np.asarray(cdf(v), dtype=np.float64)
    grid = np.arange(m, dtype=np.float64)
    upper = np.abs((grid + 1.0) / m - ref)
    lower = np.abs(ref - grid / m)
    return float(max(upper.max(), lower.max()))


def ks_distance_two_sample(a: np.ndarray, b: np.ndarray) -> float:
    """sup distance between two empirical CDFs (for scale-stability checks)."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    both = np.concatenate([a, b])
    fa = np.searchsorted(a, both, side="right") / a.size
    fb = np.searchsorted(b, both, side="right") / b.size
    return float(np.abs(fa - fb).max())


class UniformIntervalSampler:
    """Uniform draws from [lo, hi); supports per-orbit and whole-ensemble use."""

    def __init__(self, lo: float, hi: float):
        if not hi > lo:
            raise ValueError("need hi > lo")
        self.lo = float(lo)
        self.hi = float(hi)

    def __call__(self, rng: np.random.Generator) -> float:
        return float(rng.uniform(self.lo, self.hi))

    def many(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.uniform(self.lo, self.hi, size)


@dataclass
class OccupationReport:
    """Outcome of the occupation-fraction experiment against the arcsine law."""

    ks: float
    ensemble: int
    n: int
    seed: int
    resampled: int
    values: np.ndarray = field(repr=False)
    initial_law: str = "uniform on [-1, 1] (a Lebesgue-absolutely-continuous choice)"


def occupation_experiment(ensemble: int, n: int, seed: int) -> OccupationReport:
    """Fraction of time on the right half-line under the x - 1/x map.

    Draws ``ensemble`` initial points uniformly from [-1, 1], averages the
    half-line indicator over n steps per orbit (whole-ensemble vectorized
    stepping), and returns the sup distance to the arcsine law.  Orbits that
    hit the pole at 0 are resampled from follow-up seeds and counted.
    """
    if ensemble < 1 or n < 1:
        raise ValueError("need ensemble >= 1 and n >= 1")
    system = BooleLine()
    obs = HalfLineIndicator(0.0)
    sampler = UniformIntervalSampler(-1.0, 1.0)
    values: List[float] = []
    resampled = 0
    attempt = 0
    want = ensemble
    while want > 0:
        result = birkhoff.ensemble_averages(
            system, obs, sampler, n, want, seed + 1000003 * attempt
        )
        ok = result.ok_values.real
        values.extend(ok.tolist())
        resampled += len(result.failures)
        want = ensemble - len(values)
        attempt += 1
        if attempt > 16:
            raise RuntimeError("pole resampling failed to converge")
    arr = np.array(values[:ensemble])
    ks = ks_distance(EmpiricalDistribution(arr), arcsine_cdf)
    return OccupationReport(
        ks=ks, ensemble=ensemble, n=n, seed=seed, resampled=resampled, values=arr
    )


def extrema_tracker(series: Sequence[complex]) -> Tuple[float, float]:
    """Running min and max of a real checkpoint series (final values)."""
    arr = np.asarray(series)
    if arr.size == 0:
        raise ValueError("series must be non-empty")
    real = arr.real if np.iscomplexobj(arr) else arr
    return float(real.min()), float(real.max())


def nondegeneracy(values: Sequence[float]) -> Tuple[float, float]:
    """(sample std, interquartile range); std uses the M/(M-1) normalization."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size < 2:
        raise ValueError("need at least two values")
    std = float(arr.std(ddof=1))
    q1, q3 = np.percentile(arr, [25.0, 75.0])
    return std, float(q3 - q1)
