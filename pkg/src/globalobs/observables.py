"""Bounded complex observables evaluated at real points, orbit points, or tower points.

Every observable answers three calls:

* ``eval_real(x)``          -- value at a plain real coordinate,
* ``eval_point(p, system)`` -- value at whatever point type the system steps
  (floats, level-offset points, tower points); the default materializes the
  real coordinate, level-step kinds read the level directly,
* ``eval_block(levels, offsets, system)`` -- vectorized values along a descent
  run, used by the orbit engine's fast path.

``sup_norm`` is the (finite) essential bound and ``limit`` the claimed
constant average, when the observable comes with one.
"""

from __future__ import annotations

import math
from typing import Callable, Optional, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi

__all__ = [
    "Observable",
    "Wave",
    "CosWave",
    "LevelStepPeriodic",
    "LevelStepSequence",
    "HalfLineIndicator",
    "TowerWave",
    "AdaptedWave",
    "FuncObservable",
    "CoboundaryObservable",
]


def _system_level(p, system) -> int:
    level = getattr(system, "level", None)
    if level is None:
        raise TypeError(
            f"{type(system).__name__} carries no level structure; "
            "level-step observables need a leveled system"
        )
    return level(p)


class Observable:
    """Base contract: bounded, complex-valued, with optional claimed limit."""

    sup_norm: float = math.inf
    limit: Optional[complex] = None
    is_real: bool = False
    block_evaluable: bool = True  # cleared by kinds that must be stepped per point

    def eval_real(self, x: float) -> complex:
        raise NotImplementedError

    def eval_real_many(self, xs: np.ndarray) -> np.ndarray:
        return np.array([self.eval_real(float(x)) for x in xs])

    def eval_point(self, p, system) -> complex:
        return self.eval_real(system.to_real(p))

    def eval_block(self, levels: np.ndarray, offsets: np.ndarray, system) -> np.ndarray:
        xs = system.block_positions(levels, offsets)
        return self.eval_real_many(xs)


class Wave(Observable):
    """e^{2 pi i omega x}.  The phase omega*x is reduced mod 1 before the trig
    call, keeping |value| and the phase accurate out to x ~ 1e8."""

    sup_norm = 1.0
    limit = 0.0 + 0.0j

    def __init__(self, omega: float):
        if omega == 0.0:
            raise ValueError("wave frequency must be nonzero (constants are level steps)")
        self.omega = float(omega)

    def eval_real(self, x: float) -> complex:
        ph = TWO_PI * ((self.omega * x) % 1.0)
        return complex(math.cos(ph), math.sin(ph))

    def eval_real_many(self, xs: np.ndarray) -> np.ndarray:
        ph = TWO_PI * np.mod(self.omega * xs, 1.0)
        return np.cos(ph) + 1j * np.sin(ph)


class CosWave(Observable):
    """cos(2 pi omega x) -- the real part of :class:`Wave`, plotted in the figures."""

    sup_norm = 1.0
    limit = 0.0
    is_real = True

    def __init__(self, omega: float):
        if omega == 0.0:
            raise ValueError("wave frequency must be nonzero")
        self.omega = float(omega)

    def eval_real(self, x: float) -> float:
        return math.cos(TWO_PI * ((self.omega * x) % 1.0))

    def eval_real_many(self, xs: np.ndarray) -> np.ndarray:
        return np.cos(TWO_PI * np.mod(self.omega * xs, 1.0))


class LevelStepPeriodic(Observable):
    """Step function on the level partition, N-periodic in the level index.

    Reads the level straight off the point (no inverse lookup), and its
    claimed limit is the coefficient mean.
    """

    def __init__(self, coefficients: Sequence[complex]):
        coeffs = np.asarray(list(coefficients), dtype=np.complex128)
        if coeffs.size == 0:
            raise ValueError("need at least one coefficient")
        self.coefficients = coeffs
        self.period = coeffs.size
        self.sup_norm = float(np.abs(coeffs).max())
        self.limit = complex(coeffs.sum() / coeffs.size)
        self.is_real = bool(np.all(coeffs.imag == 0.0))

    def eval_level(self, k: int) -> complex:
        return complex(self.coefficients[k % self.period])

    def eval_point(self, p, system) -> complex:
        return self.eval_level(_system_level(p, system))

    def eval_block(self, levels, offsets, system) -> np.ndarray:
        return self.coefficients[np.mod(levels, self.period)]


class LevelStepSequence(Observable):
    """Step function c_k on the level partition from an arbitrary generator.

    The claimed limit must be supplied (it is a Cesaro property of the
    sequence, not computable from finitely many terms).
    """

    def __init__(
        self,
        coefficient_fn: Callable[[int], complex],
        limit: complex,
        sup_norm: float = 1.0,
        coefficient_fn_many: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    ):
        self.coefficient_fn = coefficient_fn
        self.limit = complex(limit)
        self.sup_norm = float(sup_norm)
        self._fn_many = coefficient_fn_many

    def eval_level(self, k: int) -> complex:
        return complex(self.coefficient_fn(int(k)))

    def eval_point(self, p, system) -> complex:
        return self.eval_level(_system_level(p, system))

    def eval_block(self, levels, offsets, system) -> np.ndarray:
        if self._fn_many is not None:
            return self._fn_many(levels)
        return np.array([self.coefficient_fn(int(k)) for k in levels.tolist()])


class HalfLineIndicator(Observable):
    """Indicator of [a, inf); boundary included (fixed for reproducibility)."""

    sup_norm = 1.0
    is_real = True

    def __init__(self, a: float = 0.0):
        self.a = float(a)

    def eval_real(self, x: float) -> float:
        return 1.0 if x >= self.a else 0.0

    def eval_real_many(self, xs: np.ndarray) -> np.ndarray:
        return (xs >= self.a).astype(np.float64)


class TowerWave(Observable):
    """e^{2 pi i (omega(x) n + gamma(x))} on tower points (x, n).

    The frequency function must stay inside [delta, 1 - delta] so partial
    averages obey the geometric-series bound; delta is validated here, the
    range of ``omega_fn`` is the caller's contract.
    """

    sup_norm = 1.0
    limit = 0.0 + 0.0j
    block_evaluable = False

    def __init__(
        self,
        omega_fn: Callable[[object], float],
        gamma_fn: Callable[[object], float],
        delta: float,
    ):
        if not (0.0 < delta < 0.5):
            raise ValueError(f"delta must lie in (0, 1/2), got {delta}")
        self.omega_fn = omega_fn
        self.gamma_fn = gamma_fn
        self.delta = float(delta)

    def eval_point(self, p, system=None) -> complex:
        ph = TWO_PI * ((self.omega_fn(p.base) * p.level + self.gamma_fn(p.base)) % 1.0)
        return complex(math.cos(ph), math.sin(ph))

    def eval_real(self, x: float) -> complex:
        raise TypeError("tower waves are only defined on tower points")


class AdaptedWave(Observable):
    """The wave whose wavelengths are snapped to whole unions of levels.

    Wavelength j spans [tau_{k_j}, tau_{k_{j+1}}) where k_j is the level
    containing j/omega, and carries frequency 1/length.  Boundaries are built
    eagerly at construction (immutable afterwards); evaluation outside the
    built range is an error.  Requires 0 < omega < 1 so consecutive k_j are
    distinct.
    """

    sup_norm = 1.0
    limit = 0.0 + 0.0j

    def __init__(self, omega: float, seq, wavelengths: int = 2048):
        if not (0.0 < omega < 1.0):
            raise ValueError(f"adapted waves need 0 < omega < 1, got {omega}")
        if wavelengths < 1:
            raise ValueError("need at least one wavelength")
        self.omega = float(omega)
        self.seq = seq
        levels = np.array(
            [seq.level_of(j / self.omega) for j in range(wavelengths + 1)], dtype=np.int64
        )
        if np.any(np.diff(levels) < 1):
            raise ValueError("wavelength levels must be strictly increasing")
        self.levels = levels
        self.bounds = seq.tau_array(levels)
        self.lengths = np.diff(self.bounds)
        self.omegas = 1.0 / self.lengths

    def _index(self, x: float) -> int:
        if not (self.bounds[0] <= x < self.bounds[-1]):
            raise ValueError(
                f"x={x} outside the built wavelength range [0, {self.bounds[-1]})"
            )
        return int(np.searchsorted(self.bounds, x, side="right")) - 1

    def eval_real(self, x: float) -> complex:
        j = self._index(x)
        ph = TWO_PI * ((self.omegas[j] * (x - self.bounds[j])) % 1.0)
        return complex(math.cos(ph), math.sin(ph))

    def eval_real_many(self, xs: np.ndarray) -> np.ndarray:
        if xs.size and (xs.min() < self.bounds[0] or xs.max() >= self.bounds[-1]):
            raise ValueError("points outside the built wavelength range")
        j = np.searchsorted(self.bounds, xs, side="right") - 1
        ph = TWO_PI * np.mod(self.omegas[j] * (xs - self.bounds[j]), 1.0)
        return np.cos(ph) + 1j * np.sin(ph)

    def phase_defect(self) -> np.ndarray:
        """Per-wavelength sup bound on |wave - adapted| / (2 pi)."""
        j = np.arange(len(self.lengths))
        anchor = np.abs(self.omega * self.bounds[:-1] - j)
        stretch = np.abs(self.omega - self.omegas) * self.lengths
        return anchor + stretch

    def tail_level_for(self, eps: float) -> int:
        """Smallest built level K with sup_{x deeper than K} |wave - adapted| < eps.

        Uses the suffix maximum of the per-wavelength phase-defect bound; grows
        the construction (i.e. raise ``wavelengths``) if eps is unreachable.
        """
        bound = TWO_PI * self.phase_defect()
        suffix = np.maximum.accumulate(bound[::-1])[::-1]
        ok = np.nonzero(suffix < eps)[0]
        if ok.size == 0:
            raise ValueError(
                f"eps={eps} not reached within {len(self.lengths)} wavelengths; "
                "rebuild with more"
            )
        return int(self.levels[ok[0]])


class FuncObservable(Observable):
    """Wrap a plain function of the real coordinate as an observable."""

    def __init__(
        self,
        fn: Callable[[float], complex],
        limit: Optional[complex] = None,
        sup_norm: float = math.inf,
        fn_many: Optional[Callable[[np.ndarray], np.ndarray]] = None,
        is_real: bool = False,
    ):
        self.fn = fn
        self.limit = limit
        self.sup_norm = float(sup_norm)
        self._fn_many = fn_many
        self.is_real = is_real

    def eval_real(self, x: float) -> complex:
        return self.fn(x)

    def eval_real_many(self, xs: np.ndarray) -> np.ndarray:
        if self._fn_many is not None:
            return self._fn_many(xs)
        return super().eval_real_many(xs)


class CoboundaryObservable(Observable):
    """f = g - g o T^k for a bounded g: the telescoping-null observable.

    Evaluation recomputes the forward image through the system's own ``step``,
    so consecutive Birkhoff terms cancel to the very same floats.
    """

    limit = 0.0 + 0.0j
    block_evaluable = False  # needs the system's step, point by point

    def __init__(self, g: Observable, system, k: int = 1):
        if k < 1:
            raise ValueError("coboundary lag must be >= 1")
        self.g = g
        self.system = system
        self.k = int(k)
        self.sup_norm = 2.0 * g.sup_norm

    def eval_point(self, p, system=None) -> complex:
        q = p
        for _ in range(self.k):
            q = self.system.step(q)
        return complex(self.g.eval_point(p, self.system)) - complex(
            self.g.eval_point(q, self.system)
        )
