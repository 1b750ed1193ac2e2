"""Kakutani towers, and the tower whose Birkhoff sums are a Levy walk.

A tower stacks a base system under a height function: points are
(base, level), the map descends one level per step and applies the base map
on hitting level 0, re-entering at the height of the image point.

The walk tower has base [0,1) x [0,1) with two independent piecewise-linear
full-branch Markov maps: the first coordinate's cell lengths decay like
i^(-beta-1) (normalized by zeta(beta+1)) and set the height, the second
coordinate's cells pick a unit-modulus direction.  Summing the direction
observable along the tower orbit reproduces, excursion for excursion, a
persistent random walk with heavy-tailed inertial segments; the module keeps
both computations so each can check the other.

Cell boundaries of the infinite partition are never tabulated beyond a small
prefix: prefix sums are Hurwitz-zeta tails, evaluated exactly for small
indices and by Euler-Maclaurin beyond, so arbitrarily deep cells cost O(1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.special import zeta as _hurwitz_zeta

from .birkhoff import BirkhoffAccumulator

__all__ = [
    "TowerPoint",
    "TowerSystem",
    "tower_step",
    "PiecewiseLinearMarkovMap",
    "LevyTower",
    "RadialLevyTower",
    "WalkState",
    "levy_tower_orbit",
    "walk_position",
    "walk_oracle",
    "matched_equivalence",
    "scaled_process",
    "levy_ensemble_averages",
]

_ZETA_TABLE = 4096
_CELL_CAP = 1 << 62


class TowerPoint(NamedTuple):
    """A point (base, level) of a tower; valid when level <= height(base)."""

    base: object
    level: int


@dataclass(frozen=True)
class TowerSystem:
    """Generic tower over a base map with an integer height function."""

    base_map: Callable[[object], object]
    height: Callable[[object], int]

    def step(self, p: TowerPoint) -> TowerPoint:
        return tower_step(p, self)

    def level(self, p: TowerPoint) -> int:
        return p.level

    def contains(self, p: TowerPoint) -> bool:
        return 0 <= p.level <= self.height(p.base)


def tower_step(p: TowerPoint, system: TowerSystem) -> TowerPoint:
    """Descend one level, or apply the base map and jump to the image height."""
    if p.level >= 1:
        return TowerPoint(p.base, p.level - 1)
    x = system.base_map(p.base)
    return TowerPoint(x, system.height(x))


class PiecewiseLinearMarkovMap:
    """Full-branched increasing piecewise-linear map of a finite partition.

    Cell i = [s_i, s_{i+1}) maps affinely onto [0, 1).  Lengths must be
    positive and sum to 1 within 1e-12 (the boundary array is then pinned to
    end exactly at 1).
    """

    def __init__(self, lengths: Sequence[float]):
        lengths = np.asarray(lengths, dtype=np.float64)
        if lengths.ndim != 1 or lengths.size == 0:
            raise ValueError("need a 1-d, non-empty array of cell lengths")
        if np.any(lengths <= 0.0):
            raise ValueError("cell lengths must be positive")
        if abs(lengths.sum() - 1.0) > 1e-12:
            raise ValueError(f"cell lengths must sum to 1, got {lengths.sum()}")
        self.lengths = lengths
        bounds = np.concatenate(([0.0], np.cumsum(lengths)))
        bounds[-1] = 1.0
        self.bounds = bounds

    def cell_of(self, y: float) -> int:
        if not (0.0 <= y < 1.0):
            raise ValueError(f"point must lie in [0, 1), got {y}")
        return int(np.searchsorted(self.bounds, y, side="right")) - 1

    def cell_of_many(self, ys: np.ndarray) -> np.ndarray:
        return np.searchsorted(self.bounds, ys, side="right") - 1

    def eval(self, y: float) -> float:
        i = self.cell_of(y)
        return (y - self.bounds[i]) / self.lengths[i]

    __call__ = eval

    def transition(self, y: float) -> Tuple[int, float]:
        """(cell of y, image of y); one lookup for callers that need both."""
        i = self.cell_of(y)
        out = (y - self.bounds[i]) / self.lengths[i]
        if out >= 1.0:
            out = math.nextafter(1.0, 0.0)
        return i, out


class WalkState(NamedTuple):
    """A walker mid-excursion: position, steps left in it, and its direction."""

    position: complex
    remaining: int
    direction: complex


class LevyTower:
    """The walk tower: power-law heights crossed with a direction partition.

    beta in (0, 1) is the tail exponent: cell i of the height coordinate has
    probability i^(-beta-1) / zeta(beta+1).  Directions come from a finite
    partition with unit-modulus values ``gammas`` (default the two-sided
    +-1 split).
    """

    def __init__(
        self,
        beta: float,
        gammas: Sequence[complex] = (-1.0 + 0.0j, 1.0 + 0.0j),
        c_lengths: Optional[Sequence[float]] = None,
    ):
        if not (0.0 < beta < 1.0):
            raise ValueError(f"tail exponent beta must be in (0, 1), got {beta}")
        self.beta = float(beta)
        self.s = 1.0 + self.beta
        gam = np.asarray(list(gammas), dtype=np.complex128)
        if gam.size == 0:
            raise ValueError("need at least one direction")
        if np.any(np.abs(np.abs(gam) - 1.0) > 1e-12):
            raise ValueError("directions must have unit modulus")
        self.gammas = gam
        if c_lengths is None:
            c_lengths = np.full(gam.size, 1.0 / gam.size)
        self.c_map = PiecewiseLinearMarkovMap(c_lengths)
        if self.c_map.lengths.size != gam.size:
            raise ValueError("one direction per cell of the direction partition")
        # Hurwitz-zeta tails zt[i-1] = zeta(s, i); zt[0] is the normalizer.
        self.zeta_norm = float(_hurwitz_zeta(self.s, 1.0))
        self._zt = _hurwitz_zeta(self.s, np.arange(1.0, _ZETA_TABLE + 2.0))
        self._neg_zt = -self._zt
        self.lumped = 0  # cells clamped at the index cap (log-only path)

    # -- the height-coordinate partition ------------------------------

    def cell_probability(self, i: int) -> float:
        return i ** (-self.s) / self.zeta_norm

    def cell_tail(self, i: int) -> float:
        """P(cell >= i) = zeta(s, i) / zeta(s)."""
        return self._hz(float(i)) / self.zeta_norm

    def _hz(self, x: float) -> float:
        if x <= _ZETA_TABLE + 1:
            return float(self._zt[int(x) - 1])
        return self._hz_em(x)

    def _hz_em(self, x):
        """Euler-Maclaurin tail of the Hurwitz zeta, for deep cells."""
        s = self.s
        return x ** (1.0 - s) / (s - 1.0) + 0.5 * x**-s + (s / 12.0) * x ** (-s - 1.0)

    def locate_cell(self, u: float) -> int:
        """The cell index i with Q(i-1) <= u < Q(i), Q the height-coordinate CDF."""
        if not (0.0 <= u < 1.0):
            raise ValueError(f"point must lie in [0, 1), got {u}")
        w = (1.0 - u) * self.zeta_norm
        if w > self._zt[_ZETA_TABLE]:
            return int(np.searchsorted(self._neg_zt, -w, side="right"))
        i = int((self.beta * w) ** (-1.0 / self.beta))
        i = max(i, _ZETA_TABLE + 1)
        while self._hz_em(i) < w:
            i -= 1
        while self._hz_em(i + 1.0) >= w:
            i += 1
            if i >= _CELL_CAP:
                self.lumped += 1
                break
        return min(i, _CELL_CAP)

    def locate_cell_many(self, us: np.ndarray) -> np.ndarray:
        w = (1.0 - us) * self.zeta_norm
        out = np.searchsorted(self._neg_zt, -w, side="right").astype(np.int64)
        deep = out > _ZETA_TABLE
        if deep.any():
            wd = w[deep]
            with np.errstate(over="ignore", divide="ignore"):
                cand = (self.beta * wd) ** (-1.0 / self.beta)
            # refine on whole numbers: the cell is an integer index
            cand = np.floor(np.minimum(np.maximum(cand, _ZETA_TABLE + 1.0), float(_CELL_CAP)))
            for _ in range(64):
                lo = self._hz_em(cand) < wd
                hi = self._hz_em(cand + 1.0) >= wd
                if not (lo.any() or hi.any()):
                    break
                cand = cand - lo + hi
            self.lumped += int((cand >= _CELL_CAP).sum())
            out[deep] = np.minimum(cand, float(_CELL_CAP)).astype(np.int64)
        return out

    def height_transition(self, u: float) -> Tuple[int, float]:
        """(cell i of u, image of u under the height-coordinate Markov map).

        The image offset is computed from zeta tails in a cancellation-aware
        form, (zeta(s,i) - (1-u) zeta(s)) / i^(-s).
        """
        i = self.locate_cell(u)
        nxt = (self._hz(float(i)) - (1.0 - u) * self.zeta_norm) / i ** (-self.s)
        if nxt >= 1.0:
            nxt = math.nextafter(1.0, 0.0)
        elif nxt < 0.0:
            nxt = 0.0
        return i, nxt

    # -- tower plumbing -------------------------------------------------

    def height(self, base: Tuple[float, float]) -> int:
        return self.locate_cell(base[0]) - 1

    def base_step(self, base: Tuple[float, float]) -> Tuple[float, float]:
        _, x1 = self.height_transition(base[0])
        _, x2 = self.c_map.transition(base[1])
        return (x1, x2)

    def tower_system(self) -> TowerSystem:
        return TowerSystem(base_map=self.base_step, height=self.height)

    def direction_for(self, x2: float) -> complex:
        return complex(self.gammas[self.c_map.cell_of(x2)])

    def base_excursions(
        self, start: Tuple[float, float]
    ) -> Iterator[Tuple[int, complex]]:
        """(inertia, direction) of successive excursions of the orbit of ``start``.

        The first yielded pair describes the excursion entered on the first
        base-map application; the value of the observable at the start point
        itself is :meth:`direction_for` of its second coordinate.
        """
        x1, x2 = start
        if not (0.0 <= x1 < 1.0 and 0.0 <= x2 < 1.0):
            raise ValueError("base point must lie in [0,1) x [0,1)")
        _, w = self.height_transition(x1)  # discard the start cell; apply the map
        _, v = self.c_map.transition(x2)
        while True:
            i, w_next = self.height_transition(w)
            j, v_next = self.c_map.transition(v)
            yield i, complex(self.gammas[j])
            w, v = w_next, v_next

    # -- i.i.d. sampling (the walk's own law) ---------------------------

    def draw_inertias(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.locate_cell_many(rng.random(size))

    def draw_directions(self, rng: np.random.Generator, size: int) -> np.ndarray:
        cells = self.c_map.cell_of_many(rng.random(size))
        return self.gammas[cells]

    def tail_sampler(self, min_level: int, span: int = 1000):
        """Sampler of tower points at levels in [min_level, min_level+span].

        The base draw is conditioned on reaching the sampled level (first
        coordinate uniform above the CDF cut), levels weighted uniformly.
        """

        def sample(rng: np.random.Generator) -> TowerPoint:
            k = int(rng.integers(min_level, min_level + span + 1))
            cut = 1.0 - self.cell_tail(k + 1)  # Q(k): P(cell <= k)
            x1 = cut + (1.0 - cut) * rng.random()
            if x1 >= 1.0:
                x1 = math.nextafter(1.0, 0.0)
            return TowerPoint((x1, rng.random()), k)

        return sample


class RadialLevyTower(LevyTower):
    """Walk tower whose direction coordinate is an i.i.d. uniform-angle shift.

    Directions are fresh uniform unit complex numbers each excursion,
    realized by generating the shift coordinates lazily from the supplied
    generator (each orbit owns one).
    """

    def __init__(self, beta: float):
        super().__init__(beta, gammas=(1.0 + 0.0j,), c_lengths=(1.0,))

    def draw_directions(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.exp(2j * math.pi * rng.random(size))


# ----------------------------------------------------------------------
# orbit-side and walk-side Birkhoff sums


def levy_tower_orbit(
    lt: LevyTower,
    start: Tuple[float, float],
    n: int,
    want_itinerary: bool = False,
):
    """Birkhoff sum of the direction observable over n tower steps from
    (start, level 0), summed term by term with compensation.

    With ``want_itinerary`` also returns the excursion list [(inertia,
    direction), ...] actually traversed (the walk's symbols).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    acc = BirkhoffAccumulator()
    itinerary: List[Tuple[int, complex]] = []
    if n == 0:
        return (acc.sum, itinerary) if want_itinerary else acc.sum
    acc.add(lt.direction_for(start[1]))  # the start point sits on the base
    steps = 1
    for i, gamma in lt.base_excursions(start):
        if steps >= n:
            break
        take = min(i, n - steps)
        itinerary.append((i, gamma))
        for _ in range(take):
            acc.add(gamma)
        steps += take
    if want_itinerary:
        return acc.sum, itinerary
    return acc.sum


def levy_trajectory(
    lt: LevyTower, start: Tuple[float, float], schedule
) -> List[Tuple[int, complex]]:
    """A_n of the direction observable at each checkpoint, along one tower orbit."""
    out: List[Tuple[int, complex]] = []
    targets = schedule.points
    ti = 0
    n_max = schedule.n_max
    acc = BirkhoffAccumulator()
    acc.add(lt.direction_for(start[1]))
    steps = 1
    if targets[0] == 1:
        out.append((1, acc.average()))
        ti = 1
    for i, gamma in lt.base_excursions(start):
        if steps >= n_max:
            break
        take = min(i, n_max - steps)
        for _ in range(take):
            acc.add(gamma)
            steps += 1
            if ti < len(targets) and targets[ti] == steps:
                out.append((steps, acc.average()))
                ti += 1
    return out


def walk_position(
    inertias: np.ndarray, directions: np.ndarray, steps: int
) -> complex:
    """Position of the unit-step walker after ``steps`` steps of the given
    excursion symbols (inertia q lasts inertias[q] steps at directions[q])."""
    if steps == 0:
        return 0j
    lens = np.minimum(np.asarray(inertias, dtype=np.int64), steps + 1)
    ct = np.cumsum(lens)
    if ct[-1] < steps:
        raise ValueError("itinerary too short for the requested step count")
    dirs = np.asarray(directions, dtype=np.complex128)
    q = int(np.searchsorted(ct, steps, side="left"))
    full = complex((lens[:q] * dirs[:q]).sum())
    used = int(ct[q - 1]) if q > 0 else 0
    return full + (steps - used) * complex(dirs[q]) if steps > used else full


def _draw_excursions(lt, rng, min_steps):
    lens_parts, dirs_parts = [], []
    total = 0
    est = max(64, int(4.0 * _expected_excursions(lt, min_steps)))
    while total < min_steps:
        lens = np.minimum(lt.draw_inertias(rng, est), min_steps + 1)
        dirs = lt.draw_directions(rng, est)
        lens_parts.append(lens)
        dirs_parts.append(dirs)
        total += int(lens.sum())
        est = max(est // 2, 64)
    return np.concatenate(lens_parts), np.concatenate(dirs_parts)


def _expected_excursions(lt, n):
    # n / E[min(inertia, n)], with the truncated mean from the zeta tail
    b = lt.beta
    mean_trunc = (n ** (1.0 - b) - 1.0) / (b * (1.0 - b) * lt.zeta_norm) + 1.0
    return n / mean_trunc + 1.0


def walk_oracle(lt: LevyTower, rng: np.random.Generator, n: int) -> complex:
    """Simulate the i.i.d. walk directly: position after n unit steps."""
    if n == 0:
        return 0j
    lens, dirs = _draw_excursions(lt, rng, n)
    return walk_position(lens, dirs, n)


def matched_equivalence(lt: LevyTower, start: Tuple[float, float], n: int) -> float:
    """|tower Birkhoff sum - walk reconstruction| on the same symbols.

    The walk side replays the tower orbit's own itinerary, so the two numbers
    are algebraically identical; the residual is pure summation rounding.
    """
    tower_sum, itinerary = levy_tower_orbit(lt, start, n, want_itinerary=True)
    if n == 0:
        return abs(tower_sum)
    lens = np.array([i for i, _ in itinerary], dtype=np.int64)
    dirs = np.array([g for _, g in itinerary], dtype=np.complex128)
    walk_sum = complex(lt.direction_for(start[1])) + walk_position(lens, dirs, n - 1)
    return abs(tower_sum - walk_sum)


def scaled_process(
    lt: LevyTower,
    ensemble: int,
    n: int,
    t_grid: Sequence[float],
    seed: int,
) -> np.ndarray:
    """Samples of the rescaled walk S_{floor(n t)} / n on a time grid.

    Returns a complex array of shape (ensemble, len(t_grid)).  Initial points
    are distributed as the base-conditioned measure; per the renewal
    structure the sum is reconstructed excursion-wise (exactly the tower
    orbit's value, grouped).  Per-orbit RNG streams come from the master seed.
    """
    t_grid = np.asarray(list(t_grid), dtype=np.float64)
    if t_grid.size == 0 or np.any(t_grid < 0.0):
        raise ValueError("need a non-empty, non-negative time grid")
    steps_grid = np.floor(n * t_grid).astype(np.int64)
    max_steps = int(steps_grid.max())
    out = np.empty((ensemble, t_grid.size), dtype=np.complex128)
    streams = np.random.SeedSequence(seed).spawn(ensemble)
    for orbit in range(ensemble):
        rng = np.random.default_rng(streams[orbit])
        gamma0 = complex(lt.draw_directions(rng, 1)[0])
        if max_steps >= 2:
            lens, dirs = _draw_excursions(lt, rng, max_steps - 1)
            ct = np.cumsum(np.minimum(lens, max_steps))
            cS = np.cumsum(lens * dirs)
        for col, m in enumerate(steps_grid):
            if m == 0:
                out[orbit, col] = 0j
                continue
            walk_steps = int(m) - 1
            if walk_steps == 0:
                out[orbit, col] = gamma0 / n
                continue
            q = int(np.searchsorted(ct, walk_steps, side="left"))
            used = int(ct[q - 1]) if q > 0 else 0
            pos = (cS[q - 1] if q > 0 else 0j) + (walk_steps - used) * dirs[q]
            out[orbit, col] = (gamma0 + pos) / n
    return out


def levy_ensemble_averages(
    lt: LevyTower, ensemble: int, n: int, seed: int
) -> np.ndarray:
    """A_n of the direction observable over an ensemble of independent orbits."""
    return scaled_process(lt, ensemble, n, [1.0], seed)[:, 0]
