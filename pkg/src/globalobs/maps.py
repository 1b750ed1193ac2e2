"""The concrete Lebesgue- or density-preserving maps used throughout.

Four families:

* Boole's transformation x - 1/x on the real line,
* the Farey map on [0,1] and its conjugate ``|ln(e^x - 1)|`` on the half-line,
* the piecewise-linear interval map built from a power-law partition
  (``alpha_farey_unit``),
* its half-line conjugate, iterated in level-offset coordinates.

A point of the half-line conjugate living in level k is stored as
``OrbitPoint(level=k, offset=u)`` with real coordinate ``tau_k + u * t_{k+1}``.
The descent branch maps (k, u) -> (k-1, u): the relative offset is invariant,
so long orbits are cancellation-free and O(1) per step; real coordinates are
materialized only when an observable needs them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Optional

import numpy as np

from .sequences import PartitionSequence

__all__ = [
    "SingularPointError",
    "PoleError",
    "FixedPointError",
    "OrbitPoint",
    "MapDescriptor",
    "boole_step",
    "farey_unit",
    "farey_line",
    "alpha_farey_unit",
    "alpha_farey_line_step",
    "to_real",
    "from_real",
    "phi_unit_to_line",
    "phi_orbit_point",
    "BooleLine",
    "FareyUnit",
    "FareyLine",
    "AlphaFareyUnit",
    "AlphaFareyLine",
]

# Descent levels are clamped here so block arrays stay inside exact int64/f64
# range; an excursion this deep outlives any feasible orbit length anyway.
_LEVEL_CAP = 1 << 53

# Above this the asymptotic branch of |ln(e^x - 1)| agrees with the direct
# formula to full precision (e^-30 ~ 1e-13); far below overflow at ~709.
_FAREY_LINE_SWITCH = 30.0


class SingularPointError(ValueError):
    """An orbit landed on a measure-zero singular point (pole / fixed point)."""

    def __init__(self, message: str, step: Optional[int] = None):
        super().__init__(message)
        self.step = step


class PoleError(SingularPointError):
    """Hit a pole of the map (Boole at x = 0)."""


class FixedPointError(SingularPointError):
    """Hit a flagged fixed point (origin of the half-line conjugates)."""


class OrbitPoint(NamedTuple):
    """Point of the half-line conjugate: real coordinate tau_k + u * t_{k+1}."""

    level: int
    offset: float


# ----------------------------------------------------------------------
# plain map formulas


def boole_step(x: float) -> float:
    """Boole's transformation x - 1/x (preserves Lebesgue on R)."""
    if x == 0.0:
        raise PoleError("Boole's transformation has a pole at x = 0")
    if not math.isfinite(x):
        raise ValueError(f"boole_step needs finite x, got {x}")
    return x - 1.0 / x


def farey_unit(x: float) -> float:
    """The Farey map on [0, 1]: x/(1-x) on [0, 1/2], (1-x)/x on (1/2, 1]."""
    if not (0.0 <= x <= 1.0):
        raise ValueError(f"farey_unit needs x in [0, 1], got {x}")
    if x <= 0.5:
        return x / (1.0 - x)
    return (1.0 - x) / x


def farey_line(x: float) -> float:
    """The Farey map transported to the half-line: |ln(e^x - 1)|.

    Two regimes keep the absolute error within a few ulp: expm1 below the
    switch point, and the identity ln(e^x - 1) = x + log1p(-e^-x) above it
    (which never overflows).
    """
    if not (x > 0.0) or not math.isfinite(x):
        raise ValueError(f"farey_line needs finite x > 0, got {x}")
    if x <= _FAREY_LINE_SWITCH:
        return abs(math.log(math.expm1(x)))
    return x + math.log1p(-math.exp(-x))


def alpha_farey_unit(x: float, seq: PartitionSequence) -> float:
    """The piecewise-linear interval map of the partition: cell m -> cell m-1.

    (1-x)/a_1 on the rightmost cell, the affine climb on every other cell,
    and 0 at the fixed point x = 0.
    """
    if not (0.0 <= x <= 1.0):
        raise ValueError(f"alpha_farey_unit needs x in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    m = seq.branch_of_unit(x)
    if m == 1:
        return (1.0 - x) / seq.a(1)
    return seq.a(m - 1) * (x - seq.t(m + 1)) / seq.a(m) + seq.t(m)


def alpha_farey_line_step(p: OrbitPoint, seq: PartitionSequence) -> OrbitPoint:
    """One step of the half-line conjugate in level-offset coordinates.

    Level k >= 1 descends to (k-1, u) exactly.  On the base level the
    represented point is x = u itself, and the branch through cell m sends it
    to level m-1 with offset (t_m - u)/a_m.
    """
    k, u = p
    if k >= 1:
        return OrbitPoint(k - 1, u)
    if u == 0.0:
        raise FixedPointError("orbit hit the flagged fixed point at the origin")
    m = seq.branch_of_unit(u)
    un = (seq.t(m) - u) / seq.a(m)
    if un >= 1.0:  # rounding guard at the cell's left edge
        un = math.nextafter(1.0, 0.0)
    return OrbitPoint(min(m - 1, _LEVEL_CAP), un)


def to_real(p: OrbitPoint, seq: PartitionSequence) -> float:
    """Materialize the real coordinate tau_k + u * t_{k+1}."""
    return seq.tau(p.level) + p.offset * seq.t(p.level + 1)


def from_real(x: float, seq: PartitionSequence) -> OrbitPoint:
    """Decompose a half-line point into (level, offset)."""
    k = seq.level_of(x)
    u = (x - seq.tau(k)) / seq.t(k + 1)
    if u < 0.0:
        u = 0.0
    elif u >= 1.0:
        u = math.nextafter(1.0, 0.0)
    return OrbitPoint(k, u)


def phi_unit_to_line(y: float, seq: PartitionSequence) -> float:
    """The conjugacy (0,1] -> [0, inf): the invariant-measure tail mass of [y, 1].

    Closed-form on the cell containing y: with m the cell index,
    tau_{m-1} + (t_m - y) * t_m / a_m.
    """
    if not (0.0 < y <= 1.0):
        raise ValueError(f"phi_unit_to_line needs y in (0, 1], got {y}")
    m = seq.branch_of_unit(y)
    return seq.tau(m - 1) + (seq.t(m) - y) * seq.t(m) / seq.a(m)


def phi_orbit_point(y: float, seq: PartitionSequence) -> OrbitPoint:
    """Same point as :func:`phi_unit_to_line` but in exact (level, offset) form."""
    if not (0.0 < y <= 1.0):
        raise ValueError(f"phi_orbit_point needs y in (0, 1], got {y}")
    m = seq.branch_of_unit(y)
    u = (seq.t(m) - y) / seq.a(m)
    if u >= 1.0:
        u = math.nextafter(1.0, 0.0)
    if u < 0.0:
        u = 0.0
    return OrbitPoint(min(m - 1, _LEVEL_CAP), u)


# ----------------------------------------------------------------------
# system objects (uniform stepping interface for the orbit engine)


class BooleLine:
    """Boole's transformation as a steppable system on plain floats."""

    def step(self, x: float) -> float:
        return boole_step(x)

    def step_many(self, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized step; returns (new_xs, pole_mask).  Poles produce NaN."""
        poles = xs == 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            out = xs - 1.0 / xs
        if poles.any():
            out = np.where(poles, np.nan, out)
        return out, poles

    @staticmethod
    def to_real(x: float) -> float:
        return x


class FareyUnit:
    """The Farey map on the unit interval."""

    def step(self, x: float) -> float:
        return farey_unit(x)

    @staticmethod
    def to_real(x: float) -> float:
        return x


class FareyLine:
    """The half-line Farey conjugate |ln(e^x - 1)|."""

    def step(self, x: float) -> float:
        return farey_line(x)

    @staticmethod
    def to_real(x: float) -> float:
        return x


class AlphaFareyUnit:
    """The interval map of a power-law partition."""

    def __init__(self, seq: PartitionSequence):
        self.seq = seq

    def step(self, x: float) -> float:
        return alpha_farey_unit(x, self.seq)

    @staticmethod
    def to_real(x: float) -> float:
        return x


class AlphaFareyLine:
    """The half-line conjugate, iterated in level-offset coordinates.

    Besides scalar stepping it exposes the orbit's block structure: a run of
    consecutive steps between base visits descends through levels
    k, k-1, ..., 0 with a frozen offset, which the orbit engine turns into
    vectorized observable evaluations.
    """

    def __init__(self, seq: PartitionSequence):
        self.seq = seq

    def step(self, p: OrbitPoint) -> OrbitPoint:
        return alpha_farey_line_step(p, self.seq)

    def to_real(self, p: OrbitPoint) -> float:
        return to_real(p, self.seq)

    def level(self, p: OrbitPoint) -> int:
        return p.level

    def point_from_real(self, x: float) -> OrbitPoint:
        return from_real(x, self.seq)

    def orbit_blocks(self, start: OrbitPoint, n: int) -> Iterator[tuple[int, float, int]]:
        """Yield (top_level, offset, length) descent runs covering n steps.

        Each run stands for the orbit points at levels top_level, top_level-1,
        ... (length of them), sharing one offset.  Raises
        :class:`FixedPointError` (with the failing step index) if the orbit
        lands exactly on the origin.
        """
        seq = self.seq
        k = int(start.level)
        u = float(start.offset)
        remaining = int(n)
        while remaining > 0:
            length = min(k + 1, remaining)
            yield k, u, length
            remaining -= length
            if remaining == 0:
                return
            if u == 0.0:
                raise FixedPointError(
                    "orbit hit the flagged fixed point at the origin",
                    step=n - remaining,
                )
            m = seq.branch_of_unit(u)
            u = (seq.t(m) - u) / seq.a(m)
            if u >= 1.0:
                u = math.nextafter(1.0, 0.0)
            k = min(m - 1, _LEVEL_CAP)

    def block_positions(self, levels: np.ndarray, offsets: np.ndarray) -> np.ndarray:
        """Real coordinates of block points: tau_k + u * t_{k+1}, vectorized."""
        seq = self.seq
        return seq.tau_array(levels) + offsets * seq.t_array(levels + 1)


_KINDS = {
    "boole": (BooleLine, False),
    "farey_unit": (FareyUnit, False),
    "farey_line": (FareyLine, False),
    "alpha_farey_unit": (AlphaFareyUnit, True),
    "alpha_farey_line": (AlphaFareyLine, True),
}


@dataclass(frozen=True)
class MapDescriptor:
    """Declarative map choice: a kind tag plus the partition it may need."""

    kind: str
    seq: Optional[PartitionSequence] = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown map kind {self.kind!r}; expected one of {sorted(_KINDS)}")
        needs_seq = _KINDS[self.kind][1]
        if needs_seq and self.seq is None:
            raise ValueError(f"map kind {self.kind!r} requires a partition sequence")

    def make(self):
        cls, needs_seq = _KINDS[self.kind]
        return cls(self.seq) if needs_seq else cls()
