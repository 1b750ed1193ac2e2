"""Digit expansions over the power-law partition, and what their sums know.

A point x in (0, 1] has an alternating-series expansion driven by repeated
cell lookups: digit = cell index of the remainder, next remainder
(t_digit - x)/a_digit.  Digits are i.i.d. with P(digit = k) = a_k under
Lebesgue, which makes three things computable:

* an exact sampler (inverse CDF is the cell lookup itself),
* the heavy-tail error statistic max_n digit_n^beta / (digit_1+...+digit_{n-1}),
* exact sum-level masses u_k = P(some digit partial sum hits k) via the
  renewal recursion u_k = sum_j a_j u_{k-j}.
"""

from __future__ import annotations

import math
from typing import Iterable, Iterator, List, Sequence

import numpy as np

from .sequences import PartitionSequence

__all__ = [
    "digits",
    "from_digits",
    "farey_digit_action",
    "digit_stream",
    "sample_digits",
    "lemma_error_statistic",
    "sum_level_mass",
    "sum_level_masses",
    "gamma_tail_ratio",
]

# Digits are clamped here in the vectorized sampler so they stay exact in
# int64; the clamp fires with probability ~1e-9 per draw at beta = 1/2.
_DIGIT_CAP = 1 << 62


def digits(x: float, seq: PartitionSequence, count: int) -> List[int]:
    """First ``count`` expansion digits of x; stops early if the expansion
    terminates (remainder exactly 0, a measure-zero set)."""
    if not (0.0 < x <= 1.0):
        raise ValueError(f"digits needs x in (0, 1], got {x}")
    if count < 1:
        raise ValueError("count must be >= 1")
    out: List[int] = []
    r = x
    for _ in range(count):
        m = seq.branch_of_unit(r)
        out.append(m)
        r = (seq.t(m) - r) / seq.a(m)
        if r <= 0.0:
            break
        if r >= 1.0:
            r = math.nextafter(1.0, 0.0)
    return out

def from_digits(d: Sequence[int], seq: PartitionSequence) -> float:
    """Evaluate the alternating series t_{d1} - a_{d1} t_{d2} + ... by a
    backward (Horner-style) recursion; the empty sequence represents 0."""
    value = 0.0
    for m in reversed(list(d)):
        if m < 1:
            raise ValueError(f"digits must be >= 1, got {m}")
        value = seq.t(m) - seq.a(m) * value
    return value


def farey_digit_action(d: Sequence[int]) -> List[int]:
    """How the interval map acts on expansions: decrement the first digit,
    or shift when it is already 1.  [1] alone maps to [] (the point 0)."""
    d = list(d)
    if not d:
        raise ValueError("digit sequence must be non-empty")
    if d[0] >= 2:
        return [d[0] - 1] + d[1:]
    return d[1:]


def digit_stream(seq: PartitionSequence, rng: np.random.Generator) -> Iterator[int]:
    """I.i.d. digits with P(digit = k) = a_k, by inverse CDF.

    P(digit >= k) = t_k exactly by construction: the uniform draw u lands in
    cell k iff t_{k+1} < u <= t_k.
    """
    while True:
        yield seq.branch_of_unit(1.0 - rng.random())


def sample_digits(seq: PartitionSequence, rng: np.random.Generator, size: int) -> np.ndarray:
    """Vectorized i.i.d. digit draws (int64, clamped at 2**62)."""
    u = 1.0 - rng.random(size)
    with np.errstate(over="ignore"):
        raw = u ** (-1.0 / seq.beta)
    big = ~(raw < float(_DIGIT_CAP))
    if big.any():
        u = u.copy()
        u[big] = seq.t(_DIGIT_CAP)  # clamp the draw itself to the cap cell
    return np.minimum(seq.branch_of_unit_array(u), _DIGIT_CAP)


def lemma_error_statistic(
    digit_data: Iterable[int] | np.ndarray,
    n_max: int,
    n_min: int,
    beta: float,
) -> float:
    """max over n in [n_min, n_max] of digit_n^beta / (digit_1 + ... + digit_{n-1}).

    Almost-sure convergence of this ratio to 0 is what lets mid-excursion
    Birkhoff averages be controlled; here it is just computed, streaming, so
    simulations can corroborate the decay.
    """
    if n_min < 2:
        raise ValueError("n_min must be >= 2 (the statistic needs a partial sum)")
    if n_max < n_min:
        raise ValueError("need n_max >= n_min")
    if isinstance(digit_data, np.ndarray):
        d = digit_data.astype(np.float64)
        if d.size < n_max:
            raise ValueError(f"need at least n_max={n_max} digits, got {d.size}")
        partial = np.cumsum(d)
        ratios = d[n_min - 1 : n_max] ** beta / partial[n_min - 2 : n_max - 1]
        return float(ratios.max())
    best = 0.0
    total = 0
    n = 0
    for n, digit in enumerate(digit_data, start=1):
        if n > n_max:
            break
        if n >= n_min:
            r = digit**beta / total
            if r > best:
                best = r
        total += digit
    if n < n_max:
        raise ValueError(f"digit stream ended at {n} < n_max={n_max}")
    return best


def sum_level_masses(k_max: int, seq: PartitionSequence) -> np.ndarray:
    """u_0..u_{k_max}: probability that some digit partial sum hits k.

    Renewal recursion u_0 = 1, u_k = sum_{j=1..k} a_j u_{k-j} (validated
    against brute-force composition enumeration in the tests).  O(k^2) time
    via BLAS dot products, O(k) space.
    """
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    a_rev = seq.a_array(np.arange(k_max, 0, -1, dtype=np.float64))  # a_k..a_1
    u = np.empty(k_max + 1)
    u[0] = 1.0
    for k in range(1, k_max + 1):
        u[k] = np.dot(a_rev[k_max - k :], u[:k])
    return u


def sum_level_mass(k: int, seq: PartitionSequence) -> float:
    """Single renewal mass u_k (recomputes the prefix; batch via
    :func:`sum_level_masses`)."""
    return float(sum_level_masses(k, seq)[k])


def gamma_tail_ratio(k: int, seq: PartitionSequence, u_k: float | None = None) -> float:
    """u_k * Gamma(2-beta) * Gamma(beta) * tau_k: tends to 1 as k grows.

    The exact renewal mass against its Gamma-function asymptotic; the
    convergence is slow (slowly-varying corrections), so acceptance checks it
    inside [0.9, 1.1] at k ~ 2e4 rather than tightly.
    """
    if u_k is None:
        u_k = sum_level_mass(k, seq)
    b = seq.beta
    return u_k * math.gamma(2.0 - b) * math.gamma(b) * seq.tau(k)
