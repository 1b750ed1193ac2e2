"""Power-law partition sequences t_k = k**(-beta) and the level arithmetic built on them.

Everything downstream (interval maps, digit expansions, towers) is driven by
one decreasing sequence t_k = k**(-beta) with t_1 = 1, its gaps
a_k = t_k - t_{k+1}, and its prefix sums tau_k = t_1 + ... + t_k.  This module
owns those three and the two inverse lookups:

* ``level_of(x)``   -- the k with tau_k <= x < tau_{k+1} (half-line levels)
* ``branch_of_unit(y)`` -- the m with t_{m+1} < y <= t_m (unit-interval cells)

Prefix sums are cached (append-only, grown geometrically, compensated
accumulation).  Queries beyond the cache cap are served by an Euler-Maclaurin
closed form anchored at zeta(beta), so arbitrarily deep levels stay O(1).
"""

from __future__ import annotations

import math
import threading

import mpmath
import numpy as np

__all__ = ["PartitionSequence"]

# Smallest admissible argument of branch_of_unit: below this, y**(-1/beta)
# can overflow a double for small beta.
_MIN_BRANCH_ARG = 1e-100

_EULER_GAMMA = 0.5772156649015329

_zeta_lock = threading.Lock()
_zeta_cache: dict[float, float] = {}


def _zeta_constant(beta: float) -> float:
    """zeta(beta) by analytic continuation (beta=1: Euler-Mascheroni gamma)."""
    if beta == 1.0:
        return _EULER_GAMMA
    with _zeta_lock:
        value = _zeta_cache.get(beta)
        if value is None:
            value = float(mpmath.zeta(beta))
            _zeta_cache[beta] = value
        return value


class PartitionSequence:
    """The sequence t_k = k**(-beta) with cached prefix sums and level lookups.

    Shareable across concurrent readers; cache growth is lock-protected and
    publishes a fresh array reference, so readers never see a torn state.
    Call :meth:`ensure_tau` before a parallel phase to pre-extend the cache.
    """

    def __init__(self, beta: float, cache_max: int = 1 << 21):
        if not (0.0 < beta <= 1.0):
            raise ValueError(f"beta must be in (0, 1], got {beta}")
        self.beta = float(beta)
        self.cache_max = int(cache_max)
        self._zeta_beta = _zeta_constant(self.beta)
        self._grow_lock = threading.Lock()
        # _tau[k] = tau_k; _tau[0] = 0.0
        self._tau = np.zeros(1)
        self._tau_comp = 0.0  # compensation carry for the last cached tau
        self.ensure_tau(64)

    # ------------------------------------------------------------------
    # the defining sequences

    def t(self, k: int) -> float:
        """t_k = k**(-beta), the k-th partition endpoint."""
        if k < 1:
            raise ValueError(f"t(k) needs k >= 1, got {k}")
        return k ** -self.beta

    def a(self, k: int) -> float:
        """a_k = t_k - t_{k+1}, the Lebesgue length of the k-th unit cell.

        Evaluated as t_k * (1 - (1 + 1/k)**(-beta)) via expm1/log1p, which
        stays fully accurate when the direct difference would cancel
        (a_k ~ beta * k**(-beta-1) while t_k ~ k**(-beta)).
        """
        if k < 1:
            raise ValueError(f"a(k) needs k >= 1, got {k}")
        return -(k ** -self.beta) * math.expm1(-self.beta * math.log1p(1.0 / k))

    def tau(self, k: int) -> float:
        """tau_k = sum_{j<=k} t_j; tau_0 = 0.  Cached below ``cache_max``."""
        if k < 0:
            raise ValueError(f"tau(k) needs k >= 0, got {k}")
        if k < len(self._tau):
            return float(self._tau[k])
        if k <= self.cache_max:
            self.ensure_tau(k)
            return float(self._tau[k])
        return self._tau_analytic(float(k))

    # vectorized variants used by the orbit engine ----------------------

    def t_array(self, k: np.ndarray) -> np.ndarray:
        return np.asarray(k, dtype=np.float64) ** -self.beta

    def a_array(self, k: np.ndarray) -> np.ndarray:
        kf = np.asarray(k, dtype=np.float64)
        return -(kf ** -self.beta) * np.expm1(-self.beta * np.log1p(1.0 / kf))

    def tau_array(self, k: np.ndarray) -> np.ndarray:
        k = np.asarray(k, dtype=np.int64)
        out = np.empty(k.shape, dtype=np.float64)
        hi = int(k.max(initial=0))
        if hi <= self.cache_max:
            self.ensure_tau(hi)
            np.take(self._tau, k, out=out)
            return out
        self.ensure_tau(self.cache_max)
        cached = k <= self.cache_max
        out[cached] = self._tau[k[cached]]
        deep = ~cached
        out[deep] = self._tau_analytic(k[deep].astype(np.float64))
        return out

    # ------------------------------------------------------------------
    # inverse lookups

    def level_of(self, x: float) -> int:
        """The unique k with tau_k <= x < tau_{k+1}.

        Starts from the Euler-Maclaurin inverse of tau and gallops/scans to
        the exact cell, so both shallow and very deep levels cost O(1) sums.
        """
        if not math.isfinite(x) or x < 0.0:
            raise ValueError(f"level_of needs finite x >= 0, got {x}")
        if x < 1.0:
            return 0
        k = self._level_guess(x)
        # Gallop to bracket, then tighten; tau() is monotone in k.
        step = 1
        while self.tau(k) > x:
            k = max(0, k - step)
            step *= 2
            if k == 0:
                break
        step = 1
        while self.tau(k + step) <= x:
            k += step
            step *= 2
        # invariant: tau(k) <= x < tau(k + step); shrink
        lo, hi = k, k + step
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.tau(mid) <= x:
                lo = mid
            else:
                hi = mid
        return lo

    def branch_of_unit(self, y: float) -> int:
        """The unique m with t_{m+1} < y <= t_m, for y in (0, 1]."""
        if not (0.0 < y <= 1.0):
            raise ValueError(f"branch_of_unit needs y in (0, 1], got {y}")
        if y < _MIN_BRANCH_ARG:
            raise ValueError(f"branch_of_unit argument {y} below supported range")
        m = int(y ** (-1.0 / self.beta))
        if m < 1:
            m = 1
        # +-1 correction against the defining inequalities.
        while m ** -self.beta < y:
            m -= 1
        while (m + 1) ** -self.beta >= y:
            m += 1
        return m

    def branch_of_unit_array(self, y: np.ndarray) -> np.ndarray:
        """Vectorized :meth:`branch_of_unit` (same boundary conventions)."""
        y = np.asarray(y, dtype=np.float64)
        if y.size and (y.min() <= 0.0 or y.max() > 1.0):
            raise ValueError("branch_of_unit_array needs y in (0, 1]")
        m = (y ** (-1.0 / self.beta)).astype(np.int64)
        np.maximum(m, 1, out=m)
        for _ in range(3):
            too_high = m.astype(np.float64) ** -self.beta < y
            if too_high.any():
                m[too_high] -= 1
            too_low = (m + 1).astype(np.float64) ** -self.beta >= y
            if too_low.any():
                m[too_low] += 1
            if not (too_high.any() or too_low.any()):
                return m
        # stragglers (pathological rounding): scalar fallback
        bad = (m.astype(np.float64) ** -self.beta < y) | (
            (m + 1).astype(np.float64) ** -self.beta >= y
        )
        for i in np.nonzero(bad)[0]:
            m[i] = self.branch_of_unit(float(y[i]))
        return m

    # ------------------------------------------------------------------
    # cache plumbing

    def ensure_tau(self, k: int) -> None:
        """Extend the prefix-sum cache so tau(0..k) are table lookups."""
        k = min(int(k), self.cache_max)
        if k < len(self._tau):
            return
        with self._grow_lock:
            if k < len(self._tau):
                return
            old = self._tau
            new_len = max(k + 1, 2 * len(old), 1 << 12)
            new_len = min(new_len, self.cache_max + 1)
            ks = np.arange(len(old), new_len, dtype=np.float64)
            ext = ks ** -self.beta
            # chunked compensated extension: exact carry between chunks
            new = np.empty(new_len)
            new[: len(old)] = old
            base = float(old[-1])
            comp = self._tau_comp
            pos = len(old)
            chunk = 1 << 16
            for lo in range(0, len(ext), chunk):
                seg = ext[lo : lo + chunk]
                cs = np.cumsum(seg)
                new[pos : pos + len(seg)] = (base + comp) + cs
                total = math.fsum(seg.tolist())
                fresh = base + total
                if abs(base) >= abs(total):  # Neumaier carry across chunks
                    comp += (base - fresh) + total
                else:
                    comp += (total - fresh) + base
                base = fresh
                pos += len(seg)
            self._tau_comp = comp
            self._tau = new  # atomic publish

    @property
    def tau_cache_len(self) -> int:
        return len(self._tau)

    # ------------------------------------------------------------------
    # Euler-Maclaurin closed form for deep prefix sums

    def _tau_analytic(self, k):
        """tau_k for k beyond the cache: EM expansion anchored at zeta(beta)."""
        b = self.beta
        if b == 1.0:
            return (
                np.log(k)
                + _EULER_GAMMA
                + 1.0 / (2.0 * k)
                - 1.0 / (12.0 * k**2)
                + 1.0 / (120.0 * k**4)
            )
        return (
            self._zeta_beta
            + k ** (1.0 - b) / (1.0 - b)
            + 0.5 * k**-b
            - (b / 12.0) * k ** (-b - 1.0)
            + (b * (b + 1.0) * (b + 2.0) / 720.0) * k ** (-b - 3.0)
        )

    def _level_guess(self, x: float) -> int:
        """Invert the EM expansion of tau to first order."""
        b = self.beta
        if b == 1.0:
            log_g = x - _EULER_GAMMA
        else:
            body = max((x - self._zeta_beta) * (1.0 - b), 1.0)
            log_g = math.log(body) / (1.0 - b)
        if log_g > 62.0 * math.log(2.0):
            # levels beyond 2**62 cannot be indexed by the orbit machinery
            raise ValueError(f"x={x} lies deeper than the supported level range")
        return max(int(math.exp(log_g)), 0)

    def __repr__(self) -> str:  # pragma: no cover
        return f"PartitionSequence(beta={self.beta})"
