"""The acceptance battery: one callable per criterion, shared by pytest and the CLI.

Each criterion runs a fixed, seeded experiment and returns a
:class:`CriterionResult`; ``run_criteria`` executes a selection and the
``verify`` subcommand prints one PASS/FAIL line per result.  Everything here
is deterministic: seeds, tolerances, and windows are pinned in the code.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence

import numpy as np

from .birkhoff import (
    CheckpointSchedule,
    hopf_ratio,
    level_offset_sampler,
    run_orbit,
    theorem1_check,
)
from .luroth import (
    digits,
    farey_digit_action,
    from_digits,
    gamma_tail_ratio,
    lemma_error_statistic,
    sample_digits,
    sum_level_masses,
)
from .maps import (
    AlphaFareyLine,
    OrbitPoint,
    alpha_farey_line_step,
    alpha_farey_unit,
    phi_orbit_point,
    phi_unit_to_line,
    to_real,
)
from .observables import (
    CoboundaryObservable,
    CosWave,
    FuncObservable,
    LevelStepPeriodic,
    LevelStepSequence,
)
from .sequences import PartitionSequence
from .stats import ks_distance_two_sample, nondegeneracy, occupation_experiment
from .tower import LevyTower, levy_ensemble_averages, matched_equivalence

__all__ = ["CriterionResult", "CRITERIA", "run_criteria", "format_result"]


@dataclass
class CriterionResult:
    index: int
    name: str
    passed: bool
    observed: str
    requirement: str
    seconds: float = 0.0


def format_result(r: CriterionResult) -> str:
    tag = "PASS" if r.passed else "FAIL"
    return (
        f"{tag}  {r.index:2d}. {r.name}: {r.observed}  "
        f"[require {r.requirement}]  ({r.seconds:.1f}s)"
    )


def _window_max(beta: float, n_max: int, lo_frac: float) -> float:
    seq = PartitionSequence(beta)
    system = AlphaFareyLine(seq)
    sched = CheckpointSchedule.figure_window(n_max, lo_frac, 1.0, 2000)
    res = run_orbit(system, CosWave(0.2), OrbitPoint(0, 0.65), sched)
    lo = int(n_max * lo_frac)
    return max(abs(a) for n, a in res if n >= lo)


def criterion_1() -> CriterionResult:
    """Small-beta regime: the wave average is already at the 1e-3 scale."""
    m = _window_max(0.35, 10**7, 0.9)
    return CriterionResult(
        1,
        "beta=0.35 wave average on [9e6, 1e7]",
        m < 5e-3,
        f"max |A_n g| = {m:.2e}",
        "< 5e-3 at every checkpoint",
    )


def criterion_2() -> CriterionResult:
    m = _window_max(0.5, 10**7, 0.9)
    return CriterionResult(
        2,
        "beta=0.50 boundary case on [9e6, 1e7]",
        m < 2e-2,
        f"max |A_n g| = {m:.2e}",
        "< 2e-2 at every checkpoint",
    )


def criterion_3() -> CriterionResult:
    """Large-beta contrast: order-bigger fluctuations must persist."""
    m = _window_max(0.98, 10**7, 0.2)
    return CriterionResult(
        3,
        "beta=0.98 contrast on [2e6, 1e7]",
        m > 0.05,
        f"max |A_n g| = {m:.3f}",
        "> 0.05 somewhere in the window",
    )


def criterion_4() -> CriterionResult:
    rep = occupation_experiment(5000, 10**5, seed=2024)
    return CriterionResult(
        4,
        "occupation fractions vs arcsine law",
        rep.ks < 0.05,
        f"KS = {rep.ks:.4f} (resampled {rep.resampled})",
        "KS < 0.05 at M=5000, n=1e5",
    )


def criterion_5() -> CriterionResult:
    seq = PartitionSequence(0.5)
    system = AlphaFareyLine(seq)
    obs = LevelStepPeriodic([1.0, 1.0j, -1.0, -1.0j])
    rep = theorem1_check(
        system, obs, 0.0, 0.0, n_steps=4, min_level=3,
        sampler=level_offset_sampler(seq, 3, span=2000), samples=200, seed=9,
    )
    orbit = run_orbit(system, obs, OrbitPoint(0, 0.65), CheckpointSchedule.single(10**6))
    dev = abs(orbit[-1][1] - obs.limit)
    passed = rep.max_deviation == 0.0 and dev < 1e-2
    return CriterionResult(
        5,
        "exact averaging for 4-periodic level steps",
        passed,
        f"tail max dev = {rep.max_deviation!r}, |A_1e6 f - f*| = {dev:.2e}",
        "deviation exactly 0; orbit dev < 1e-2",
    )


def criterion_6() -> CriterionResult:
    seq = PartitionSequence(0.5)
    system = AlphaFareyLine(seq)
    rng = np.random.default_rng(606)
    a, b = float(rng.uniform(0.1, 3.0)), float(rng.random())
    g = FuncObservable(
        lambda x: math.cos(2 * math.pi * ((a * x + b) % 1.0)),
        sup_norm=1.0,
        is_real=True,
    )
    f = CoboundaryObservable(g, system)
    res = run_orbit(system, f, OrbitPoint(0, 0.65), CheckpointSchedule.geometric(10**5))
    worst = max(abs(avg) - 2.0 / n for n, avg in res)
    return CriterionResult(
        6,
        "coboundary telescoping bound",
        worst <= 1e-12,
        f"max(|A_n f| - 2/n) = {worst:.2e}",
        "<= 1e-12 at all checkpoints",
    )


def criterion_7() -> CriterionResult:
    """Conjugacy oracle: lift-of-image against step-of-lift, in real coordinates.

    Tolerance per point is max(1e-9, 4 ulp of the compared value): a uniform
    draw occasionally lands in a cell deep enough that both sides materialize
    near 1e7-1e8, where the spacing of doubles alone exceeds 1e-9, so sub-ulp
    agreement is not a meaningful float criterion there.  For the
    overwhelming majority of draws the tolerance is the strict 1e-9.
    """
    worst_excess = -math.inf
    worst_plain = 0.0
    for beta in (0.35, 0.5, 0.65, 0.98):
        seq = PartitionSequence(beta)
        rng = np.random.default_rng(70000 + int(beta * 100))
        for _ in range(10**4):
            y = float(rng.random())
            if y == 0.0:
                continue
            image = alpha_farey_unit(y, seq)
            stepped = alpha_farey_line_step(phi_orbit_point(y, seq), seq)
            rhs = to_real(stepped, seq)
            lhs = phi_unit_to_line(image, seq) if image > 0.0 else 0.0
            diff = abs(lhs - rhs)
            floor = max(1e-9, 4.0 * float(np.spacing(abs(rhs))))
            worst_excess = max(worst_excess, diff - floor)
            worst_plain = max(worst_plain, diff)
    return CriterionResult(
        7,
        "conjugacy of the interval map and its half-line lift",
        worst_excess <= 0.0,
        f"worst diff = {worst_plain:.2e}, excess over per-point floor = {worst_excess:.2e}",
        "within max(1e-9, 4 ulp of the value) at every point",
    )


def criterion_8() -> CriterionResult:
    seq = PartitionSequence(0.5)
    ks = np.arange(1, 10001, dtype=np.float64)
    branch = np.abs((ks + 1) ** -0.5 / ks**-0.5 + seq.a_array(ks) / ks**-0.5 - 1.0).max()
    rng = np.random.default_rng(808)
    y = rng.uniform(-50.0, 50.0, 10**4)
    xp = (y + np.sqrt(y * y + 4.0)) / 2.0
    xm = (y - np.sqrt(y * y + 4.0)) / 2.0
    boole = np.abs(1.0 / (1.0 + xp**-2) + 1.0 / (1.0 + xm**-2) - 1.0).max()
    passed = branch <= 1e-12 and boole <= 1e-12
    return CriterionResult(
        8,
        "measure preservation identities",
        passed,
        f"branch-sum resid = {branch:.2e}, preimage resid = {boole:.2e}",
        "both <= 1e-12",
    )


def _enumerated_mass(k: int, seq: PartitionSequence) -> float:
    """Brute-force oracle: sum of products of a_j over all compositions of k."""
    if k == 0:
        return 1.0
    total = 0.0
    stack = [(k, 1.0)]
    while stack:
        rem, w = stack.pop()
        for j in range(1, rem + 1):
            wj = w * seq.a(j)
            if j == rem:
                total += wj
            else:
                stack.append((rem - j, wj))
    return total


def criterion_9() -> CriterionResult:
    seq = PartitionSequence(0.5)
    u = sum_level_masses(20000, seq)
    enum_err = max(abs(u[k] - _enumerated_mass(k, seq)) for k in range(13))
    ratios = [gamma_tail_ratio(k, seq, float(u[k])) for k in (1000, 10000, 20000)]
    in_band = 0.9 <= ratios[-1] <= 1.1
    trend = ratios[0] < ratios[1] < ratios[2] <= 1.0 or in_band
    passed = enum_err < 1e-14 and in_band and trend
    return CriterionResult(
        9,
        "sum-level renewal masses and Gamma asymptotic",
        passed,
        f"enum err = {enum_err:.1e}, ratio(1e3,1e4,2e4) = "
        + ", ".join(f"{r:.4f}" for r in ratios),
        "enum exact to 1e-14; ratio at 2e4 in [0.9, 1.1]",
    )


def criterion_10() -> CriterionResult:
    seq = PartitionSequence(0.5)
    hits = 0
    stats = []
    for s in range(10):
        d = sample_digits(seq, np.random.default_rng(1000 + s), 10**6)
        stat = lemma_error_statistic(d, 10**6, 10**5, 0.5)
        stats.append(stat)
        hits += stat < 1e-2
    return CriterionResult(
        10,
        "digit-tail error statistic decays",
        hits >= 9,
        f"{hits}/10 seeds below 1e-2 (max {max(stats):.2e})",
        ">= 9 of 10 seeds below 1e-2",
    )


def criterion_11() -> CriterionResult:
    two = matched_equivalence(LevyTower(0.5), (0.37, 0.81), 10**5)
    third = np.exp(2j * np.pi / 3)
    lt3 = LevyTower(0.5, gammas=(1.0, third, third**2), c_lengths=(0.5, 0.25, 0.25))
    three = matched_equivalence(lt3, (0.52, 0.11), 10**5)
    passed = two < 1e-9 and three < 1e-9
    return CriterionResult(
        11,
        "tower sums equal the walk on shared symbols",
        passed,
        f"residuals {two:.2e} (two-ray), {three:.2e} (three-ray)",
        "< 1e-9 at n = 1e5",
    )


def criterion_12() -> CriterionResult:
    lt = LevyTower(0.5)
    a_n = levy_ensemble_averages(lt, 2000, 10**5, seed=42).real
    a_2n = levy_ensemble_averages(lt, 2000, 2 * 10**5, seed=43).real
    std, _ = nondegeneracy(a_n)
    ks = ks_distance_two_sample(a_n, a_2n)
    passed = std >= 0.3 and ks < 0.05
    return CriterionResult(
        12,
        "walk averages non-degenerate and scale-stable",
        passed,
        f"std = {std:.3f}, KS(A_n, A_2n) = {ks:.4f}",
        "std >= 0.3 and KS < 0.05",
    )


def criterion_13() -> CriterionResult:
    seq = PartitionSequence(0.5)
    rng = np.random.default_rng(1313)
    worst_rt = 0.0
    for _ in range(10**4):
        x = float(rng.random())
        if x == 0.0:
            continue
        worst_rt = max(worst_rt, abs(from_digits(digits(x, seq, 40), seq) - x))
    worst_cj = 0.0
    for _ in range(10**4):
        length = int(rng.integers(1, 8))
        d = [int(v) for v in rng.integers(1, 40, length)]
        lhs = from_digits(farey_digit_action(d), seq)
        rhs = alpha_farey_unit(from_digits(d, seq), seq)
        worst_cj = max(worst_cj, abs(lhs - rhs))
    passed = worst_rt < 1e-12 and worst_cj < 1e-12
    return CriterionResult(
        13,
        "digit round trips and digit-action conjugacy",
        passed,
        f"round-trip {worst_rt:.2e}, action conjugacy {worst_cj:.2e}",
        "both < 1e-12 on 1e4 samples",
    )


def criterion_14() -> CriterionResult:
    seq = PartitionSequence(0.5)
    system = AlphaFareyLine(seq)
    ind0 = LevelStepSequence(
        lambda k: 1.0 if k == 0 else 0.0, 0.0, 1.0,
        lambda ks: (ks == 0).astype(np.float64),
    )
    ind01 = LevelStepSequence(
        lambda k: 1.0 if k <= 1 else 0.0, 0.0, 1.0,
        lambda ks: (ks <= 1).astype(np.float64),
    )
    ratio = hopf_ratio(system, ind0, ind01, OrbitPoint(0, 0.65), 10**7)
    expected = 1.0 / (1.0 + 2.0**-0.5)
    diff = abs(ratio - expected)
    return CriterionResult(
        14,
        "visit-count ratio matches the length ratio",
        diff < 0.02,
        f"ratio = {ratio.real:.5f}, expected {expected:.5f}, diff {diff:.4f}",
        "within 0.02 at n = 1e7",
    )


CRITERIA: Sequence[Callable[[], CriterionResult]] = (
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
    criterion_11,
    criterion_12,
    criterion_13,
    criterion_14,
)


def run_criteria(indices: Optional[Iterable[int]] = None) -> List[CriterionResult]:
    """Run the selected criteria (1-based indices; default all), timed."""
    wanted = sorted(set(indices)) if indices is not None else range(1, len(CRITERIA) + 1)
    results = []
    for i in wanted:
        if not (1 <= i <= len(CRITERIA)):
            raise ValueError(f"no criterion {i}; have 1..{len(CRITERIA)}")
        t0 = time.perf_counter()
        r = CRITERIA[i - 1]()
        r.seconds = time.perf_counter() - t0
        results.append(r)
    return results
