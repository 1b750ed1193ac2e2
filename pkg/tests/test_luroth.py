import math

import numpy as np
import pytest

from globalobs.luroth import (
    digit_stream,
    digits,
    farey_digit_action,
    from_digits,
    gamma_tail_ratio,
    lemma_error_statistic,
    sample_digits,
    sum_level_mass,
    sum_level_masses,
)
from globalobs.maps import alpha_farey_unit
from globalobs.sequences import PartitionSequence


def test_digits_examples(seq_half):
    assert digits(seq_half.t(5), seq_half, 10) == [5]  # terminating
    assert digits(1.0, seq_half, 10) == [1]  # remainder (1-1)/a_1 = 0
    fixed = 1.0 / (1.0 + seq_half.a(1))
    assert digits(fixed, seq_half, 8) == [1] * 8
    with pytest.raises(ValueError):
        digits(0.0, seq_half, 5)
    with pytest.raises(ValueError):
        digits(0.5, seq_half, 0)


def test_from_digits_examples(seq_half):
    assert from_digits([5], seq_half) == seq_half.t(5)
    expected = seq_half.t(1) - seq_half.a(1) * seq_half.t(2)
    assert abs(from_digits([1, 2], seq_half) - expected) < 1e-16
    assert from_digits([], seq_half) == 0.0
    with pytest.raises(ValueError):
        from_digits([0, 2], seq_half)


def test_round_trip(seq_half):
    rng = np.random.default_rng(21)
    for _ in range(3000):
        x = float(rng.random())
        if x == 0.0:
            continue
        assert abs(from_digits(digits(x, seq_half, 40), seq_half) - x) < 1e-12


def test_digit_action(seq_half):
    assert farey_digit_action([3, 5]) == [2, 5]
    assert farey_digit_action([1, 7, 2]) == [7, 2]
    assert farey_digit_action([1]) == []
    assert from_digits([1], seq_half) == 1.0
    assert alpha_farey_unit(1.0, seq_half) == 0.0  # consistent with [] -> 0
    with pytest.raises(ValueError):
        farey_digit_action([])


def test_digit_action_conjugacy(seq_half):
    rng = np.random.default_rng(31)
    for _ in range(2000):
        d = [int(v) for v in rng.integers(1, 50, int(rng.integers(1, 8)))]
        lhs = from_digits(farey_digit_action(d), seq_half)
        rhs = alpha_farey_unit(from_digits(d, seq_half), seq_half)
        assert abs(lhs - rhs) < 1e-12


def test_sampler_matches_cell_law(seq_half):
    rng = np.random.default_rng(41)
    n = 10**6
    d = sample_digits(seq_half, rng, n)
    # P(digit = 1) = a_1 within 3 sigma
    p1 = seq_half.a(1)
    emp = float((d == 1).mean())
    assert abs(emp - p1) < 3.0 * math.sqrt(p1 * (1 - p1) / n)
    # P(digit >= 100) = t_100 = 0.1 exactly by construction
    tail = float((d >= 100).mean())
    p = seq_half.t(100)
    assert abs(tail - p) < 3.0 * math.sqrt(p * (1 - p) / n)


def test_sampler_stream_and_array_share_law(seq_half):
    gen = digit_stream(seq_half, np.random.default_rng(0))
    first = [next(gen) for _ in range(1000)]
    assert min(first) >= 1
    arr = sample_digits(seq_half, np.random.default_rng(0), 1000)
    assert list(arr) == first  # same draws, same inverse CDF


def test_heavy_tail_running_mean_unbounded(seq_half):
    d = sample_digits(seq_half, np.random.default_rng(51), 10**6).astype(np.float64)
    running_mean = np.cumsum(d) / np.arange(1, d.size + 1)
    assert running_mean.max() > 1e2
    assert running_mean.max() > 1e3


def test_lemma_statistic_constant_digits():
    stat = lemma_error_statistic([1] * 100, 100, 10, 0.5)
    assert abs(stat - 1.0 / 9.0) < 1e-15
    arr_stat = lemma_error_statistic(np.ones(100, dtype=np.int64), 100, 10, 0.5)
    assert abs(arr_stat - stat) < 1e-15


def test_lemma_statistic_single_huge_digit():
    # digit S^2 after partial sum S gives ratio S^(2 beta - 1) < 1 for beta < 1/2
    beta = 0.4
    S = 1000
    seq = [10] * (S // 10) + [S * S]
    stat = lemma_error_statistic(seq, len(seq), len(seq), beta)
    assert abs(stat - S ** (2 * beta - 1)) < 1e-12
    assert stat < 1.0


def test_lemma_statistic_validation():
    with pytest.raises(ValueError):
        lemma_error_statistic([1, 2, 3], 3, 1, 0.5)
    with pytest.raises(ValueError):
        lemma_error_statistic(np.ones(5, dtype=np.int64), 10, 2, 0.5)


def test_renewal_masses_small(seq_half):
    u = sum_level_masses(2, seq_half)
    assert u[0] == 1.0
    assert abs(u[1] - seq_half.a(1)) < 1e-16
    assert abs(u[2] - (seq_half.a(2) + seq_half.a(1) ** 2)) < 1e-16
    assert sum_level_mass(2, seq_half) == u[2]
    with pytest.raises(ValueError):
        sum_level_masses(-1, seq_half)


def test_renewal_recursion_residual(seq_half):
    u = sum_level_masses(400, seq_half)
    assert np.all(u > 0.0) and np.all(u <= 1.0)
    # re-check the recursion with an independent summation order
    for k in (1, 17, 123, 400):
        fresh = math.fsum(seq_half.a(j) * u[k - j] for j in range(1, k + 1))
        assert abs(fresh - u[k]) < 1e-14


def test_renewal_monte_carlo_hits():
    seq = PartitionSequence(0.5)
    u = sum_level_masses(100, seq)
    rng = np.random.default_rng(61)
    streams = 10**6
    targets = (5, 20, 100)
    hits = {k: 0 for k in targets}
    remaining = np.zeros(streams, dtype=np.int64)
    alive = np.ones(streams, dtype=bool)
    partial = np.zeros(streams, dtype=np.int64)
    while alive.any():
        idx = np.nonzero(alive)[0]
        draws = sample_digits(seq, rng, idx.size)
        partial[idx] += np.minimum(draws, 200)
        for k in targets:
            hits[k] += int((partial[idx] == k).sum())
        alive[idx] = partial[idx] < 100
    for k in targets:
        p = float(u[k])
        sigma = math.sqrt(p * (1 - p) / streams)
        assert abs(hits[k] / streams - p) < 4.0 * sigma, (k, hits[k] / streams, p)


def test_gamma_ratio_trend(seq_half):
    u = sum_level_masses(4000, seq_half)
    r1 = gamma_tail_ratio(400, seq_half, float(u[400]))
    r2 = gamma_tail_ratio(4000, seq_half, float(u[4000]))
    assert r1 < r2 <= 1.05
    assert 0.85 < r2
