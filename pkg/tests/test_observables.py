import cmath
import math

import numpy as np
import pytest

from globalobs.maps import AlphaFareyLine, BooleLine, OrbitPoint
from globalobs.observables import (
    AdaptedWave,
    CoboundaryObservable,
    CosWave,
    FuncObservable,
    HalfLineIndicator,
    LevelStepPeriodic,
    LevelStepSequence,
    TowerWave,
    Wave,
)
from globalobs.sequences import PartitionSequence
from globalobs.tower import TowerPoint


def test_wave_examples():
    w = Wave(0.2)
    assert w.eval_real(0.0) == 1.0
    assert abs(w.eval_real(2.5) - (-1.0)) < 1e-12
    assert abs(w.eval_real(1.25) - 1.0j) < 1e-12
    with pytest.raises(ValueError):
        Wave(0.0)


def test_wave_unit_modulus_far_out():
    w = Wave(0.2)
    for x in (1.0, 1e4, 10**8, 10**8 - 0.37):
        assert abs(abs(w.eval_real(x)) - 1.0) < 1e-12
    xs = np.array([0.0, 2.5, 1.25, 1e8])
    vals = w.eval_real_many(xs)
    assert np.abs(np.abs(vals) - 1.0).max() < 1e-12
    for x, v in zip(xs, vals):
        assert abs(v - w.eval_real(float(x))) < 1e-12


def test_cos_wave_examples():
    g = CosWave(0.2)
    assert g.eval_real(0.0) == 1.0
    assert abs(g.eval_real(1.25)) < 1e-12
    assert abs(g.eval_real(2.5) + 1.0) < 1e-12
    assert g.is_real


def test_level_step_periodic_examples():
    const = LevelStepPeriodic([5.0])
    assert const.eval_level(0) == 5.0 and const.eval_level(123) == 5.0
    assert const.limit == 5.0
    pm = LevelStepPeriodic([-1.0, 1.0])
    assert pm.limit == 0.0
    roots = LevelStepPeriodic([1.0, 1.0j, -1.0, -1.0j])
    assert roots.limit == 0.0
    assert roots.eval_level(6) == -1.0
    with pytest.raises(ValueError):
        LevelStepPeriodic([])


def test_level_step_reads_levels_not_positions(seq_half):
    system = AlphaFareyLine(seq_half)
    obs = LevelStepPeriodic([0.0, 1.0])
    assert obs.eval_point(OrbitPoint(7, 0.9), system) == 1.0
    levels = np.array([0, 1, 2, 3], dtype=np.int64)
    vals = obs.eval_block(levels, np.zeros(4), system)
    assert list(vals) == [0.0, 1.0, 0.0, 1.0]
    with pytest.raises(TypeError):
        obs.eval_point(1.0, BooleLine())


def test_level_step_sequence():
    alpha = (math.sqrt(5.0) - 1.0) / 2.0
    quasi = LevelStepSequence(lambda k: cmath.exp(2j * math.pi * alpha * k), 0.0)
    # Cesaro window bound from the geometric sum
    bound = 2.0 / abs(1.0 - cmath.exp(2j * math.pi * alpha))
    for j in (0, 3, 57):
        for N in (8, 64, 512):
            s = sum(quasi.eval_level(k) for k in range(j, j + N))
            assert abs(s) <= bound + 1e-9
    const = LevelStepSequence(lambda k: 1.0, 1.0)
    assert const.limit == 1.0
    alt = LevelStepSequence(lambda k: (-1.0) ** k, 0.0)
    pm = LevelStepPeriodic([1.0, -1.0])
    for k in range(10):
        assert alt.eval_level(k) == pm.eval_level(k)


def test_half_line_indicator():
    ind = HalfLineIndicator(0.0)
    assert ind.eval_real(3.0) == 1.0
    assert ind.eval_real(-3.0) == 0.0
    assert ind.eval_real(0.0) == 1.0  # boundary included, fixed convention
    assert list(ind.eval_real_many(np.array([-1.0, 0.0, 2.0]))) == [0.0, 1.0, 1.0]


def test_tower_wave():
    tw = TowerWave(lambda b: 0.5, lambda b: 0.0, delta=0.25)
    p1 = TowerPoint(base=(0.1, 0.2), level=1)
    assert abs(tw.eval_point(p1) - (-1.0)) < 1e-12
    p0 = TowerPoint(base=(0.1, 0.2), level=0)
    avg2 = (tw.eval_point(p0) + tw.eval_point(p1)) / 2.0
    assert abs(avg2) < 1e-12
    for bad in (0.0, 0.5, 0.7):
        with pytest.raises(ValueError):
            TowerWave(lambda b: 0.5, lambda b: 0.0, delta=bad)


def test_tower_wave_partial_average_bound():
    rng = np.random.default_rng(8)
    delta = 0.1
    for _ in range(50):
        om = float(rng.uniform(delta, 1.0 - delta))
        tw = TowerWave(lambda b, om=om: om, lambda b: 0.3, delta=delta)
        n0 = int(rng.integers(50, 500))
        N = int(rng.integers(2, 40))
        s = sum(tw.eval_point(TowerPoint((0.0, 0.0), n0 - k)) for k in range(N))
        bound = 2.0 / abs(1.0 - cmath.exp(-2j * math.pi * om))
        assert abs(s) <= bound + 1e-9


@pytest.fixture(scope="module")
def adapted_035():
    return AdaptedWave(0.2, PartitionSequence(0.35), wavelengths=1200)


def test_adapted_wave_starts_at_one(adapted_035):
    for j in (0, 5, 100, 700):
        x = adapted_035.bounds[j]
        assert abs(adapted_035.eval_real(float(x)) - 1.0) <= 2e-12


def test_adapted_wave_frequencies_converge(adapted_035):
    ratios = adapted_035.omegas / 0.2
    assert np.abs(ratios[200:] - 1.0).max() < 0.05


def test_adapted_wave_midpoint_riemann_sums(adapted_035):
    levels = adapted_035.levels
    for j in (10, 57, 300):
        r = int(levels[j + 1] - levels[j])
        if r < 2:
            continue
        lo = adapted_035.bounds[j]
        width = adapted_035.lengths[j] / r
        mids = lo + (np.arange(r) + 0.5) * width
        s = adapted_035.eval_real_many(mids).sum()
        assert abs(s) < 1e-9 * r


def test_adapted_wave_tail_closeness(adapted_035):
    wave = Wave(0.2)
    eps = 0.05
    K = adapted_035.tail_level_for(eps)
    seq = adapted_035.seq
    # dense sampling above level K: the two observables stay eps-close
    rng = np.random.default_rng(5)
    j0 = int(np.searchsorted(adapted_035.levels, K))
    sup = 0.0
    for j in range(j0, len(adapted_035.lengths)):
        xs = adapted_035.bounds[j] + adapted_035.lengths[j] * rng.random(40)
        sup = max(
            sup,
            np.abs(wave.eval_real_many(xs) - adapted_035.eval_real_many(xs)).max(),
        )
    assert sup < eps
    # the sampled sup shrinks when the tail starts deeper
    K2 = adapted_035.tail_level_for(eps / 4.0)
    assert K2 >= K


def test_adapted_wave_domain_and_validation(seq_half):
    with pytest.raises(ValueError):
        AdaptedWave(1.5, seq_half)
    aw = AdaptedWave(0.2, seq_half, wavelengths=16)
    with pytest.raises(ValueError):
        aw.eval_real(float(aw.bounds[-1]) + 1.0)
    with pytest.raises(ValueError):
        aw.eval_real(-0.5)


def test_unit_modulus_family(seq_half):
    xs = np.linspace(0.01, 40.0, 500)
    for obs in (Wave(0.2), AdaptedWave(0.2, seq_half, wavelengths=64)):
        take = xs[xs < obs.bounds[-1]] if isinstance(obs, AdaptedWave) else xs
        vals = obs.eval_real_many(take)
        assert np.abs(np.abs(vals) - 1.0).max() <= 2e-12


def test_coboundary_definition(seq_half):
    system = AlphaFareyLine(seq_half)
    g = CosWave(0.3)
    f = CoboundaryObservable(g, system)
    p = OrbitPoint(4, 0.2)
    expect = g.eval_point(p, system) - g.eval_point(system.step(p), system)
    assert f.eval_point(p) == expect
    assert f.sup_norm == 2.0
    assert not f.block_evaluable


def test_func_observable_batch():
    f = FuncObservable(lambda x: x * 0.0 + 2.0, limit=2.0, sup_norm=2.0,
                       fn_many=lambda xs: np.full(xs.shape, 2.0), is_real=True)
    assert f.eval_real(1.0) == 2.0
    assert list(f.eval_real_many(np.zeros(3))) == [2.0, 2.0, 2.0]
