import math

import numpy as np
import pytest

from gpbt import hyperspace as hs
from gpbt.errors import ConfigError, DomainError
from gpbt.hyperspace import DimensionSpec, SearchSpace
from gpbt.strategies import (
    StrategyConfig,
    apply_strategy,
    null_update,
    pairwise_learning_update,
    perturb_update,
)

NO_RESAMPLE = StrategyConfig(kind="pairwise_learning", resample_prob=0.0)
LINE = SearchSpace([DimensionSpec("x", 0.0, 1.0)])


def test_config_validation():
    with pytest.raises(ConfigError):
        StrategyConfig(resample_prob=1.5)
    with pytest.raises(ConfigError):
        StrategyConfig(kind="crossover")
    assert StrategyConfig().resample_prob == 0.25


def test_pl_zero_difference_zero_momentum(unit_box, rng):
    out = pairwise_learning_update([0.3, 0.7], [0.0, 0.0], [0.3, 0.7], unit_box, NO_RESAMPLE, rng)
    assert out.new_vel.tolist() == [0.0, 0.0]
    assert out.new_hp.tolist() == [0.3, 0.7]
    assert not out.resampled


def test_pl_hand_example(rng):
    out = pairwise_learning_update([0.2], [0.1], [0.6], LINE, NO_RESAMPLE, rng, r1=[0.5], r2=[0.5])
    # v = 0.5*0.1 + 0.5*(0.6-0.2) = 0.25 ; x = 0.2 + 0.25
    assert out.new_vel[0] == pytest.approx(0.25, abs=1e-12)
    assert out.new_hp[0] == pytest.approx(0.45, abs=1e-12)


def test_pl_clamp_then_velocity_correction(rng):
    out = pairwise_learning_update([0.9], [0.3], [1.0], LINE, NO_RESAMPLE, rng, r1=[1.0], r2=[1.0])
    assert out.new_hp[0] == pytest.approx(1.0, abs=1e-12)
    assert out.new_vel[0] == pytest.approx(0.1, abs=1e-12)
    assert out.new_hp[0] == 0.9 + out.new_vel[0]


def test_pl_dimension_mismatch(unit_box, rng):
    with pytest.raises(DomainError):
        pairwise_learning_update([0.1], [0.0], [0.2, 0.3], unit_box, NO_RESAMPLE, rng)


def test_pl_resample_resets_velocity(unit_box, rng):
    cfg = StrategyConfig(resample_prob=1.0)
    out = pairwise_learning_update([0.1, 0.1], [0.2, 0.2], [0.9, 0.9], unit_box, cfg, rng)
    assert out.resampled and out.new_vel.tolist() == [0.0, 0.0]
    assert unit_box.contains(out.new_hp)


def test_pl_resample_rate(unit_box):
    rng = np.random.default_rng(0)
    cfg = StrategyConfig(resample_prob=0.25)
    hits = sum(pairwise_learning_update([0.5, 0.5], [0, 0], [0.6, 0.6], unit_box, cfg, rng).resampled for _ in range(20000))
    assert abs(hits / 20000 - 0.25) < 0.015


def test_pl_per_dimension_mode(unit_box):
    rng = np.random.default_rng(1)
    cfg = StrategyConfig(resample_prob=0.5, resample_mode="dimension")
    partial = 0
    for _ in range(2000):
        out = pairwise_learning_update([0.2, 0.2], [0.1, 0.1], [0.6, 0.6], unit_box, cfg, rng)
        assert unit_box.contains(out.new_hp)
        if out.resampled:
            zero = out.new_vel == 0.0
            assert zero.any()
            partial += not zero.all()
    assert partial > 0


def test_pl_momentum_off_jumps_to_fast(mixed_space, rng):
    for _ in range(500):
        slow, fast = hs.sample(mixed_space, rng), hs.sample(mixed_space, rng)
        vel = rng.normal(size=3)
        out = pairwise_learning_update(slow, vel, fast, mixed_space, NO_RESAMPLE, rng, r1=0.0, r2=1.0)
        np.testing.assert_allclose(out.new_hp, hs.clamp(mixed_space, fast), rtol=0, atol=1e-12)


def test_pl_never_moves_against_fast_direction():
    space = SearchSpace([DimensionSpec(f"x{i}", -2.0, 3.0) for i in range(3)])
    rng = np.random.default_rng(5)
    zero = np.zeros(3)
    for _ in range(100_000 // 10):
        slow, fast = hs.sample(space, rng), hs.sample(space, rng)
        out = pairwise_learning_update(slow, zero, fast, space, NO_RESAMPLE, rng)
        lo, hi = np.minimum(slow, fast), np.maximum(slow, fast)
        assert np.all(out.new_hp >= lo) and np.all(out.new_hp <= hi)


def test_pl_eq2_identity_and_bounds_fuzz(mixed_space):
    rng = np.random.default_rng(9)
    cfg = StrategyConfig(resample_prob=0.25)
    span = mixed_space.upper - mixed_space.lower
    for _ in range(5000):
        slow, fast = hs.sample(mixed_space, rng), hs.sample(mixed_space, rng)
        vel = rng.normal(size=3) * span
        out = pairwise_learning_update(slow, vel, fast, mixed_space, cfg, rng)
        assert mixed_space.contains(out.new_hp)
        if not out.resampled:
            assert np.array_equal(out.new_hp, slow + out.new_vel)


def test_perturb_log_dim_factor_12():
    space = SearchSpace([DimensionSpec("lr", 1e-5, 1e-2, scale="log")])
    cfg = StrategyConfig(kind="perturb", resample_prob=0.0)
    seen = set()
    rng = np.random.default_rng(0)
    for _ in range(50):
        out = perturb_update(hs.to_internal(space, [1e-3]), space, cfg, rng)
        seen.add(round(hs.to_natural(space, out.new_hp)[0], 12))
    assert seen == {1.2e-3, 0.8e-3}


def test_perturb_linear_clamps_to_upper():
    space = SearchSpace([DimensionSpec("gamma", 0.9, 1.0)])
    cfg = StrategyConfig(kind="perturb", resample_prob=0.0, perturb_factors=(1.2, 1.2))
    out = perturb_update([0.99], space, cfg, np.random.default_rng(0))
    # 0.99 * 1.2 = 1.188 -> projected onto the upper bound
    assert out.new_hp[0] == 1.0 and not out.resampled


def test_perturb_factors_only_in_natural_space(mixed_space):
    cfg = StrategyConfig(kind="perturb", resample_prob=0.0)
    rng = np.random.default_rng(2)
    cont = [0, 1]
    for _ in range(2000):
        x = hs.sample(mixed_space, rng)
        out = perturb_update(x, mixed_space, cfg, rng)
        before = np.array(hs.to_natural(mixed_space, x), dtype=float)
        after = np.array(hs.to_natural(mixed_space, out.new_hp), dtype=float)
        nat_lo = np.array([d.lower for d in mixed_space.dims])
        nat_hi = np.array([d.upper for d in mixed_space.dims])
        for i in cont:
            if nat_lo[i] < after[i] < nat_hi[i]:
                ratio = after[i] / before[i]
                assert min(abs(ratio - 0.8), abs(ratio - 1.2)) < 1e-9
        assert out.new_vel.tolist() == [0.0, 0.0, 0.0]


def test_perturb_resample_prob_one_is_uniform(unit_box):
    cfg = StrategyConfig(kind="perturb", resample_prob=1.0)
    rng = np.random.default_rng(4)
    xs = np.array([perturb_update([0.5, 0.5], unit_box, cfg, rng).new_hp for _ in range(20000)])
    assert np.all(np.abs(xs.mean(axis=0) - 0.5) < 0.01)
    assert np.all(np.abs(xs.var(axis=0) - 1 / 12) < 0.005)


def test_null_update_identity():
    out = null_update([0.1, 0.2], [0.3, 0.4])
    assert out.new_hp.tolist() == [0.1, 0.2] and out.new_vel.tolist() == [0.3, 0.4]
    assert not out.resampled


def test_apply_strategy_dispatch(unit_box, rng):
    for kind in ("pairwise_learning", "perturb", "none"):
        out = apply_strategy(StrategyConfig(kind=kind), unit_box, [0.2, 0.2], [0.0, 0.0], [0.8, 0.8], rng)
        assert unit_box.contains(out.new_hp)
