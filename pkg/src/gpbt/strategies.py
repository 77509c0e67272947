"""Hyperparameter update strategies applied to a ready, underperforming agent.

* ``pairwise_learning`` -- momentum update toward a better agent (GPBT-PL).
* ``perturb`` -- PBT's explore step: scale by 0.8/1.2 or resample.
* ``none`` -- hyperparameters never change (random search).

All arithmetic is done in internal coordinates of a :class:`SearchSpace`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from gpbt import hyperspace as hs
from gpbt.errors import ConfigError, DomainError

STRATEGY_KINDS = ("pairwise_learning", "perturb", "none")
RESAMPLE_MODES = ("vector", "dimension")


@dataclass(frozen=True)
class StrategyConfig:
    kind: str = "pairwise_learning"
    resample_prob: float = 0.25
    # natural-unit multipliers; log dims turn them into additive log10 shifts
    perturb_factors: tuple[float, float] = (0.8, 1.2)
    # "vector": one resample draw per update; "dimension": one per component
    resample_mode: str = "vector"

    def __post_init__(self):
        problems = []
        if self.kind not in STRATEGY_KINDS:
            problems.append(("strategy.kind", f"must be one of {STRATEGY_KINDS}, got {self.kind!r}"))
        if not 0.0 <= self.resample_prob <= 1.0:
            problems.append(("strategy.resample_prob", f"must lie in [0, 1], got {self.resample_prob}"))
        if len(self.perturb_factors) != 2 or any(f <= 0 for f in self.perturb_factors):
            problems.append(("strategy.perturb_factors", "must be two positive reals"))
        if self.resample_mode not in RESAMPLE_MODES:
            problems.append(("strategy.resample_mode", f"must be one of {RESAMPLE_MODES}"))
        if problems:
            raise ConfigError(problems)

    @classmethod
    def from_mapping(cls, data: Mapping) -> StrategyConfig:
        kw = dict(data)
        if "perturb_factors" in kw:
            kw["perturb_factors"] = tuple(float(f) for f in kw["perturb_factors"])
        return cls(**kw)


@dataclass(frozen=True)
class UpdateOutcome:
    new_hp: np.ndarray
    new_vel: np.ndarray
    resampled: bool


def _settle(space: hs.SearchSpace, start: np.ndarray, target: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(hp, vel)`` with ``hp == start + vel`` exactly and ``hp`` in bounds.

    ``target`` is already clamped; the floating-point difference ``target -
    start`` can re-add to a value one ulp outside the box, so such components
    are nudged toward zero displacement until they land inside.
    """
    vel = target - start
    hp = start + vel
    for _ in range(64):
        bad = (hp < space.lower) | (hp > space.upper)
        if not bad.any():
            break
        vel = np.where(bad, np.nextafter(vel, 0.0), vel)
        hp = start + vel
    else:  # pragma: no cover - would need a pathological box
        raise ArithmeticError("could not settle hyperparameter vector inside bounds")
    return hp, vel


def _freeze(*arrays):
    for a in arrays:
        a.flags.writeable = False
    return arrays


def pairwise_learning_update(
    slow_hp,
    slow_vel,
    fast_hp,
    space: hs.SearchSpace,
    cfg: StrategyConfig,
    rng: np.random.Generator,
    *,
    r1: Optional[np.ndarray] = None,
    r2: Optional[np.ndarray] = None,
) -> UpdateOutcome:
    """Move the slow learner toward the fast learner with momentum.

    ``v' = r1 * v + r2 * (x_fast - x_slow)`` and ``x' = x_slow + v'``, with
    ``r1, r2 ~ U[0, 1]^d`` drawn fresh unless injected.  Results leaving the
    box are clamped and the velocity is reset to the displacement actually
    taken, so ``new_hp == slow_hp + new_vel`` holds exactly.
    """
    xs = space.check_shape(slow_hp, "slow hp")
    vs = space.check_shape(slow_vel, "slow velocity")
    xf = space.check_shape(fast_hp, "fast hp")
    d = space.d

    if cfg.resample_mode == "vector":
        if rng.random() < cfg.resample_prob:
            return UpdateOutcome(hs.sample(space, rng), hs.zeros(space), True)
        mask = np.zeros(d, dtype=bool)
    else:
        mask = rng.random(d) < cfg.resample_prob

    r1 = rng.random(d) if r1 is None else np.broadcast_to(np.asarray(r1, dtype=float), (d,))
    r2 = rng.random(d) if r2 is None else np.broadcast_to(np.asarray(r2, dtype=float), (d,))

    raw_vel = r1 * vs + r2 * (xf - xs)
    raw_hp = xs + raw_vel
    if np.all((raw_hp >= space.lower) & (raw_hp <= space.upper)):
        new_hp, new_vel = raw_hp, raw_vel
    else:
        new_hp, new_vel = _settle(space, xs, hs.clamp(space, raw_hp))

    if mask.any():
        # per-dimension resampling: the fresh component carries no momentum
        fresh = hs.sample(space, rng)
        new_hp = np.where(mask, fresh, new_hp)
        new_vel = np.where(mask, 0.0, new_vel)
    new_hp, new_vel = np.array(new_hp), np.array(new_vel)
    _freeze(new_hp, new_vel)
    return UpdateOutcome(new_hp, new_vel, bool(mask.any()))


def perturb_update(current, space: hs.SearchSpace, cfg: StrategyConfig, rng: np.random.Generator) -> UpdateOutcome:
    """PBT explore: per dimension resample, or scale the natural value.

    The scale factor is drawn uniformly from ``cfg.perturb_factors``.  Log
    dimensions shift by ``log10(factor)``; linear dimensions multiply.
    """
    x = space.check_shape(current, "hp")
    out = np.array(x, dtype=float)
    resampled = False
    for i, dim in enumerate(space.dims):
        lo, hi = space.lower[i], space.upper[i]
        if rng.random() < cfg.resample_prob:
            out[i] = lo + rng.random() * (hi - lo)
            resampled = True
            continue
        factor = cfg.perturb_factors[int(rng.integers(2))]
        if dim.scale == "log":
            out[i] = x[i] + math.log10(factor)
        else:
            out[i] = x[i] * factor
    new_hp = hs.clamp(space, out)
    return UpdateOutcome(new_hp, hs.zeros(space), resampled)


def null_update(current, vel=None) -> UpdateOutcome:
    hp = np.array(current, dtype=float)
    v = np.zeros_like(hp) if vel is None else np.array(vel, dtype=float)
    _freeze(hp, v)
    return UpdateOutcome(hp, v, False)


def apply_strategy(
    cfg: StrategyConfig,
    space: hs.SearchSpace,
    slow_hp,
    slow_vel,
    fast_hp,
    rng: np.random.Generator,
) -> UpdateOutcome:
    if cfg.kind == "pairwise_learning":
        return pairwise_learning_update(slow_hp, slow_vel, fast_hp, space, cfg, rng)
    if cfg.kind == "perturb":
        return perturb_update(fast_hp, space, cfg, rng)
    if cfg.kind == "none":
        return null_update(slow_hp, slow_vel)
    raise DomainError(f"unknown strategy kind {cfg.kind!r}")
