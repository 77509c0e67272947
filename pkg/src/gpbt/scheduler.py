"""The GPBT control loop: readiness, ranking, partner selection and updates.

The scheduler is driven entirely by :meth:`GPBTScheduler.on_result`, which an
executor calls once per reported training slice.  A decision only reads the
state already recorded, so no agent ever waits for another one to report.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Union

import numpy as np

from gpbt import hyperspace as hs
from gpbt.errors import ConfigError
from gpbt.population import (
    CheckpointRef,
    Population,
    quartile_membership,
    rank_snapshot,
)
from gpbt.strategies import StrategyConfig, UpdateOutcome, apply_strategy

PAIRINGS = ("quartile_top_bottom", "random_pair")
EVENT_KINDS = ("report", "ready", "continue", "exploit_learn", "resample", "stop")


@dataclass(frozen=True)
class SchedulerConfig:
    n: int
    delta: int
    q: float = 0.25
    pairing: str = "quartile_top_bottom"
    strategy: StrategyConfig = field(default_factory=StrategyConfig)
    total_steps: Optional[int] = None
    target_score: Optional[float] = None

    def __post_init__(self):
        problems = []
        if not isinstance(self.n, int) or self.n < 2:
            problems.append(("scheduler.n", f"population size must be an integer >= 2, got {self.n!r}"))
        if not isinstance(self.delta, int) or self.delta <= 0:
            problems.append(("scheduler.delta", f"perturbation interval must be a positive integer, got {self.delta!r}"))
        if not 0 < self.q <= 0.5:
            problems.append(("scheduler.q", f"must lie in (0, 0.5], got {self.q}"))
        if self.pairing not in PAIRINGS:
            problems.append(("scheduler.pairing", f"must be one of {PAIRINGS}, got {self.pairing!r}"))
        if (self.total_steps is None) == (self.target_score is None):
            problems.append(("scheduler.stop", "exactly one of total_steps or target_score is required"))
        if self.total_steps is not None and self.total_steps <= 0:
            problems.append(("scheduler.stop.total_steps", "must be positive"))
        if problems:
            raise ConfigError(problems)


@dataclass(frozen=True)
class Continue:
    pass


@dataclass(frozen=True)
class Update:
    source: int
    outcome: UpdateOutcome
    inherit_checkpoint: Optional[CheckpointRef]


UpdateDecision = Union[Continue, Update]
CONTINUE = Continue()


@dataclass(frozen=True)
class SchedulerEvent:
    wall_order: int
    timestamp: float
    agent: int
    kind: str
    step: int
    score: Optional[float]
    hp: tuple
    source: Optional[int] = None

    def as_record(self) -> dict:
        return {
            "wall_order": self.wall_order,
            "timestamp": self.timestamp,
            "agent": self.agent,
            "kind": self.kind,
            "step": self.step,
            "score": self.score,
            "hp": list(self.hp),
            "source": self.source,
        }


class GPBTScheduler:
    """Population-based scheduler.

    ``rng_for(agent, purpose)`` returns the random stream used for an agent's
    partner selection (``"scheduler"``) and strategy draws (``"strategy"``).
    ``clock`` stamps events; the deterministic executor passes a logical clock.
    """

    def __init__(
        self,
        cfg: SchedulerConfig,
        space: hs.SearchSpace,
        population: Population,
        rng_for: Callable[[int, str], np.random.Generator],
        clock: Optional[Callable[[], float]] = None,
        updates_enabled: bool = True,
    ):
        if population.n != cfg.n:
            raise ConfigError([("scheduler.n", f"population has {population.n} agents, config says {cfg.n}")])
        self.cfg = cfg
        self.space = space
        self.population = population
        self.rng_for = rng_for
        self.clock = clock or time.monotonic
        self.updates_enabled = updates_enabled
        self.events: list[SchedulerEvent] = []
        self.updates_applied = 0

    def _emit(self, agent: int, kind: str, step: int, score=None, source=None) -> SchedulerEvent:
        state = self.population[agent]
        ev = SchedulerEvent(
            wall_order=len(self.events),
            timestamp=float(self.clock()),
            agent=agent,
            kind=kind,
            step=step,
            score=score,
            hp=tuple(hs.to_natural(self.space, state.hp)),
            source=source,
        )
        self.events.append(ev)
        return ev

    def set_checkpoint(self, agent: int, ref: CheckpointRef) -> None:
        self.population[agent].checkpoint = ref

    def on_result(self, agent: int, step: int, score: float) -> UpdateDecision:
        pop = self.population
        state = pop[agent]
        pop.record_result(agent, step, score)
        self._emit(agent, "report", step, float(score))

        if step - state.last_update_step < self.cfg.delta:
            return CONTINUE
        self._emit(agent, "ready", step, float(score))

        if not self.updates_enabled or not pop.all_reported():
            self._emit(agent, "continue", step, float(score))
            return CONTINUE

        source = self._select_source(agent)
        if source is None:
            self._emit(agent, "continue", step, float(score))
            return CONTINUE

        src = pop[source]
        outcome = apply_strategy(
            self.cfg.strategy, self.space, state.hp, state.vel, src.hp, self.rng_for(agent, "strategy")
        )
        decision = Update(source=source, outcome=outcome, inherit_checkpoint=src.checkpoint)
        state.hp = outcome.new_hp
        state.vel = outcome.new_vel
        state.checkpoint = src.checkpoint
        state.inherited_score = src.latest_score
        state.last_update_step = step
        state.generation += 1
        self.updates_applied += 1
        kind = "resample" if outcome.resampled else "exploit_learn"
        self._emit(agent, kind, step, state.latest_score, source=source)
        return decision

    def _select_source(self, agent: int) -> Optional[int]:
        pop = self.population
        rng = self.rng_for(agent, "scheduler")
        if self.cfg.pairing == "quartile_top_bottom":
            top, bottom = quartile_membership(rank_snapshot(pop), self.cfg.q)
            if agent not in bottom:
                return None
            candidates = sorted(top)
            return candidates[int(rng.integers(len(candidates)))]
        others = [i for i in range(pop.n) if i != agent]
        partner = others[int(rng.integers(len(others)))]
        if pop[partner].latest_score <= pop[agent].latest_score:
            return None
        return partner

    def mark_stopped(self, agent: int) -> None:
        state = self.population[agent]
        self._emit(agent, "stop", state.steps_trained, state.latest_score)

    def agent_done(self, agent: int) -> bool:
        if self.cfg.total_steps is None:
            return False
        return self.population[agent].steps_trained >= self.cfg.total_steps

    def is_finished(self) -> bool:
        return is_finished(self.population, self.cfg)

    def best_agent(self) -> int:
        return best_agent(self.population)


def is_finished(population: Population, cfg: SchedulerConfig) -> bool:
    if cfg.total_steps is not None:
        return all(a.steps_trained >= cfg.total_steps for a in population)
    return any(a.latest_score is not None and a.latest_score >= cfg.target_score for a in population)


def best_agent(population: Population) -> int:
    return rank_snapshot(population)[0]


def scheduler_config_from_mapping(data: Mapping, strategy: StrategyConfig) -> SchedulerConfig:
    stop = data.get("stop", {})
    return SchedulerConfig(
        n=data.get("n"),
        delta=data.get("delta"),
        q=float(data.get("q", 0.25)),
        pairing=data.get("pairing", "quartile_top_bottom"),
        strategy=strategy,
        total_steps=stop.get("total_steps"),
        target_score=stop.get("target_score"),
    )
