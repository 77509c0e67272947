"""Run a population under a deterministic simulator or a thread pool.

Both regimes share one slice routine: train an agent for one report
interval, store its checkpoint, consult the scheduler, and apply the
decision.  Only the scheduler call runs under the lock; training,
serialization and restores happen outside it.
"""

from __future__ import annotations

import logging
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

from gpbt import hyperspace as hs
from gpbt.errors import ConfigError
from gpbt.population import CheckpointRef, CheckpointStore, PerfRecord, Population
from gpbt.scheduler import GPBTScheduler, SchedulerConfig, SchedulerEvent, Update
from gpbt.trainables import Trainable, make_trainable

log = logging.getLogger(__name__)

PURPOSES = {"trainable": 0, "strategy": 1, "scheduler": 2, "init": 3}
EXEC_MODES = ("sequential", "concurrent")


def derive_stream(master_seed: int, agent: int, purpose: str) -> np.random.Generator:
    """Independent generator for one (agent, purpose) pair.

    Streams come from ``SeedSequence`` spawn keys, so a stream's output never
    depends on how many draws other streams have made.
    """
    try:
        code = PURPOSES[purpose]
    except KeyError:
        raise ConfigError([("purpose", f"unknown stream purpose {purpose!r}")]) from None
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(agent), code))
    return np.random.Generator(np.random.PCG64(seq))


class SeedPlan:
    """Lazily created, cached streams keyed by (agent, purpose)."""

    def __init__(self, master_seed: int):
        self.master_seed = int(master_seed)
        self._streams: dict[tuple[int, str], np.random.Generator] = {}
        self._lock = threading.Lock()

    def stream(self, agent: int, purpose: str) -> np.random.Generator:
        key = (agent, purpose)
        with self._lock:
            if key not in self._streams:
                self._streams[key] = derive_stream(self.master_seed, agent, purpose)
            return self._streams[key]

    __call__ = stream


@dataclass(frozen=True)
class ExecMode:
    mode: str = "sequential"
    workers: int = 1
    # "logical" stamps events with the number of finished slices, "wall" with seconds
    clock: str = "logical"

    def __post_init__(self):
        problems = []
        if self.mode not in EXEC_MODES:
            problems.append(("exec.mode", f"must be one of {EXEC_MODES}, got {self.mode!r}"))
        if not isinstance(self.workers, int) or self.workers < 1:
            problems.append(("exec.workers", f"must be an integer >= 1, got {self.workers!r}"))
        if self.clock not in ("logical", "wall"):
            problems.append(("exec.clock", f"must be 'logical' or 'wall', got {self.clock!r}"))
        if problems:
            raise ConfigError(problems)


@dataclass
class RunConfig:
    """One executable cell: a single optimizer with a single master seed."""

    space: hs.SearchSpace
    scheduler: SchedulerConfig
    trainable: str
    trainable_params: Mapping = field(default_factory=dict)
    fixed_hyperparams: Mapping = field(default_factory=dict)
    seed: int = 0
    report_granularity: Optional[int] = None
    exec: ExecMode = field(default_factory=ExecMode)
    updates_enabled: bool = True
    max_steps_per_agent: int = 10**7
    checkpoint_dir: Optional[str] = None
    # test hook: wraps each freshly built trainable, e.g. to inject latency
    trainable_wrapper: Optional[Callable[[int, Trainable], Trainable]] = None

    @property
    def granularity(self) -> int:
        return self.report_granularity or self.scheduler.delta


@dataclass
class RunArtifacts:
    series: dict[int, list[PerfRecord]]
    events: list[SchedulerEvent]
    rows: list[dict]
    final_population: list[dict]
    wall_seconds: float
    clock_final: float
    updates_applied: int
    hp_names: list[str]


class _LogicalClock:
    def __init__(self):
        self.ticks = 0

    def __call__(self) -> float:
        return float(self.ticks)


class _Run:
    def __init__(self, cfg: RunConfig):
        if cfg.exec.mode == "concurrent" and cfg.exec.workers > cfg.scheduler.n:
            log.warning("%d workers for %d agents: some workers will idle", cfg.exec.workers, cfg.scheduler.n)
        self.cfg = cfg
        self.space = cfg.space
        self.seeds = SeedPlan(cfg.seed)
        n = cfg.scheduler.n
        self.population = Population(hs.sample_stratified(self.space, n, self.seeds.stream(0, "init")))
        self.logical = _LogicalClock()
        start = time.monotonic()
        clock = self.logical if cfg.exec.clock == "logical" else (lambda: time.monotonic() - start)
        self.scheduler = GPBTScheduler(
            cfg.scheduler,
            self.space,
            self.population,
            rng_for=self.seeds.stream,
            clock=clock,
            updates_enabled=cfg.updates_enabled,
        )
        self.store = CheckpointStore(cfg.checkpoint_dir)
        self.trainables: list[Trainable] = []
        for i in range(n):
            tr = make_trainable(cfg.trainable, cfg.trainable_params, rng=self.seeds.stream(i, "trainable"))
            if cfg.trainable_wrapper is not None:
                tr = cfg.trainable_wrapper(i, tr)
            tr.configure(self.hyperparams(i))
            self.trainables.append(tr)
        self.lock = threading.Condition()
        self.stopped: set[int] = set()
        self.halt = False

    def hyperparams(self, agent: int) -> dict:
        hp = dict(self.cfg.fixed_hyperparams)
        hp.update(hs.natural_dict(self.space, self.population[agent].hp))
        return hp

    def budget_left(self, agent: int) -> int:
        steps = self.population[agent].steps_trained
        cap = self.cfg.scheduler.total_steps or self.cfg.max_steps_per_agent
        return cap - steps

    def runnable(self, agent: int) -> bool:
        return not self.halt and agent not in self.stopped and self.budget_left(agent) > 0

    def train_slice(self, agent: int) -> Optional[Update]:
        """Train one slice; returns the Update still to be applied, if any."""
        tr = self.trainables[agent]
        budget = min(self.cfg.granularity, self.budget_left(agent))
        done, score = tr.step(budget)
        step = self.population[agent].steps_trained + done
        ref = self.store.put(CheckpointRef(agent, step), tr.save())
        with self.lock:
            self.scheduler.set_checkpoint(agent, ref)
            decision = self.scheduler.on_result(agent, step, score)
            self.logical.ticks += 1
            if self.budget_left(agent) <= 0:
                self.stopped.add(agent)
                self.scheduler.mark_stopped(agent)
            if not self.halt and self.scheduler.is_finished():
                self.halt = True
        return decision if isinstance(decision, Update) else None

    def apply(self, agent: int, decision: Update) -> None:
        tr = self.trainables[agent]
        tr.restore(self.store.get(decision.inherit_checkpoint))
        tr.configure(self.hyperparams(agent))

    def step_agent(self, agent: int) -> None:
        decision = self.train_slice(agent)
        if decision is not None:
            self.apply(agent, decision)

    def run_sequential(self) -> None:
        n = self.population.n
        while any(self.runnable(i) for i in range(n)):
            for i in range(n):
                if self.runnable(i):
                    self.step_agent(i)

    def run_concurrent(self, workers: int) -> None:
        n = self.population.n
        claimed: set[int] = set()
        errors: list[BaseException] = []

        def pick() -> Optional[int]:
            best = None
            for i in range(n):
                if i in claimed or not self.runnable(i):
                    continue
                if best is None or self.population[i].steps_trained < self.population[best].steps_trained:
                    best = i
            return best

        def worker() -> None:
            while True:
                with self.lock:
                    while True:
                        if errors:
                            return
                        agent = pick()
                        if agent is not None:
                            claimed.add(agent)
                            break
                        if not claimed:
                            return
                        self.lock.wait()
                try:
                    self.step_agent(agent)
                except BaseException as exc:  # surfaced after join
                    with self.lock:
                        errors.append(exc)
                        claimed.discard(agent)
                        self.lock.notify_all()
                    return
                with self.lock:
                    claimed.discard(agent)
                    self.lock.notify_all()

        threads = [threading.Thread(target=worker, name=f"gpbt-worker-{w}") for w in range(workers)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        if errors:
            raise errors[0]

    def artifacts(self, wall_seconds: float) -> RunArtifacts:
        events = list(self.scheduler.events)
        return RunArtifacts(
            series={a.id: list(a.history) for a in self.population},
            events=events,
            rows=series_rows(events, self.population),
            final_population=[
                {
                    "agent": a.id,
                    "hp": hs.natural_dict(self.space, a.hp),
                    "hp_internal": a.hp.tolist(),
                    "velocity": a.vel.tolist(),
                    "steps_trained": a.steps_trained,
                    "generation": a.generation,
                    "latest_score": a.latest_score,
                    "checkpoint": None if a.checkpoint is None else [a.checkpoint.agent, a.checkpoint.step],
                }
                for a in self.population
            ],
            wall_seconds=wall_seconds,
            clock_final=float(self.scheduler.clock()),
            updates_applied=self.scheduler.updates_applied,
            hp_names=self.space.names,
        )


DECISION_KINDS = ("continue", "exploit_learn", "resample")


def series_rows(events: list[SchedulerEvent], population: Population) -> list[dict]:
    """One row per report, tagged with the decision that followed it."""
    order = {}
    for a in population:
        for rec in a.history:
            order[(a.id, rec.step)] = rec.wall_order
    rows: list[dict] = []
    pending: dict[int, dict] = {}
    for ev in events:
        if ev.kind == "report":
            row = {
                "wall_order": order[(ev.agent, ev.step)],
                "agent": ev.agent,
                "step": ev.step,
                "score": ev.score,
                "hp": list(ev.hp),
                "event": "report",
            }
            rows.append(row)
            pending[ev.agent] = row
        elif ev.kind in DECISION_KINDS and ev.agent in pending:
            pending.pop(ev.agent)["event"] = ev.kind
    rows.sort(key=lambda r: r["wall_order"])
    return rows


def run(cfg: RunConfig) -> RunArtifacts:
    state = _Run(cfg)
    start = time.monotonic()
    if cfg.exec.mode == "sequential":
        state.run_sequential()
    else:
        state.run_concurrent(cfg.exec.workers)
    wall = time.monotonic() - start
    for agent in range(state.population.n):
        if agent not in state.stopped:
            state.stopped.add(agent)
            state.scheduler.mark_stopped(agent)
    return state.artifacts(wall)
