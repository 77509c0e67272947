"""Per-agent state, performance history, checkpoints and ranking queries."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from gpbt.errors import ConfigError, DomainError, NumericError, PreconditionError, SequencingError


@dataclass(frozen=True)
class PerfRecord:
    step: int
    score: float
    wall_order: int


@dataclass(frozen=True, order=True)
class CheckpointRef:
    agent: int
    step: int

    @property
    def filename(self) -> str:
        return f"agent{self.agent:04d}_step{self.step:010d}.ckpt"


class CheckpointStore:
    """Write-once blob store keyed by ``CheckpointRef``.

    Blobs live in memory; when ``directory`` is given each blob is also
    written to one file per (agent, step).
    """

    def __init__(self, directory: Optional[Path] = None):
        self._blobs: dict[CheckpointRef, bytes] = {}
        self._lock = threading.Lock()
        self.directory = Path(directory) if directory is not None else None
        if self.directory is not None:
            self.directory.mkdir(parents=True, exist_ok=True)

    def put(self, ref: CheckpointRef, blob: bytes) -> CheckpointRef:
        blob = bytes(blob)
        with self._lock:
            if ref in self._blobs:
                raise SequencingError(f"checkpoint {ref} already written")
            self._blobs[ref] = blob
        if self.directory is not None:
            (self.directory / ref.filename).write_bytes(blob)
        return ref

    def get(self, ref: CheckpointRef) -> bytes:
        try:
            return self._blobs[ref]
        except KeyError:
            raise DomainError(f"unknown checkpoint {ref}") from None

    def __contains__(self, ref) -> bool:
        return ref in self._blobs

    def __len__(self) -> int:
        return len(self._blobs)


@dataclass
class AgentState:
    id: int
    hp: np.ndarray
    vel: np.ndarray
    steps_trained: int = 0
    last_update_step: int = 0
    generation: int = 0
    history: list[PerfRecord] = field(default_factory=list)
    checkpoint: Optional[CheckpointRef] = None
    # score inherited together with another agent's weights; cleared by the next report
    inherited_score: Optional[float] = None

    @property
    def latest_score(self) -> Optional[float]:
        if self.inherited_score is not None:
            return self.inherited_score
        return self.history[-1].score if self.history else None


class Population:
    """Container for ``n`` agents plus the global report counter."""

    def __init__(self, hps: Iterable[np.ndarray]):
        self.agents: list[AgentState] = []
        for i, hp in enumerate(hps):
            hp = np.array(hp, dtype=float)
            hp.flags.writeable = False
            vel = np.zeros_like(hp)
            vel.flags.writeable = False
            self.agents.append(AgentState(id=i, hp=hp, vel=vel))
        self._wall_order = 0

    def __len__(self) -> int:
        return len(self.agents)

    def __iter__(self):
        return iter(self.agents)

    def __getitem__(self, agent: int) -> AgentState:
        if not isinstance(agent, (int, np.integer)) or not 0 <= agent < len(self.agents):
            raise DomainError(f"unknown agent id {agent!r}")
        return self.agents[agent]

    @property
    def n(self) -> int:
        return len(self.agents)

    def record_result(self, agent: int, step: int, score: float) -> PerfRecord:
        state = self[agent]
        score = float(score)
        if not math.isfinite(score):
            raise NumericError(f"agent {agent}: non-finite score {score!r}")
        if state.history and step <= state.history[-1].step:
            raise SequencingError(
                f"agent {agent}: step {step} does not exceed last recorded step {state.history[-1].step}"
            )
        if step < state.steps_trained:
            raise SequencingError(f"agent {agent}: step {step} below steps_trained {state.steps_trained}")
        rec = PerfRecord(step=int(step), score=score, wall_order=self._wall_order)
        self._wall_order += 1
        state.history.append(rec)
        state.steps_trained = int(step)
        state.inherited_score = None
        return rec

    def latest_score(self, agent: int) -> Optional[float]:
        return self[agent].latest_score

    def all_reported(self) -> bool:
        return all(a.history for a in self.agents)


def rank_snapshot(population: Population) -> list[int]:
    """Agent ids sorted by latest score, best first; ties go to the lower id."""
    missing = [a.id for a in population if a.latest_score is None]
    if missing:
        raise PreconditionError(f"agents {missing} have no recorded score yet")
    return sorted((a.id for a in population), key=lambda i: (-population[i].latest_score, i))


def quartile_size(n: int, q: float) -> int:
    return max(1, math.floor(q * n))


def quartile_membership(ranked: list[int], q: float) -> tuple[set[int], set[int]]:
    if not 0 < q <= 0.5:
        raise ConfigError([("q", f"quantile fraction must be in (0, 0.5], got {q}")])
    n = len(ranked)
    if n < 2:
        raise ConfigError([("n", f"quartile selection needs at least 2 agents, got {n}")])
    k = quartile_size(n, q)
    return set(ranked[:k]), set(ranked[-k:])
