"""Tabular Q-learning on a fixed 5x5 maze."""

from __future__ import annotations

from collections import deque
from typing import Mapping

import numpy as np

from gpbt.errors import DeserializationError
from gpbt.trainables.base import Trainable, pack_blob, unpack_blob

LAYOUT = (
    "S....",
    ".###.",
    "...#.",
    "##.#.",
    "....G",
)
# up, down, left, right
MOVES = ((-1, 0), (1, 0), (0, -1), (0, 1))
STEP_COST = -0.01
GOAL_REWARD = 1.0
MAX_MOVES = 50
WINDOW = 10


def _find(ch: str) -> tuple[int, int]:
    for r, row in enumerate(LAYOUT):
        if ch in row:
            return r, row.index(ch)
    raise ValueError(ch)


ROWS, COLS = len(LAYOUT), len(LAYOUT[0])
N_STATES, N_ACTIONS = ROWS * COLS, len(MOVES)
START = _find("S")
GOAL = _find("G")


def state_index(pos: tuple[int, int]) -> int:
    return pos[0] * COLS + pos[1]


def transition(pos: tuple[int, int], action: int) -> tuple[tuple[int, int], float, bool]:
    """Deterministic move; walls and edges leave the agent in place."""
    r, c = pos[0] + MOVES[action][0], pos[1] + MOVES[action][1]
    if not (0 <= r < ROWS and 0 <= c < COLS) or LAYOUT[r][c] == "#":
        r, c = pos
    if (r, c) == GOAL:
        return (r, c), GOAL_REWARD + STEP_COST, True
    return (r, c), STEP_COST, False


class GridworldQ(Trainable):
    """Epsilon-greedy Q-learning; one budget unit is one episode.

    The score is the mean undiscounted return of the last 10 episodes (fewer
    if fewer have run).
    """

    kind = "gridworld_q"

    def __init__(self, rng=None):
        super().__init__(rng)
        self.q_table = np.zeros((N_STATES, N_ACTIONS))
        self.alpha = 0.5
        self.epsilon = 0.1
        self.gamma = 0.99
        self.returns: deque[float] = deque(maxlen=WINDOW)
        self.episodes = 0

    def configure(self, hyperparams: Mapping[str, float]) -> None:
        self.alpha = float(hyperparams.get("alpha", self.alpha))
        self.epsilon = float(hyperparams.get("epsilon", self.epsilon))
        self.gamma = float(hyperparams.get("gamma", self.gamma))

    def _act(self, s: int) -> int:
        if self.rng.random() < self.epsilon:
            return int(self.rng.integers(N_ACTIONS))
        row = self.q_table[s]
        best = np.flatnonzero(row == row.max())
        if best.size == 1:
            return int(best[0])
        return int(best[self.rng.integers(best.size)])

    def run_episode(self) -> float:
        pos, total = START, 0.0
        for _ in range(MAX_MOVES):
            s = state_index(pos)
            a = self._act(s)
            nxt, reward, done = transition(pos, a)
            target = reward if done else reward + self.gamma * self.q_table[state_index(nxt)].max()
            self.q_table[s, a] += self.alpha * (target - self.q_table[s, a])
            total += reward
            pos = nxt
            if done:
                break
        return total

    def score(self) -> float:
        return float(np.mean(self.returns)) if self.returns else 0.0

    def step(self, budget: int) -> tuple[int, float]:
        for _ in range(budget):
            self.returns.append(self.run_episode())
            self.episodes += 1
        return budget, self.score()

    def save(self) -> bytes:
        return pack_blob(
            self.kind,
            {"episodes": self.episodes},
            {"q_table": self.q_table, "returns": np.array(self.returns, dtype=float)},
        )

    def restore(self, blob: bytes) -> None:
        scalars, arrays = unpack_blob(blob, self.kind)
        if arrays["q_table"].shape != (N_STATES, N_ACTIONS):
            raise DeserializationError("q_table shape mismatch")
        self.q_table = arrays["q_table"].copy()
        self.returns = deque(arrays["returns"].tolist(), maxlen=WINDOW)
        self.episodes = int(scalars["episodes"])
