from __future__ import annotations

from typing import Mapping

import numpy as np

from gpbt.trainables.base import Trainable, pack_blob, unpack_blob

OPTIMUM = 1.2


class SurrogateQuadratic(Trainable):
    """Gradient ascent on ``1.2 - h1*t1^2 - h2*t2^2``, scored on ``1.2 - |t|^2``.

    The hyperparameters ``h1, h2`` weight the surrogate; only ``h = (1, 1)``
    follows the true objective, but copying weights from agents that made
    progress along either coordinate pays off, which is what rewards a
    hyperparameter schedule over a fixed setting.
    """

    kind = "surrogate_quadratic"

    def __init__(self, theta0=(0.9, 0.9), eta0: float = 0.01, rng=None):
        super().__init__(rng)
        self.theta = np.array(theta0, dtype=float)
        self.eta0 = float(eta0)
        self.h = np.ones(2)

    def configure(self, hyperparams: Mapping[str, float]) -> None:
        self.h = np.array([hyperparams["h1"], hyperparams["h2"]], dtype=float)

    def objective(self) -> float:
        return float(OPTIMUM - np.sum(self.theta**2))

    def step(self, budget: int) -> tuple[int, float]:
        for _ in range(budget):
            grad = -2.0 * self.h * self.theta
            self.theta = self.theta + self.eta0 * grad
        return budget, self.objective()

    def save(self) -> bytes:
        return pack_blob(self.kind, {}, {"theta": self.theta})

    def restore(self, blob: bytes) -> None:
        _, arrays = unpack_blob(blob, self.kind)
        self.theta = arrays["theta"].copy()
