from __future__ import annotations

from typing import Mapping, Optional

import numpy as np

from gpbt.trainables.base import Trainable, pack_blob, unpack_blob


class DriftingSphere(Trainable):
    """Noisy negative squared distance to a centre moving along ``A sin(w t + phi)``.

    The natural hyperparameter vector is the point being scored, taken in the
    order the hyperparameters are passed to :meth:`configure`.  ``noise_sigma``
    defaults to 10% of the centre's squared-distance range ``d * (2A)^2``.
    """

    kind = "drifting_sphere"

    def __init__(
        self,
        d: int = 2,
        amplitude: float = 1.0,
        omega: float = 0.01,
        phase=None,
        noise_sigma: Optional[float] = None,
        rng=None,
    ):
        super().__init__(rng)
        self.d = int(d)
        self.amplitude = float(amplitude)
        self.omega = float(omega)
        if phase is None:
            phase = np.linspace(0.0, np.pi, self.d, endpoint=False)
        self.phase = np.broadcast_to(np.asarray(phase, dtype=float), (self.d,)).copy()
        if noise_sigma is None:
            noise_sigma = 0.1 * self.d * (2 * self.amplitude) ** 2
        self.noise_sigma = float(noise_sigma)
        self.t = 0
        self.x = np.zeros(self.d)

    def center(self, t: Optional[int] = None) -> np.ndarray:
        t = self.t if t is None else t
        return self.amplitude * np.sin(self.omega * t + self.phase)

    def configure(self, hyperparams: Mapping[str, float]) -> None:
        x = np.array(list(hyperparams.values()), dtype=float)
        if x.shape != (self.d,):
            raise ValueError(f"drifting sphere expects {self.d} hyperparameters, got {x.size}")
        self.x = x

    def step(self, budget: int) -> tuple[int, float]:
        self.t += budget
        score = -float(np.sum((self.x - self.center()) ** 2))
        if self.noise_sigma > 0:
            score += float(self.rng.normal(0.0, self.noise_sigma))
        return budget, score

    def save(self) -> bytes:
        return pack_blob(self.kind, {"t": self.t}, {})

    def restore(self, blob: bytes) -> None:
        scalars, _ = unpack_blob(blob, self.kind)
        self.t = int(scalars["t"])
