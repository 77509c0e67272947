from __future__ import annotations

from typing import Mapping, Optional

import numpy as np

from gpbt.errors import ConfigError
from gpbt.trainables.base import Trainable, pack_blob, unpack_blob
from gpbt.trainables.gridworld import GridworldQ
from gpbt.trainables.quadratic import SurrogateQuadratic
from gpbt.trainables.sphere import DriftingSphere

REGISTRY: dict[str, type[Trainable]] = {
    SurrogateQuadratic.kind: SurrogateQuadratic,
    DriftingSphere.kind: DriftingSphere,
    GridworldQ.kind: GridworldQ,
}


def make_trainable(kind: str, params: Optional[Mapping] = None, rng: Optional[np.random.Generator] = None) -> Trainable:
    try:
        cls = REGISTRY[kind]
    except KeyError:
        raise ConfigError([("trainable.kind", f"unknown trainable {kind!r}; known: {sorted(REGISTRY)}")]) from None
    try:
        return cls(**dict(params or {}), rng=rng)
    except TypeError as exc:
        raise ConfigError([("trainable.params", str(exc))]) from None


__all__ = [
    "DriftingSphere",
    "GridworldQ",
    "REGISTRY",
    "SurrogateQuadratic",
    "Trainable",
    "make_trainable",
    "pack_blob",
    "unpack_blob",
]
