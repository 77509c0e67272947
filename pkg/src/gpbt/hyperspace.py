"""Hyperparameter search spaces and their internal coordinate system.

Every vector operation in the package (velocities, differences, perturbation)
happens in *internal* coordinates: logarithmic dimensions are stored as
``log10`` of the natural value, linear dimensions as-is, and integer
dimensions as unrounded reals.  Natural units are only produced when values
are handed to a trainable or written to a report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from gpbt.errors import ConfigError, DomainError, NumericError

KINDS = ("continuous", "integer")
SCALES = ("linear", "log")


@dataclass(frozen=True)
class DimensionSpec:
    name: str
    lower: float
    upper: float
    kind: str = "continuous"
    scale: str = "linear"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError([(self.name, f"kind must be one of {KINDS}, got {self.kind!r}")])
        if self.scale not in SCALES:
            raise ConfigError([(self.name, f"scale must be one of {SCALES}, got {self.scale!r}")])
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise ConfigError([(self.name, "bounds must be finite")])
        if not self.lower < self.upper:
            raise ConfigError([(self.name, f"lower ({self.lower}) must be < upper ({self.upper})")])
        if self.scale == "log" and self.lower <= 0:
            raise ConfigError([(self.name, "log-scale dimension needs lower > 0")])
        if self.kind == "integer" and self.upper - self.lower < 1:
            raise ConfigError([(self.name, "integer dimension needs upper - lower >= 1")])

    @property
    def internal_bounds(self) -> tuple[float, float]:
        if self.scale == "log":
            return math.log10(self.lower), math.log10(self.upper)
        return float(self.lower), float(self.upper)

    @classmethod
    def from_mapping(cls, data: Mapping) -> DimensionSpec:
        scale = data.get("scale", "linear")
        if scale == "logarithmic":
            scale = "log"
        return cls(
            name=data["name"],
            lower=float(data["lower"]),
            upper=float(data["upper"]),
            kind=data.get("kind", "continuous"),
            scale=scale,
        )


@dataclass(frozen=True)
class SearchSpace:
    dims: tuple[DimensionSpec, ...]
    lower: np.ndarray = field(init=False, repr=False, compare=False)
    upper: np.ndarray = field(init=False, repr=False, compare=False)

    def __init__(self, dims: Iterable[DimensionSpec]):
        dims = tuple(dims)
        if not dims:
            raise ConfigError([("space", "at least one dimension is required")])
        names = [d.name for d in dims]
        dupes = sorted({n for n in names if names.count(n) > 1})
        if dupes:
            raise ConfigError([("space", f"duplicate dimension names: {dupes}")])
        object.__setattr__(self, "dims", dims)
        lo, hi = zip(*(d.internal_bounds for d in dims))
        lower = np.array(lo, dtype=float)
        upper = np.array(hi, dtype=float)
        lower.flags.writeable = False
        upper.flags.writeable = False
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def d(self) -> int:
        return len(self.dims)

    @property
    def names(self) -> list[str]:
        return [dim.name for dim in self.dims]

    def __len__(self) -> int:
        return len(self.dims)

    def check_shape(self, v, what="vector") -> np.ndarray:
        arr = np.asarray(v, dtype=float)
        if arr.shape != (self.d,):
            raise DomainError(f"{what} has shape {arr.shape}, expected ({self.d},)")
        return arr

    def contains(self, v) -> bool:
        arr = self.check_shape(v)
        return bool(np.all(np.isfinite(arr)) and np.all(arr >= self.lower) and np.all(arr <= self.upper))

    @classmethod
    def from_config(cls, entries: Sequence[Mapping]) -> SearchSpace:
        return cls(DimensionSpec.from_mapping(e) for e in entries)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def to_internal(space: SearchSpace, natural) -> np.ndarray:
    """Map natural-unit values into internal coordinates."""
    if isinstance(natural, Mapping):
        natural = [natural[name] for name in space.names]
    nat = space.check_shape(natural, "natural vector")
    out = np.empty(space.d)
    for i, dim in enumerate(space.dims):
        x = nat[i]
        if not (dim.lower <= x <= dim.upper):
            raise DomainError(f"dimension {dim.name!r}: value {x!r} outside [{dim.lower}, {dim.upper}]")
        out[i] = math.log10(x) if dim.scale == "log" else x
    return _frozen(out)


def _round_half_away(x: float) -> float:
    return math.copysign(math.floor(abs(x) + 0.5), x)


def to_natural(space: SearchSpace, v) -> list[float | int]:
    """Map an internal vector back to natural units (ints for integer dims)."""
    arr = space.check_shape(v)
    out: list[float | int] = []
    for i, dim in enumerate(space.dims):
        x = float(arr[i])
        if dim.scale == "log":
            x = 10.0**x
        if dim.kind == "integer":
            x = _round_half_away(x)
            # integer bounds may themselves be fractional
            lo, hi = math.ceil(dim.lower), math.floor(dim.upper)
            out.append(int(min(max(x, lo), hi)))
        else:
            out.append(min(max(x, dim.lower), dim.upper))
    return out


def natural_dict(space: SearchSpace, v) -> dict[str, float | int]:
    return dict(zip(space.names, to_natural(space, v)))


def sample(space: SearchSpace, rng: np.random.Generator) -> np.ndarray:
    """Uniform draw over the internal box (log-uniform for log dims)."""
    u = rng.random(space.d)
    width = space.upper - space.lower
    return _frozen(np.minimum(space.lower + u * width, space.upper))


def sample_stratified(space: SearchSpace, n: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Latin-hypercube draw of ``n`` vectors.

    Each dimension's internal interval is cut into ``n`` equal strata and every
    stratum is used by exactly one of the returned vectors.  With ``n == 1``
    the stream is consumed exactly as :func:`sample` would.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    u = rng.random((n, space.d))
    if n == 1:
        strata = np.zeros((1, space.d), dtype=int)
    else:
        strata = np.stack([rng.permutation(n) for _ in range(space.d)], axis=1)
    width = space.upper - space.lower
    pts = space.lower + width * (strata + u) / n
    pts = np.minimum(pts, space.upper)
    return [_frozen(row.copy()) for row in pts]


def clamp(space: SearchSpace, v) -> np.ndarray:
    """Project onto the internal box."""
    arr = space.check_shape(v)
    if not np.all(np.isfinite(arr)):
        bad = [space.names[i] for i in np.flatnonzero(~np.isfinite(arr))]
        raise NumericError(f"non-finite component(s) in {bad}")
    return _frozen(np.clip(arr, space.lower, space.upper))


def zeros(space: SearchSpace) -> np.ndarray:
    return _frozen(np.zeros(space.d))
