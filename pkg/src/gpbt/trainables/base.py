"""Trainable contract and the checkpoint blob format.

A blob is ``MAGIC | version:u16 | header_len:u32 | header(JSON) | payload | crc32:u32``.
The header names the trainable kind, its scalar state, and the shape of each
float64 array packed into the payload.
"""

from __future__ import annotations

import json
import struct
import zlib
from abc import ABC, abstractmethod
from typing import Mapping

import numpy as np

from gpbt.errors import DeserializationError

MAGIC = b"GPBT"
VERSION = 1
_PREFIX = struct.Struct("<4sHI")
_CRC = struct.Struct("<I")


def pack_blob(kind: str, scalars: Mapping, arrays: Mapping[str, np.ndarray]) -> bytes:
    shapes = {name: list(np.shape(a)) for name, a in arrays.items()}
    header = json.dumps({"kind": kind, "scalars": dict(scalars), "arrays": shapes}, sort_keys=True).encode()
    payload = b"".join(np.ascontiguousarray(a, dtype="<f8").tobytes() for a in arrays.values())
    body = _PREFIX.pack(MAGIC, VERSION, len(header)) + header + payload
    return body + _CRC.pack(zlib.crc32(body))


def unpack_blob(blob: bytes, expect_kind: str) -> tuple[dict, dict[str, np.ndarray]]:
    blob = bytes(blob)
    if len(blob) < _PREFIX.size + _CRC.size:
        raise DeserializationError("checkpoint blob truncated")
    body, (crc,) = blob[: -_CRC.size], _CRC.unpack(blob[-_CRC.size :])
    if zlib.crc32(body) != crc:
        raise DeserializationError("checkpoint blob corrupt or truncated (crc mismatch)")
    magic, version, hlen = _PREFIX.unpack_from(body)
    if magic != MAGIC:
        raise DeserializationError(f"bad magic tag {magic!r}")
    if version != VERSION:
        raise DeserializationError(f"unsupported checkpoint version {version}")
    try:
        header = json.loads(body[_PREFIX.size : _PREFIX.size + hlen])
    except ValueError as exc:
        raise DeserializationError(f"unreadable checkpoint header: {exc}") from None
    if header.get("kind") != expect_kind:
        raise DeserializationError(f"checkpoint is for {header.get('kind')!r}, not {expect_kind!r}")
    offset = _PREFIX.size + hlen
    arrays = {}
    for name, shape in header["arrays"].items():
        count = int(np.prod(shape, dtype=int))
        end = offset + 8 * count
        if end > len(body):
            raise DeserializationError("checkpoint payload truncated")
        arrays[name] = np.frombuffer(body[offset:end], dtype="<f8").reshape(shape).astype(float)
        offset = end
    if offset != len(body):
        raise DeserializationError("trailing bytes in checkpoint payload")
    return header["scalars"], arrays


class Trainable(ABC):
    """Inner-loop learner driven in slices by an executor.

    ``step`` returns ``(steps_done, score)``; higher scores are better.
    The random stream is not part of a checkpoint: ``restore`` only replaces
    training state, and ``reseed`` replaces the stream.
    """

    kind: str = "trainable"

    def __init__(self, rng: np.random.Generator | None = None):
        self.rng = rng if rng is not None else np.random.default_rng(0)

    @abstractmethod
    def configure(self, hyperparams: Mapping[str, float]) -> None: ...

    @abstractmethod
    def step(self, budget: int) -> tuple[int, float]: ...

    @abstractmethod
    def save(self) -> bytes: ...

    @abstractmethod
    def restore(self, blob: bytes) -> None: ...

    def reseed(self, rng: np.random.Generator) -> None:
        self.rng = rng
