import logging
import struct

import numpy as np

from constants import CHECKPOINT_FORMAT_VERSION, CHECKPOINT_MAGIC
from errors import (
    CheckpointFormatError,
    CheckpointVersionError,
    SpecMismatchError,
)
from random_stream import CURSOR_LAYOUT, RandomStream
from ring_polymer import RingPolymerState
from system import SystemSpec

logger = logging.getLogger(__name__)

HEADER = struct.Struct("<4sI32s")
CLOCK = struct.Struct("<dq")
U32 = struct.Struct("<I")
U64 = struct.Struct("<Q")


class Checkpoint:
    """spec hash + ring-polymer state + format version."""

    def __init__(self, spec_hash: bytes, state: RingPolymerState, format_version: int = CHECKPOINT_FORMAT_VERSION):
        assert isinstance(spec_hash, bytes) and len(spec_hash) == 32
        assert isinstance(state, RingPolymerState)

        self.spec_hash = spec_hash
        self.state = state
        self.format_version = format_version

    def to_bytes(self) -> bytes:
        chunks = [
            HEADER.pack(CHECKPOINT_MAGIC, self.format_version, self.spec_hash),
            CLOCK.pack(self.state.time, self.state.step),
            self.state.rng.to_bytes(),
            U32.pack(2),
        ]
        for array in (self.state.positions, self.state.momenta):
            chunks.append(U32.pack(array.ndim))
            chunks.extend(U64.pack(extent) for extent in array.shape)
            chunks.append(np.ascontiguousarray(array, dtype="<f8").tobytes(order="C"))
        return b"".join(chunks)

    @classmethod
    def from_bytes(cls, payload: bytes) -> "Checkpoint":
        reader = _Reader(payload)
        magic, version, spec_hash = reader.unpack(HEADER)
        if magic != CHECKPOINT_MAGIC:
            raise CheckpointFormatError(f"bad magic bytes {magic!r}")
        if version != CHECKPOINT_FORMAT_VERSION:
            raise CheckpointVersionError(
                f"checkpoint format_version {version}, this build reads {CHECKPOINT_FORMAT_VERSION}"
            )
        time, step = reader.unpack(CLOCK)
        rng = RandomStream.from_bytes(reader.take(CURSOR_LAYOUT.size))

        (n_arrays,) = reader.unpack(U32)
        if n_arrays != 2:
            raise CheckpointFormatError(f"expected 2 arrays, found {n_arrays}")
        arrays = []
        for _ in range(n_arrays):
            (ndim,) = reader.unpack(U32)
            shape = tuple(reader.unpack(U64)[0] for _ in range(ndim))
            count = int(np.prod(shape))
            data = np.frombuffer(reader.take(8 * count), dtype="<f8")
            arrays.append(data.reshape(shape).astype(np.float64))
        if not reader.exhausted:
            raise CheckpointFormatError("trailing bytes after the last array")

        state = RingPolymerState(arrays[0], arrays[1], rng, time=time, step=step)
        return cls(spec_hash, state, version)


class _Reader:
    def __init__(self, payload: bytes):
        self.payload = payload
        self.offset = 0

    def take(self, size: int) -> bytes:
        if self.offset + size > len(self.payload):
            raise CheckpointFormatError(
                f"truncated checkpoint: needed {size} bytes at offset {self.offset}"
            )
        chunk = self.payload[self.offset : self.offset + size]
        self.offset += size
        return chunk

    def unpack(self, layout: struct.Struct):
        return layout.unpack(self.take(layout.size))

    @property
    def exhausted(self) -> bool:
        return self.offset == len(self.payload)


def save_checkpoint(state: RingPolymerState, spec: SystemSpec, path: str):
    with open(path, "wb") as fh:
        fh.write(Checkpoint(spec.spec_hash(), state).to_bytes())
    logger.debug(f"Checkpoint written to {path} at step {state.step}")


def load_checkpoint(path: str, spec: SystemSpec = None):
    """Returns (state, spec hash). With a spec given, a hash mismatch is an error."""
    with open(path, "rb") as fh:
        checkpoint = Checkpoint.from_bytes(fh.read())
    if spec is not None and checkpoint.spec_hash != spec.spec_hash():
        raise SpecMismatchError(f"checkpoint {path} was written for a different SystemSpec")
    return checkpoint.state, checkpoint.spec_hash
