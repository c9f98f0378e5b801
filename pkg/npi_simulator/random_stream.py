import struct

import numpy as np

from errors import DomainError

UINT64_MAX = 2**64 - 1

# seed, stream_id, counter[4], key[2], buffer[4], buffer_pos, has_uint32, uinteger
CURSOR_LAYOUT = struct.Struct("<2Q4Q2Q4QqqQ")


class RandomStream:
    """Counter-based (Philox) noise stream keyed by (seed, stream_id).

    Identical (seed, stream_id, cursor) reproduces identical draws; distinct
    stream ids map to distinct Philox keys through SeedSequence spawn keys.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        seed = int(seed)
        stream_id = int(stream_id)
        if not (0 <= seed <= UINT64_MAX and 0 <= stream_id <= UINT64_MAX):
            raise DomainError("seed and stream_id must be 64-bit unsigned integers")

        self.seed = seed
        self.stream_id = stream_id
        sequence = np.random.SeedSequence(entropy=seed, spawn_key=(stream_id,))
        self.bit_generator = np.random.Philox(sequence)
        self.generator = np.random.Generator(self.bit_generator)

    def normal(self, size) -> np.ndarray:
        return self.generator.standard_normal(size)

    def cursor(self) -> dict:
        state = self.bit_generator.state
        return {
            "bit_generator": state["bit_generator"],
            "state": {
                "counter": state["state"]["counter"].copy(),
                "key": state["state"]["key"].copy(),
            },
            "buffer": state["buffer"].copy(),
            "buffer_pos": int(state["buffer_pos"]),
            "has_uint32": int(state["has_uint32"]),
            "uinteger": int(state["uinteger"]),
        }

    def restore(self, cursor: dict):
        self.bit_generator.state = cursor

    def copy(self) -> "RandomStream":
        clone = RandomStream(self.seed, self.stream_id)
        clone.restore(self.cursor())
        return clone

    def to_bytes(self) -> bytes:
        cursor = self.cursor()
        return CURSOR_LAYOUT.pack(
            self.seed,
            self.stream_id,
            *(int(value) for value in cursor["state"]["counter"]),
            *(int(value) for value in cursor["state"]["key"]),
            *(int(value) for value in cursor["buffer"]),
            cursor["buffer_pos"],
            cursor["has_uint32"],
            cursor["uinteger"],
        )

    @classmethod
    def from_bytes(cls, payload: bytes) -> "RandomStream":
        values = CURSOR_LAYOUT.unpack(payload)
        stream = cls(values[0], values[1])
        stream.restore(
            {
                "bit_generator": "Philox",
                "state": {
                    "counter": np.array(values[2:6], dtype=np.uint64),
                    "key": np.array(values[6:8], dtype=np.uint64),
                },
                "buffer": np.array(values[8:12], dtype=np.uint64),
                "buffer_pos": values[12],
                "has_uint32": values[13],
                "uinteger": values[14],
            }
        )
        return stream

    def __eq__(self, other):
        if isinstance(other, RandomStream):
            return self.to_bytes() == other.to_bytes()
        return False

    def __repr__(self):
        return f"RandomStream[seed={self.seed}, stream_id={self.stream_id}]"
