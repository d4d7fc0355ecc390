"""
Seed derivation.

A SeedStream is a master seed plus a path of (label, index) pairs. The path
is folded into a numpy SeedSequence spawn key, so identical paths give
identical generators and distinct paths give independent ones. Paths used
by the runner:

    outer repetition i          ("outer", i)
    inner repetition j          ("outer", i), ("inner", j), ("percent", k)
    probe part p                ("probe", p)
"""
import zlib
from dataclasses import dataclass

import numpy as np

MAX_SEED = 2 ** 64


def _label_key(label):
    return zlib.crc32(label.encode('utf-8'))


@dataclass(frozen=True)
class SeedStream:
    master_seed: int
    path: tuple = ()

    def __post_init__(self):
        if not 0 <= int(self.master_seed) < MAX_SEED:
            raise ValueError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")
        for label, index in self.path:
            if index < 0:
                raise ValueError(f"Seed path index must be non-negative, got ({label!r}, {index})")

    def child(self, label, index):
        return SeedStream(self.master_seed, self.path + ((label, int(index)),))

    def spawn_key(self):
        key = []
        for label, index in self.path:
            key.extend((_label_key(label), int(index)))
        return tuple(key)

    def generator(self):
        sequence = np.random.SeedSequence(entropy=int(self.master_seed), spawn_key=self.spawn_key())
        return np.random.default_rng(sequence)

    def describe(self):
        steps = '/'.join(f"{label}:{index}" for label, index in self.path)
        return f"{self.master_seed}/{steps}" if steps else str(self.master_seed)
