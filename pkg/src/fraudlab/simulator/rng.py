"""
Deterministic random streams and identifier tokens.

Every subsystem draws from its own named stream derived from the run seed,
so enabling one fraud block never shifts the numbers another block sees.
"""
import hashlib
from typing import List

import numpy as np


def _stream_code(name: str) -> int:
    return int.from_bytes(hashlib.blake2b(name.encode("utf-8"), digest_size=4).digest(), "little")


def stream(seed: int, name: str) -> np.random.Generator:
    """
    Independent generator for the subsystem ``name`` under ``seed``.
    """
    sequence = np.random.SeedSequence(seed, spawn_key=(_stream_code(name),))
    return np.random.Generator(np.random.PCG64(sequence))


class TokenFactory:
    """
    Keyed 16-hex tokens standing in for hashed device IDs and IP addresses.
    Tokens depend only on (seed, namespace, index).
    """

    def __init__(self, seed: int):
        self.seed = seed
        self._key = seed.to_bytes(8, "little")

    def token(self, namespace: str, index: int) -> str:
        message = f"{namespace}:{index}".encode("utf-8")
        return hashlib.blake2b(message, key=self._key, digest_size=8).hexdigest()

    def tokens(self, namespace: str, n: int) -> List[str]:
        return [self.token(namespace, i) for i in range(n)]

    def distinct(self, namespace: str, n: int) -> List[str]:
        """
        ``n`` pairwise-distinct tokens; a collision skips to the next index.
        """
        out: List[str] = []
        seen = set()
        index = 0
        while len(out) < n:
            value = self.token(namespace, index)
            index += 1
            if value not in seen:
                seen.add(value)
                out.append(value)
        return out
