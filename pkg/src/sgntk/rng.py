"""Deterministic stream-split random number generation.

Every tensor the package draws comes from its own substream, derived from a
root seed plus a tuple of labels (for example ``("W", 2)`` for the second
weight matrix).  Substreams are backed by the Philox counter-based bit
generator, so the same (seed, labels) pair yields the same numbers no matter
in which order streams are created or consumed.  Standard normals are produced
by Box-Muller on the stream's uniforms with a fixed fill order.
"""

from __future__ import annotations

import hashlib
import math

import numpy as np


def substream(seed: int, *labels) -> np.random.Generator:
    """Independent generator for the given root seed and label path."""
    text = "\x1f".join(str(label) for label in labels)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    words = tuple(int.from_bytes(digest[4 * i : 4 * i + 4], "little") for i in range(8))
    root = np.random.SeedSequence(entropy=int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=words)
    return np.random.Generator(np.random.Philox(root))


def standard_normal(gen: np.random.Generator, shape) -> np.ndarray:
    """Standard normals via Box-Muller, filled in row-major order."""
    if np.isscalar(shape):
        shape = (int(shape),)
    count = int(math.prod(shape))
    pairs = (count + 1) // 2
    u1 = gen.random(pairs)
    u2 = gen.random(pairs)
    # 1 - u1 lies in (0, 1], keeping the log finite.
    radius = np.sqrt(-2.0 * np.log1p(-u1))
    angle = 2.0 * np.pi * u2
    z = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])
    return z[:count].reshape(shape)


def normal_tensor(seed: int, shape, *labels) -> np.ndarray:
    """Standard-normal tensor drawn from the substream named by ``labels``."""
    return standard_normal(substream(seed, *labels), shape)


def derive_seed(seed: int, *labels) -> int:
    """A fresh 63-bit seed deterministically derived from seed and labels.

    Used to give every ensemble member or experiment stage its own root seed
    without correlating their streams.
    """
    text = "\x1f".join([str(int(seed) & 0xFFFFFFFFFFFFFFFF)] + [str(label) for label in labels])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little") >> 1
