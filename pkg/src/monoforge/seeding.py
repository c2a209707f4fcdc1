"""Deterministic per-stream RNGs.

Every randomized routine takes an explicit seed, and concurrent samplers
derive independent streams from (seed, stream-id) so results never depend
on scheduling or thread count.
"""

import hashlib
import random


def stream_rng(seed, *stream):
    """A `random.Random` keyed by (seed, *stream), stable across runs and platforms.

    The key is hashed via the repr of the tuple, so ints, strings and
    nested tuples of those all make valid stream ids.
    """
    tag = repr((seed,) + tuple(stream)).encode()
    digest = hashlib.sha256(tag).digest()
    return random.Random(int.from_bytes(digest, "big"))
