"""Counter-based random streams keyed by (master seed, run index).

Each run owns a Philox stream whose key is the pair ``(seed, run_index)``, so
ensemble members are independent without any coordination between workers.
A toss consumes exactly one double from the stream, which makes toss ``t`` of
run ``k`` addressable directly: Philox emits blocks of four 64-bit words per
counter increment, and ``Generator.random`` uses one word per double.
"""

import numpy as np

_MASK64 = (1 << 64) - 1
_WORDS_PER_BLOCK = 4


def _check_u64(value, name):
    value = int(value)
    if not 0 <= value <= _MASK64:
        raise ValueError(f"{name} must be an unsigned 64-bit integer, got {value}")
    return value


def stream(seed: int, run_index: int = 0, start: int = 0) -> np.random.Generator:
    """Generator for run ``run_index`` positioned so its next draw is toss ``start``."""
    key = np.array([_check_u64(seed, "seed"), _check_u64(run_index, "run_index")],
                   dtype=np.uint64)
    if start < 0:
        raise ValueError("start must be >= 0")
    bit_gen = np.random.Philox(key=key)
    blocks, rem = divmod(int(start), _WORDS_PER_BLOCK)
    if blocks:
        bit_gen.advance(blocks)
    gen = np.random.Generator(bit_gen)
    if rem:
        gen.random(rem)
    return gen


def uniforms(seed: int, run_index: int, count: int, start: int = 0) -> np.ndarray:
    """The ``count`` toss variates of a run starting at toss ``start``."""
    return stream(seed, run_index, start).random(count)
