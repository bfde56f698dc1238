"""Counter-based random streams.

Every uniform variate is addressed by ``(seed, stream, index)``: shot ``i`` of a
stream always sees the same numbers no matter how the shots are split into
chunks or threads.  The generator is numpy's Philox4x64, keyed by the seed and
the stream id; shot ``i`` starts at counter block ``i * blocks_per_shot``.
"""
from concurrent.futures import ThreadPoolExecutor

import numpy as np

_WORDS_PER_BLOCK = 4
_MASK64 = (1 << 64) - 1

# stream ids; one per consumer so that reusing a seed across commands does not
# correlate unrelated draws
MEASURE = 1
DPP = 2
PHASE = 3
MATRIX = 4
EXACT = 5

CHUNK = 8192


def _philox(seed: int, stream: int) -> np.random.Philox:
    key = ((stream & _MASK64) << 64) | (seed & _MASK64)
    return np.random.Philox(key=key)


def uniforms(seed: int, stream: int, start: int, count: int, width: int = 1) -> np.ndarray:
    """Uniforms in [0, 1) for shots ``start .. start+count-1``; shape (count, width)."""
    per_shot = -(-width // _WORDS_PER_BLOCK) * _WORDS_PER_BLOCK
    bg = _philox(seed, stream)
    if start:
        bg.advance(start * per_shot // _WORDS_PER_BLOCK)
    out = np.random.Generator(bg).random(count * per_shot).reshape(count, per_shot)
    return out[:, :width]


def generator(seed: int, stream: int = MATRIX) -> np.random.Generator:
    """Plain numpy Generator for building random test inputs from a seed."""
    return np.random.Generator(_philox(seed, stream))


def map_chunks(fn, shots: int, threads: int = 1, chunk: int = CHUNK) -> list:
    """Apply ``fn(start, count)`` over fixed-size shot chunks, results in shot order.

    Chunk boundaries depend only on ``chunk``, never on ``threads``.
    """
    spans = [(s, min(chunk, shots - s)) for s in range(0, shots, chunk)]
    if threads <= 1 or len(spans) == 1:
        return [fn(s, c) for s, c in spans]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda sc: fn(*sc), spans))


def sample_from_cdf(cdf: np.ndarray, shots: int, seed: int, stream: int = MEASURE,
                    threads: int = 1) -> np.ndarray:
    """Inverse-CDF sampling of outcome indices; ``cdf`` is cumulative, last entry = total."""
    total = cdf[-1]

    def work(start, count):
        u = uniforms(seed, stream, start, count)[:, 0] * total
        idx = np.searchsorted(cdf, u, side="right")
        return np.minimum(idx, len(cdf) - 1)

    parts = map_chunks(work, shots, threads)
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
