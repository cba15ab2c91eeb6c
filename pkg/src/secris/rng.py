"""Counter-based random streams.

All randomness in the package flows through Philox keyed by
(master_seed, stream_id). Draws are addressed by absolute position in the
stream, so any contiguous partition of a draw range reproduces the serial
sequence bit-for-bit (workers can split a Monte Carlo run without
coordination).

Philox4x64 emits 4 x 64-bit words per counter tick and ``advance`` moves the
counter in whole ticks, so arbitrary word offsets are reached by advancing
whole blocks and discarding the remainder.
"""

from __future__ import annotations

import numpy as np

# Stream tags: keep distinct per purpose so seeds never collide across uses.
STREAM_SCENARIO = 1
STREAM_EVE = 2
STREAM_PHASE_INIT = 3

_WORDS_PER_TICK = 4


def _as_entropy(seed) -> tuple[int, ...]:
    if isinstance(seed, (int, np.integer)):
        return (int(seed),)
    return tuple(int(s) for s in seed)


def stream_key(seed, stream_id: int) -> np.ndarray:
    """128-bit Philox key for (seed, stream_id)."""
    ss = np.random.SeedSequence(_as_entropy(seed) + (int(stream_id),))
    return ss.generate_state(2, np.uint64)


def uniforms(seed, stream_id: int, word_offset: int, count: int) -> np.ndarray:
    """`count` uniforms in [0, 1) starting at absolute word `word_offset`."""
    bg = np.random.Philox(key=stream_key(seed, stream_id))
    ticks, rem = divmod(int(word_offset), _WORDS_PER_TICK)
    if ticks:
        bg.advance(ticks)
    gen = np.random.Generator(bg)
    if rem:
        gen.bytes(rem * 8)  # discard to reach the exact word
    return gen.random(count)


def complex_normals(seed, stream_id: int, word_offset: int, count: int) -> np.ndarray:
    """`count` i.i.d. CN(0, 1) samples at a fixed stream position.

    Box-Muller from exactly two uniforms per sample keeps word consumption
    fixed (2 words each), which the partition contract relies on.
    """
    u = uniforms(seed, stream_id, word_offset, 2 * count)
    u1 = u[0::2]
    u2 = u[1::2]
    r = np.sqrt(-np.log1p(-u1))  # 1 - u1 in (0, 1], no log(0)
    return r * np.exp(2j * np.pi * u2)


def words_per_eve_draw(m: int, n: int) -> int:
    """Stream words consumed by one joint (h_AE, h_IE) draw."""
    return 2 * (m + n)
