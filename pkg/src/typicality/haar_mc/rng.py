"""Counter-based random numbers keyed by ``(seed, sample_index)``.

Philox4x64-10 maps a 256-bit counter and a 128-bit key to four 64-bit words
with no internal state, so any sample's random stream can be produced on its
own, in any order, on any worker. ``numpy.random.Philox`` is the same
generator but only walks a single counter sequentially; here the counters of
many samples are evaluated as one vectorised array.

Counter layout: ``(draw_block, sample_index, tag, 0)``; key ``(seed, 0)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["philox4x64", "uniforms", "complex_normals", "CounterStream"]

_M0 = np.uint64(0xD2E7470EE14C6C93)
_M1 = np.uint64(0xCA5A826395121157)
_W0 = np.uint64(0x9E3779B97F4A7C15)
_W1 = np.uint64(0xBB67AE8584CAA73B)
_MASK32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_ROUNDS = 10


def _mulhilo(a: np.uint64, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """High and low 64-bit halves of the 128-bit product ``a * b``."""
    a_lo, a_hi = a & _MASK32, a >> _S32
    b_lo, b_hi = b & _MASK32, b >> _S32
    p0 = a_lo * b_lo
    p1 = a_lo * b_hi
    p2 = a_hi * b_lo
    p3 = a_hi * b_hi
    mid = (p0 >> _S32) + (p1 & _MASK32) + (p2 & _MASK32)
    hi = p3 + (p1 >> _S32) + (p2 >> _S32) + (mid >> _S32)
    return hi, a * b


def philox4x64(counter: np.ndarray, key: tuple[int, int]) -> np.ndarray:
    """Philox4x64-10 block function.

    ``counter`` has shape ``(..., 4)`` (uint64); the result has the same shape.
    """
    ctr = np.asarray(counter, dtype=np.uint64)
    c0, c1, c2, c3 = (ctr[..., i].copy() for i in range(4))
    k0 = np.uint64(key[0] & 0xFFFFFFFFFFFFFFFF)
    k1 = np.uint64(key[1] & 0xFFFFFFFFFFFFFFFF)
    with np.errstate(over="ignore"):
        for r in range(_ROUNDS):
            if r:
                k0 = k0 + _W0
                k1 = k1 + _W1
            hi0, lo0 = _mulhilo(_M0, c0)
            hi1, lo1 = _mulhilo(_M1, c2)
            c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
    return np.stack([c0, c1, c2, c3], axis=-1)


def uniforms(seed: int, sample_index: np.ndarray, n: int, tag: int = 0) -> np.ndarray:
    """Open-interval uniforms, shape ``(len(sample_index), n)``.

    Each value uses the top 53 bits of one output word, offset by half an ulp
    so that 0 is never returned.
    """
    idx = np.asarray(sample_index, dtype=np.uint64).reshape(-1)
    blocks = -(-n // 4)
    ctr = np.zeros((idx.size, blocks, 4), dtype=np.uint64)
    ctr[..., 0] = np.arange(blocks, dtype=np.uint64)[None, :]
    ctr[..., 1] = idx[:, None]
    ctr[..., 2] = np.uint64(tag)
    words = philox4x64(ctr, (int(seed), 0)).reshape(idx.size, 4 * blocks)[:, :n]
    return ((words >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53


def complex_normals(seed: int, sample_index: np.ndarray, n: int, tag: int = 0) -> np.ndarray:
    """``n`` complex Gaussian deviates per sample by Box-Muller (two uniforms each)."""
    u = uniforms(seed, sample_index, 2 * n, tag)
    radius = np.sqrt(-2.0 * np.log(u[:, 0::2]))
    angle = 2.0 * np.pi * u[:, 1::2]
    return radius * np.exp(1j * angle)


@dataclass(frozen=True)
class CounterStream:
    """Handle for the random stream of one sample."""

    seed: int
    index: int
    tag: int = 0

    def complex_normals(self, n: int) -> np.ndarray:
        return complex_normals(self.seed, np.array([self.index]), n, self.tag)[0]
