"""Deterministic random-number plumbing.

All sampling in this package is driven by counter-based Philox streams so
that every draw is a pure function of a 64-bit seed.  The uniform variate
consumed for ordered node pair ``(u, v)`` in an ``n``-node graph is element
``u * n + v`` of the stream, which lets independent workers regenerate any
slice of the pair grid with :func:`pair_uniforms` and still agree bit for
bit with a single-process run.
"""

from __future__ import annotations

import hashlib

import numpy as np

_SEED_MASK = (1 << 63) - 1


def derive_seed(master: int, *parts) -> int:
    """Derive a child seed from a master seed and a tag tuple.

    The tag is hashed with BLAKE2b (stable across processes and platforms,
    unlike the builtin ``hash``) and XOR-folded into the master seed, so
    extending an experiment grid never reshuffles previously derived seeds.
    """
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        h.update(repr(part).encode())
        h.update(b"\x1f")
    return (int(master) ^ int.from_bytes(h.digest(), "little")) & _SEED_MASK


def generator(seed: int) -> np.random.Generator:
    """A Generator over the Philox stream identified by ``seed``."""
    return np.random.Generator(np.random.Philox(key=seed & _SEED_MASK))


def pair_uniforms(seed: int, start: int, stop: int) -> np.ndarray:
    """Uniform variates ``start:stop`` of the stream for ``seed``.

    Philox advances in blocks of four 64-bit words, so the stream is
    positioned at ``4 * (start // 4)`` and the remainder is discarded.
    """
    if not 0 <= start <= stop:
        raise ValueError(f"invalid variate range [{start}, {stop})")
    bitgen = np.random.Philox(key=seed & _SEED_MASK)
    bitgen.advance(start // 4)
    gen = np.random.Generator(bitgen)
    if start % 4:
        gen.random(start % 4)
    return gen.random(stop - start)


def uniform_matrix(seed: int, n: int) -> np.ndarray:
    """The full n-by-n uniform grid, entry (u, v) = stream variate u*n+v."""
    return generator(seed).random((n, n))
