"""Reproducible random streams and complex Gaussian sampling.

Every stream is a Philox-4x64 counter-based generator keyed by the master
seed, with the stream id placed in the most significant counter word.  Two
streams with different ids therefore walk disjoint counter ranges (each may
draw up to 2**192 blocks), and stream ``k`` never depends on how many other
streams were created before it.

Gaussians come from the uniform stream through the Box-Muller transform; for
a complex ``N_C(0, s2)`` variate the radius and angle pair maps directly to
``sqrt(-s2 * ln u1) * exp(2 pi i u2)``.
"""
from __future__ import annotations

import numpy as np

__all__ = [
    "RngStream",
    "substream",
    "sample_complex_gaussian",
    "complex_gaussian_array",
    "sample_matrix",
    "sample_matrices",
]

_MASK64 = (1 << 64) - 1


class RngStream:
    """A single-owner random stream identified by ``(master_seed, stream_id)``."""

    __slots__ = ("master_seed", "stream_id", "_bitgen")

    def __init__(self, master_seed: int, stream_id: int):
        self.master_seed = int(master_seed) & _MASK64
        self.stream_id = int(stream_id) & _MASK64
        self._bitgen = np.random.Philox(
            key=np.array([self.master_seed, 0], dtype=np.uint64),
            counter=np.array([0, 0, 0, self.stream_id], dtype=np.uint64),
        )

    def __repr__(self):
        return f"RngStream(master_seed={self.master_seed}, stream_id={self.stream_id})"

    def raw(self, n: int) -> np.ndarray:
        """Next ``n`` raw 64-bit outputs."""
        return self._bitgen.random_raw(n)

    def uniform(self, n: int) -> np.ndarray:
        """``n`` doubles in ``(0, 1]`` with 53 random bits each."""
        bits = self._bitgen.random_raw(n) >> np.uint64(11)
        return (bits.astype(np.float64) + 1.0) * (1.0 / 9007199254740992.0)


def substream(master_seed: int, trial_index: int) -> RngStream:
    if trial_index < 0:
        raise ValueError("trial_index must be nonnegative")
    return RngStream(master_seed, trial_index)


def complex_gaussian_array(s: RngStream, shape, sigma2: float = 1.0) -> np.ndarray:
    """Array of i.i.d. ``N_C(0, sigma2)`` values filled in C (row-major) order.

    Each value consumes two uniforms: the first sets the modulus, the second
    the phase.
    """
    if not sigma2 > 0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    shape = (shape,) if np.isscalar(shape) else tuple(shape)
    n = int(np.prod(shape, dtype=np.int64))
    u = s.uniform(2 * n).reshape(n, 2)
    radius = np.sqrt(-sigma2 * np.log(u[:, 0]))
    z = radius * np.exp(2j * np.pi * u[:, 1])
    return z.reshape(shape)


def sample_complex_gaussian(s: RngStream, sigma2: float = 1.0) -> complex:
    return complex(complex_gaussian_array(s, 1, sigma2)[0])


def sample_matrix(s: RngStream, r: int, sigma2: float = 1.0) -> np.ndarray:
    """An ``r x r`` matrix of i.i.d. ``N_C(0, sigma2)`` entries, drawn row by row."""
    if r < 1:
        raise ValueError("r must be at least 1")
    return complex_gaussian_array(s, (r, r), sigma2)


def sample_matrices(s: RngStream, count: int, r: int, sigma2: float = 1.0) -> np.ndarray:
    """``count`` consecutive matrices; identical to ``count`` calls of :func:`sample_matrix`."""
    if r < 1:
        raise ValueError("r must be at least 1")
    return complex_gaussian_array(s, (count, r, r), sigma2)
