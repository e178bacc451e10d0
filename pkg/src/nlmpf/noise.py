"""Forward model: Poisson photon counts from a clean intensity image.

Sampling uses the counter-based Philox bit generator, consuming pixels in
row-major order, so a (seed, intensity) pair always yields the same counts,
bit for bit, on any platform.  NumPy draws Poisson variates by inversion for
small means and by transformed rejection for large ones, which covers the
low-count regime efficiently.
"""

from __future__ import annotations

import numpy as np

from .grid import as_count_image, as_intensity_image

_SEED_MAX = 2**64


def sample_poisson(intensity, seed: int) -> np.ndarray:
    """Draw an independent Poisson count at every pixel.

    Parameters
    ----------
    intensity : array_like
        Clean image; each pixel is the Poisson mean of its count.
    seed : int
        64-bit unsigned seed.  Identical (intensity, seed) pairs give
        bit-identical results.

    Returns
    -------
    np.ndarray
        int64 count image, same shape as ``intensity``.  Pixels with zero
        intensity always yield zero counts.
    """
    f = as_intensity_image(intensity)
    if not isinstance(seed, (int, np.integer)) or not (0 <= int(seed) < _SEED_MAX):
        raise ValueError(f"seed must be an integer in [0, 2**64), got {seed!r}")
    rng = np.random.Generator(np.random.Philox(int(seed)))
    return rng.poisson(f).astype(np.int64)


def residual(intensity, counts) -> np.ndarray:
    """Noise image eps = Y - f, pixelwise.

    Raises
    ------
    ValueError
        If the two images have different shapes.
    """
    f = as_intensity_image(intensity)
    y = as_count_image(counts)
    if f.shape != y.shape:
        raise ValueError(f"grid mismatch: {f.shape} vs {y.shape}")
    return y.astype(np.float64) - f


def derive_seed(master_seed: int, *keys: int) -> int:
    """Derive an independent 64-bit stream seed from a master seed and keys.

    Used by the experiment harness to give every (size, trial) cell its own
    reproducible stream, independent of scheduling order.
    """
    ss = np.random.SeedSequence([int(master_seed), *[int(k) for k in keys]])
    return int(ss.generate_state(1, np.uint64)[0])
