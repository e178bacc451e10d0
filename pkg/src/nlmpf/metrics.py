"""Image quality metrics and the oracle mean-squared-error bound.

NMISE follows the convention of the variance-stabilization literature:
the mean of (fhat - f)^2 / f over pixels where the clean intensity is
positive (zero-intensity pixels carry no Poisson information and are
excluded).  PSNR uses the clean image's maximum as the peak, since the
intensity ranges of interest are not 8-bit.
"""

from __future__ import annotations

import numpy as np

from .grid import as_intensity_image, neighborhood


def mse(a, b) -> float:
    """Mean squared difference between two images of the same shape."""
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"grid mismatch: {x.shape} vs {y.shape}")
    return float(np.mean((x - y) ** 2))


def nmise(estimate, intensity) -> float:
    """Normalized MISE: mean of (fhat - f)^2 / f over the support of f.

    Raises
    ------
    ValueError
        If the images differ in shape or the clean image is identically zero.
    """
    fhat = np.asarray(estimate, dtype=np.float64)
    f = np.asarray(intensity, dtype=np.float64)
    if fhat.shape != f.shape:
        raise ValueError(f"grid mismatch: {fhat.shape} vs {f.shape}")
    support = f > 0
    if not support.any():
        raise ValueError("clean image has no positive pixels")
    return float(np.mean((fhat[support] - f[support]) ** 2 / f[support]))


def psnr(estimate, intensity) -> float:
    """Peak signal-to-noise ratio in dB, peak taken as max of the clean image.

    Returns ``inf`` for a perfect reconstruction.
    """
    fhat = np.asarray(estimate, dtype=np.float64)
    f = np.asarray(intensity, dtype=np.float64)
    if fhat.shape != f.shape:
        raise ValueError(f"grid mismatch: {fhat.shape} vs {f.shape}")
    err = mse(fhat, f)
    if err == 0.0:
        return float("inf")
    peak = float(f.max())
    return float(10.0 * np.log10(peak * peak / err))


def oracle_upper_bound(weights, similarity, intensity, center) -> float:
    """MSE upper bound g(w) = (sum w*rho)^2 + sum w^2*f for a weight map.

    ``similarity`` stores squared brightness differences, so ``rho`` is its
    square root; ``intensity`` values are read over the (reflected) window
    around ``center`` matching the weight map's radius.
    """
    w = np.asarray(weights, dtype=np.float64)
    sim = np.asarray(similarity, dtype=np.float64)
    if w.shape != sim.shape:
        raise ValueError("weights and similarity must share the window shape")
    f = as_intensity_image(intensity)
    radius = (w.shape[0] - 1) // 2
    fwin = neighborhood(f, center, radius)
    bias = float(np.sum(w * np.sqrt(sim)))
    variance = float(np.sum(w * w * fwin))
    return bias * bias + variance
