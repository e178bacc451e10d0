"""Similarity maps between a center pixel and its search window.

All functions return a ``(2*Nh+1) x (2*Nh+1)`` array indexed by search
offset, entry ``[Nh + di, Nh + dj]`` referring to the window pixel at offset
``(di, dj)`` from the center.  Values are squared brightness differences
(counts^2); the estimated variants subtract the Poisson noise floor
``2*fbar`` and clip at zero.

Patch pixels that fall outside the image are supplied by mirror reflection,
so patch comparisons are defined at every center.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .grid import WindowSpec, as_count_image, as_intensity_image, neighborhood
from .kernels import KernelChoice, kernel_weights


def oracle_similarity(intensity, center, spec: WindowSpec) -> np.ndarray:
    """True squared similarity |f(x) - f(x0)|^2 over the search window."""
    f = as_intensity_image(intensity)
    win = neighborhood(f, center, spec.search_radius_px)
    return (win - f[center]) ** 2


def local_mean(counts, center, radius_px: int) -> float:
    """Mean of the counts over the (reflected) window around ``center``."""
    y = as_count_image(counts)
    win = neighborhood(y, center, radius_px)
    # integer accumulation is exact, so the result does not depend on order
    return float(win.sum()) / win.size


def split_local_mean(counts, center, radius_px: int) -> float:
    """Mean of the counts over odd-parity offsets of the window around ``center``.

    This is the plug-in mean of the pixel-split construction: it uses only
    pixels whose offset from the center has odd coordinate sum.

    Raises
    ------
    ValueError
        If the window contains no odd-parity pixel (radius 0).
    """
    y = as_count_image(counts)
    win = neighborhood(y, center, radius_px)
    mask = _odd_parity_mask(radius_px)
    if not mask.any():
        raise ValueError("window of radius 0 has no odd-parity pixels")
    return float(win[mask].sum()) / int(mask.sum())


def estimated_similarity(
    counts,
    center,
    spec: WindowSpec,
    kernel: KernelChoice,
    fbar: float,
    positive_part: bool = True,
) -> np.ndarray:
    """Kernel-smoothed estimated squared similarity over the search window.

    For each window pixel x the value is

        ( sum_u k(u) * |Y(x0+u) - Y(x+u)|^2 / sum_u k(u)  -  2*fbar )+

    with u ranging over patch offsets.  With the rectangular kernel this is
    the per-term-normalized raw estimate; ``fbar`` is the caller's estimate
    of the local intensity (see :func:`local_mean`).

    Set ``positive_part=False`` to return the statistic before clipping
    (used by the classic non-local means distance and by diagnostics).
    """
    if fbar < 0:
        raise ValueError("fbar must be nonnegative")
    diff2, _ = _patch_differences(counts, center, spec)
    kern = kernel_weights(kernel, spec.patch_radius_px)
    dist = np.einsum("abij,ij->ab", diff2, kern) / kern.sum()
    stat = dist - 2.0 * fbar
    if positive_part:
        stat = np.maximum(stat, 0.0)
    return stat


def split_estimated_similarity(
    counts,
    center,
    spec: WindowSpec,
    positive_part: bool = True,
) -> np.ndarray:
    """Pixel-split estimated squared similarity, defined on even-parity offsets.

    Patch differences are averaged over odd-parity patch offsets only and the
    noise floor uses the odd-parity window mean, so the statistic is
    independent of the even-parity pixels that the split estimator averages.
    Entries at odd-parity search offsets (outside the even set) are ``+inf``,
    which makes their exponential weights vanish.

    Raises
    ------
    ValueError
        If the patch has no odd-parity offsets (patch radius 0).
    """
    pmask = _odd_parity_mask(spec.patch_radius_px)
    if not pmask.any():
        raise ValueError("split similarity needs patch radius >= 1")
    diff2, y = _patch_differences(counts, center, spec)
    card = int(pmask.sum())
    dist = np.einsum("abij,ij->ab", diff2, pmask.astype(np.float64)) / card
    fbar = split_local_mean(y, center, spec.search_radius_px)
    stat = dist - 2.0 * fbar
    if positive_part:
        stat = np.maximum(stat, 0.0)
    stat[_odd_parity_mask(spec.search_radius_px)] = np.inf
    return stat


def _odd_parity_mask(radius_px: int) -> np.ndarray:
    offs = np.arange(-radius_px, radius_px + 1)
    return (np.add.outer(offs, offs) % 2).astype(bool)


def _patch_differences(counts, center, spec: WindowSpec):
    """Squared patch differences (SW - C)^2 for every search offset.

    Returns a ``(2Nh+1, 2Nh+1, 2Ne+1, 2Ne+1)`` array whose ``[a, b]`` slice
    holds, per patch offset, the squared difference between the patch at
    window position (a, b) and the center patch, plus the validated counts.
    """
    y = as_count_image(counts)
    nh, ne = spec.search_radius_px, spec.patch_radius_px
    hood = neighborhood(y, center, nh + ne).astype(np.float64)
    sw = sliding_window_view(hood, (2 * ne + 1, 2 * ne + 1))
    cpatch = sw[nh, nh]
    return (sw - cpatch) ** 2, y
