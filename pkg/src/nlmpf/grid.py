"""Pixel-grid primitives: validation, mirror padding, windows and parity splits.

Images live on a square N x N grid of integer pixel indices.  All window
operations complete out-of-range pixels by mirror reflection about the image
edge ("symmetrization"), so a window of radius r always contains exactly
(2r+1)^2 pixels regardless of the center position.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def as_intensity_image(values) -> np.ndarray:
    """Validate and return a clean intensity image as a float64 array.

    Parameters
    ----------
    values : array_like
        2D square array of expected photon counts per pixel.

    Returns
    -------
    np.ndarray
        float64 copy of ``values``.

    Raises
    ------
    ValueError
        If the array is not 2D square, or contains negative or non-finite
        entries.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square 2D image, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("intensity image contains non-finite values")
    if arr.min() < 0:
        raise ValueError("intensity image contains negative values")
    return arr


def as_count_image(values) -> np.ndarray:
    """Validate and return an observed count image as an int64 array.

    Counts must be nonnegative integers (integer dtype, or floats with
    integral values).
    """
    arr = np.asarray(values)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square 2D image, got shape {arr.shape}")
    if np.issubdtype(arr.dtype, np.floating):
        if not np.all(np.isfinite(arr)) or np.any(arr != np.floor(arr)):
            raise ValueError("count image contains non-integral values")
    elif not np.issubdtype(arr.dtype, np.integer):
        raise ValueError(f"count image has non-numeric dtype {arr.dtype}")
    out = arr.astype(np.int64)
    if out.min() < 0:
        raise ValueError("count image contains negative counts")
    return out


@dataclass(frozen=True)
class WindowSpec:
    """Search-window and patch geometry, in pixel radii.

    ``search_radius_px`` is the L-infinity radius of the search window around
    a center pixel; ``patch_radius_px`` the radius of the comparison patch.
    The corresponding cardinalities are ``search_size`` (M) and
    ``patch_size`` (m).
    """

    search_radius_px: int
    patch_radius_px: int

    def __post_init__(self):
        if self.search_radius_px < 0 or self.patch_radius_px < 0:
            raise ValueError("window radii must be nonnegative")

    @property
    def search_size(self) -> int:
        return (2 * self.search_radius_px + 1) ** 2

    @property
    def patch_size(self) -> int:
        return (2 * self.patch_radius_px + 1) ** 2


@dataclass(frozen=True)
class PixelSplit:
    """Checkerboard partition of the grid relative to a center pixel.

    ``even_mask[i, j]`` is True when the offset from ``center`` has even
    coordinate sum; the center itself always belongs to the even set.
    """

    center: tuple[int, int]
    even_mask: np.ndarray

    @property
    def odd_mask(self) -> np.ndarray:
        return ~self.even_mask


def reflect_index(k: int | np.ndarray, n: int):
    """Map an index to the grid [0, n) by mirror reflection about the edges.

    Out-of-range ``k < 0`` maps to ``-k - 1`` and ``k >= n`` to ``2n - 1 - k``
    (the edge sample is not treated as the mirror axis).  Valid for
    ``-n <= k < 2n``, i.e. paddings up to the full grid side.
    """
    k = np.asarray(k)
    out = np.where(k < 0, -k - 1, k)
    out = np.where(out >= n, 2 * n - 1 - out, out)
    return out if out.ndim else int(out)


def symmetrize_pad(image: np.ndarray, pad_px: int) -> np.ndarray:
    """Extend an image by ``pad_px`` pixels on every side by mirror reflection.

    Returns an ``(R + 2*pad) x (C + 2*pad)`` array whose interior equals the
    input; the border is the reflection of the image about its edges.  The
    dtype is preserved.

    Raises
    ------
    ValueError
        If ``pad_px`` is negative or exceeds either image side.
    """
    image = np.asarray(image)
    if image.ndim != 2:
        raise ValueError("symmetrize_pad expects a 2D image")
    if pad_px < 0:
        raise ValueError("pad_px must be nonnegative")
    if pad_px > min(image.shape):
        raise ValueError(
            f"pad_px={pad_px} exceeds image side {min(image.shape)}"
        )
    if pad_px == 0:
        return image.copy()
    rows = reflect_index(np.arange(-pad_px, image.shape[0] + pad_px), image.shape[0])
    cols = reflect_index(np.arange(-pad_px, image.shape[1] + pad_px), image.shape[1])
    return image[np.ix_(rows, cols)]


def window_pixels(n: int, center: tuple[int, int], radius_px: int) -> np.ndarray:
    """Pixel coordinates of the (2r+1)^2 window around ``center``.

    Out-of-grid positions are reflected, so the result is a multiset of
    in-grid coordinates with exactly ``(2*radius_px + 1)**2`` rows, ordered
    row-major by offset.

    Returns
    -------
    np.ndarray
        Integer array of shape ((2r+1)^2, 2) of (row, col) pairs.
    """
    ci, cj = center
    if not (0 <= ci < n and 0 <= cj < n):
        raise ValueError(f"center {center} outside {n}x{n} grid")
    offs = np.arange(-radius_px, radius_px + 1)
    rows = reflect_index(ci + offs, n)
    cols = reflect_index(cj + offs, n)
    rr, cc = np.meshgrid(rows, cols, indexing="ij")
    return np.stack([rr.ravel(), cc.ravel()], axis=1)


def checkerboard_split(n: int, center: tuple[int, int]) -> PixelSplit:
    """Partition the grid by parity of the offset sum from ``center``.

    Pixels ``center + (i, j)`` with ``i + j`` even form the even set (which
    always contains the center); the rest form the odd set.
    """
    ci, cj = center
    if not (0 <= ci < n and 0 <= cj < n):
        raise ValueError(f"center {center} outside {n}x{n} grid")
    ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    even = ((ii - ci) + (jj - cj)) % 2 == 0
    return PixelSplit(center=(ci, cj), even_mask=even)


def neighborhood(image: np.ndarray, center: tuple[int, int], radius_px: int) -> np.ndarray:
    """Square neighborhood of ``center`` with reflected boundary handling.

    Equivalent to cropping ``symmetrize_pad(image, radius_px)`` around the
    center, but touches only the needed rows and columns.
    """
    ci, cj = center
    if not (0 <= ci < image.shape[0] and 0 <= cj < image.shape[1]):
        raise ValueError(f"center {center} outside image of shape {image.shape}")
    if radius_px > min(image.shape):
        raise ValueError(f"radius {radius_px} exceeds image side {min(image.shape)}")
    offs = np.arange(-radius_px, radius_px + 1)
    rows = reflect_index(ci + offs, image.shape[0])
    cols = reflect_index(cj + offs, image.shape[1])
    return image[np.ix_(rows, cols)]
