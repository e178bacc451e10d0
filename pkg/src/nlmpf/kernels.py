"""Patch-weighting kernels for the similarity distance.

Three kernels over patch offsets ``o`` with ``||o||_inf <= r``:

* ``gaussian``: exp(-||o||_2^2 / (2*h_g)) with squared distance measured in
  pixels.
* ``k0``: shell-constant weights, the value at ``j = ||o||_inf`` being
  ``sum_{k=max(1,j)}^{r} 1/(2k+1)^2``; the center shares the weight of
  shell 1.
* ``rect``: uniform 1/m over the patch.

Weights are returned unnormalized; the similarity computation divides by
their sum, so normalization lives in a single place.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KERNEL_KINDS = ("gaussian", "k0", "rect")


@dataclass(frozen=True)
class KernelChoice:
    """A kernel kind plus its width parameter (gaussian only)."""

    kind: str
    h_g: float | None = None

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}; choose from {KERNEL_KINDS}")
        if self.kind == "gaussian":
            if self.h_g is None or self.h_g <= 0:
                raise ValueError("gaussian kernel requires h_g > 0")

    @classmethod
    def gaussian(cls, h_g: float) -> "KernelChoice":
        return cls("gaussian", float(h_g))

    @classmethod
    def k0(cls) -> "KernelChoice":
        return cls("k0")

    @classmethod
    def rectangular(cls) -> "KernelChoice":
        return cls("rect")


def gaussian_taps(radius_px: int, h_g: float) -> np.ndarray:
    """1D Gaussian profile exp(-k^2/(2*h_g)) for k in [-r, r]."""
    if h_g <= 0:
        raise ValueError("h_g must be positive")
    k = np.arange(-radius_px, radius_px + 1, dtype=np.float64)
    return np.exp(-(k * k) / (2.0 * h_g))


def k0_shell_coeffs(radius_px: int) -> np.ndarray:
    """Per-shell increments 1/(2k+1)^2 for k = 1..r of the k0 kernel.

    The k0 weight of an offset at shell j is the tail sum of these
    coefficients from max(1, j).
    """
    k = np.arange(1, radius_px + 1, dtype=np.float64)
    return 1.0 / (2.0 * k + 1.0) ** 2


def kernel_weights(choice: KernelChoice, patch_radius_px: int) -> np.ndarray:
    """Unnormalized kernel weights over the (2r+1)x(2r+1) patch offsets.

    For a zero-radius patch every kernel degenerates to the single weight 1
    (the k0 tail sum would otherwise be empty).
    """
    if patch_radius_px < 0:
        raise ValueError("patch radius must be nonnegative")
    r = patch_radius_px
    if r == 0:
        return np.ones((1, 1))
    offs = np.arange(-r, r + 1)
    if choice.kind == "gaussian":
        return gaussian_window(r, choice.h_g)
    if choice.kind == "rect":
        m = (2 * r + 1) ** 2
        return np.full((2 * r + 1, 2 * r + 1), 1.0 / m)
    # k0: weight depends only on the L-inf shell index j
    jj = np.maximum.outer(np.abs(offs), np.abs(offs))
    coeffs = k0_shell_coeffs(r)
    tails = np.concatenate([np.cumsum(coeffs[::-1])[::-1], [0.0]])  # tails[k-1] = sum_{i>=k}
    return tails[np.maximum(jj, 1) - 1]


def gaussian_window(radius_px: int, h_g: float) -> np.ndarray:
    """2D Gaussian window exp(-(i^2+j^2)/(2*h_g)) used by the post-smoothing step."""
    offs = np.arange(-radius_px, radius_px + 1, dtype=np.float64)
    d2 = offs[:, None] ** 2 + offs[None, :] ** 2
    return np.exp(-d2 / (2.0 * h_g))
