"""Whole-image two-step Poisson non-local means filter.

Step 1 computes, at every pixel, the adaptive (or pixel-split) exponentially
weighted average with per-pixel bandwidth ``mu * sqrt(fbar)``.  Step 2
re-smooths low-count regions: wherever the local mean of the step-1 image
falls below ``delta``, the pixel is replaced by a Gaussian-weighted average
of its neighborhood.

The hot loop is vectorized over pixels: for each search offset the squared
difference image is formed once and the patch sums are accumulated with
exact sliding-window arithmetic (counts are integers, so the prefix sums are
exact and the result is independent of how the image is partitioned).  The
image is processed in fixed row blocks; ``n_jobs`` only schedules those
blocks across threads, so results are bit-identical for any thread count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .estimators import DEFAULT_BANDWIDTH_FLOOR, Bandwidth
from .grid import WindowSpec, as_count_image, as_intensity_image, symmetrize_pad
from .kernels import (
    KERNEL_KINDS,
    KernelChoice,
    gaussian_taps,
    gaussian_window,
    k0_shell_coeffs,
    kernel_weights,
)

_BLOCK_ROWS = 64  # fixed partition; independent of the worker count

VARIANTS = ("plain", "split")


@dataclass(frozen=True)
class FilterConfig:
    """Tunables of the two-step filter.

    ``search`` and ``patch`` are full window widths (19 means 19x19), like
    the usual way such filters are quoted; they are converted to radii
    internally.  ``d`` is the step-2 window radius in pixels, ``delta`` the
    count threshold below which step 2 smooths, ``mu`` the adaptive
    bandwidth factor, and ``h_g`` the Gaussian width used both by the
    gaussian patch kernel and by the step-2 window.
    """

    search: int = 19
    patch: int = 13
    d: int = 3
    delta: float = 15.0
    mu: float = 1.0
    h_g: float = 2.5
    kernel: str = "k0"
    variant: str = "plain"

    def __post_init__(self):
        for name, width in (("search", self.search), ("patch", self.patch)):
            if width < 1 or width % 2 == 0:
                raise ValueError(f"{name} width must be odd and >= 1, got {width}")
        if self.d < 0:
            raise ValueError("step-2 radius d must be nonnegative")
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")
        if self.mu <= 0:
            raise ValueError("mu must be positive")
        if self.h_g <= 0:
            raise ValueError("h_g must be positive")
        if self.kernel not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel {self.kernel!r}; choose from {KERNEL_KINDS}")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; choose from {VARIANTS}")
        if self.variant == "split" and (self.search < 3 or self.patch < 3):
            raise ValueError("split variant needs search and patch widths >= 3")

    @property
    def search_radius(self) -> int:
        return (self.search - 1) // 2

    @property
    def patch_radius(self) -> int:
        return (self.patch - 1) // 2

    @property
    def window(self) -> WindowSpec:
        return WindowSpec(self.search_radius, self.patch_radius)

    @property
    def kernel_choice(self) -> KernelChoice:
        if self.kernel == "gaussian":
            return KernelChoice.gaussian(self.h_g)
        return KernelChoice(self.kernel)

    def with_overrides(self, **kwargs) -> "FilterConfig":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class MetricsReport:
    """Quality summary of a reconstruction against the clean image."""

    nmise: float
    psnr: float
    mse: float
    runtime_ms: int = 0


def nlmpf_step1(counts, cfg: FilterConfig, n_jobs: int | None = 1) -> np.ndarray:
    """First filtering pass: per-pixel adaptive weighted average of the counts."""
    y = as_count_image(counts)
    n = y.shape[0]
    nh, ne = cfg.search_radius, cfg.patch_radius
    pad = nh + ne
    if pad > n:
        raise ValueError(f"search+patch radius {pad} exceeds image side {n}")
    ypad = symmetrize_pad(y.astype(np.float64), pad)
    accum = _kernel_accumulator(cfg)

    def block(r0: int, r1: int) -> np.ndarray:
        view = ypad[r0 : r1 + 2 * pad, :]
        if cfg.variant == "split":
            return _filter_block_split(view, r1 - r0, n, nh, ne, cfg.mu)
        return _filter_block(view, r1 - r0, n, nh, ne, accum, mu=cfg.mu)

    return _map_blocks(n, block, n_jobs)


def nlmpf_step2(step1_image, cfg: FilterConfig) -> np.ndarray:
    """Post-smoothing pass: Gaussian re-average where the local mean is low.

    Pixels whose ``(2d+1)^2`` neighborhood mean of the step-1 image is at
    least ``delta`` are returned unchanged, bit for bit.
    """
    f1 = np.asarray(step1_image, dtype=np.float64)
    d = cfg.d
    if d == 0:
        return f1.copy()
    n_rows, n_cols = f1.shape
    pad = symmetrize_pad(f1, d)
    gw = gaussian_window(d, cfg.h_g)
    gsum = gw.sum()
    total = np.zeros_like(f1)
    smooth_num = np.zeros_like(f1)
    for a in range(-d, d + 1):
        for b in range(-d, d + 1):
            shifted = pad[d + a : d + a + n_rows, d + b : d + b + n_cols]
            total += shifted
            smooth_num += gw[a + d, b + d] * (shifted - f1)
    mean = total / (2 * d + 1) ** 2
    return np.where(mean < cfg.delta, f1 + smooth_num / gsum, f1)


def denoise(counts, cfg: FilterConfig | None = None, n_jobs: int | None = 1) -> np.ndarray:
    """Full two-step filter: step 2 applied to the step-1 image."""
    if cfg is None:
        cfg = FilterConfig()
    return nlmpf_step2(nlmpf_step1(counts, cfg, n_jobs=n_jobs), cfg)


def classic_nlm_image(
    counts,
    search: int = 19,
    patch: int = 7,
    kernel: KernelChoice | None = None,
    h: float = 1.0,
    n_jobs: int | None = 1,
) -> np.ndarray:
    """Whole-image classic non-local means baseline (no noise compensation)."""
    if h <= 0:
        raise ValueError("bandwidth must be positive")
    y = as_count_image(counts)
    n = y.shape[0]
    nh, ne = (search - 1) // 2, (patch - 1) // 2
    pad = nh + ne
    if pad > n:
        raise ValueError(f"search+patch radius {pad} exceeds image side {n}")
    kernel = kernel or KernelChoice.k0()
    cfg = FilterConfig(search=search, patch=patch, kernel=kernel.kind,
                       h_g=kernel.h_g if kernel.h_g else 1.0, d=0)
    ypad = symmetrize_pad(y.astype(np.float64), pad)
    accum = _kernel_accumulator(cfg)

    def block(r0: int, r1: int) -> np.ndarray:
        view = ypad[r0 : r1 + 2 * pad, :]
        return _filter_block(view, r1 - r0, n, nh, ne, accum, const_h2=h * h)

    return _map_blocks(n, block, n_jobs)


def oracle_image(intensity, counts, search: int, bandwidth: Bandwidth, n_jobs: int | None = 1) -> np.ndarray:
    """Whole-image oracle estimate: weights from the clean image.

    Research tool; requires the clean intensity.  With an adaptive bandwidth
    the per-pixel H^2 uses the window mean of the counts.
    """
    f = as_intensity_image(intensity)
    y = as_count_image(counts)
    if f.shape != y.shape:
        raise ValueError(f"grid mismatch: {f.shape} vs {y.shape}")
    n = y.shape[0]
    nh = (search - 1) // 2
    if search < 1 or search % 2 == 0:
        raise ValueError("search width must be odd and >= 1")
    if nh > n:
        raise ValueError("search radius exceeds image side")
    fpad = symmetrize_pad(f, nh)
    ypad = symmetrize_pad(y.astype(np.float64), nh)

    def block(r0: int, r1: int) -> np.ndarray:
        nr = r1 - r0
        fv = fpad[r0 : r1 + 2 * nh, :]
        yv = ypad[r0 : r1 + 2 * nh, :]
        f0 = fv[nh : nh + nr, nh : nh + n]
        y0 = yv[nh : nh + nr, nh : nh + n]
        if bandwidth.mode == "adaptive":
            wsum = _box_sum(yv, 2 * nh + 1)
            h2 = np.maximum(bandwidth.value * np.sqrt(wsum / (2 * nh + 1) ** 2),
                            bandwidth.floor**2)
        else:
            h2 = bandwidth.squared()
        num = np.zeros((nr, n))
        den = np.zeros((nr, n))
        for a in range(-nh, nh + 1):
            for b in range(-nh, nh + 1):
                fs = fv[nh + a : nh + a + nr, nh + b : nh + b + n]
                ys = yv[nh + a : nh + a + nr, nh + b : nh + b + n]
                w = np.exp(-((fs - f0) ** 2) / h2)
                num += w * (ys - y0)
                den += w
        return y0 + num / den

    return _map_blocks(n, block, n_jobs)


# ---------------------------------------------------------------------------
# block engine


def _map_blocks(n: int, block_fn, n_jobs: int | None) -> np.ndarray:
    blocks = [(a, min(a + _BLOCK_ROWS, n)) for a in range(0, n, _BLOCK_ROWS)]
    if n_jobs is None:
        n_jobs = os.cpu_count() or 1
    if n_jobs <= 1 or len(blocks) == 1:
        parts = [block_fn(a, b) for a, b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            parts = list(pool.map(lambda ab: block_fn(*ab), blocks))
    return parts[0] if len(parts) == 1 else np.vstack(parts)


def _filter_block(view, nr, nc, nh, ne, accum, mu=None, const_h2=None):
    """Adaptive or constant-bandwidth filtering of one row block.

    ``view`` is the padded rows covering the block with margin nh+ne on all
    sides.  With ``mu`` set, the similarity subtracts twice the local mean,
    clips at zero, and uses the adaptive bandwidth; with ``const_h2`` the raw
    distance is used as-is (classic NLM).
    """
    pad = nh + ne
    y0 = view[pad : pad + nr, pad : pad + nc]
    if mu is not None:
        m_search = (2 * nh + 1) ** 2
        fbar = _box_sum(view[ne : ne + nr + 2 * nh, ne : ne + nc + 2 * nh], 2 * nh + 1) / m_search
        h2 = np.maximum(mu * np.sqrt(fbar), DEFAULT_BANDWIDTH_FLOOR**2)
    a_slab = view[nh : nh + nr + 2 * ne, nh : nh + nc + 2 * ne]
    num = np.zeros((nr, nc))
    den = np.zeros((nr, nc))
    for dy in range(-nh, nh + 1):
        for dx in range(-nh, nh + 1):
            b_slab = view[nh + dy : nh + dy + nr + 2 * ne, nh + dx : nh + dx + nc + 2 * ne]
            d2 = (a_slab - b_slab) ** 2
            dist = accum(d2, nr, nc)
            if mu is not None:
                sim = np.maximum(dist - 2.0 * fbar, 0.0)
                w = np.exp(-sim / h2)
            else:
                w = np.exp(-dist / const_h2)
            ys = view[pad + dy : pad + dy + nr, pad + dx : pad + dx + nc]
            num += w * (ys - y0)
            den += w
    return y0 + num / den


def _filter_block_split(view, nr, nc, nh, ne, mu):
    """Pixel-split filtering of one row block.

    Patch distances average odd-parity patch offsets; the local mean uses
    odd-parity window pixels; the output averages even-parity window pixels.
    """
    pad = nh + ne
    y0 = view[pad : pad + nr, pad : pad + nc]
    odd_window = [(a, b) for a in range(-nh, nh + 1) for b in range(-nh, nh + 1)
                  if (a + b) % 2 == 1]
    fbar = np.zeros((nr, nc))
    for a, b in odd_window:
        fbar += view[pad + a : pad + a + nr, pad + b : pad + b + nc]
    fbar /= len(odd_window)
    h2 = np.maximum(mu * np.sqrt(fbar), DEFAULT_BANDWIDTH_FLOOR**2)

    odd_patch = [(u, v) for u in range(-ne, ne + 1) for v in range(-ne, ne + 1)
                 if (u + v) % 2 == 1]
    a_slab = view[nh : nh + nr + 2 * ne, nh : nh + nc + 2 * ne]
    num = np.zeros((nr, nc))
    den = np.zeros((nr, nc))
    for dy in range(-nh, nh + 1):
        for dx in range(-nh, nh + 1):
            if (dy + dx) % 2 == 1:
                continue
            b_slab = view[nh + dy : nh + dy + nr + 2 * ne, nh + dx : nh + dx + nc + 2 * ne]
            d2 = (a_slab - b_slab) ** 2
            dist = np.zeros((nr, nc))
            for u, v in odd_patch:
                dist += d2[ne + u : ne + u + nr, ne + v : ne + v + nc]
            dist /= len(odd_patch)
            sim = np.maximum(dist - 2.0 * fbar, 0.0)
            w = np.exp(-sim / h2)
            ys = view[pad + dy : pad + dy + nr, pad + dx : pad + dx + nc]
            num += w * (ys - y0)
            den += w
    return y0 + num / den


def _kernel_accumulator(cfg: FilterConfig):
    """Build the per-offset patch-distance accumulator for cfg's kernel.

    Returns a function mapping the squared-difference slab (nr+2ne, nc+2ne)
    to the kernel-normalized patch distance of shape (nr, nc).
    """
    ne = cfg.patch_radius
    if ne == 0:
        return lambda d2, nr, nc: d2
    if cfg.kernel == "rect":
        m = (2 * ne + 1) ** 2

        def accum_rect(d2, nr, nc):
            return _box_sum(d2, 2 * ne + 1) / m

        return accum_rect
    if cfg.kernel == "k0":
        coeffs = k0_shell_coeffs(ne)
        total = kernel_weights(KernelChoice.k0(), ne).sum()

        def accum_k0(d2, nr, nc):
            pre = _prefix2d(d2)
            acc = None
            for k in range(1, ne + 1):
                box = _box_from_prefix(pre, 2 * k + 1, ne - k)
                acc = coeffs[k - 1] * box if acc is None else acc + coeffs[k - 1] * box
            return acc / total

        return accum_k0
    taps = gaussian_taps(ne, cfg.h_g)
    total = kernel_weights(KernelChoice.gaussian(cfg.h_g), ne).sum()

    def accum_gauss(d2, nr, nc):
        tmp = np.zeros((nr, d2.shape[1]))
        for i, t in enumerate(taps):
            tmp += t * d2[i : i + nr, :]
        out = np.zeros((nr, nc))
        for j, t in enumerate(taps):
            out += t * tmp[:, j : j + nc]
        return out / total

    return accum_gauss


def _prefix2d(a: np.ndarray) -> np.ndarray:
    """Zero-bordered 2D prefix sums; exact when ``a`` is integer-valued."""
    p = np.zeros((a.shape[0] + 1, a.shape[1] + 1))
    np.cumsum(a, axis=0, out=p[1:, 1:])
    np.cumsum(p[1:, 1:], axis=1, out=p[1:, 1:])
    return p


def _box_from_prefix(pre: np.ndarray, width: int, margin: int) -> np.ndarray:
    """Window sums of the given width, skipping ``margin`` cells on each side."""
    rhi = slice(margin + width, pre.shape[0] - margin)
    rlo = slice(margin, pre.shape[0] - margin - width)
    chi = slice(margin + width, pre.shape[1] - margin)
    clo = slice(margin, pre.shape[1] - margin - width)
    return pre[rhi, chi] - pre[rlo, chi] - pre[rhi, clo] + pre[rlo, clo]


def _box_sum(a: np.ndarray, width: int) -> np.ndarray:
    """Valid-mode 2D sliding-window sums; exact when ``a`` is integer-valued."""
    return _box_from_prefix(_prefix2d(a), width, 0)
