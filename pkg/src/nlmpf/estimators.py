"""Pointwise estimators: classic NLM, oracle, adaptive, and split-adaptive.

Every estimator is an exponentially weighted average of the observed counts
over a search window; the variants differ only in the similarity map that
drives the weights and in the set of window pixels averaged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import WindowSpec, as_count_image, as_intensity_image, neighborhood
from .kernels import KernelChoice
from .similarity import (
    estimated_similarity,
    local_mean,
    oracle_similarity,
    split_estimated_similarity,
    split_local_mean,
)

#: smallest admissible squared bandwidth; keeps the exponential weights
#: defined on completely dark regions
DEFAULT_BANDWIDTH_FLOOR = 1e-3


@dataclass(frozen=True)
class Bandwidth:
    """Filtering bandwidth H^2 used in the exponential weights.

    ``constant`` mode evaluates to ``H**2``; ``adaptive`` mode to
    ``mu * sqrt(fbar)`` where ``fbar`` is a local mean of the counts.  Either
    way the result is clamped below by ``floor**2 > 0``.
    """

    mode: str
    value: float
    floor: float = DEFAULT_BANDWIDTH_FLOOR

    def __post_init__(self):
        if self.mode not in ("constant", "adaptive"):
            raise ValueError(f"unknown bandwidth mode {self.mode!r}")
        if self.value <= 0:
            raise ValueError("bandwidth value must be positive")
        if self.floor <= 0:
            raise ValueError("bandwidth floor must be positive")

    @classmethod
    def constant(cls, h: float, floor: float = DEFAULT_BANDWIDTH_FLOOR) -> "Bandwidth":
        return cls("constant", float(h), floor)

    @classmethod
    def adaptive(cls, mu: float, floor: float = DEFAULT_BANDWIDTH_FLOOR) -> "Bandwidth":
        return cls("adaptive", float(mu), floor)

    def squared(self, fbar: float | None = None) -> float:
        if self.mode == "constant":
            return max(self.value**2, self.floor**2)
        if fbar is None:
            raise ValueError("adaptive bandwidth needs the local mean fbar")
        return max(self.value * np.sqrt(fbar), self.floor**2)


def exp_weights(similarity: np.ndarray, h2: float) -> np.ndarray:
    """Normalized exponential weights exp(-sim/h2) / sum(exp(-sim/h2)).

    ``similarity`` entries of ``+inf`` receive weight exactly zero, so maps
    defined on a subset of the window normalize over that subset.  The
    smallest similarity (zero at the center for all maps produced here) gets
    the largest weight.
    """
    if h2 <= 0:
        raise ValueError("squared bandwidth must be positive")
    sim = np.asarray(similarity, dtype=np.float64)
    # shifting by the minimum keeps at least one weight at 1, so the
    # normalizer can never underflow to zero
    e = np.exp(-(sim - sim.min()) / h2)
    return e / e.sum()


def weighted_average(weights: np.ndarray, values: np.ndarray, anchor: float) -> float:
    """Convex combination sum(w*v) computed as anchor + sum(w*(v - anchor)).

    The anchored form makes constant inputs exact fixed points and turns an
    integer shift of all values into an exact shift of the result.
    """
    w = np.asarray(weights, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    return float(anchor + np.sum(w * (v - anchor)))


def oracle_estimate(intensity, counts, center, spec: WindowSpec, bandwidth: Bandwidth) -> float:
    """Oracle estimate at ``center``: weights from the clean image's similarity.

    The clean image enters only through the similarity map; the average runs
    over the observed counts.  Uncomputable in practice, used as a benchmark.
    """
    f = as_intensity_image(intensity)
    y = as_count_image(counts)
    if f.shape != y.shape:
        raise ValueError(f"grid mismatch: {f.shape} vs {y.shape}")
    sim = oracle_similarity(f, center, spec)
    fbar = None
    if bandwidth.mode == "adaptive":
        fbar = local_mean(y, center, spec.search_radius_px)
    w = exp_weights(sim, bandwidth.squared(fbar))
    win = neighborhood(y, center, spec.search_radius_px).astype(np.float64)
    return weighted_average(w, win, float(y[center]))


def adaptive_estimate(
    counts,
    center,
    spec: WindowSpec,
    kernel: KernelChoice,
    bandwidth: Bandwidth,
    fbar: float | None = None,
) -> float:
    """Adaptive estimate at ``center`` from the observed counts alone.

    ``fbar`` defaults to the window mean of the counts; pass an explicit
    value to calibrate against a known intensity (or 0 to disable the noise
    compensation).
    """
    y = as_count_image(counts)
    if fbar is None:
        fbar = local_mean(y, center, spec.search_radius_px)
    sim = estimated_similarity(y, center, spec, kernel, fbar)
    w = exp_weights(sim, bandwidth.squared(fbar))
    win = neighborhood(y, center, spec.search_radius_px).astype(np.float64)
    return weighted_average(w, win, float(y[center]))


def split_adaptive_estimate(counts, center, spec: WindowSpec, bandwidth: Bandwidth) -> float:
    """Split estimate: weights from odd-parity data, average over even-parity pixels.

    The similarity statistic and the local mean use only pixels at odd-parity
    offsets, making the weights independent of the averaged samples.
    """
    y = as_count_image(counts)
    sim = split_estimated_similarity(y, center, spec)
    fbar = split_local_mean(y, center, spec.search_radius_px)
    w = exp_weights(sim, bandwidth.squared(fbar))
    win = neighborhood(y, center, spec.search_radius_px).astype(np.float64)
    return weighted_average(w, win, float(y[center]))


def classic_nlm(counts, center, spec: WindowSpec, kernel: KernelChoice, h: float) -> float:
    """Classic non-local means estimate at ``center``.

    Kernel-normalized patch distance without the Poisson noise compensation
    and without clipping, plugged into exponential weights with constant
    bandwidth ``h``.
    """
    if h <= 0:
        raise ValueError("bandwidth must be positive")
    y = as_count_image(counts)
    sim = estimated_similarity(y, center, spec, kernel, fbar=0.0, positive_part=False)
    w = exp_weights(sim, h * h)
    win = neighborhood(y, center, spec.search_radius_px).astype(np.float64)
    return weighted_average(w, win, float(y[center]))
